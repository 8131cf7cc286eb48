//! Scalar bound calculus for approximate duals obtained from perturbations
//! and from rescaling a frame against itself.

use serde::{Deserialize, Serialize};

use super::{check_pair, operator_norm, FiniteFrame, FrameBoundsEstimate, OperatorMatrix};
use crate::error::{invalid, Error, Result};

/// Bessel bound `R` of the difference system and upper bound `C` of the
/// candidate dual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationData {
    pub r: f64,
    pub c: f64,
}

/// A scalar bound on `||I - UT*||`, flagged as certifying approximate duality
/// when it is below one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCertificate {
    pub value: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPerturbation {
    pub value: f64,
    pub certified: bool,
    /// Frame bounds of the perturbed family, when an upper bound was supplied.
    pub perturbed_bounds: Option<FrameBoundsEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfScaling {
    pub scale: f64,
    pub bound: f64,
}

impl PerturbationData {
    pub fn new(r: f64, c: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(invalid("R", format!("must be finite and >= 0, got {r}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(invalid("C", format!("must be finite and >= 0, got {c}")));
        }
        Ok(Self { r, c })
    }
}

/// `{ (2/(A+B)) f_k }` is approximately dual to `{f_k}` with defect at most
/// `(B/A - 1)/(B/A + 1)`.
pub fn self_scaling_bound(bounds: FrameBoundsEstimate) -> Result<SelfScaling> {
    if !(bounds.lower > 0.0) {
        return Err(Error::NotAFrame);
    }
    let ratio = bounds.upper / bounds.lower;
    Ok(SelfScaling {
        scale: 2.0 / (bounds.lower + bounds.upper),
        bound: (ratio - 1.0) / (ratio + 1.0),
    })
}

/// Dual `{g_k}` of a nearby frame `{h_k}`: `||I - UT*|| <= sqrt(C R)`.
pub fn perturbed_dual_bound(data: PerturbationData) -> PerturbationCertificate {
    let value = (data.c * data.r).sqrt();
    PerturbationCertificate {
        value,
        certified: value < 1.0,
    }
}

/// Canonical dual of a nearby frame: `||I - UT*|| <= 1/(sqrt(A/R) - 1)`,
/// certified when `R < A/4`. With an upper bound `B` the perturbed family has
/// bounds `((sqrt A - sqrt R)^2, (sqrt B + sqrt R)^2)`.
pub fn perturbed_canonical_dual_bound(
    lower: f64,
    r: f64,
    upper: Option<f64>,
) -> Result<CanonicalPerturbation> {
    if !(lower > 0.0 && lower.is_finite()) {
        return Err(invalid("A", format!("must be positive, got {lower}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("R", format!("must be positive, got {r}")));
    }
    if r >= lower {
        return Err(Error::PerturbationTooLarge { lower, r });
    }
    let value = 1.0 / ((lower / r).sqrt() - 1.0);
    let perturbed_bounds = match upper {
        Some(b) => {
            if !(b >= lower) {
                return Err(invalid("B", format!("must satisfy B >= A, got {b}")));
            }
            Some(FrameBoundsEstimate {
                lower: (lower.sqrt() - r.sqrt()).powi(2),
                upper: (b.sqrt() + r.sqrt()).powi(2),
            })
        }
        None => None,
    };
    Ok(CanonicalPerturbation {
        value,
        certified: r < lower / 4.0,
        perturbed_bounds,
    })
}

/// Optimal `R` with `sum_k |<f, f_k - h_k>|^2 <= R ||f||^2`.
pub fn difference_bessel_bound(f: &FiniteFrame, h: &FiniteFrame) -> Result<f64> {
    check_pair(f, h)?;
    let diff = f.synthesis_matrix() - h.synthesis_matrix();
    let gram = OperatorMatrix(&diff * diff.adjoint());
    Ok(operator_norm(&gram))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_scaling_examples() {
        let s = self_scaling_bound(FrameBoundsEstimate { lower: 2.6, upper: 10.1 }).unwrap();
        assert_eq!((s.bound * 100.0).round() / 100.0, 0.59);
        assert!((s.scale - 2.0 / 12.7).abs() < 1e-15);
        let tight = self_scaling_bound(FrameBoundsEstimate { lower: 3.0, upper: 3.0 }).unwrap();
        assert_eq!(tight.bound, 0.0);
        let s = self_scaling_bound(FrameBoundsEstimate { lower: 1.0, upper: 2.0 }).unwrap();
        assert!((s.bound - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            self_scaling_bound(FrameBoundsEstimate { lower: 0.0, upper: 2.0 }),
            Err(Error::NotAFrame)
        );
    }

    #[test]
    fn perturbed_dual_examples() {
        let cert = perturbed_dual_bound(PerturbationData::new(0.0006, 1.0).unwrap());
        assert!(cert.value <= 0.025 && cert.certified);
        assert!((cert.value - 0.0245).abs() < 1e-4);
        let zero = perturbed_dual_bound(PerturbationData::new(0.0, 3.0).unwrap());
        assert_eq!(zero.value, 0.0);
        let edge = perturbed_dual_bound(PerturbationData::new(0.25, 4.0).unwrap());
        assert_eq!(edge.value, 1.0);
        assert!(!edge.certified);
        assert!(PerturbationData::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn perturbed_canonical_examples() {
        let cp = perturbed_canonical_dual_bound(2.6, 6.5e-4, None).unwrap();
        assert!(cp.certified);
        assert_eq!((cp.value * 1000.0).round() / 1000.0, 0.016);
        assert!((cp.value - 1.0 / (4000f64.sqrt() - 1.0)).abs() < 1e-15);
        let edge = perturbed_canonical_dual_bound(2.0, 0.5, None).unwrap();
        assert!((edge.value - 1.0).abs() < 1e-15);
        assert!(!edge.certified);
        let with_b = perturbed_canonical_dual_bound(4.0, 1.0, Some(9.0)).unwrap();
        let pb = with_b.perturbed_bounds.unwrap();
        assert!((pb.lower - 1.0).abs() < 1e-15 && (pb.upper - 16.0).abs() < 1e-15);
        assert!(matches!(
            perturbed_canonical_dual_bound(1.0, 1.0, None),
            Err(Error::PerturbationTooLarge { .. })
        ));
    }

    #[test]
    fn difference_bessel_examples() {
        let f = FiniteFrame::from_real(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(difference_bessel_bound(&f, &f).unwrap(), 0.0);
        let eps = 0.1;
        let h = FiniteFrame::from_real(&[vec![eps, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((difference_bessel_bound(&f, &h).unwrap() - eps * eps).abs() < 1e-15);
    }
}

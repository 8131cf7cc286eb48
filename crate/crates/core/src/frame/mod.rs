//! Finite frames in `C^d`: synthesis/analysis operators, mixed frame
//! operators, duals and duality defects.
//!
//! A frame `{f_k}` of `K` vectors is stored as its synthesis matrix
//! `T` (`d x K`, one column per vector). The inner product is linear in the
//! first argument, so the analysis operator is the conjugate transpose:
//! `(T* f)_k = <f, f_k>`.

mod perturbation;
mod serde_repr;

pub use perturbation::{
    difference_bessel_bound, perturbed_canonical_dual_bound, perturbed_dual_bound,
    self_scaling_bound, CanonicalPerturbation, PerturbationCertificate, PerturbationData,
    SelfScaling,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold separating a bijective operator from a singular one.
pub const BIJECTIVITY_TOL: f64 = 1e-10;

/// Tolerance of the adjoint-symmetry audit in [`approx_duality_defect`].
pub const AUDIT_TOL: f64 = 1e-10;

/// A finite family of vectors in `C^d`. Zero and repeated vectors are allowed;
/// being a frame is a computed property, see [`FiniteFrame::bounds`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFrame {
    synthesis: DMatrix<Complex64>,
}

/// A `d x d` operator produced by frame computations.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<Complex64>);

/// Lower and upper frame bounds `A <= B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBoundsEstimate {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBoundsEstimate {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower < 0.0 || lower > upper {
            return Err(crate::error::invalid(
                "bounds",
                format!("need 0 <= A <= B, got A = {lower}, B = {upper}"),
            ));
        }
        Ok(Self { lower, upper })
    }

    pub fn is_frame(&self) -> bool {
        self.lower > 0.0
    }
}

impl FiniteFrame {
    /// Builds a frame from `K >= 1` vectors of length `dim`.
    pub fn new(dim: usize, vectors: &[Vec<Complex64>]) -> Result<Self> {
        if dim == 0 {
            return Err(crate::error::invalid("dim", "must be positive"));
        }
        if vectors.is_empty() {
            return Err(crate::error::invalid("vectors", "need at least one vector"));
        }
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "frame vector",
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let synthesis = DMatrix::from_fn(dim, vectors.len(), |i, k| vectors[k][i]);
        Self::from_synthesis(synthesis)
    }

    /// Builds a frame from real vectors.
    pub fn from_real(vectors: &[Vec<f64>]) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        let complex: Vec<Vec<Complex64>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::new(dim, &complex)
    }

    pub fn from_synthesis(synthesis: DMatrix<Complex64>) -> Result<Self> {
        if synthesis.nrows() == 0 || synthesis.ncols() == 0 {
            return Err(crate::error::invalid(
                "synthesis",
                "need d >= 1 and K >= 1",
            ));
        }
        if synthesis.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(crate::error::invalid("synthesis", "entries must be finite"));
        }
        Ok(Self { synthesis })
    }

    pub fn dim(&self) -> usize {
        self.synthesis.nrows()
    }

    pub fn len(&self) -> usize {
        self.synthesis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn synthesis_matrix(&self) -> &DMatrix<Complex64> {
        &self.synthesis
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.synthesis.column(k).into_owned()
    }

    /// `T c = sum_k c_k f_k`.
    pub fn synthesis(&self, coeffs: &[Complex64]) -> Result<DVector<Complex64>> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                what: "coefficient sequence",
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        Ok(&self.synthesis * DVector::from_column_slice(coeffs))
    }

    /// `T* f = {<f, f_k>}`.
    pub fn analysis(&self, f: &[Complex64]) -> Result<DVector<Complex64>> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "analyzed vector",
                expected: self.dim(),
                found: f.len(),
            });
        }
        Ok(self.synthesis.adjoint() * DVector::from_column_slice(f))
    }

    /// The frame operator `S = TT*`.
    pub fn frame_operator(&self) -> OperatorMatrix {
        OperatorMatrix(&self.synthesis * self.synthesis.adjoint())
    }

    /// Optimal frame bounds: `B` is the top eigenvalue of `S`, `A` the
    /// squared smallest singular value of `T`. `A = 0` signals that the
    /// family does not span.
    pub fn bounds(&self) -> FrameBoundsEstimate {
        let sv = self.synthesis.singular_values();
        let upper = self.frame_operator().0.symmetric_eigen().eigenvalues.max().max(0.0);
        let lower = if self.len() < self.dim() {
            0.0
        } else {
            let smin = sv.min();
            if smin <= BIJECTIVITY_TOL * sv.max() {
                0.0
            } else {
                smin * smin
            }
        };
        FrameBoundsEstimate { lower, upper }
    }

    /// `{W f_k}`.
    pub fn transformed(&self, w: &OperatorMatrix) -> Result<Self> {
        if w.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "operator",
                expected: self.dim(),
                found: w.dim(),
            });
        }
        Self::from_synthesis(&w.0 * &self.synthesis)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            synthesis: &self.synthesis * Complex64::new(factor, 0.0),
        }
    }

    /// The canonical dual `{S^-1 f_k}`.
    pub fn canonical_dual(&self) -> Result<Self> {
        if !self.bounds().is_frame() {
            return Err(Error::NotAFrame);
        }
        let s = self.frame_operator().0;
        let chol = s.cholesky().ok_or(Error::NotAFrame)?;
        Self::from_synthesis(chol.solve(&self.synthesis))
    }

    /// The dual whose analysis operator is the pseudo-inverse `T†`.
    pub fn pseudo_inverse_dual(&self) -> Result<Self> {
        let bounds = self.bounds();
        if !bounds.is_frame() {
            return Err(Error::NotAFrame);
        }
        let eps = BIJECTIVITY_TOL * bounds.upper.sqrt();
        let pinv = self
            .synthesis
            .clone()
            .pseudo_inverse(eps)
            .map_err(|_| Error::NotAFrame)?;
        // (T† f)_k = <f, g_k> = g_k^H f, so row k of T† is g_k^H.
        Self::from_synthesis(pinv.adjoint())
    }
}

impl OperatorMatrix {
    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                what: "square operator",
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> Self {
        Self(DMatrix::identity(self.dim(), self.dim()) - &self.0)
    }

    pub fn norm(&self) -> f64 {
        operator_norm(self)
    }
}

/// Spectral norm: the largest singular value.
pub fn operator_norm(m: &OperatorMatrix) -> f64 {
    if m.0.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    m.0.singular_values().max()
}

fn check_pair(f: &FiniteFrame, g: &FiniteFrame) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            what: "frame dimension",
            expected: f.dim(),
            found: g.dim(),
        });
    }
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            what: "frame length",
            expected: f.len(),
            found: g.len(),
        });
    }
    Ok(())
}

/// `UT*`: analyze with `analysis_frame`, synthesize with `synthesis_frame`,
/// i.e. `f -> sum_k <f, f_k> g_k`.
pub fn mixed_frame_operator(
    analysis_frame: &FiniteFrame,
    synthesis_frame: &FiniteFrame,
) -> Result<OperatorMatrix> {
    check_pair(analysis_frame, synthesis_frame)?;
    Ok(OperatorMatrix(
        &synthesis_frame.synthesis * analysis_frame.synthesis.adjoint(),
    ))
}

/// `||I - UT*||`, audited against `||I - TU*||`.
pub fn approx_duality_defect(f: &FiniteFrame, g: &FiniteFrame) -> Result<f64> {
    let ut = mixed_frame_operator(f, g)?;
    let tu = mixed_frame_operator(g, f)?;
    let lhs = ut.identity_minus().norm();
    let rhs = tu.identity_minus().norm();
    if (lhs - rhs).abs() > AUDIT_TOL * lhs.max(1.0) {
        return Err(Error::AuditFailed {
            what: "adjoint symmetry of the duality defect",
            lhs,
            rhs,
        });
    }
    Ok(lhs)
}

/// True iff `UT*` is a bijection: `sigma_min > tol * sigma_max`.
pub fn is_pseudo_dual(f: &FiniteFrame, g: &FiniteFrame, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(crate::error::invalid("tol", "must be positive"));
    }
    let m = mixed_frame_operator(f, g)?;
    let sv = m.0.singular_values();
    let smax = sv.max();
    Ok(smax > 0.0 && sv.min() > tol * smax)
}

/// `{(UT*)^-1 g_k}`, a dual of `f` whenever `(f, g)` is pseudo-dual.
pub fn natural_dual(f: &FiniteFrame, g: &FiniteFrame) -> Result<FiniteFrame> {
    if !is_pseudo_dual(f, g, BIJECTIVITY_TOL)? {
        return Err(Error::NotPseudoDual);
    }
    let m = mixed_frame_operator(f, g)?;
    let lu = m.0.lu();
    let solved = lu.solve(&g.synthesis).ok_or(Error::NotPseudoDual)?;
    FiniteFrame::from_synthesis(solved)
}

/// Partial Neumann sum `gamma_k = sum_{n=0}^{N} (I - UT*)^n g_k`.
///
/// Powers are accumulated explicitly; `UT*` is never inverted.
pub fn neumann_dual_partial(f: &FiniteFrame, g: &FiniteFrame, terms: usize) -> Result<FiniteFrame> {
    let defect = approx_duality_defect(f, g)?;
    if defect >= 1.0 {
        return Err(Error::NotApproximatelyDual { defect });
    }
    let residual = mixed_frame_operator(f, g)?.identity_minus().0;
    let d = f.dim();
    let mut power = DMatrix::<Complex64>::identity(d, d);
    let mut acc = power.clone();
    for _ in 0..terms {
        power = &power * &residual;
        acc += &power;
    }
    FiniteFrame::from_synthesis(acc * &g.synthesis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(vs: &[&[f64]]) -> FiniteFrame {
        FiniteFrame::from_real(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn assert_frame_close(a: &FiniteFrame, b: &FiniteFrame, tol: f64) {
        let diff = a.synthesis_matrix() - b.synthesis_matrix();
        assert!(diff.norm() <= tol, "frames differ by {}", diff.norm());
    }

    #[test]
    fn synthesis_examples() {
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let out = f.synthesis(&[c(5.0), c(1.0), c(2.0)]).unwrap();
        assert_eq!(out.as_slice(), &[c(1.0), c(2.0)]);
        let zero = f.synthesis(&[c(0.0); 3]).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));
        let rep = real(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let out = rep.synthesis(&[c(1.0), c(1.0), c(0.0)]).unwrap();
        assert_eq!(out.as_slice(), &[c(2.0), c(0.0)]);
        assert!(matches!(
            f.synthesis(&[c(1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn analysis_examples() {
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let out = f.analysis(&[c(1.0), c(0.0)]).unwrap();
        assert_eq!(out.as_slice(), &[c(0.0), c(1.0), c(0.0)]);
        let rep = real(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let out = rep.analysis(&[c(1.0), c(1.0)]).unwrap();
        assert_eq!(out.as_slice(), &[c(1.0), c(1.0), c(1.0)]);
        // Conjugate-linear in the frame vector.
        let cf = FiniteFrame::new(1, &[vec![Complex64::new(0.0, 1.0)]]).unwrap();
        let out = cf.analysis(&[c(1.0)]).unwrap();
        assert_eq!(out[0], Complex64::new(0.0, -1.0));
        assert!(f.analysis(&[c(1.0)]).is_err());
    }

    #[test]
    fn mixed_operator_examples() {
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        for cc in [0.0, 1.0, 7.5, -3.0] {
            let g = real(&[&[cc, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
            let m = mixed_frame_operator(&f, &g).unwrap();
            assert!((m.matrix() - DMatrix::identity(2, 2)).norm() < 1e-15);
        }
        let eps = 0.5;
        let g = real(&[&[1.0 / eps, 0.0], &[0.0, 0.0], &[0.0, 1.0]]);
        let m = mixed_frame_operator(&f, &g).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(m.matrix(), &expected);
        let short = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(mixed_frame_operator(&f, &short).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        assert!((OperatorMatrix::identity(2).norm() - 1.0).abs() < 1e-14);
        let d = OperatorMatrix::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(0.5),
            c(1.0),
        ])))
        .unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-14);
        let d = OperatorMatrix::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(2.0),
            c(1.0),
        ])))
        .unwrap();
        assert!((d.norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn frame_bounds_examples() {
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let b = f.bounds();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);
        let g = real(&[&[2.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!((g.bounds().upper - 5.0).abs() < 1e-13);
        let rep = real(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let b = rep.bounds();
        assert!((b.lower - 1.0).abs() < 1e-13 && (b.upper - 2.0).abs() < 1e-13);
        let degenerate = real(&[&[1.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(degenerate.bounds().lower, 0.0);
        let too_few = real(&[&[1.0, 0.0]]);
        assert_eq!(too_few.bounds().lower, 0.0);
    }

    #[test]
    fn defect_examples() {
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let g = real(&[&[4.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!(approx_duality_defect(&f, &g).unwrap() < 1e-14);
        let onb = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(approx_duality_defect(&onb, &onb).unwrap() < 1e-14);
        let half = real(&[&[0.5, 0.0], &[0.0, 1.0]]);
        assert!((approx_duality_defect(&onb, &half).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pseudo_dual_examples() {
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let g = real(&[&[10.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]]);
        assert!(!is_pseudo_dual(&f, &g, BIJECTIVITY_TOL).unwrap());
        let onb = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(is_pseudo_dual(&onb, &onb, BIJECTIVITY_TOL).unwrap());
        let swap = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(is_pseudo_dual(&onb, &swap, BIJECTIVITY_TOL).unwrap());
        assert!(is_pseudo_dual(&onb, &swap, 0.0).is_err());
    }

    #[test]
    fn natural_dual_examples() {
        let onb = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&natural_dual(&onb, &onb).unwrap(), &onb, 1e-15);
        let rep = real(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let expected = real(&[&[0.5, 0.0], &[0.5, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&natural_dual(&rep, &rep).unwrap(), &expected, 1e-14);
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let g = real(&[&[3.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&natural_dual(&f, &g).unwrap(), &g, 1e-14);
        let bad = real(&[&[2.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(natural_dual(&f, &bad), Err(Error::NotPseudoDual));
    }

    #[test]
    fn canonical_and_pseudo_inverse_duals() {
        let onb = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&onb.canonical_dual().unwrap(), &onb, 1e-15);
        assert_frame_close(&onb.pseudo_inverse_dual().unwrap(), &onb, 1e-14);
        let rep = real(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let expected = real(&[&[0.5, 0.0], &[0.5, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&rep.canonical_dual().unwrap(), &expected, 1e-14);
        assert_frame_close(&rep.pseudo_inverse_dual().unwrap(), &expected, 1e-14);
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&f.canonical_dual().unwrap(), &f, 1e-15);
        assert_frame_close(&f.pseudo_inverse_dual().unwrap(), &f, 1e-14);
        let degenerate = real(&[&[1.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(degenerate.canonical_dual(), Err(Error::NotAFrame));
        assert_eq!(degenerate.pseudo_inverse_dual(), Err(Error::NotAFrame));
    }

    #[test]
    fn neumann_partial_examples() {
        let onb = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let half = real(&[&[0.5, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&neumann_dual_partial(&onb, &half, 0).unwrap(), &half, 0.0);
        let one = neumann_dual_partial(&onb, &half, 1).unwrap();
        assert_frame_close(&one, &real(&[&[0.75, 0.0], &[0.0, 1.0]]), 1e-15);
        assert!((approx_duality_defect(&onb, &one).unwrap() - 0.25).abs() < 1e-15);
        let f = real(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let g = real(&[&[3.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_frame_close(&neumann_dual_partial(&f, &g, 5).unwrap(), &g, 1e-15);
        let far = real(&[&[3.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            neumann_dual_partial(&onb, &far, 1),
            Err(Error::NotApproximatelyDual { .. })
        ));
    }
}

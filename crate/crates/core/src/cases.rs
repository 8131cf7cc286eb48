//! Reference configurations with their target windows.
//!
//! Two Gabor cases approximate a Gaussian by B-spline windows with known
//! duals; two finite cases in `C^2` exhibit a non-transitive pseudo-duality
//! and a dual family with an arbitrarily large upper bound.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frame::{
    approx_duality_defect, difference_bessel_bound as finite_difference_bound, is_pseudo_dual,
    perturbed_canonical_dual_bound, perturbed_dual_bound, self_scaling_bound, CanonicalPerturbation,
    FiniteFrame, PerturbationCertificate, PerturbationData, SelfScaling, BIJECTIVITY_TOL,
};
use crate::gabor::{
    difference_bessel_bound, gabor_frame_bound_reports, iterated_defect_bound, walnut_defect_bound, BoundReport,
    FrameBoundReports, GaborSystem,
};
use crate::policy::TruncationPolicy;
use crate::windows::{bspline, ck_dual_window, gaussian, painless_canonical_dual_with, Window};

/// A reported number and the closed window it must land in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    pub value: f64,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub pass: bool,
}

impl Target {
    pub fn within(name: &str, value: f64, min: Option<f64>, max: Option<f64>) -> Self {
        let pass = value.is_finite() && min.is_none_or(|m| value >= m) && max.is_none_or(|m| value <= m);
        Self {
            name: name.to_owned(),
            value,
            min,
            max,
            pass,
        }
    }

    pub fn flag(name: &str, value: bool) -> Self {
        let v = if value { 1.0 } else { 0.0 };
        Self::within(name, v, Some(1.0), Some(1.0))
    }
}

pub fn all_pass(targets: &[Target]) -> bool {
    targets.iter().all(|t| t.pass)
}

/// `(151/315) e^{-(x/1.18)^2}`: unit height after the `B_8(0)` normalization.
pub fn scaled_gaussian() -> Result<Window> {
    gaussian(151.0 / 315.0, 1.18)
}

/// `(315/151) B_8(2.36 x)`.
pub fn compressed_spline() -> Result<Window> {
    bspline(8)?.dilated(2.36)?.scaled(315.0 / 151.0)
}

/// Windows of the Gaussian / `B_8` / translate-sum dual configuration.
#[derive(Debug, Clone)]
pub struct SplineCase {
    pub analysis: GaborSystem,
    pub perturbed: GaborSystem,
    pub dual: GaborSystem,
}

pub const SPLINE_CASE_B: f64 = 0.06;
pub const PAINLESS_CASE_B: f64 = 0.1;

pub fn spline_case() -> Result<SplineCase> {
    let b = SPLINE_CASE_B;
    Ok(SplineCase {
        analysis: GaborSystem::new(scaled_gaussian()?, 1.0, b)?,
        perturbed: GaborSystem::new(bspline(8)?, 1.0, b)?,
        dual: GaborSystem::new(ck_dual_window(8, b)?, 1.0, b)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineCaseReport {
    pub walnut_bound: f64,
    pub perturbation_r: f64,
    pub dual_bessel_bound: f64,
    pub perturbed_dual_bound: f64,
    pub walnut: BoundReport,
    pub perturbation: BoundReport,
    pub dual_bessel: BoundReport,
    pub perturbed_dual: PerturbationCertificate,
    pub targets: Vec<Target>,
    pub policy: TruncationPolicy,
}

pub fn run_spline_case(policy: &TruncationPolicy) -> Result<SplineCaseReport> {
    let case = spline_case()?;
    let (a, b) = (case.analysis.a(), case.analysis.b());
    let walnut = walnut_defect_bound(&case.analysis, &case.dual, policy)?;
    let perturbation = difference_bessel_bound(case.analysis.window(), case.perturbed.window(), a, b, policy)?;
    let dual_bessel = gabor_frame_bound_reports(&case.dual, policy)?.upper;
    let perturbed_dual = perturbed_dual_bound(PerturbationData::new(perturbation.value, dual_bessel.value)?);
    let targets = vec![
        Target::within("walnut_bound", walnut.value, Some(0.0020), Some(0.0031)),
        Target::within("perturbation_r", perturbation.value, Some(4e-4), Some(8e-4)),
        Target::within("dual_bessel_bound", dual_bessel.value, None, Some(1.05)),
        Target::within("perturbed_dual_bound", perturbed_dual.value, None, Some(0.0283)),
    ];
    Ok(SplineCaseReport {
        walnut_bound: walnut.value,
        perturbation_r: perturbation.value,
        dual_bessel_bound: dual_bessel.value,
        perturbed_dual_bound: perturbed_dual.value,
        walnut,
        perturbation,
        dual_bessel,
        perturbed_dual,
        targets,
        policy: policy.clone(),
    })
}

/// Windows of the `e^{-4x^2}` / compressed spline / quotient dual configuration.
#[derive(Debug, Clone)]
pub struct PainlessCase {
    pub analysis: GaborSystem,
    pub perturbed: GaborSystem,
    pub dual: GaborSystem,
}

pub fn painless_case(policy: &TruncationPolicy) -> Result<PainlessCase> {
    let b = PAINLESS_CASE_B;
    let h = compressed_spline()?;
    let g = painless_canonical_dual_with(&h, 1.0, b, policy)?;
    Ok(PainlessCase {
        analysis: GaborSystem::new(gaussian(1.0, 0.5)?, 1.0, b)?,
        perturbed: GaborSystem::new(h, 1.0, b)?,
        dual: GaborSystem::new(g, 1.0, b)?,
    })
}

/// Walnut value the squared bound of the first iterate is quoted against.
pub const REFERENCE_WALNUT: f64 = 0.009;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PainlessCaseReport {
    pub lower_frame_bound: f64,
    pub upper_frame_bound: f64,
    pub perturbation_r: f64,
    pub perturbed_canonical_dual_bound: f64,
    pub walnut_bound: f64,
    pub self_scaling_bound: f64,
    pub iterated_squared_bound: f64,
    pub reference_squared_bound: f64,
    pub frame_bounds: FrameBoundReports,
    pub perturbation: BoundReport,
    pub perturbed_canonical_dual: CanonicalPerturbation,
    pub walnut: BoundReport,
    pub self_scaling: SelfScaling,
    pub targets: Vec<Target>,
    pub policy: TruncationPolicy,
}

pub fn run_painless_case(policy: &TruncationPolicy) -> Result<PainlessCaseReport> {
    let case = painless_case(policy)?;
    let (a, b) = (case.analysis.a(), case.analysis.b());
    let frame_bounds = gabor_frame_bound_reports(&case.analysis, policy)?;
    let est = frame_bounds.estimate();
    let perturbation = difference_bessel_bound(case.analysis.window(), case.perturbed.window(), a, b, policy)?;
    let r = perturbation.value;
    let perturbed_canonical_dual = perturbed_canonical_dual_bound(est.lower, r, Some(est.upper))?;
    let walnut = walnut_defect_bound(&case.analysis, &case.dual, policy)?;
    let self_scaling = self_scaling_bound(est)?;
    let iterated = iterated_defect_bound(walnut.value);
    let targets = vec![
        Target::within("lower_frame_bound", est.lower, Some(2.3), Some(2.9)),
        Target::within("upper_frame_bound", est.upper, Some(9.1), Some(11.1)),
        Target::within("perturbation_r", r, None, Some(1e-3)),
        Target::within("perturbation_r_over_quarter_lower", r / (est.lower / 4.0), None, Some(1.0 - f64::EPSILON)),
        Target::within(
            "perturbed_canonical_dual_bound",
            perturbed_canonical_dual.value,
            Some(0.013),
            Some(0.019),
        ),
        Target::within("walnut_bound", walnut.value, Some(0.007), Some(0.011)),
        Target::within("self_scaling_bound", self_scaling.bound, Some(0.57), Some(0.61)),
        Target::within(
            "iterated_squared_bound_residual",
            (iterated - walnut.value * walnut.value).abs(),
            None,
            Some(0.0),
        ),
    ];
    Ok(PainlessCaseReport {
        lower_frame_bound: est.lower,
        upper_frame_bound: est.upper,
        perturbation_r: r,
        perturbed_canonical_dual_bound: perturbed_canonical_dual.value,
        walnut_bound: walnut.value,
        self_scaling_bound: self_scaling.bound,
        iterated_squared_bound: iterated,
        reference_squared_bound: iterated_defect_bound(REFERENCE_WALNUT),
        frame_bounds,
        perturbation,
        perturbed_canonical_dual,
        walnut,
        self_scaling,
        targets,
        policy: policy.clone(),
    })
}

fn c2(vectors: &[[f64; 2]]) -> Result<FiniteFrame> {
    FiniteFrame::from_real(&vectors.iter().map(|v| v.to_vec()).collect::<Vec<_>>())
}

/// `F = {0, e1, e2}`, `H = {eps e1, e1, e2}`, `G = {e1/eps, 0, e2}`.
pub fn non_transitive_triple(epsilon: f64) -> Result<(FiniteFrame, FiniteFrame, FiniteFrame)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    Ok((
        c2(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])?,
        c2(&[[epsilon, 0.0], [1.0, 0.0], [0.0, 1.0]])?,
        c2(&[[1.0 / epsilon, 0.0], [0.0, 0.0], [0.0, 1.0]])?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub epsilon: f64,
    pub f_dual_h: bool,
    pub h_dual_g: bool,
    pub f_pseudo_dual_g: bool,
    pub non_transitive: bool,
    pub perturbation_r: f64,
    pub g_upper_bound: f64,
    pub targets: Vec<Target>,
}

pub fn run_triple(epsilon: f64) -> Result<TripleReport> {
    let (f, h, g) = non_transitive_triple(epsilon)?;
    let f_dual_h = approx_duality_defect(&f, &h)? <= 1e-10;
    let h_dual_g = approx_duality_defect(&h, &g)? <= 1e-10;
    let f_pseudo_dual_g = is_pseudo_dual(&f, &g, BIJECTIVITY_TOL)?;
    let non_transitive = f_dual_h && h_dual_g && !f_pseudo_dual_g;
    let perturbation_r = finite_difference_bound(&f, &h)?;
    let g_upper_bound = g.bounds().upper;
    let eps2 = epsilon * epsilon;
    let targets = vec![
        Target::flag("f_dual_h", f_dual_h),
        Target::flag("h_dual_g", h_dual_g),
        Target::flag("f_not_pseudo_dual_g", !f_pseudo_dual_g),
        Target::flag("non_transitive", non_transitive),
        Target::within("perturbation_r", perturbation_r, Some(eps2 * (1.0 - 1e-12)), Some(eps2 * (1.0 + 1e-12))),
    ];
    Ok(TripleReport {
        epsilon,
        f_dual_h,
        h_dual_g,
        f_pseudo_dual_g,
        non_transitive,
        perturbation_r,
        g_upper_bound,
        targets,
    })
}

/// `F = {0, e1, e2}` and its dual `G = {c e1, e1, e2}`.
pub fn unbounded_dual_family(c: f64) -> Result<(FiniteFrame, FiniteFrame)> {
    if !c.is_finite() {
        return Err(invalid("c", "must be finite"));
    }
    Ok((
        c2(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])?,
        c2(&[[c, 0.0], [1.0, 0.0], [0.0, 1.0]])?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub c: f64,
    pub dual_defect: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub expected_upper_bound: f64,
    pub targets: Vec<Target>,
}

pub fn run_family(c: f64) -> Result<FamilyReport> {
    let (f, g) = unbounded_dual_family(c)?;
    let dual_defect = approx_duality_defect(&f, &g)?;
    let bounds = g.bounds();
    let expected = c * c + 1.0;
    let targets = vec![
        Target::within("dual_defect", dual_defect, None, Some(1e-10)),
        Target::within("upper_bound", bounds.upper, Some(expected), Some(expected)),
    ];
    Ok(FamilyReport {
        c,
        dual_defect,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        expected_upper_bound: expected,
        targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_is_non_transitive() {
        for eps in [0.01, 0.1, 0.5] {
            let r = run_triple(eps).unwrap();
            assert!(r.non_transitive, "{r:?}");
            assert!(all_pass(&r.targets), "{r:?}");
        }
        let r = run_triple(0.1).unwrap();
        assert!((r.perturbation_r - 0.01).abs() < 1e-15);
        assert!((r.g_upper_bound - 100.0).abs() < 1e-9);
    }

    #[test]
    fn family_upper_bound_is_exact() {
        for c in [1.0, 2.0, 10.0, 100.0] {
            let r = run_family(c).unwrap();
            assert_eq!(r.upper_bound, c * c + 1.0, "{r:?}");
            assert!(all_pass(&r.targets));
        }
    }

    #[test]
    fn windows_match_their_definitions() {
        let phi = scaled_gaussian().unwrap();
        assert!((phi.value(0.0) - 151.0 / 315.0).abs() < 1e-15);
        let h = compressed_spline().unwrap();
        assert!((h.value(0.0) - 1.0).abs() < 1e-12);
        assert_eq!(h.value(4.0 / 2.36 + 1e-9), 0.0);
    }

    #[test]
    fn target_windows() {
        assert!(Target::within("x", 0.5, Some(0.0), Some(1.0)).pass);
        assert!(!Target::within("x", 1.5, Some(0.0), Some(1.0)).pass);
        assert!(!Target::within("x", f64::NAN, None, None).pass);
        assert!(!Target::flag("f", false).pass);
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frame::{
    approx_duality_defect, difference_bessel_bound, is_pseudo_dual, natural_dual, neumann_dual_partial,
    operator_norm, perturbed_canonical_dual_bound, perturbed_dual_bound, self_scaling_bound, FiniteFrame,
    OperatorMatrix, PerturbationData, BIJECTIVITY_TOL,
};

const SLACK_TOL: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Hypotheses not met by the supplied pair.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    /// `bound - measured`; negative means violated.
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteModelReport {
    pub dim: usize,
    pub len: usize,
    pub defect: Option<f64>,
    pub checks: Vec<CheckEntry>,
}

impl FiniteModelReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Battery {
    checks: Vec<CheckEntry>,
}

impl Battery {
    fn push(&mut self, name: &str, status: CheckStatus, slack: Option<f64>, detail: Option<String>) {
        self.checks.push(CheckEntry {
            name: name.to_owned(),
            status,
            slack,
            detail,
        });
    }

    fn verdict(&mut self, name: &str, ok: bool, slack: Option<f64>) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.push(name, status, slack, None);
    }

    fn inequality(&mut self, name: &str, measured: f64, bound: f64) {
        let slack = bound - measured;
        self.verdict(name, slack >= -SLACK_TOL, Some(slack));
    }

    fn skip(&mut self, name: &str, why: &str) {
        self.push(name, CheckStatus::Skipped, None, Some(why.to_owned()));
    }

    fn run(&mut self, name: &str, body: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = body(self) {
            self.push(name, CheckStatus::Fail, None, Some(e.to_string()));
        }
    }
}

fn frame_characterization(x: &FiniteFrame) -> Result<(bool, f64)> {
    let bounds = x.bounds();
    let lower_positive = bounds.lower > 0.0;
    let s = x.frame_operator();
    let sv = s.matrix().singular_values();
    let bijective = sv.max() > 0.0 && sv.min() > BIJECTIVITY_TOL * sv.max();
    let canonical = x.canonical_dual().is_ok();
    let reflexive = is_pseudo_dual(x, x, BIJECTIVITY_TOL)?;
    let agree = lower_positive == bijective && bijective == canonical && canonical == reflexive;
    Ok((agree, bounds.lower))
}

/// Upper triangular with unit diagonal and `1/2` above it.
fn unipotent(d: usize) -> Result<OperatorMatrix> {
    let m = DMatrix::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Complex64::new(1.0, 0.0),
        std::cmp::Ordering::Less => Complex64::new(0.5, 0.0),
        std::cmp::Ordering::Greater => Complex64::new(0.0, 0.0),
    });
    OperatorMatrix::from_matrix(m)
}

/// Runs the finite-frame invariant battery on `(f, g)`, with `f` the
/// analysis family. Failures and errors become report entries.
pub fn finite_model_check(f: &FiniteFrame, g: &FiniteFrame) -> FiniteModelReport {
    let mut b = Battery { checks: Vec::new() };
    let defect = approx_duality_defect(f, g).ok();

    b.run("frame_characterization", |b| {
        let (ok_f, lower) = frame_characterization(f)?;
        let (ok_g, _) = frame_characterization(g)?;
        b.verdict("frame_characterization", ok_f && ok_g, Some(lower));
        Ok(())
    });

    b.run("adjoint_symmetry", |b| {
        let d = approx_duality_defect(f, g)?;
        b.verdict("adjoint_symmetry", true, Some(d));
        Ok(())
    });

    b.run("duality_chain", |b| {
        let d = approx_duality_defect(f, g)?;
        let pseudo = is_pseudo_dual(f, g, BIJECTIVITY_TOL)?;
        let frames = f.bounds().is_frame() && g.bounds().is_frame();
        let ok = (d >= 1.0 || pseudo) && (!pseudo || frames);
        b.verdict("duality_chain", ok, Some(1.0 - d));
        Ok(())
    });

    b.run("pseudo_dual_symmetry", |b| {
        let fg = is_pseudo_dual(f, g, BIJECTIVITY_TOL)?;
        let gf = is_pseudo_dual(g, f, BIJECTIVITY_TOL)?;
        b.verdict("pseudo_dual_symmetry", fg == gf, None);
        Ok(())
    });

    b.run("invertible_transform", |b| {
        if !is_pseudo_dual(f, g, BIJECTIVITY_TOL)? {
            b.skip("invertible_transform", "pair is not pseudo-dual");
            return Ok(());
        }
        let wg = g.transformed(&unipotent(g.dim())?)?;
        b.verdict("invertible_transform", is_pseudo_dual(f, &wg, BIJECTIVITY_TOL)?, None);
        Ok(())
    });

    for terms in 1..=3usize {
        let name = format!("neumann_partial_{terms}");
        b.run(&name, |b| {
            let d = approx_duality_defect(f, g)?;
            if d >= 1.0 {
                b.skip(&name, "defect is not below one");
                return Ok(());
            }
            let gamma = neumann_dual_partial(f, g, terms)?;
            b.inequality(&name, approx_duality_defect(f, &gamma)?, d.powi(terms as i32 + 1));
            Ok(())
        });
    }

    b.run("self_scaling", |b| {
        let bounds = f.bounds();
        if !bounds.is_frame() {
            b.skip("self_scaling", "analysis family is not a frame");
            return Ok(());
        }
        let s = self_scaling_bound(bounds)?;
        b.inequality("self_scaling", approx_duality_defect(f, &f.scaled(s.scale))?, s.bound);
        Ok(())
    });

    b.run("perturbed_dual", |b| {
        if !g.bounds().is_frame() {
            b.skip("perturbed_dual", "synthesis family is not a frame");
            return Ok(());
        }
        // g is an exact dual of h = S_g^{-1} g.
        let h = g.canonical_dual()?;
        let data = PerturbationData::new(difference_bessel_bound(f, &h)?, g.bounds().upper)?;
        b.inequality("perturbed_dual", approx_duality_defect(f, g)?, perturbed_dual_bound(data).value);
        Ok(())
    });

    b.run("perturbed_bounds", |b| {
        let fb = f.bounds();
        let r = difference_bessel_bound(f, g)?;
        let gb = g.bounds();
        let upper = (fb.upper.sqrt() + r.sqrt()).powi(2);
        let mut slack = upper - gb.upper;
        if r < fb.lower {
            slack = slack.min(gb.lower - (fb.lower.sqrt() - r.sqrt()).powi(2));
        }
        b.verdict("perturbed_bounds", slack >= -SLACK_TOL, Some(slack));
        Ok(())
    });

    b.run("perturbed_canonical_dual", |b| {
        let fb = f.bounds();
        let r = difference_bessel_bound(f, g)?;
        if !(r < fb.lower) || !fb.is_frame() {
            b.skip("perturbed_canonical_dual", "perturbation not below the lower bound");
            return Ok(());
        }
        let measured = approx_duality_defect(f, &g.canonical_dual()?)?;
        let bound = if r == 0.0 {
            EXACT_TOL
        } else {
            perturbed_canonical_dual_bound(fb.lower, r, None)?.value
        };
        b.inequality("perturbed_canonical_dual", measured, bound);
        Ok(())
    });

    b.run("natural_dual", |b| {
        if is_pseudo_dual(f, g, BIJECTIVITY_TOL)? {
            let d = approx_duality_defect(f, &natural_dual(f, g)?)?;
            b.inequality("natural_dual", d, EXACT_TOL);
        } else {
            b.verdict("natural_dual", natural_dual(f, g).is_err(), None);
        }
        Ok(())
    });

    b.run("dual_lower_bound", |b| {
        if !is_pseudo_dual(f, g, BIJECTIVITY_TOL)? {
            b.skip("dual_lower_bound", "pair is not pseudo-dual");
            return Ok(());
        }
        let dual = natural_dual(f, g)?;
        b.inequality("dual_lower_bound", 1.0 / f.bounds().upper, dual.bounds().lower);
        Ok(())
    });

    b.run("spectral_norm_consistency", |b| {
        let s = f.frame_operator();
        b.verdict(
            "spectral_norm_consistency",
            (operator_norm(&s) - f.bounds().upper).abs() <= EXACT_TOL * f.bounds().upper.max(1.0),
            None,
        );
        Ok(())
    });

    FiniteModelReport {
        dim: f.dim(),
        len: f.len(),
        defect,
        checks: b.checks,
    }
}

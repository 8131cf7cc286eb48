use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coefficients::product_interval;
use super::{gabor_coefficient, walnut_defect_bound, BoundReport, GaborSystem};
use crate::error::{Error, Result};
use crate::policy::TruncationPolicy;
use crate::windows::{combine, LatticeCombination, LatticeCombinationSpec, LatticeTerm};

/// First Neumann iterate `gamma = 2 g - UT* g` of a synthesis window.
#[derive(Debug, Clone)]
pub struct IteratedWindow {
    pub window: LatticeCombination,
    pub walnut: BoundReport,
    /// Defect bound of `gamma` against the analysis system: `walnut^2`.
    pub squared_bound: f64,
    pub coefficients: usize,
    /// `sum |c| sup|g|` over the computed coefficients dropped as negligible.
    pub discarded_mass: f64,
    /// Some modulation sequence reached the policy cutoff before decaying.
    pub cutoff_reached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IteratedWindowReport {
    pub gamma: LatticeCombinationSpec,
    pub walnut_bound: f64,
    pub squared_bound: f64,
    pub coefficients: usize,
    pub discarded_mass: f64,
    pub cutoff_reached: bool,
}

impl IteratedWindow {
    pub fn report(&self) -> IteratedWindowReport {
        IteratedWindowReport {
            gamma: self.window.spec(),
            walnut_bound: self.walnut.value,
            squared_bound: self.squared_bound,
            coefficients: self.coefficients,
            discarded_mass: self.discarded_mass,
            cutoff_reached: self.cutoff_reached,
        }
    }
}

/// The one-step iterate has defect at most the square of the starting defect.
pub fn iterated_defect_bound(defect: f64) -> f64 {
    defect * defect
}

struct Column {
    n: i64,
    kept: Vec<(i64, Complex64)>,
    discarded: f64,
    cutoff_reached: bool,
}

/// Builds `(2 - c_00) g - sum_{(m,n) != 0} c_{m,n} E_{mb} T_{na} g` with
/// `c_{m,n} = <g, E_{mb} T_{na} phi>`. Each modulation sequence stops after
/// a run of negligible coefficients spanning a unit frequency band.
pub fn iterated_window(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    policy: &TruncationPolicy,
) -> Result<IteratedWindow> {
    let walnut = walnut_defect_bound(analysis, synthesis, policy)?;
    if !(walnut.value < 1.0) {
        return Err(Error::NotApproximatelyDual { defect: walnut.value });
    }
    let (phi, g) = (analysis.window(), synthesis.window());
    let (a, b) = (analysis.a(), analysis.b());
    let tol = policy.quadrature_abs_tol;
    let sup_g = g.regularity().sup;
    let big_n = policy.lattice_cutoff_n as i64;
    let big_m = policy.lattice_cutoff_m as i64;
    let run = ((1.0 / b).ceil() as usize).max(4);

    let ns: Vec<i64> = (-big_n..=big_n)
        .filter(|&n| {
            let env = g.envelope().product(&phi.envelope().shifted(n as f64 * a));
            env.integral() * sup_g >= tol && product_interval(g, phi, n as f64 * a, tol).is_some()
        })
        .collect();

    let columns: Vec<Result<Column>> = ns
        .par_iter()
        .map(|&n| {
            let mut kept = Vec::new();
            let mut discarded = 0.0;
            let mut cutoff_reached = false;
            let c0 = gabor_coefficient(g, phi, 0, n, a, b, tol)?;
            kept.push((0, c0));
            for dir in [1i64, -1] {
                let mut quiet = 0usize;
                let mut m = dir;
                loop {
                    if m.abs() > big_m {
                        cutoff_reached = true;
                        break;
                    }
                    let c = gabor_coefficient(g, phi, m, n, a, b, tol)?;
                    if c.norm() * sup_g < tol {
                        discarded += c.norm() * sup_g;
                        quiet += 1;
                        if quiet >= run {
                            break;
                        }
                    } else {
                        quiet = 0;
                        kept.push((m, c));
                    }
                    m += dir;
                }
            }
            kept.sort_by_key(|(m, _)| *m);
            Ok(Column {
                n,
                kept,
                discarded,
                cutoff_reached,
            })
        })
        .collect();

    let mut terms = Vec::new();
    let mut discarded_mass = 0.0;
    let mut cutoff_reached = false;
    let mut c00 = Complex64::new(0.0, 0.0);
    for col in columns {
        let col = col?;
        discarded_mass += col.discarded;
        cutoff_reached |= col.cutoff_reached;
        for (m, c) in col.kept {
            if m == 0 && col.n == 0 {
                c00 = c;
                continue;
            }
            terms.push(LatticeTerm {
                shift: col.n as f64 * a,
                modulation: m as f64 * b,
                coefficient: -c,
            });
        }
    }
    let coefficients = terms.len() + 1;
    terms.insert(
        0,
        LatticeTerm {
            shift: 0.0,
            modulation: 0.0,
            coefficient: Complex64::new(2.0, 0.0) - c00,
        },
    );
    Ok(IteratedWindow {
        window: combine(g, terms)?,
        walnut,
        squared_bound: iterated_defect_bound(walnut.value),
        coefficients,
        discarded_mass,
        cutoff_reached,
    })
}

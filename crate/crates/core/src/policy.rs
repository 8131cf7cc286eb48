use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Grid densities, lattice cutoffs and tolerances used by every estimator.
///
/// `k_tail_tol` and `n_tail_tol` are relative to the modulation parameter `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationPolicy {
    /// Initial number of grid intervals on one period.
    pub grid_points: usize,
    /// Refinement stops once the grid reaches this many intervals.
    pub max_grid_points: usize,
    /// Relative change of the grid extreme accepted as converged.
    pub refine_rel_tol: f64,
    /// Refinement continues while the Lipschitz correction exceeds this
    /// fraction of the grid extreme.
    pub lipschitz_rel_tol: f64,
    pub k_tail_tol: f64,
    pub n_tail_tol: f64,
    pub quadrature_abs_tol: f64,
    #[serde(rename = "lattice_cutoff_M")]
    pub lattice_cutoff_m: usize,
    #[serde(rename = "lattice_cutoff_N")]
    pub lattice_cutoff_n: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            max_grid_points: 1 << 17,
            refine_rel_tol: 1e-4,
            lipschitz_rel_tol: 0.02,
            k_tail_tol: 1e-14,
            n_tail_tol: 1e-10,
            quadrature_abs_tol: 1e-9,
            lattice_cutoff_m: 400,
            lattice_cutoff_n: 64,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("refine_rel_tol", self.refine_rel_tol),
            ("lipschitz_rel_tol", self.lipschitz_rel_tol),
            ("k_tail_tol", self.k_tail_tol),
            ("n_tail_tol", self.n_tail_tol),
            ("quadrature_abs_tol", self.quadrature_abs_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if self.grid_points < 2 {
            return Err(invalid("grid_points", "need at least 2 grid intervals"));
        }
        if self.max_grid_points < self.grid_points {
            return Err(invalid("max_grid_points", "must be >= grid_points"));
        }
        if self.lattice_cutoff_m == 0 || self.lattice_cutoff_n == 0 {
            return Err(invalid("lattice_cutoff", "cutoffs must be positive"));
        }
        Ok(())
    }
}

//! Truncation of lattice sums `sum_k P(y + a k)` for `y` in a bounded window.

use crate::windows::Envelope;

/// Indices `k_lo..=k_hi` kept in a lattice sum and a bound on the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeRange {
    pub k_lo: i64,
    pub k_hi: i64,
    /// Uniform bound on `sum_{k not kept} E(y + a k)`.
    pub tail: f64,
}

impl LatticeRange {
    pub fn count(&self) -> f64 {
        (self.k_hi - self.k_lo + 1) as f64
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.k_lo..=self.k_hi
    }
}

/// Keeps every `k` for which `y + a k` can reach the region where `env`
/// exceeds `threshold`. `None` when the envelope is identically zero.
pub fn lattice_range(env: &Envelope, a: f64, y_lo: f64, y_hi: f64, threshold: f64) -> Option<LatticeRange> {
    let core = env.core_hull()?;
    let (lo, hi) = match env.extent(threshold) {
        Some((l, h)) => (l.min(core.0), h.max(core.1)),
        None => core,
    };
    let k_lo = ((lo - y_hi) / a).floor() as i64;
    let k_hi = ((hi - y_lo) / a).ceil() as i64;
    let tail = env.lattice_tail(a, k_lo, k_hi, y_lo, y_hi);
    Some(LatticeRange { k_lo, k_hi, tail })
}

/// Product with the convention `0 * inf = 0`.
pub(crate) fn mul0(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        0.0
    } else {
        x * y
    }
}

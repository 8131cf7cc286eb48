//! Certified extrema of a function on an interval from grid samples.
//!
//! Each sample carries the value `F(x)` and a bound on `|F'(x)|`. Between two
//! grid points at spacing `h` the extreme can exceed the sampled one by at
//! most `sup|F'| * h/2`. `sup|F'|` is taken either from the global Lipschitz
//! bound, or from the sampled slopes plus `curvature * h/2` when the slope
//! bound is itself Lipschitz. The smaller of the two corrections is used.
//!
//! The grid is doubled until the sampled extreme is stable and the correction
//! is small relative to it, or the grid cap is reached.

use rayon::prelude::*;

use crate::policy::TruncationPolicy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    /// Upper bound on `|F'(x)|`.
    pub slope: f64,
}

/// Global regularity of the scanned function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothness {
    /// Bound on `sup |F'|`.
    pub lipschitz: f64,
    /// Lipschitz constant of the slope bound; infinite when unknown.
    pub curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOutcome {
    /// Extreme over the grid points.
    pub extreme: f64,
    /// Worst-case excursion between grid points.
    pub correction: f64,
    pub grid_points: usize,
    /// The last doubling changed the extreme by less than the relative tolerance.
    pub refined: bool,
}

impl ScanOutcome {
    /// Grid extreme pushed outward by the correction.
    pub fn certified(&self, extremum: Extremum) -> f64 {
        match extremum {
            Extremum::Max => self.extreme + self.correction,
            Extremum::Min => self.extreme - self.correction,
        }
    }
}

pub(crate) fn correction(max_slope: f64, step: f64, smooth: Smoothness) -> f64 {
    let first = smooth.lipschitz * step / 2.0;
    let second = if smooth.curvature.is_finite() {
        (max_slope + smooth.curvature * step / 2.0) * step / 2.0
    } else {
        f64::INFINITY
    };
    let c = first.min(second);
    if c.is_nan() {
        f64::INFINITY
    } else {
        c
    }
}

fn better(a: f64, b: f64, extremum: Extremum) -> f64 {
    match extremum {
        Extremum::Max => a.max(b),
        Extremum::Min => a.min(b),
    }
}

fn fold(samples: &[Sample], extremum: Extremum) -> (f64, f64) {
    let init = match extremum {
        Extremum::Max => f64::NEG_INFINITY,
        Extremum::Min => f64::INFINITY,
    };
    samples.iter().fold((init, 0.0f64), |(e, s), p| {
        (better(e, p.value, extremum), s.max(p.slope))
    })
}

/// Scans `f` on `[lo, hi]`. `abs_floor` is the absolute scale below which
/// changes and corrections are considered negligible.
pub fn scan<F>(
    f: F,
    lo: f64,
    hi: f64,
    smooth: Smoothness,
    extremum: Extremum,
    policy: &TruncationPolicy,
    abs_floor: f64,
) -> ScanOutcome
where
    F: Fn(f64) -> Sample + Sync,
{
    let width = hi - lo;
    let at = |i: usize, n: usize| lo + width * (i as f64) / (n as f64);
    let mut n = policy.grid_points.max(2);
    let samples: Vec<Sample> = (0..=n).into_par_iter().map(|i| f(at(i, n))).collect();
    let (mut best, mut max_slope) = fold(&samples, extremum);
    let mut previous: Option<f64> = None;
    let mut refined = false;
    loop {
        let corr = correction(max_slope, width / n as f64, smooth);
        if let Some(prev) = previous {
            refined = (best - prev).abs() <= policy.refine_rel_tol * best.abs() + abs_floor;
            if refined && corr <= policy.lipschitz_rel_tol * best.abs() + abs_floor {
                break;
            }
        }
        if 2 * n > policy.max_grid_points {
            break;
        }
        let fine = 2 * n;
        let added: Vec<Sample> = (0..n)
            .into_par_iter()
            .map(|j| f(at(2 * j + 1, fine)))
            .collect();
        let (e, s) = fold(&added, extremum);
        previous = Some(best);
        best = better(best, e, extremum);
        max_slope = max_slope.max(s);
        n = fine;
    }
    ScanOutcome {
        extreme: best,
        correction: correction(max_slope, width / n as f64, smooth),
        grid_points: n,
        refined,
    }
}

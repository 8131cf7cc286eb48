use crate::error::{invalid, Result};
use crate::lattice::{lattice_range, mul0, LatticeRange};
use crate::policy::TruncationPolicy;
use crate::scan::{scan, Extremum, Sample, Smoothness};

use super::Window;

/// `H(x) = sum_k |h(x + k a)|^2`, `a`-periodic, with certified bounds over
/// one period.
#[derive(Clone)]
pub struct Periodization {
    h: Window,
    a: f64,
    range: LatticeRange,
    lipschitz: f64,
    curvature: f64,
    inf: f64,
    sup: f64,
    grid_points: usize,
    refined: bool,
}

impl std::fmt::Debug for Periodization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Periodization")
            .field("a", &self.a)
            .field("inf", &self.inf)
            .field("sup", &self.sup)
            .finish()
    }
}

pub fn periodization_power(h: &Window, a: f64) -> Result<Periodization> {
    periodization_power_with(h, a, &TruncationPolicy::default())
}

pub fn periodization_power_with(h: &Window, a: f64, policy: &TruncationPolicy) -> Result<Periodization> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid("a", format!("must be positive, got {a}")));
    }
    policy.validate()?;
    let square = h.envelope().product(h.envelope());
    let Some(range) = lattice_range(&square, a, 0.0, a, policy.k_tail_tol * square.sup()) else {
        return Err(invalid("window", "periodization of the zero window"));
    };
    let r = h.regularity();
    let sum_h = h.envelope().lattice_sum_sup(a);
    let lipschitz = 2.0 * mul0(r.lipschitz, sum_h);
    let curvature = 2.0 * (mul0(r.lipschitz * r.lipschitz, range.count()) + mul0(r.curvature, sum_h));
    let mut p = Periodization {
        h: h.clone(),
        a,
        range,
        lipschitz,
        curvature,
        inf: 0.0,
        sup: 0.0,
        grid_points: 0,
        refined: false,
    };
    let smooth = Smoothness { lipschitz, curvature };
    let sample = |x: f64| Sample {
        value: p.truncated(x),
        slope: p.derivative(x).abs(),
    };
    let lo = scan(sample, 0.0, a, smooth, Extremum::Min, policy, 1e-15);
    let hi = scan(sample, 0.0, a, smooth, Extremum::Max, policy, 1e-15);
    let inf = lo.certified(Extremum::Min).max(0.0);
    let sup = hi.certified(Extremum::Max) + range.tail;
    p.inf = inf;
    p.sup = sup;
    p.grid_points = lo.grid_points.max(hi.grid_points);
    p.refined = lo.refined && hi.refined;
    Ok(p)
}

impl Periodization {
    fn reduce(&self, x: f64) -> f64 {
        x - self.a * (x / self.a).floor()
    }

    fn truncated(&self, x: f64) -> f64 {
        let y = self.reduce(x);
        self.range
            .indices()
            .map(|k| self.h.value(y + k as f64 * self.a).powi(2))
            .sum()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.truncated(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let y = self.reduce(x);
        self.range
            .indices()
            .map(|k| {
                let t = y + k as f64 * self.a;
                2.0 * self.h.value(t) * self.h.derivative(t)
            })
            .sum()
    }

    pub fn step(&self) -> f64 {
        self.a
    }

    /// Certified lower bound of `H` over a period.
    pub fn inf(&self) -> f64 {
        self.inf
    }

    /// Certified upper bound of `H` over a period, truncation tail included.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    /// Bound on the discarded lattice terms.
    pub fn tail_certificate(&self) -> f64 {
        self.range.tail
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn refined(&self) -> bool {
        self.refined
    }
}

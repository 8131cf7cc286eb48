//! Estimators for Gabor systems `{e^{2 pi i m b x} g(x - n a)}`.
//!
//! Every quantity is a supremum or infimum over one period `[0, a)` of
//! lattice sums
//!
//! ```text
//! r_n(x) = sum_k phi(x - n/b - a k) g(x - a k)
//! ```
//!
//! computed on a refined grid with a Lipschitz correction, with the `k`-sums
//! and the `n`-sums truncated from envelope metadata and the discarded mass
//! carried as a certificate.

mod coefficients;
mod iterate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use coefficients::gabor_coefficient;
pub use iterate::{iterated_defect_bound, iterated_window, IteratedWindow, IteratedWindowReport};

use crate::error::{invalid, Error, Result};
use crate::frame::FrameBoundsEstimate;
use crate::lattice::{lattice_range, mul0, LatticeRange};
use crate::policy::TruncationPolicy;
use crate::scan::{scan, Extremum, Sample, ScanOutcome, Smoothness};
use crate::windows::{wiener_norm_with, Envelope, Window, WindowSpec};

/// Window with translation step `a` and modulation step `b`.
#[derive(Debug, Clone)]
pub struct GaborSystem {
    window: Window,
    a: f64,
    b: f64,
}

/// Serializable form of a [`GaborSystem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaborSystemSpec {
    pub window: WindowSpec,
    pub a: f64,
    pub b: f64,
}

impl GaborSystem {
    pub fn new(window: Window, a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(Self { window, a, b })
    }

    pub fn from_spec(spec: &GaborSystemSpec, policy: &TruncationPolicy) -> Result<Self> {
        Self::new(Window::from_spec_with(&spec.window, policy)?, spec.a, spec.b)
    }

    pub fn spec(&self) -> GaborSystemSpec {
        GaborSystemSpec {
            window: self.window.spec().clone(),
            a: self.a,
            b: self.b,
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `sum_n sup_{[n,n+1)} |g|`; finite means the system is Bessel for every lattice.
    pub fn wiener_norm(&self, policy: &TruncationPolicy) -> f64 {
        wiener_norm_with(&self.window, policy)
    }
}

/// A certified one-sided scalar bound and its audit trail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Grid extreme, plus the Lipschitz correction and the tail certificate.
    pub value: f64,
    /// Bound on the discarded lattice-sum mass included in `value`.
    pub tail_certificate: f64,
    /// Worst-case excursion between grid points included in `value`.
    pub lipschitz_correction: f64,
    pub grid_points: usize,
    /// Successive grid doublings changed the grid value by less than the
    /// relative refinement tolerance.
    pub refined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NRange {
    pub lo: i64,
    pub hi: i64,
    /// Bound on `sum sup|r_n|` over the `n` outside `[lo, hi]` or skipped as negligible.
    pub tail_certificate: f64,
}

/// Grid suprema of the duality residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualProfile {
    /// `sup |r_0 - b|`.
    pub r0: f64,
    /// `sup |r_n|` for the retained `n != 0`.
    pub rn: BTreeMap<i64, f64>,
    pub n_range: NRange,
}

/// Which window carries the `n/b` shift in the residuals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftPlacement {
    /// `sum_k phi(x - n/b - a k) g(x - a k)`.
    #[default]
    Analysis,
    /// `sum_k phi(x - a k) g(x - n/b - a k)`.
    Synthesis,
}

#[derive(Debug, Clone, Copy)]
struct Residual {
    n: i64,
    shift: f64,
    range: LatticeRange,
    smooth: Smoothness,
}

struct Pair<'a> {
    phi: &'a Window,
    g: &'a Window,
    a: f64,
    b: f64,
    placement: ShiftPlacement,
}

struct Selection {
    residuals: Vec<Residual>,
    n_tail: f64,
    lo: i64,
    hi: i64,
}

impl Selection {
    fn k_tails(&self, skip_zero: bool) -> f64 {
        self.residuals
            .iter()
            .filter(|r| !(skip_zero && r.n == 0))
            .map(|r| r.range.tail)
            .sum()
    }
}

fn check_lattice(analysis: &GaborSystem, synthesis: &GaborSystem) -> Result<()> {
    if analysis.a != synthesis.a || analysis.b != synthesis.b {
        return Err(Error::MismatchedLattice {
            a1: analysis.a,
            b1: analysis.b,
            a2: synthesis.a,
            b2: synthesis.b,
        });
    }
    Ok(())
}

impl<'a> Pair<'a> {
    fn new(analysis: &'a GaborSystem, synthesis: &'a GaborSystem, placement: ShiftPlacement) -> Result<Self> {
        check_lattice(analysis, synthesis)?;
        Ok(Self {
            phi: &analysis.window,
            g: &synthesis.window,
            a: analysis.a,
            b: analysis.b,
            placement,
        })
    }

    fn product_envelope(&self, s: f64) -> Envelope {
        match self.placement {
            ShiftPlacement::Analysis => self.phi.envelope().shifted(s).product(self.g.envelope()),
            ShiftPlacement::Synthesis => self.phi.envelope().product(&self.g.envelope().shifted(s)),
        }
    }

    /// Bound on `sup_x |r_n(x)|` from envelopes alone.
    fn envelope_bound(&self, s: f64) -> f64 {
        self.product_envelope(s).lattice_sum_sup(self.a)
    }

    /// Shifts `s` for which the product of the effective extents is nonempty.
    fn reach(&self, threshold: f64) -> (f64, f64) {
        let ext = |w: &Window| {
            w.envelope()
                .extent(threshold)
                .or_else(|| w.envelope().core_hull())
                .unwrap_or((0.0, 0.0))
        };
        let (pl, ph) = ext(self.phi);
        let (gl, gh) = ext(self.g);
        match self.placement {
            ShiftPlacement::Analysis => (gl - ph, gh - pl),
            ShiftPlacement::Synthesis => (pl - gh, ph - gl),
        }
    }

    fn residual(&self, n: i64, policy: &TruncationPolicy) -> Option<Residual> {
        let shift = n as f64 / self.b;
        let env = self.product_envelope(shift);
        let range = lattice_range(&env, self.a, 0.0, self.a, policy.k_tail_tol * self.b)?;
        let (rp, rg) = (self.phi.regularity(), self.g.regularity());
        let (sp, sg) = (
            self.phi.envelope().lattice_sum_sup(self.a),
            self.g.envelope().lattice_sum_sup(self.a),
        );
        let lipschitz = mul0(rp.lipschitz, sg) + mul0(rg.lipschitz, sp);
        let curvature = mul0(rp.curvature, sg)
            + 2.0 * mul0(mul0(rp.lipschitz, rg.lipschitz), range.count())
            + mul0(rg.curvature, sp);
        Some(Residual {
            n,
            shift,
            range,
            smooth: Smoothness { lipschitz, curvature },
        })
    }

    /// `(r_n(x), r_n'(x))` of the truncated sum.
    fn eval(&self, r: &Residual, x: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut slope = 0.0;
        for k in r.range.indices() {
            let y = x + self.a * k as f64;
            let (u, v) = match self.placement {
                ShiftPlacement::Analysis => (y - r.shift, y),
                ShiftPlacement::Synthesis => (y, y - r.shift),
            };
            let p = self.phi.value(u);
            let q = self.g.value(v);
            if p != 0.0 || q != 0.0 {
                value += p * q;
                slope += self.phi.derivative(u) * q + p * self.g.derivative(v);
            }
        }
        (value, slope)
    }

    /// Retains `n = 0`, every `n` inside the reach whose envelope bound is
    /// above `n_tail_tol * b`, and bounds the rest by envelope sums.
    fn select(&self, policy: &TruncationPolicy) -> Selection {
        let tol = policy.n_tail_tol * self.b;
        let (reach_lo, reach_hi) = self.reach(policy.k_tail_tol * self.b);
        let mut residuals = Vec::new();
        let mut n_tail = 0.0;
        if let Some(r) = self.residual(0, policy) {
            residuals.push(r);
        }
        let (mut lo, mut hi) = (0i64, 0i64);
        for dir in [1i64, -1] {
            let mut n = dir;
            let mut previous = f64::INFINITY;
            let mut steps = 0usize;
            loop {
                let s = n as f64 / self.b;
                let inside = s >= reach_lo && s <= reach_hi;
                let bound = self.envelope_bound(s);
                if bound >= tol {
                    if let Some(r) = self.residual(n, policy) {
                        residuals.push(r);
                        lo = lo.min(n);
                        hi = hi.max(n);
                    }
                } else {
                    n_tail += bound;
                    if !inside {
                        if bound == 0.0 {
                            break;
                        }
                        // Beyond the reach the envelope bounds decay at least geometrically.
                        let ratio = bound / previous;
                        if ratio < 0.5 && bound < 1e-30 * tol {
                            n_tail += bound * ratio / (1.0 - ratio);
                            break;
                        }
                    }
                }
                previous = bound;
                steps += 1;
                if steps > 1_000_000 {
                    n_tail = f64::INFINITY;
                    break;
                }
                n += dir;
            }
        }
        residuals.sort_by_key(|r| r.n);
        Selection {
            residuals,
            n_tail,
            lo,
            hi,
        }
    }
}

fn report(outcome: &ScanOutcome, extremum: Extremum, tails: f64, b: f64) -> BoundReport {
    let sign = match extremum {
        Extremum::Max => 1.0,
        Extremum::Min => -1.0,
    };
    BoundReport {
        value: (outcome.extreme + sign * (outcome.correction + tails)) / b,
        tail_certificate: tails / b,
        lipschitz_correction: outcome.correction / b,
        grid_points: outcome.grid_points,
        refined: outcome.refined,
    }
}

struct ResidualScans {
    selection: Selection,
    scans: Vec<(i64, ScanOutcome, f64)>,
}

fn scan_residuals(pair: &Pair<'_>, policy: &TruncationPolicy) -> Result<ResidualScans> {
    policy.validate()?;
    let selection = pair.select(policy);
    let floor = policy.n_tail_tol * pair.b;
    let scans = selection
        .residuals
        .iter()
        .map(|r| {
            let offset = if r.n == 0 { pair.b } else { 0.0 };
            let f = |x: f64| {
                let (v, d) = pair.eval(r, x);
                Sample {
                    value: (v - offset).abs(),
                    slope: d.abs(),
                }
            };
            let out = scan(f, 0.0, pair.a, r.smooth, Extremum::Max, policy, floor);
            (r.n, out, r.range.tail)
        })
        .collect();
    Ok(ResidualScans { selection, scans })
}

fn profile_of(scans: &ResidualScans, b: f64) -> ResidualProfile {
    let mut r0 = 0.0;
    let mut rn = BTreeMap::new();
    for (n, out, _) in &scans.scans {
        if *n == 0 {
            r0 = out.extreme;
        } else {
            rn.insert(*n, out.extreme);
        }
    }
    if !scans.selection.residuals.iter().any(|r| r.n == 0) {
        // Identically vanishing product: r_0 = 0, so |r_0 - b| = b.
        r0 = b;
    }
    ResidualProfile {
        r0,
        rn,
        n_range: NRange {
            lo: scans.selection.lo,
            hi: scans.selection.hi,
            tail_certificate: scans.selection.n_tail,
        },
    }
}

/// Grid suprema `sup |r_0 - b|` and `sup |r_n|` over `[0, a)`.
pub fn duality_residuals(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    policy: &TruncationPolicy,
) -> Result<ResidualProfile> {
    duality_residuals_with(analysis, synthesis, ShiftPlacement::Analysis, policy)
}

pub fn duality_residuals_with(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    placement: ShiftPlacement,
    policy: &TruncationPolicy,
) -> Result<ResidualProfile> {
    let pair = Pair::new(analysis, synthesis, placement)?;
    Ok(profile_of(&scan_residuals(&pair, policy)?, pair.b))
}

/// Upper bound `(1/b) (sup|r_0 - b| + sum_{n != 0} sup|r_n|)` on `||I - UT*||`.
pub fn walnut_defect_bound(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    policy: &TruncationPolicy,
) -> Result<BoundReport> {
    walnut_defect_bound_with(analysis, synthesis, ShiftPlacement::Analysis, policy)
}

pub fn walnut_defect_bound_with(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    placement: ShiftPlacement,
    policy: &TruncationPolicy,
) -> Result<BoundReport> {
    let pair = Pair::new(analysis, synthesis, placement)?;
    let scans = scan_residuals(&pair, policy)?;
    walnut_from_scans(&scans, pair.b)
}

fn walnut_from_scans(scans: &ResidualScans, b: f64) -> Result<BoundReport> {
    let mut grid = 0.0;
    let mut correction = 0.0;
    let mut tails = scans.selection.n_tail;
    let mut grid_points = 0;
    let mut refined = true;
    let has_zero = scans.scans.iter().any(|(n, _, _)| *n == 0);
    if !has_zero {
        grid += b;
    }
    for (_, out, k_tail) in &scans.scans {
        grid += out.extreme;
        correction += out.correction;
        tails += k_tail;
        grid_points = grid_points.max(out.grid_points);
        refined &= out.refined;
    }
    Ok(BoundReport {
        value: (grid + correction + tails) / b,
        tail_certificate: tails / b,
        lipschitz_correction: correction / b,
        grid_points,
        refined,
    })
}

/// Walnut bound together with the residual profile it was built from.
pub fn walnut_with_profile(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    policy: &TruncationPolicy,
) -> Result<(BoundReport, ResidualProfile)> {
    let pair = Pair::new(analysis, synthesis, ShiftPlacement::Analysis)?;
    let scans = scan_residuals(&pair, policy)?;
    Ok((walnut_from_scans(&scans, pair.b)?, profile_of(&scans, pair.b)))
}

/// Lower and upper frame-bound reports of a Gabor system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBoundReports {
    pub lower: BoundReport,
    pub upper: BoundReport,
}

impl FrameBoundReports {
    pub fn estimate(&self) -> FrameBoundsEstimate {
        FrameBoundsEstimate {
            lower: self.lower.value,
            upper: self.upper.value,
        }
    }
}

/// Admissible bounds `B = (1/b) sup sum_n |r_n|` and
/// `A = (1/b) inf (r_0 - sum_{n != 0} |r_n|)`, `A` clamped at zero.
pub fn gabor_frame_bounds(system: &GaborSystem, policy: &TruncationPolicy) -> Result<FrameBoundsEstimate> {
    Ok(gabor_frame_bound_reports(system, policy)?.estimate())
}

pub fn gabor_frame_bound_reports(system: &GaborSystem, policy: &TruncationPolicy) -> Result<FrameBoundReports> {
    policy.validate()?;
    let pair = Pair::new(system, system, ShiftPlacement::Analysis)?;
    let sel = pair.select(policy);
    let floor = policy.n_tail_tol * pair.b;
    let smooth = sel.residuals.iter().fold(
        Smoothness {
            lipschitz: 0.0,
            curvature: 0.0,
        },
        |acc, r| Smoothness {
            lipschitz: acc.lipschitz + r.smooth.lipschitz,
            curvature: acc.curvature + r.smooth.curvature,
        },
    );
    let upper_f = |x: f64| {
        let (mut value, mut slope) = (0.0, 0.0);
        for r in &sel.residuals {
            let (v, d) = pair.eval(r, x);
            value += v.abs();
            slope += d.abs();
        }
        Sample { value, slope }
    };
    let lower_f = |x: f64| {
        let (mut value, mut slope) = (0.0, 0.0);
        for r in &sel.residuals {
            let (v, d) = pair.eval(r, x);
            if r.n == 0 {
                value += v;
            } else {
                value -= v.abs();
            }
            slope += d.abs();
        }
        Sample { value, slope }
    };
    let up = scan(upper_f, 0.0, pair.a, smooth, Extremum::Max, policy, floor);
    let lo = scan(lower_f, 0.0, pair.a, smooth, Extremum::Min, policy, floor);
    let upper = report(&up, Extremum::Max, sel.k_tails(false) + sel.n_tail, pair.b);
    let mut lower = report(&lo, Extremum::Min, sel.k_tails(true) + sel.n_tail, pair.b);
    lower.value = lower.value.max(0.0);
    Ok(FrameBoundReports { lower, upper })
}

/// Bessel bound `R` of the Gabor system generated by `phi - h`.
pub fn difference_bessel_bound(
    analysis_window: &Window,
    perturbed_window: &Window,
    a: f64,
    b: f64,
    policy: &TruncationPolicy,
) -> Result<BoundReport> {
    let system = GaborSystem::new(analysis_window.minus(perturbed_window), a, b)?;
    Ok(gabor_frame_bound_reports(&system, policy)?.upper)
}

//! Real-line windows with exact evaluation and the metadata every truncation
//! certificate relies on: a pointwise envelope, the support when compact,
//! and bounds on `sup|w|`, `sup|w'|` and the Lipschitz constant of `w'`.

mod bspline;
mod combination;
mod envelope;
mod periodization;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use bspline::{BSplinePieces, MAX_ORDER as MAX_BSPLINE_ORDER};
pub use combination::{combine, LatticeCombination, LatticeCombinationSpec, LatticeTerm};
pub use envelope::{Envelope, EnvelopeTerm};
pub use periodization::{periodization_power, periodization_power_with, Periodization};

use crate::error::{invalid, Error, Result};
use crate::lattice::{lattice_range, mul0};
use crate::policy::TruncationPolicy;
use crate::scan::{scan, Extremum, Sample, Smoothness};

/// `sup|w|`, `sup|w'|` and the Lipschitz constant of `w'` (infinite when `w'`
/// jumps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub sup: f64,
    pub lipschitz: f64,
    pub curvature: f64,
}

impl Regularity {
    fn scale(self, c: f64) -> Self {
        let c = c.abs();
        Self {
            sup: mul0(self.sup, c),
            lipschitz: mul0(self.lipschitz, c),
            curvature: mul0(self.curvature, c),
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            sup: self.sup + o.sup,
            lipschitz: self.lipschitz + o.lipschitz,
            curvature: self.curvature + o.curvature,
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        Smoothness {
            lipschitz: self.lipschitz,
            curvature: self.curvature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Gaussian,
    Bspline,
    LatticeCombination,
    PeriodizedQuotient,
    /// Pointwise sum or difference of two windows.
    Arithmetic,
}

/// Integer-index translate `coefficient * w(x - shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Translate {
    pub shift: f64,
    pub coefficient: f64,
}

/// JSON descriptor of a window: `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    /// `amplitude * exp(-(x/width)^2)`.
    Gaussian { amplitude: f64, width: f64 },
    /// Centered B-spline `B_order`.
    Bspline { order: usize },
    /// `b * sum_{|n| <= order-1} B_order(x + n)`.
    CkDual { order: usize, b: f64 },
    /// `b * h(x) / sum_k |h(x + k a)|^2`.
    PainlessDual { window: Box<WindowSpec>, a: f64, b: f64 },
    /// `sum_j c_j w(x - shift_j)`.
    Translates { window: Box<WindowSpec>, terms: Vec<Translate> },
    /// `factor * w(x)`.
    Scale { window: Box<WindowSpec>, factor: f64 },
    /// `w(factor * x)`.
    Dilate { window: Box<WindowSpec>, factor: f64 },
    /// `w(x - offset)`.
    Shift { window: Box<WindowSpec>, offset: f64 },
    /// `left(x) - right(x)`.
    Difference { left: Box<WindowSpec>, right: Box<WindowSpec> },
    /// `left(x) + right(x)`.
    Sum { left: Box<WindowSpec>, right: Box<WindowSpec> },
}

enum Node {
    Gaussian { amplitude: f64, width: f64 },
    BSpline(Arc<BSplinePieces>),
    CkDual { spline: Arc<BSplinePieces>, b: f64 },
    Translates { base: Window, terms: Vec<Translate> },
    Scale(Window, f64),
    Dilate(Window, f64),
    Shift(Window, f64),
    Difference(Window, Window),
    Sum(Window, Window),
    Quotient { h: Window, period: Periodization, b: f64 },
}

struct Inner {
    node: Node,
    spec: WindowSpec,
    kind: WindowKind,
    regularity: Regularity,
    envelope: Envelope,
    support: Option<(f64, f64)>,
}

/// Immutable, cheaply clonable real window.
#[derive(Clone)]
pub struct Window(Arc<Inner>);

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Window")
            .field("spec", &self.0.spec)
            .field("regularity", &self.0.regularity)
            .field("support", &self.0.support)
            .finish()
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {v}")))
    }
}

impl Window {
    fn build(
        node: Node,
        spec: WindowSpec,
        kind: WindowKind,
        regularity: Regularity,
        envelope: Envelope,
        support: Option<(f64, f64)>,
    ) -> Self {
        Window(Arc::new(Inner {
            node,
            spec,
            kind,
            regularity,
            envelope,
            support,
        }))
    }

    pub fn from_spec(spec: &WindowSpec) -> Result<Self> {
        Self::from_spec_with(spec, &TruncationPolicy::default())
    }

    pub fn from_spec_with(spec: &WindowSpec, policy: &TruncationPolicy) -> Result<Self> {
        match spec {
            WindowSpec::Gaussian { amplitude, width } => gaussian(*amplitude, *width),
            WindowSpec::Bspline { order } => bspline(*order),
            WindowSpec::CkDual { order, b } => ck_dual_window(*order, *b),
            WindowSpec::PainlessDual { window, a, b } => {
                painless_canonical_dual_with(&Self::from_spec_with(window, policy)?, *a, *b, policy)
            }
            WindowSpec::Translates { window, terms } => {
                translates(&Self::from_spec_with(window, policy)?, terms)
            }
            WindowSpec::Scale { window, factor } => Self::from_spec_with(window, policy)?.scaled(*factor),
            WindowSpec::Dilate { window, factor } => Self::from_spec_with(window, policy)?.dilated(*factor),
            WindowSpec::Shift { window, offset } => Self::from_spec_with(window, policy)?.shifted(*offset),
            WindowSpec::Difference { left, right } => {
                Ok(Self::from_spec_with(left, policy)?.minus(&Self::from_spec_with(right, policy)?))
            }
            WindowSpec::Sum { left, right } => {
                Ok(Self::from_spec_with(left, policy)?.plus(&Self::from_spec_with(right, policy)?))
            }
        }
    }

    pub fn spec(&self) -> &WindowSpec {
        &self.0.spec
    }

    pub fn kind(&self) -> WindowKind {
        self.0.kind
    }

    pub fn regularity(&self) -> Regularity {
        self.0.regularity
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.0.regularity.lipschitz
    }

    pub fn envelope(&self) -> &Envelope {
        &self.0.envelope
    }

    /// Compact support `[l, r]`; the window vanishes outside it exactly.
    pub fn support(&self) -> Option<(f64, f64)> {
        self.0.support
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.0.node {
            Node::Gaussian { amplitude, width } => amplitude * (-(x / width).powi(2)).exp(),
            Node::BSpline(p) => p.value(x),
            Node::CkDual { spline, b } => {
                let n = spline.order();
                if x.abs() <= n as f64 / 2.0 {
                    return *b;
                }
                let reach = n as i64 - 1;
                b * (-reach..=reach).map(|k| spline.value(x + k as f64)).sum::<f64>()
            }
            Node::Translates { base, terms } => terms
                .iter()
                .map(|t| t.coefficient * base.value(x - t.shift))
                .sum(),
            Node::Scale(w, c) => c * w.value(x),
            Node::Dilate(w, s) => w.value(s * x),
            Node::Shift(w, t) => w.value(x - t),
            Node::Difference(l, r) => l.value(x) - r.value(x),
            Node::Sum(l, r) => l.value(x) + r.value(x),
            Node::Quotient { h, period, b } => {
                let hx = h.value(x);
                if hx == 0.0 {
                    0.0
                } else {
                    b * hx / period.value(x)
                }
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.0.node {
            Node::Gaussian { amplitude, width } => {
                -2.0 * x / (width * width) * amplitude * (-(x / width).powi(2)).exp()
            }
            Node::BSpline(p) => p.derivative(x),
            Node::CkDual { spline, b } => {
                let n = spline.order();
                if x.abs() <= n as f64 / 2.0 {
                    return 0.0;
                }
                let reach = n as i64 - 1;
                b * (-reach..=reach).map(|k| spline.derivative(x + k as f64)).sum::<f64>()
            }
            Node::Translates { base, terms } => terms
                .iter()
                .map(|t| t.coefficient * base.derivative(x - t.shift))
                .sum(),
            Node::Scale(w, c) => c * w.derivative(x),
            Node::Dilate(w, s) => s * w.derivative(s * x),
            Node::Shift(w, t) => w.derivative(x - t),
            Node::Difference(l, r) => l.derivative(x) - r.derivative(x),
            Node::Sum(l, r) => l.derivative(x) + r.derivative(x),
            Node::Quotient { h, period, b } => {
                let hx = h.value(x);
                let dh = h.derivative(x);
                if hx == 0.0 && dh == 0.0 {
                    return 0.0;
                }
                let hp = period.value(x);
                b * (dh / hp - hx * period.derivative(x) / (hp * hp))
            }
        }
    }

    /// `c * w`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        finite("factor", c)?;
        Ok(Self::build(
            Node::Scale(self.clone(), c),
            WindowSpec::Scale {
                window: Box::new(self.spec().clone()),
                factor: c,
            },
            self.kind(),
            self.regularity().scale(c),
            self.envelope().scaled(c),
            self.support(),
        ))
    }

    /// `x -> w(s x)`.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        finite("factor", s)?;
        if s == 0.0 {
            return Err(invalid("factor", "dilation factor must be nonzero"));
        }
        let r = self.regularity();
        let regularity = Regularity {
            sup: r.sup,
            lipschitz: mul0(r.lipschitz, s.abs()),
            curvature: mul0(r.curvature, s * s),
        };
        let support = self.support().map(|(l, h)| {
            let (p, q) = (l / s, h / s);
            (p.min(q), p.max(q))
        });
        Ok(Self::build(
            Node::Dilate(self.clone(), s),
            WindowSpec::Dilate {
                window: Box::new(self.spec().clone()),
                factor: s,
            },
            self.kind(),
            regularity,
            self.envelope().dilated(s),
            support,
        ))
    }

    /// `x -> w(x - t)`.
    pub fn shifted(&self, t: f64) -> Result<Self> {
        finite("offset", t)?;
        Ok(Self::build(
            Node::Shift(self.clone(), t),
            WindowSpec::Shift {
                window: Box::new(self.spec().clone()),
                offset: t,
            },
            self.kind(),
            self.regularity(),
            self.envelope().shifted(t),
            self.support().map(|(l, h)| (l + t, h + t)),
        ))
    }

    fn joint_support(&self, other: &Window) -> Option<(f64, f64)> {
        match (self.support(), other.support()) {
            (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
            _ => None,
        }
    }

    /// Pointwise difference `self - other`.
    pub fn minus(&self, other: &Window) -> Self {
        Self::build(
            Node::Difference(self.clone(), other.clone()),
            WindowSpec::Difference {
                left: Box::new(self.spec().clone()),
                right: Box::new(other.spec().clone()),
            },
            WindowKind::Arithmetic,
            self.regularity().add(other.regularity()),
            self.envelope().sum(other.envelope()),
            self.joint_support(other),
        )
    }

    /// Pointwise sum `self + other`.
    pub fn plus(&self, other: &Window) -> Self {
        Self::build(
            Node::Sum(self.clone(), other.clone()),
            WindowSpec::Sum {
                left: Box::new(self.spec().clone()),
                right: Box::new(other.spec().clone()),
            },
            WindowKind::Arithmetic,
            self.regularity().add(other.regularity()),
            self.envelope().sum(other.envelope()),
            self.joint_support(other),
        )
    }
}

/// `amplitude * exp(-(x/width)^2)`.
pub fn gaussian(amplitude: f64, width: f64) -> Result<Window> {
    finite("amplitude", amplitude)?;
    if !(width > 0.0 && width.is_finite()) {
        return Err(invalid("width", format!("must be positive, got {width}")));
    }
    let c = amplitude.abs();
    let regularity = Regularity {
        sup: c,
        lipschitz: c * std::f64::consts::SQRT_2 / width * (-0.5f64).exp(),
        curvature: 2.0 * c / (width * width),
    };
    let envelope = Envelope::single(EnvelopeTerm::Gaussian {
        height: c,
        rate: 1.0 / (width * width),
        center: 0.0,
    });
    Ok(Window::build(
        Node::Gaussian { amplitude, width },
        WindowSpec::Gaussian { amplitude, width },
        WindowKind::Gaussian,
        regularity,
        envelope,
        None,
    ))
}

/// Centered B-spline of order `m`, supported on `[-m/2, m/2)`.
pub fn bspline(m: usize) -> Result<Window> {
    let p = BSplinePieces::get(m)?;
    let regularity = Regularity {
        sup: p.sup(),
        lipschitz: p.lipschitz(),
        curvature: p.curvature(),
    };
    let (l, r) = p.support();
    let envelope = Envelope::single(EnvelopeTerm::Plateau {
        height: p.sup(),
        lo: l,
        hi: r,
    });
    Ok(Window::build(
        Node::BSpline(p),
        WindowSpec::Bspline { order: m },
        WindowKind::Bspline,
        regularity,
        envelope,
        Some((l, r)),
    ))
}

/// `chi_[0,1)`.
pub fn indicator() -> Window {
    bspline(1)
        .and_then(|w| w.shifted(0.5))
        .expect("order-one spline is always constructible")
}

/// Dual window `b * sum_{n=-(N-1)}^{N-1} B_N(x + n)` of the B-spline Gabor
/// system, valid for `0 < b <= 1/(2N - 1)`.
pub fn ck_dual_window(order: usize, b: f64) -> Result<Window> {
    let p = BSplinePieces::get(order)?;
    let max_b = 1.0 / (2 * order - 1) as f64;
    if !(b > 0.0 && b <= max_b) {
        return Err(invalid(
            "b",
            format!("must lie in (0, 1/{}] = (0, {max_b}], got {b}", 2 * order - 1),
        ));
    }
    let reach = (order - 1) as f64 + order as f64 / 2.0;
    // g' = b [B_{N-1}(x + N - 1/2) - B_{N-1}(x - N + 1/2)], two disjoint bumps.
    let (lipschitz, curvature) = match order {
        1 => (0.0, 0.0),
        2 => (b * p.center_value(1), f64::INFINITY),
        n => {
            let lower = BSplinePieces::get(n - 1)?;
            (b * p.center_value(n - 1), b * lower.lipschitz())
        }
    };
    let regularity = Regularity {
        sup: b,
        lipschitz,
        curvature,
    };
    let envelope = Envelope::single(EnvelopeTerm::Plateau {
        height: b,
        lo: -reach,
        hi: reach,
    });
    Ok(Window::build(
        Node::CkDual { spline: p, b },
        WindowSpec::CkDual { order, b },
        WindowKind::LatticeCombination,
        regularity,
        envelope,
        Some((-reach, reach)),
    ))
}

/// `sum_j c_j w(x - shift_j)`.
pub fn translates(base: &Window, terms: &[Translate]) -> Result<Window> {
    if terms.is_empty() {
        return Err(invalid("terms", "need at least one translate"));
    }
    let mut regularity = Regularity {
        sup: 0.0,
        lipschitz: 0.0,
        curvature: 0.0,
    };
    let mut envelope = Envelope::zero();
    let mut support = base.support();
    let mut hull: Option<(f64, f64)> = None;
    for t in terms {
        finite("shift", t.shift)?;
        finite("coefficient", t.coefficient)?;
        regularity = regularity.add(base.regularity().scale(t.coefficient));
        envelope = envelope.sum(&base.envelope().shifted(t.shift).scaled(t.coefficient));
        if let Some((l, r)) = base.support() {
            let (l, r) = (l + t.shift, r + t.shift);
            hull = Some(match hull {
                Some((a, b)) => (a.min(l), b.max(r)),
                None => (l, r),
            });
        }
    }
    if support.is_some() {
        support = hull;
    }
    Ok(Window::build(
        Node::Translates {
            base: base.clone(),
            terms: terms.to_vec(),
        },
        WindowSpec::Translates {
            window: Box::new(base.spec().clone()),
            terms: terms.to_vec(),
        },
        WindowKind::LatticeCombination,
        regularity,
        envelope,
        support,
    ))
}

/// Canonical dual `b h / H`, `H(x) = sum_k |h(x + k a)|^2`, of a Gabor frame
/// whose window is supported on an interval of length at most `1/b`.
pub fn painless_canonical_dual(h: &Window, a: f64, b: f64) -> Result<Window> {
    painless_canonical_dual_with(h, a, b, &TruncationPolicy::default())
}

pub fn painless_canonical_dual_with(h: &Window, a: f64, b: f64, policy: &TruncationPolicy) -> Result<Window> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(invalid("b", format!("must be positive, got {b}")));
    }
    let (l, r) = h
        .support()
        .ok_or_else(|| invalid("window", "painless dual needs a compactly supported window"))?;
    let max = 1.0 / b;
    if r - l > max * (1.0 + 1e-12) {
        return Err(Error::SupportTooLong { length: r - l, max });
    }
    let period = periodization_power_with(h, a, policy)?;
    let inf = period.inf();
    if !(inf > 0.0) {
        return Err(Error::DegeneratePeriodization { inf });
    }
    let rh = h.regularity();
    let (lh, ch) = (period.lipschitz(), period.curvature());
    let lipschitz = b * (rh.lipschitz / inf + mul0(rh.sup * lh, 1.0 / (inf * inf)));
    let curvature = b
        * (rh.curvature / inf
            + 2.0 * mul0(rh.lipschitz, lh) / (inf * inf)
            + mul0(rh.sup, ch) / (inf * inf)
            + 2.0 * mul0(rh.sup, lh * lh) / (inf * inf * inf));
    let sup = b * rh.sup / inf;
    let regularity = Regularity {
        sup,
        lipschitz,
        curvature,
    };
    let envelope = Envelope::single(EnvelopeTerm::Plateau { height: sup, lo: l, hi: r });
    Ok(Window::build(
        Node::Quotient {
            h: h.clone(),
            period,
            b,
        },
        WindowSpec::PainlessDual {
            window: Box::new(h.spec().clone()),
            a,
            b,
        },
        WindowKind::PeriodizedQuotient,
        regularity,
        envelope,
        Some((l, r)),
    ))
}

/// `sum_n sup_{[n, n+1)} |w|`, each cell sup certified by a grid scan and the
/// cells beyond the envelope's effective extent bounded by the envelope.
pub fn wiener_norm(w: &Window) -> f64 {
    wiener_norm_with(w, &TruncationPolicy::default())
}

pub fn wiener_norm_with(w: &Window, policy: &TruncationPolicy) -> f64 {
    let env = w.envelope();
    let Some(range) = lattice_range(env, 1.0, 0.0, 1.0, policy.k_tail_tol * env.sup()) else {
        return 0.0;
    };
    let (l, r) = w.support().unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let smooth = w.regularity().smoothness();
    let mut total = 0.0;
    for n in range.indices() {
        let (lo, hi) = ((n as f64).max(l), ((n + 1) as f64).min(r));
        if lo >= hi || env.sup_on(lo, hi) == 0.0 {
            continue;
        }
        let f = |x: f64| Sample {
            value: w.value(x).abs(),
            slope: w.derivative(x).abs(),
        };
        let out = scan(f, lo, hi, smooth, Extremum::Max, policy, 1e-15);
        total += out.certified(Extremum::Max);
    }
    total + range.tail
}

//! Pointwise upper bounds `|w(x)| <= E(x)` built from Gaussian bumps and
//! boxes. They drive every lattice truncation and its tail certificate.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnvelopeTerm {
    /// `height * exp(-rate (x - center)^2)`.
    Gaussian { height: f64, rate: f64, center: f64 },
    /// `height` on `[lo, hi]`, zero elsewhere.
    Plateau { height: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub terms: Vec<EnvelopeTerm>,
}

fn dist_to_box(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// `sum_{k >= 0} exp(-rate (d + k a)^2)` bounded by a geometric series.
fn gaussian_one_sided_tail(rate: f64, d: f64, a: f64) -> f64 {
    let d = d.max(0.0);
    let ratio = (-rate * a * (2.0 * d + a)).exp();
    (-rate * d * d).exp() / (1.0 - ratio)
}

impl EnvelopeTerm {
    fn height(&self) -> f64 {
        match *self {
            EnvelopeTerm::Gaussian { height, .. } | EnvelopeTerm::Plateau { height, .. } => height,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            EnvelopeTerm::Gaussian { height, rate, center } => height * (-rate * (x - center).powi(2)).exp(),
            EnvelopeTerm::Plateau { height, lo, hi } => {
                if x >= lo && x <= hi {
                    height
                } else {
                    0.0
                }
            }
        }
    }

    fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            EnvelopeTerm::Gaussian { height, rate, center } => {
                height * (-rate * dist_to_box(center, lo, hi).powi(2)).exp()
            }
            EnvelopeTerm::Plateau { height, lo: p, hi: q } => {
                if q >= lo && p <= hi {
                    height
                } else {
                    0.0
                }
            }
        }
    }

    fn product(&self, other: &EnvelopeTerm) -> Option<EnvelopeTerm> {
        use EnvelopeTerm::*;
        match (*self, *other) {
            (
                Gaussian { height: h1, rate: r1, center: c1 },
                Gaussian { height: h2, rate: r2, center: c2 },
            ) => {
                let rate = r1 + r2;
                Some(Gaussian {
                    height: h1 * h2 * (-(r1 * r2 / rate) * (c1 - c2).powi(2)).exp(),
                    rate,
                    center: (r1 * c1 + r2 * c2) / rate,
                })
            }
            (g @ Gaussian { .. }, Plateau { height, lo, hi })
            | (Plateau { height, lo, hi }, g @ Gaussian { .. }) => Some(Plateau {
                height: height * g.sup_on(lo, hi),
                lo,
                hi,
            }),
            (Plateau { height: h1, lo: l1, hi: u1 }, Plateau { height: h2, lo: l2, hi: u2 }) => {
                let lo = l1.max(l2);
                let hi = u1.min(u2);
                (lo <= hi).then_some(Plateau { height: h1 * h2, lo, hi })
            }
        }
        .filter(|t| t.height() > 0.0)
    }

    /// Interval outside of which the term is below `threshold`.
    fn effective(&self, threshold: f64) -> Option<(f64, f64)> {
        match *self {
            EnvelopeTerm::Gaussian { height, rate, center } => {
                if height <= threshold {
                    return None;
                }
                let r = ((height / threshold).ln() / rate).sqrt();
                Some((center - r, center + r))
            }
            EnvelopeTerm::Plateau { height, lo, hi } => (height > 0.0).then_some((lo, hi)),
        }
    }

    /// Bound on `sup_y sum_k E(y + a k)`.
    fn lattice_sum_sup(&self, a: f64) -> f64 {
        match *self {
            EnvelopeTerm::Gaussian { height, rate, .. } => {
                height * (1.0 + (std::f64::consts::PI / rate).sqrt() / a)
            }
            EnvelopeTerm::Plateau { height, lo, hi } => height * (((hi - lo) / a).floor() + 1.0),
        }
    }

    /// Bound on `sum_{k > k_hi or k < k_lo} E(y + a k)` uniformly for
    /// `y` in `[y_lo, y_hi]`.
    fn lattice_tail(&self, a: f64, k_lo: i64, k_hi: i64, y_lo: f64, y_hi: f64) -> f64 {
        match *self {
            EnvelopeTerm::Gaussian { height, rate, center } => {
                // Right side: points y + a k >= y_lo + a (k_hi + 1).
                let right = y_lo + a * (k_hi + 1) as f64 - center;
                let left = center - (y_hi + a * (k_lo - 1) as f64);
                let mut total = 0.0;
                for d in [right, left] {
                    total += if d >= 0.0 {
                        gaussian_one_sided_tail(rate, d, a)
                    } else {
                        f64::INFINITY
                    };
                }
                height * total
            }
            EnvelopeTerm::Plateau { height, lo, hi } => {
                // Count lattice points of the excluded ranges that can hit [lo, hi].
                let mut count = 0.0;
                let right_start = y_lo + a * (k_hi + 1) as f64;
                if right_start <= hi {
                    count += ((hi - right_start.max(lo)) / a).floor() + 1.0;
                }
                let left_end = y_hi + a * (k_lo - 1) as f64;
                if left_end >= lo {
                    count += ((left_end.min(hi) - lo) / a).floor() + 1.0;
                }
                height * count
            }
        }
    }
}

impl Envelope {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn single(term: EnvelopeTerm) -> Self {
        Self { terms: vec![term] }.pruned()
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|t| t.height() > 0.0);
        self
    }

    /// The function bounded is identically zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn sup(&self) -> f64 {
        self.terms.iter().map(|t| t.height()).sum()
    }

    pub fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        self.terms.iter().map(|t| t.sup_on(lo, hi)).sum()
    }

    /// Envelope of `x -> w(x - s)`.
    pub fn shifted(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                EnvelopeTerm::Gaussian { height, rate, center } => EnvelopeTerm::Gaussian {
                    height,
                    rate,
                    center: center + s,
                },
                EnvelopeTerm::Plateau { height, lo, hi } => EnvelopeTerm::Plateau {
                    height,
                    lo: lo + s,
                    hi: hi + s,
                },
            })
            .collect();
        Self { terms }
    }

    /// Envelope of `c * w`.
    pub fn scaled(&self, c: f64) -> Self {
        let c = c.abs();
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                EnvelopeTerm::Gaussian { height, rate, center } => EnvelopeTerm::Gaussian {
                    height: height * c,
                    rate,
                    center,
                },
                EnvelopeTerm::Plateau { height, lo, hi } => EnvelopeTerm::Plateau {
                    height: height * c,
                    lo,
                    hi,
                },
            })
            .collect();
        Self { terms }.pruned()
    }

    /// Envelope of `x -> w(s x)`, `s != 0`.
    pub fn dilated(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                EnvelopeTerm::Gaussian { height, rate, center } => EnvelopeTerm::Gaussian {
                    height,
                    rate: rate * s * s,
                    center: center / s,
                },
                EnvelopeTerm::Plateau { height, lo, hi } => {
                    let (p, q) = (lo / s, hi / s);
                    EnvelopeTerm::Plateau {
                        height,
                        lo: p.min(q),
                        hi: p.max(q),
                    }
                }
            })
            .collect();
        Self { terms }
    }

    pub fn sum(&self, other: &Envelope) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn product(&self, other: &Envelope) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for o in &other.terms {
                if let Some(t) = s.product(o) {
                    terms.push(t);
                }
            }
        }
        Self { terms }
    }

    /// Hull of the regions where some term exceeds `threshold`. `None` when
    /// no term does.
    pub fn extent(&self, threshold: f64) -> Option<(f64, f64)> {
        self.terms
            .iter()
            .filter_map(|t| t.effective(threshold))
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    /// Hull of the Gaussian centers and plateau boxes.
    pub fn core_hull(&self) -> Option<(f64, f64)> {
        self.terms
            .iter()
            .map(|t| match *t {
                EnvelopeTerm::Gaussian { center, .. } => (center, center),
                EnvelopeTerm::Plateau { lo, hi, .. } => (lo, hi),
            })
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    /// Bound on `sup_y sum_k E(y + a k)`.
    pub fn lattice_sum_sup(&self, a: f64) -> f64 {
        self.terms.iter().map(|t| t.lattice_sum_sup(a)).sum()
    }

    /// Bound on the omitted part of `sum_k E(y + a k)` for `k` outside
    /// `[k_lo, k_hi]`, uniform in `y` in `[y_lo, y_hi]`.
    pub fn lattice_tail(&self, a: f64, k_lo: i64, k_hi: i64, y_lo: f64, y_hi: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.lattice_tail(a, k_lo, k_hi, y_lo, y_hi))
            .sum()
    }

    /// `int E`.
    pub fn integral(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| match *t {
                EnvelopeTerm::Gaussian { height, rate, .. } => height * (std::f64::consts::PI / rate).sqrt(),
                EnvelopeTerm::Plateau { height, lo, hi } => height * (hi - lo),
            })
            .sum()
    }

    /// Interval `[lo, hi]` outside of which the integral of `E` is below `tol`.
    pub fn integration_interval(&self, tol: f64) -> Option<(f64, f64)> {
        let n = self.terms.len().max(1) as f64;
        let share = tol / (2.0 * n);
        self.terms
            .iter()
            .map(|t| match *t {
                EnvelopeTerm::Plateau { lo, hi, .. } => (lo, hi),
                EnvelopeTerm::Gaussian { height, rate, center } => {
                    // Solve height * exp(-rate r^2) / (2 rate r) <= share.
                    let mut r = 1.0 / rate.sqrt();
                    for _ in 0..50 {
                        let arg = height / (2.0 * rate * r * share);
                        let next = if arg > 1.0 { (arg.ln() / rate).sqrt() } else { r };
                        let next = next.max(1.0 / rate.sqrt());
                        if (next - r).abs() <= 1e-12 * r {
                            r = next;
                            break;
                        }
                        r = next;
                    }
                    (center - r, center + r)
                }
            })
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }
}

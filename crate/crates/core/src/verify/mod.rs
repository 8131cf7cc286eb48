//! Independent reconstruction oracles for Gabor pairs and the finite-frame
//! invariant battery.
//!
//! `walnut_apply` evaluates `UT* f` through the multiplier series
//! `(1/b) sum_n r_n(x) f(x - n/b)`; `expansion_apply` sums the truncated
//! frame expansion coefficient by coefficient. The two share no code beyond
//! window evaluation, so their agreement is a genuine cross-check.

mod finite;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gabor::{gabor_coefficient, walnut_defect_bound, GaborSystem};
use crate::lattice::lattice_range;
use crate::policy::TruncationPolicy;
use crate::quadrature::{integrate_real_pieces, lattice_edges};
use crate::windows::{gaussian, Envelope, Window};

/// Kept `(m, n, c)` coefficients of one translation column, its discarded mass and cap flag.
type Column = (Vec<(i64, i64, Complex64)>, f64, bool);

pub use finite::{finite_model_check, CheckEntry, CheckStatus, FiniteModelReport};

/// Seed of the default test set.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// A real test signal with its cached `L^2` norm.
#[derive(Debug, Clone)]
pub struct TestFunction {
    window: Window,
    norm: f64,
    interval: (f64, f64),
}

impl TestFunction {
    pub fn new(window: Window) -> Result<Self> {
        let env = window.envelope();
        let sq = env.product(env);
        let scale = sq.integral();
        let Some(interval) = sq.integration_interval(1e-12 * scale) else {
            return Err(invalid("test function", "identically zero"));
        };
        let edges = lattice_edges(interval.0, interval.1, 0.5);
        let energy = integrate_real_pieces(|x| window.value(x).powi(2), &edges, 1e-14 * scale)?;
        if !(energy > 0.0) {
            return Err(invalid("test function", "zero norm"));
        }
        Ok(Self {
            window,
            norm: energy.sqrt(),
            interval,
        })
    }

    /// `amplitude * exp(-((x - center)/width)^2)`.
    pub fn gaussian(amplitude: f64, width: f64, center: f64) -> Result<Self> {
        Self::new(gaussian(amplitude, width)?.shifted(center)?)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn value(&self, x: f64) -> f64 {
        self.window.value(x)
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Interval outside which `|f|^2` carries less than `1e-12` of its envelope mass.
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }
}

/// `count` Gaussians with widths in `[0.5, 2]`, centers in `[-3, 3]` and
/// amplitudes in `[0.5, 1.5]`.
pub fn seeded_test_set(seed: u64, count: usize) -> Result<Vec<TestFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let width = rng.random_range(0.5..=2.0);
            let center = rng.random_range(-3.0..=3.0);
            let amplitude = rng.random_range(0.5..=1.5);
            TestFunction::gaussian(amplitude, width, center)
        })
        .collect()
}

pub fn default_test_set() -> Result<Vec<TestFunction>> {
    seeded_test_set(DEFAULT_SEED, 10)
}

/// An oracle value together with a bound on what its truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Applied {
    pub value: Complex64,
    pub truncation: f64,
}

fn lattice_of(analysis: &GaborSystem, synthesis: &GaborSystem) -> Result<(f64, f64)> {
    let (a, b) = (analysis.a(), analysis.b());
    if a != synthesis.a() || b != synthesis.b() {
        return Err(Error::MismatchedLattice {
            a1: a,
            b1: b,
            a2: synthesis.a(),
            b2: synthesis.b(),
        });
    }
    Ok((a, b))
}

/// `UT*` in multiplier form with the window products precomputed for every
/// `|n| <= lattice_cutoff_N`.
#[derive(Debug, Clone)]
pub struct WalnutOperator {
    phi: Window,
    g: Window,
    a: f64,
    b: f64,
    threshold: f64,
    cutoff: i64,
    products: Vec<Option<Envelope>>,
    residual_sup: f64,
}

impl WalnutOperator {
    pub fn new(analysis: &GaborSystem, synthesis: &GaborSystem, policy: &TruncationPolicy) -> Result<Self> {
        policy.validate()?;
        let (a, b) = lattice_of(analysis, synthesis)?;
        let (phi, g) = (analysis.window().clone(), synthesis.window().clone());
        let cutoff = policy.lattice_cutoff_n as i64;
        let products = (-cutoff..=cutoff)
            .map(|n| {
                let p = g.envelope().product(&phi.envelope().shifted(n as f64 / b));
                (!p.is_zero()).then_some(p)
            })
            .collect();
        let residual_sup = phi.regularity().sup * g.envelope().lattice_sum_sup(a);
        Ok(Self {
            phi,
            g,
            a,
            b,
            threshold: policy.k_tail_tol,
            cutoff,
            products,
            residual_sup,
        })
    }

    /// `r_n(x) = sum_k phi(x - n/b - a k) g(x - a k)` and the bound on its dropped terms.
    pub fn residual(&self, n: i64, x: f64) -> (f64, f64) {
        if n.abs() > self.cutoff {
            return (0.0, self.residual_sup);
        }
        let Some(env) = &self.products[(n + self.cutoff) as usize] else {
            return (0.0, 0.0);
        };
        let Some(range) = lattice_range(env, self.a, x, x, self.threshold) else {
            return (0.0, 0.0);
        };
        let s = n as f64 / self.b;
        let mut r = 0.0;
        for j in range.indices() {
            let y = x + self.a * j as f64;
            let gv = self.g.value(y);
            if gv != 0.0 {
                r += self.phi.value(y - s) * gv;
            }
        }
        (r, range.tail)
    }

    pub fn apply(&self, f: &TestFunction, x: f64) -> Applied {
        let inv_b = 1.0 / self.b;
        let Some(range) = lattice_range(f.window().envelope(), inv_b, x, x, self.threshold) else {
            return Applied {
                value: Complex64::new(0.0, 0.0),
                truncation: 0.0,
            };
        };
        let mut acc = 0.0;
        let mut truncation = range.tail * self.residual_sup;
        for k in range.indices() {
            let n = -k;
            let fv = f.value(x - n as f64 * inv_b);
            if fv == 0.0 {
                continue;
            }
            let (r, tail) = self.residual(n, x);
            acc += r * fv;
            truncation += tail * fv.abs();
        }
        Applied {
            value: Complex64::new(acc * inv_b, 0.0),
            truncation: truncation * inv_b,
        }
    }

    /// Points where `UT* f - f` can be non-negligible: `f`'s interval moved by `n/b`.
    fn error_support(&self, f: &TestFunction) -> Vec<(f64, f64)> {
        let (lo, hi) = f.interval();
        let mut pieces: Vec<(f64, f64)> = (-self.cutoff..=self.cutoff)
            .filter(|&n| {
                n == 0
                    || self.products[(n + self.cutoff) as usize]
                        .as_ref()
                        .is_some_and(|p| p.lattice_sum_sup(self.a) >= self.threshold)
            })
            .map(|n| {
                let s = n as f64 / self.b;
                (lo + s, hi + s)
            })
            .filter(|(l, h)| l < h)
            .collect();
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (l, h) in pieces {
            match merged.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(h),
                _ => merged.push((l, h)),
            }
        }
        merged
    }
}

/// `(UT* f)(x)` through the multiplier series.
pub fn walnut_apply(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    f: &TestFunction,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<Applied> {
    Ok(WalnutOperator::new(analysis, synthesis, policy)?.apply(f, x))
}

/// Coefficients `<f, E_{mb} T_{na} phi>` of one test function, truncated
/// to `|m| <= lattice_cutoff_M` and `|n| <= lattice_cutoff_N`.
#[derive(Debug, Clone)]
pub struct Expansion {
    g: Window,
    a: f64,
    b: f64,
    coefficients: Vec<(i64, i64, Complex64)>,
    discarded_mass: f64,
    cutoff_reached: bool,
}

impl Expansion {
    pub fn new(
        analysis: &GaborSystem,
        synthesis: &GaborSystem,
        f: &TestFunction,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        policy.validate()?;
        let (a, b) = lattice_of(analysis, synthesis)?;
        let phi = analysis.window();
        let g = synthesis.window().clone();
        let tol = policy.quadrature_abs_tol;
        let sup_g = g.regularity().sup;
        let big_n = policy.lattice_cutoff_n as i64;
        let big_m = policy.lattice_cutoff_m as i64;
        let run = ((1.0 / b).ceil() as usize).max(4);

        // A column sums to (1/b) sum_j (f T_{na} phi)(x - j/b) g(x - na).
        let column_bound = |n: i64| {
            let env = f.window().envelope().product(&phi.envelope().shifted(n as f64 * a));
            env.lattice_sum_sup(1.0 / b) / b * sup_g
        };
        let mut discarded_mass = 0.0;
        let mut ns = Vec::new();
        for n in -big_n..=big_n {
            let bound = column_bound(n);
            if bound >= tol {
                ns.push(n);
            } else {
                discarded_mass += bound;
            }
        }
        let mut cutoff_reached = column_bound(big_n) >= tol || column_bound(-big_n) >= tol;
        if cutoff_reached {
            for n in big_n + 1.. {
                let bound = column_bound(n) + column_bound(-n);
                discarded_mass += bound;
                if bound < 1e-6 * tol || n > big_n + 100_000 {
                    break;
                }
            }
        }

        let columns: Vec<Result<Column>> = ns
            .par_iter()
            .map(|&n| {
                let mut kept = vec![(0, n, gabor_coefficient(f.window(), phi, 0, n, a, b, tol)?)];
                let mut dropped = 0.0;
                let mut capped = false;
                for dir in [1i64, -1] {
                    let mut quiet = 0usize;
                    let mut m = dir;
                    loop {
                        if m.abs() > big_m {
                            capped = true;
                            break;
                        }
                        let c = gabor_coefficient(f.window(), phi, m, n, a, b, tol)?;
                        if c.norm() * sup_g < tol {
                            dropped += c.norm() * sup_g;
                            quiet += 1;
                            if quiet >= run {
                                break;
                            }
                        } else {
                            quiet = 0;
                            kept.push((m, n, c));
                        }
                        m += dir;
                    }
                }
                kept.sort_by_key(|(m, _, _)| *m);
                Ok((kept, dropped, capped))
            })
            .collect();

        let mut coefficients = Vec::new();
        for col in columns {
            let (kept, dropped, capped) = col?;
            coefficients.extend(kept);
            discarded_mass += dropped;
            cutoff_reached |= capped;
        }
        Ok(Self {
            g,
            a,
            b,
            coefficients,
            discarded_mass,
            cutoff_reached,
        })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[(i64, i64, Complex64)] {
        &self.coefficients
    }

    pub fn discarded_mass(&self) -> f64 {
        self.discarded_mass
    }

    pub fn cutoff_reached(&self) -> bool {
        self.cutoff_reached
    }

    /// `sum c_{m,n} e^{2 pi i m b x} g(x - n a)`.
    pub fn apply(&self, x: f64) -> Applied {
        let two_pi_b = 2.0 * std::f64::consts::PI * self.b;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut n_prev = i64::MIN;
        let mut gv = 0.0;
        for &(m, n, c) in &self.coefficients {
            if n != n_prev {
                gv = self.g.value(x - n as f64 * self.a);
                n_prev = n;
            }
            if gv != 0.0 {
                acc += c * Complex64::from_polar(gv, two_pi_b * m as f64 * x);
            }
        }
        Applied {
            value: acc,
            truncation: self.discarded_mass,
        }
    }
}

/// `(UT* f)(x)` through the truncated frame expansion.
pub fn expansion_apply(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    f: &TestFunction,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<Applied> {
    Ok(Expansion::new(analysis, synthesis, f, policy)?.apply(x))
}

fn relative_error(op: &WalnutOperator, f: &TestFunction, policy: &TruncationPolicy) -> Result<f64> {
    let tol = policy.quadrature_abs_tol * 1e-3 * f.norm().powi(2);
    let pieces = op.error_support(f);
    let width: f64 = pieces.iter().map(|(l, h)| h - l).sum();
    let mut energy = 0.0;
    for (lo, hi) in pieces {
        let edges = lattice_edges(lo, hi, 0.5);
        energy += integrate_real_pieces(
            |x| (f.value(x) - op.apply(f, x).value.re).powi(2),
            &edges,
            tol * (hi - lo) / width,
        )?;
    }
    Ok(energy.max(0.0).sqrt() / f.norm())
}

/// `max ||f - UT* f|| / ||f||` over the test set: a lower bound on `||I - UT*||`.
pub fn empirical_defect(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    test_set: &[TestFunction],
    policy: &TruncationPolicy,
) -> Result<f64> {
    if test_set.is_empty() {
        return Err(invalid("test_set", "must be nonempty"));
    }
    let op = WalnutOperator::new(analysis, synthesis, policy)?;
    let errors: Vec<Result<f64>> = test_set.par_iter().map(|f| relative_error(&op, f, policy)).collect();
    let mut worst = 0.0f64;
    for e in errors {
        worst = worst.max(e?);
    }
    Ok(worst)
}

/// Seeded evaluation points inside each test function's interval.
pub fn sample_points(f: &TestFunction, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = f.interval();
    let (lo, hi) = (lo.max(-8.0), hi.min(8.0));
    (0..count).map(|_| rng.random_range(lo..=hi)).collect()
}

/// `max |walnut_apply - expansion_apply| / ||f||` over the test set and
/// `points_per_function` seeded points each.
pub fn cross_oracle_gap(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    test_set: &[TestFunction],
    points_per_function: usize,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let op = WalnutOperator::new(analysis, synthesis, policy)?;
    let gaps: Vec<Result<f64>> = test_set
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let exp = Expansion::new(analysis, synthesis, f, policy)?;
            let mut worst = 0.0f64;
            for x in sample_points(f, points_per_function, DEFAULT_SEED ^ i as u64) {
                let gap = (op.apply(f, x).value - exp.apply(x).value).norm();
                worst = worst.max(gap / f.norm());
            }
            Ok(worst)
        })
        .collect();
    let mut worst = 0.0f64;
    for g in gaps {
        worst = worst.max(g?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub certified_bound: f64,
    pub empirical_defect: f64,
    pub cross_oracle_max_gap: f64,
    pub policy: TruncationPolicy,
}

impl VerificationReport {
    /// The empirical lower bound respects the certificate.
    pub fn sandwiched(&self) -> bool {
        self.empirical_defect <= self.certified_bound
    }
}

pub fn verify_pair(
    analysis: &GaborSystem,
    synthesis: &GaborSystem,
    test_set: &[TestFunction],
    points_per_function: usize,
    policy: &TruncationPolicy,
) -> Result<VerificationReport> {
    let certified_bound = walnut_defect_bound(analysis, synthesis, policy)?.value;
    Ok(VerificationReport {
        certified_bound,
        empirical_defect: empirical_defect(analysis, synthesis, test_set, policy)?,
        cross_oracle_max_gap: cross_oracle_gap(analysis, synthesis, test_set, points_per_function, policy)?,
        policy: policy.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::windows::{bspline, ck_dual_window, indicator};

    fn spline_pair(b: f64) -> (GaborSystem, GaborSystem) {
        (
            GaborSystem::new(bspline(8).unwrap(), 1.0, b).unwrap(),
            GaborSystem::new(ck_dual_window(8, b).unwrap(), 1.0, b).unwrap(),
        )
    }

    #[test]
    fn gaussian_norm_is_closed_form() {
        // ||A e^{-(x/w)^2}||^2 = A^2 w sqrt(pi/2).
        let f = TestFunction::gaussian(1.3, 0.7, 1.0).unwrap();
        let exact = (1.69 * 0.7 * (std::f64::consts::PI / 2.0).sqrt()).sqrt();
        assert!((f.norm() - exact).abs() < 1e-12);
    }

    #[test]
    fn default_set_is_reproducible() {
        let a = default_test_set().unwrap();
        let b = default_test_set().unwrap();
        assert_eq!(a.len(), 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.norm(), y.norm());
            assert_eq!(x.value(0.3), y.value(0.3));
        }
    }

    #[test]
    fn exact_dual_pair_reconstructs() {
        let (phi, g) = spline_pair(0.06);
        let policy = TruncationPolicy::default();
        let op = WalnutOperator::new(&phi, &g, &policy).unwrap();
        let f = TestFunction::gaussian(1.0, 0.8, 0.4).unwrap();
        for x in [-3.0, -0.7, 0.0, 0.25, 1.9, 5.5] {
            let v = op.apply(&f, x);
            assert!((v.value.re - f.value(x)).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn orthonormal_basis_reconstructs() {
        let chi = GaborSystem::new(indicator(), 1.0, 1.0).unwrap();
        let policy = TruncationPolicy::default();
        let f = TestFunction::gaussian(1.0, 1.0, 0.0).unwrap();
        for x in [-1.5, 0.0, 0.3, 2.2] {
            let v = walnut_apply(&chi, &chi, &f, x, &policy).unwrap();
            assert!((v.value.re - f.value(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn single_coefficient_expansion() {
        let chi = GaborSystem::new(indicator(), 1.0, 1.0).unwrap();
        let policy = TruncationPolicy {
            lattice_cutoff_m: 1,
            lattice_cutoff_n: 1,
            ..TruncationPolicy::default()
        };
        let f = TestFunction::new(indicator()).unwrap();
        let exp = Expansion::new(&chi, &chi, &f, &policy).unwrap();
        let significant: Vec<_> = exp.coefficients().iter().filter(|c| c.2.norm() > 1e-12).collect();
        assert_eq!(significant.len(), 1);
        assert_eq!((significant[0].0, significant[0].1), (0, 0));
        for x in [0.1, 0.5, 0.9] {
            assert!((exp.apply(x).value.re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_dual_pair_has_tiny_empirical_defect() {
        let (phi, g) = spline_pair(0.06);
        let policy = TruncationPolicy::default();
        let set = seeded_test_set(7, 2).unwrap();
        assert!(empirical_defect(&phi, &g, &set, &policy).unwrap() <= 1e-8);
    }

    #[test]
    fn oracles_agree_for_exact_pair() {
        let (phi, g) = spline_pair(0.05);
        let policy = TruncationPolicy::default();
        let set = seeded_test_set(11, 1).unwrap();
        let gap = cross_oracle_gap(&phi, &g, &set, 3, &policy).unwrap();
        assert!(gap < 1e-6, "gap {gap}");
    }

    #[test]
    fn empty_test_set_is_rejected() {
        let (phi, g) = spline_pair(0.06);
        assert!(empirical_defect(&phi, &g, &[], &TruncationPolicy::default()).is_err());
    }
}

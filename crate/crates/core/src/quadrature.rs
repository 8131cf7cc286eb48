//! Adaptive composite Gauss-Legendre quadrature for complex integrands.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ORDER: usize = 16;
const MAX_DEPTH: u32 = 48;
const MAX_PANELS: usize = 1 << 20;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(NonZeroUsize::new(ORDER).expect("nonzero order"));
        gl.as_node_weight_pairs().to_vec()
    })
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Complex64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in rule() {
        acc += f(mid + half * x) * w;
    }
    acc * half
}

/// Integrates `f` over `[lo, hi]` to absolute accuracy `tol` by bisection.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Complex64> {
    if hi <= lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let width = hi - lo;
    let mut total = Complex64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    let mut panels = 0usize;
    let mut stack = vec![(lo, hi, panel(&f, lo, hi), 0u32)];
    while let Some((a, b, whole, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = panel(&f, a, m);
        let right = panel(&f, m, b);
        let err = (whole - left - right).norm();
        let budget = tol * (b - a) / width;
        panels += 1;
        if err <= budget || depth >= MAX_DEPTH || panels >= MAX_PANELS {
            if err > budget {
                worst = worst.max(err / budget * tol);
            }
            total += left + right;
        } else {
            stack.push((m, b, right, depth + 1));
            stack.push((a, m, left, depth + 1));
        }
    }
    if worst > tol {
        return Err(Error::Quadrature {
            lo,
            hi,
            target: tol,
            achieved: worst,
        });
    }
    Ok(total)
}

/// Integrates over consecutive pieces `[edges[i], edges[i+1]]`, sharing the
/// tolerance in proportion to length. Kinks of the integrand should sit on edges.
pub fn integrate_pieces<F: Fn(f64) -> Complex64>(f: F, edges: &[f64], tol: f64) -> Result<Complex64> {
    if edges.len() < 2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let width = edges[edges.len() - 1] - edges[0];
    let mut total = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        if w[1] > w[0] {
            total += integrate(&f, w[0], w[1], tol * (w[1] - w[0]) / width)?;
        }
    }
    Ok(total)
}

/// Real-valued convenience wrapper around [`integrate_pieces`].
pub fn integrate_real_pieces<F: Fn(f64) -> f64>(f: F, edges: &[f64], tol: f64) -> Result<f64> {
    integrate_pieces(|x| Complex64::new(f(x), 0.0), edges, tol).map(|z| z.re)
}

/// Points `k * step` in `[lo, hi]` together with both ends, sorted.
pub fn lattice_edges(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut edges = vec![lo];
    let first = (lo / step).floor() as i64 + 1;
    let mut k = first;
    loop {
        let x = k as f64 * step;
        if x >= hi {
            break;
        }
        if x > lo {
            edges.push(x);
        }
        k += 1;
    }
    edges.push(hi);
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| Complex64::new(x.powi(5) - 3.0 * x, 0.0), -1.0, 2.0, 1e-12).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - 1.5 * (4.0 - 1.0);
        assert!((v.re - exact).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // int_0^1 e^{2 pi i 7 x} x dx = 1/(2 pi i 7).
        let w = 2.0 * std::f64::consts::PI * 7.0;
        let v = integrate(|x| Complex64::new(0.0, w * x).exp() * x, 0.0, 1.0, 1e-12).unwrap();
        let exact = Complex64::new(0.0, -1.0 / w);
        assert!((v - exact).norm() < 1e-11);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate_real_pieces(|x| (-x * x).exp(), &[-10.0, 0.0, 10.0], 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kink_handled_by_bisection() {
        let v = integrate(|x| Complex64::new((x - 0.3).abs(), 0.0), 0.0, 1.0, 1e-10).unwrap();
        assert!((v.re - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn edges_include_lattice() {
        assert_eq!(lattice_edges(-1.0, 1.0, 0.5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(lattice_edges(0.2, 0.9, 0.5), vec![0.2, 0.5, 0.9]);
    }
}

#![allow(dead_code)]

use approxdual::frame::{approx_duality_defect, FiniteFrame};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, complex: bool) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re = rng.random_range(-1.0..1.0);
        let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
        Complex64::new(re, im)
    })
}

/// A spanning frame with `d <= K <= 2d + 2` vectors.
pub fn random_frame(rng: &mut ChaCha8Rng, d: usize) -> FiniteFrame {
    loop {
        let k = rng.random_range(d..=2 * d + 2);
        let complex = rng.random_bool(0.5);
        let f = FiniteFrame::from_synthesis(random_matrix(rng, d, k, complex)).unwrap();
        if f.bounds().lower > 1e-3 {
            return f;
        }
    }
}

/// A frame of the same shape as `f`, scaled so that `||I - UT*|| = target`.
pub fn approximate_dual(rng: &mut ChaCha8Rng, f: &FiniteFrame, target: f64) -> FiniteFrame {
    let dual = f.canonical_dual().unwrap();
    let e = random_matrix(rng, f.dim(), f.len(), true);
    let spread = (&e * f.synthesis_matrix().adjoint()).singular_values().max();
    let g = dual.synthesis_matrix() + e * Complex64::new(target / spread, 0.0);
    let g = FiniteFrame::from_synthesis(g).unwrap();
    debug_assert!((approx_duality_defect(f, &g).unwrap() - target).abs() < 1e-8);
    g
}

/// A dual of `h` that differs from the canonical one when `K > d`.
pub fn random_exact_dual(rng: &mut ChaCha8Rng, h: &FiniteFrame) -> FiniteFrame {
    let v = h.synthesis_matrix();
    let canonical = h.canonical_dual().unwrap();
    let s_inv_v = canonical.synthesis_matrix();
    let k = h.len();
    let q = random_matrix(rng, h.dim(), k, true) * Complex64::new(0.3, 0.0);
    // Q (I - V* S^{-1} V) lies in the annihilator of the analysis map.
    let proj = DMatrix::<Complex64>::identity(k, k) - v.adjoint() * s_inv_v;
    FiniteFrame::from_synthesis(s_inv_v + q * proj).unwrap()
}

pub fn perturbed(rng: &mut ChaCha8Rng, f: &FiniteFrame, size: f64) -> FiniteFrame {
    let e = random_matrix(rng, f.dim(), f.len(), true) * Complex64::new(size, 0.0);
    FiniteFrame::from_synthesis(f.synthesis_matrix() + e).unwrap()
}

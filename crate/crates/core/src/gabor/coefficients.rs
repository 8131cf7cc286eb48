use num_complex::Complex64;

use crate::error::Result;
use crate::quadrature::{integrate_pieces, lattice_edges};
use crate::windows::Window;

/// Interval carrying all but `tol` of the mass of `f * phi(. - shift)`, or
/// `None` when the product vanishes identically.
pub(crate) fn product_interval(f: &Window, phi: &Window, shift: f64, tol: f64) -> Option<(f64, f64)> {
    let env = f.envelope().product(&phi.envelope().shifted(shift));
    if env.is_zero() {
        return None;
    }
    let (mut lo, mut hi) = env.integration_interval(tol)?;
    if let Some((l, r)) = f.support() {
        lo = lo.max(l);
        hi = hi.min(r);
    }
    if let Some((l, r)) = phi.support() {
        lo = lo.max(l + shift);
        hi = hi.min(r + shift);
    }
    (lo < hi).then_some((lo, hi))
}

/// `<f, E_{mb} T_{na} phi> = int f(x) phi(x - n a) e^{-2 pi i m b x} dx` for
/// real windows, to absolute accuracy `tol`.
pub fn gabor_coefficient(f: &Window, phi: &Window, m: i64, n: i64, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let shift = n as f64 * a;
    let Some((lo, hi)) = product_interval(f, phi, shift, 0.5 * tol) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let omega = -2.0 * std::f64::consts::PI * m as f64 * b;
    let edges = lattice_edges(lo, hi, 0.5);
    integrate_pieces(
        |x| {
            let v = f.value(x) * phi.value(x - shift);
            if v == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(v, omega * x)
            }
        },
        &edges,
        0.5 * tol,
    )
}

//! Centered cardinal B-splines as exact piecewise polynomials.
//!
//! `N_1 = chi_[0,1)`, `N_{m+1}(u) = int_{u-1}^{u} N_m`. Piece `j` of `N_m` lives
//! on `[j, j+1)` and is stored as a polynomial in the local variable
//! `t = u - j`. The centered spline is `B_m(x) = N_m(x + m/2)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub const MAX_ORDER: usize = 40;

type Poly = Vec<BigRational>;

#[derive(Debug)]
pub struct BSplinePieces {
    order: usize,
    exact: Vec<Poly>,
    coeffs: Vec<Vec<f64>>,
    deriv: Vec<Vec<f64>>,
    /// `B_k(0)` for `k = 1..=order`.
    centers: Vec<f64>,
}

fn antiderivative(p: &Poly) -> Poly {
    let mut q = vec![BigRational::zero()];
    for (i, c) in p.iter().enumerate() {
        q.push(c / BigRational::from_integer(BigInt::from(i + 1)));
    }
    q
}

fn eval_exact(p: &Poly, t: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * t + c)
}

fn add_into(acc: &mut Poly, p: &Poly, sign: i32) {
    if acc.len() < p.len() {
        acc.resize(p.len(), BigRational::zero());
    }
    for (a, c) in acc.iter_mut().zip(p) {
        if sign > 0 {
            *a += c;
        } else {
            *a -= c;
        }
    }
}

fn next_order(pieces: &[Poly]) -> Vec<Poly> {
    let m = pieces.len();
    let anti: Vec<Poly> = pieces.iter().map(antiderivative).collect();
    let one = BigRational::one();
    (0..=m)
        .map(|j| {
            let mut p: Poly = vec![BigRational::zero()];
            if j >= 1 {
                let q = &anti[j - 1];
                p[0] += eval_exact(q, &one);
                add_into(&mut p, q, -1);
            }
            if j < m {
                add_into(&mut p, &anti[j], 1);
            }
            p
        })
        .collect()
}

fn center_exact(pieces: &[Poly]) -> BigRational {
    let m = pieces.len();
    if m.is_multiple_of(2) {
        pieces[m / 2][0].clone()
    } else {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        eval_exact(&pieces[m / 2], &half)
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn horner(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

impl BSplinePieces {
    fn build(order: usize) -> Self {
        let mut pieces: Vec<Poly> = vec![vec![BigRational::one()]];
        let mut centers = vec![1.0];
        for _ in 1..order {
            pieces = next_order(&pieces);
            centers.push(to_f64(&center_exact(&pieces)));
        }
        let coeffs: Vec<Vec<f64>> = pieces.iter().map(|p| p.iter().map(to_f64).collect()).collect();
        let deriv = coeffs
            .iter()
            .map(|p| p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect())
            .collect();
        Self {
            order,
            exact: pieces,
            coeffs,
            deriv,
            centers,
        }
    }

    /// Shared pieces of `B_order`, built once per order.
    pub fn get(order: usize) -> Result<Arc<Self>> {
        if order == 0 || order > MAX_ORDER {
            return Err(invalid("order", format!("B-spline order must be in 1..={MAX_ORDER}, got {order}")));
        }
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BSplinePieces>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        Ok(guard
            .entry(order)
            .or_insert_with(|| Arc::new(Self::build(order)))
            .clone())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let m = self.order as f64;
        let u = x + m / 2.0;
        if !(u >= 0.0 && u < m) {
            return None;
        }
        let j = (u.floor() as usize).min(self.order - 1);
        Some((j, u - j as f64))
    }

    /// Evaluates the right half through `B_m(x) = B_m(-x)`: the expanded right
    /// pieces cancel badly near `m/2`.
    pub fn value(&self, x: f64) -> f64 {
        if !(x < self.order as f64 / 2.0) {
            return 0.0;
        }
        match self.locate(if x > 0.0 { -x } else { x }) {
            Some((j, t)) => horner(&self.coeffs[j], t),
            None => 0.0,
        }
    }

    /// Right derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some((j, t)) => horner(&self.deriv[j], t),
            None => 0.0,
        }
    }

    /// `B_order(x)` at a rational point, exactly.
    pub fn value_exact(&self, x: &BigRational) -> BigRational {
        let u = x + BigRational::new(BigInt::from(self.order), BigInt::from(2));
        let m = BigRational::from_integer(BigInt::from(self.order));
        if u < BigRational::zero() || u >= m {
            return BigRational::zero();
        }
        let j = u.floor();
        let idx = j.to_integer().to_usize().unwrap_or(0).min(self.order - 1);
        eval_exact(&self.exact[idx], &(u - j))
    }

    /// `B_k(0)` for `1 <= k <= order`; this is `sup B_k`.
    pub fn center_value(&self, k: usize) -> f64 {
        self.centers[k - 1]
    }

    /// `sup |B_m|`.
    pub fn sup(&self) -> f64 {
        self.center_value(self.order)
    }

    /// Lipschitz constant: `B_m' = B_{m-1}(x + 1/2) - B_{m-1}(x - 1/2)`, so
    /// `sup|B_m'| = B_{m-1}(0)`. Order 1 is piecewise constant and reported as 0.
    pub fn lipschitz(&self) -> f64 {
        if self.order >= 2 {
            self.center_value(self.order - 1)
        } else {
            0.0
        }
    }

    /// Lipschitz constant of `B_m'`: `2 B_{m-2}(0)`; infinite for order 2.
    pub fn curvature(&self) -> f64 {
        match self.order {
            1 => 0.0,
            2 => f64::INFINITY,
            m => 2.0 * self.center_value(m - 2),
        }
    }

    /// Half-open support `[-m/2, m/2)`.
    pub fn support(&self) -> (f64, f64) {
        let h = self.order as f64 / 2.0;
        (-h, h)
    }
}

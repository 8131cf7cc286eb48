use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::{WindowSpec, Window};

/// `coefficient * e^{2 pi i modulation x} base(x - shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeTerm {
    pub shift: f64,
    pub modulation: f64,
    pub coefficient: Complex64,
}

/// Finite sum of time-frequency shifts of a real base window.
#[derive(Debug, Clone)]
pub struct LatticeCombination {
    base: Window,
    terms: Vec<LatticeTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeCombinationSpec {
    pub base: WindowSpec,
    pub terms: Vec<LatticeTerm>,
}

pub fn combine(base: &Window, terms: Vec<LatticeTerm>) -> Result<LatticeCombination> {
    for t in &terms {
        if !(t.shift.is_finite() && t.modulation.is_finite() && t.coefficient.is_finite()) {
            return Err(invalid("terms", "shifts, modulations and coefficients must be finite"));
        }
    }
    Ok(LatticeCombination {
        base: base.clone(),
        terms,
    })
}

impl LatticeCombination {
    pub fn base(&self) -> &Window {
        &self.base
    }

    pub fn terms(&self) -> &[LatticeTerm] {
        &self.terms
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let b = self.base.value(x - t.shift);
                if b == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t.modulation * x);
                    t.coefficient * phase * b
                }
            })
            .sum()
    }

    /// Union of the shifted base supports.
    pub fn support(&self) -> Option<(f64, f64)> {
        let (l, r) = self.base.support()?;
        self.terms
            .iter()
            .map(|t| (l + t.shift, r + t.shift))
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    pub fn spec(&self) -> LatticeCombinationSpec {
        LatticeCombinationSpec {
            base: self.base.spec().clone(),
            terms: self.terms.clone(),
        }
    }
}

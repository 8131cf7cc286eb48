use thiserror::Error;

/// Errors raised by frame, window and Gabor computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("not a frame: lower frame bound is zero")]
    NotAFrame,

    #[error("not pseudo-dual: mixed frame operator is singular")]
    NotPseudoDual,

    #[error("not approximately dual: ||I - UT*|| = {defect} >= 1")]
    NotApproximatelyDual { defect: f64 },

    #[error("perturbation too large: R = {r} must be below A = {lower}")]
    PerturbationTooLarge { lower: f64, r: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("window support has length {length}, longer than 1/b = {max}")]
    SupportTooLong { length: f64, max: f64 },

    #[error("periodization is not bounded below: certified infimum {inf}")]
    DegeneratePeriodization { inf: f64 },

    #[error("mismatched lattices: ({a1}, {b1}) vs ({a2}, {b2})")]
    MismatchedLattice { a1: f64, b1: f64, a2: f64, b2: f64 },

    #[error("quadrature did not reach {target:e} on [{lo}, {hi}] (estimated error {achieved:e})")]
    Quadrature {
        lo: f64,
        hi: f64,
        target: f64,
        achieved: f64,
    },

    #[error("self-consistency audit failed for {what}: {lhs} vs {rhs}")]
    AuditFailed {
        what: &'static str,
        lhs: f64,
        rhs: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

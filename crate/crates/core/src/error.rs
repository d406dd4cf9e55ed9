use crate::scalar::ParseRationalError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("label {label} is out of range for a domain of size {domain_size}")]
    LabelOutOfRange { label: usize, domain_size: usize },

    #[error("variable {var} is out of range for an instance with {num_vars} variables")]
    VariableOutOfRange { var: usize, num_vars: usize },

    #[error("assignment has length {got}, expected {expected}")]
    AssignmentLength { got: usize, expected: usize },

    #[error("hard constraint {constraint} is violated")]
    HardViolation { constraint: usize },

    #[error("{what}: cardinality {size} exceeds the cap {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("thresholded subset {mask:#b} is not an element of the lattice")]
    NotInLattice { mask: u64 },

    #[error("no admissible threshold h for n = {n}: {reason}")]
    EmptyRange { n: u64, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Rational(#[from] ParseRationalError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

/// Enumeration and brute-force limits. Every cap-exceeded error names the
/// offending cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Caps {
    /// Table sizes and tuple enumerations in the polymorphism lab.
    pub enumeration: u64,
    /// `|A|^num_vars` for exhaustive optimisation.
    pub brute_force: u64,
    /// `|A|^|Δ_n|` assignments in the c-bound probe.
    pub farkas: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: 10_000_000,
            brute_force: 10_000_000,
            farkas: 1_000_000,
        }
    }
}

impl Caps {
    pub(crate) fn check(cap: u64, what: &'static str, size: u128) -> Result<()> {
        if size > cap as u128 {
            Err(Error::CapExceeded { what, size, cap })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub(crate) fn pow_sat(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

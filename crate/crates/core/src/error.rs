use thiserror::Error;

/// Errors produced by the analysis and optimization routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("nodes {first} and {second} are {distance} m apart (minimum is {minimum} m)")]
    CoincidentNodes {
        first: String,
        second: String,
        distance: f64,
        minimum: f64,
    },

    #[error("zero channel vector")]
    ZeroVector,

    #[error("degenerate detector: {0}")]
    DegenerateDetector(String),

    #[error("covertness constraint infeasible in phase {phase}")]
    Infeasible { phase: u8 },

    #[error("empty feasible box for the power split")]
    EmptyBox,

    #[error("exponential rates {0} and {1} coincide; perturb them or use the CLT path")]
    RepeatedRates(f64, f64),

    #[error("Willie link variances are not identical; the CLT model assumes i.i.d. observers")]
    NonIdenticalWillies,

    #[error("empty {0} set")]
    Empty(&'static str),

    #[error("no null space: the source needs at least two antennas for jamming")]
    NoNullSpace,

    #[error("SCA objective decreased at iteration {iteration}: {before} -> {after}")]
    AscentViolation {
        iteration: usize,
        before: f64,
        after: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

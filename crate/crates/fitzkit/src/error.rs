//! Error taxonomy for the toolkit.
//!
//! The contract distinguishes *input errors* (malformed or out-of-contract
//! data: the caller's problem) from *mathematical verdicts* (a well-posed
//! check that ran and found a violation — those are reported through result
//! types such as `GateReport`, never through `Err`).  Everything in this
//! module is an input error in that sense; command-line wrappers map it to
//! exit code 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Coordinate vectors with inconsistent lengths.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A dimension outside what an operation supports (e.g. hulls above 3-D).
    #[error("unsupported dimension {dim} for {operation} (max {max})")]
    UnsupportedDimension {
        operation: &'static str,
        dim: usize,
        max: usize,
    },

    /// A representation that cannot express the request (e.g. exact
    /// conjugation of a domain-restricted max-affine function, or a grid
    /// function that fails the convexity spot check where convexity is part
    /// of the contract).
    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    /// Structurally invalid input (empty operator, axis with hi <= lo, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A function that is nowhere finite, or carries a minus-infinity where
    /// properness was declared.
    #[error("improper function: {0}")]
    Improper(String),

    /// A declared precondition does not hold for the supplied data
    /// (non-monotone operator where monotonicity is required, gate not
    /// passed before extraction, undeclared inequality, ...).
    #[error("precondition not satisfied: {0}")]
    Precondition(String),

    /// Grid specs whose primal and dual axis blocks disagree where the
    /// J-transform needs them interchangeable.
    #[error("grid spec is not swappable: {0}")]
    NotSwappable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

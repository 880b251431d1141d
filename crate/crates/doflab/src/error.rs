//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by doflab operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A size parameter is invalid for the requested topology.
    #[error("invalid size for {kind}: {reason}")]
    InvalidSize { kind: &'static str, reason: String },

    /// A numeric parameter is out of its admissible domain.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An operation was applied to an instance of the wrong kind.
    #[error("expected a {expected} instance, got {got}")]
    KindMismatch { expected: &'static str, got: String },

    /// An encoder read a history it is not entitled to, or a future value.
    #[error(
        "causality violation: node {node} read port {port} at time {time} (current time {now})"
    )]
    CausalityViolation {
        node: usize,
        port: usize,
        time: u64,
        now: u64,
    },

    /// Total transmit power exceeded the declared budget.
    #[error("power constraint violated at time {time}: {used} > {budget}")]
    PowerExceeded { time: u64, used: f64, budget: f64 },

    /// An extension or design has the wrong dimensions.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// The focus pair of a cooperation collapse is invalid.
    #[error("invalid focus ({p}, {q}): {reason}")]
    InvalidFocus { p: usize, q: usize, reason: String },

    /// Message nulling removed every message.
    #[error("message nulling left an empty message set")]
    EmptyMessages,

    /// A joint zero-forcing system is singular.
    #[error("rank-deficient system at receiver {receiver}: decodability check failed")]
    RankDeficient { receiver: usize },

    /// Too many decodability failures across simulation trials.
    #[error("unstable simulation: {failures} decodability failures in {attempts} attempts")]
    Unstable { failures: usize, attempts: usize },

    /// A configuration file could not be parsed.
    #[error("config error at {path}:{line}: {reason}")]
    Config {
        path: String,
        line: usize,
        reason: String,
    },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the model, policies, closed forms, optimizer and simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid network, policy or simulation configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// An expression was evaluated outside the domain where it is finite.
    #[error("domain error: {0}")]
    Domain(String),

    /// Source index outside `0..n`.
    #[error("source index {index} out of range for {n} sources")]
    IndexOutOfRange { index: usize, n: usize },

    /// Two per-source vectors that must agree in length do not.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// A state invariant was broken during a run.
    #[error("invariant violated at slot {slot}: {detail}")]
    Invariant { slot: u64, detail: String },

    /// The optimizer hit its iteration budget on every start.
    #[error("optimizer did not converge (best objective {objective})")]
    NotConverged { best: Vec<f64>, objective: f64 },

    /// A statistic needs at least one completed update cycle.
    #[error("source {source_index} has no completed update cycle")]
    NoCycles { source_index: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Word parsing hit a character outside `{a, A, b, B}` (or a stray `e`).
    #[error("unexpected character {ch:?} at position {pos} in word literal")]
    ParseWord { ch: char, pos: usize },

    /// A malformed interval literal (expected `In` or `w*In`).
    #[error("cannot parse interval literal {literal:?}: {reason}")]
    ParseInterval { literal: String, reason: String },

    /// A requested size exceeds a configured cap.
    #[error("{what} {requested} exceeds the configured cap {cap}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// Vectors or subspaces from different ambient dimensions were mixed.
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// An interval fell outside the window of a finite model.
    #[error("interval {interval} is not inside the window I_{window_rank}")]
    OutOfWindow {
        interval: String,
        window_rank: usize,
    },

    /// The meet of two intervals failed to be recognized as an interval.
    /// Meet closure guarantees this cannot happen, so it flags a bug.
    #[error("intersection of {left} and {right} was not recognized as an interval (internal consistency bug)")]
    MeetNotInterval { left: String, right: String },

    /// Iterative eigensolver ran out of iterations.
    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations (tol {tol:.3e})")]
    NoConvergence {
        residual: f64,
        iterations: usize,
        tol: f64,
    },

    /// A decomposition residual exceeded the configured tolerance.
    #[error("decomposition residual {residual:.3e} exceeds tolerance {tol:.3e} at {context}")]
    Decomposition {
        residual: f64,
        tol: f64,
        context: String,
    },

    /// Invalid configuration values.
    #[error("invalid configuration: {0}")]
    Config(String),
}

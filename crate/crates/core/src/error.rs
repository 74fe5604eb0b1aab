//! Library error type.

use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Chebyshev degree below the minimum of 2.
    #[error("polynomial degree must be at least 2, got {0}")]
    InvalidDegree(usize),

    /// Projection degree outside `0..=N`.
    #[error("projection degree {requested} out of range 0..={max}")]
    InvalidProjection { requested: usize, max: usize },

    /// Two grid quantities with different node counts were combined.
    #[error("grid mismatch: {left} vs {right} nodes")]
    GridMismatch { left: usize, right: usize },

    /// Horizon parameter outside the open interval (0, 1).
    #[error("horizon delta must lie in (0, 1), got {0}")]
    InvalidHorizon(f64),

    /// Constitutive parameters violate the Van Genuchten constraints.
    #[error("invalid soil parameters: {0}")]
    InvalidSoil(String),

    /// Water content outside the invertible range of the retention curve.
    #[error("water content {value} outside admissible range ({lower}, {upper}]{context}")]
    WaterContentRange {
        value: f64,
        lower: f64,
        upper: f64,
        /// Extra location info, e.g. " at node 17, step 240".
        context: String,
    },

    /// Scenario fields violate their invariants.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// The time march produced non-finite values or left the physical range.
    #[error("numerical instability at step {step}: {reason}")]
    Unstable { step: usize, reason: String },

    /// A convergence/gap study request violates its preconditions.
    #[error("invalid study: {0}")]
    InvalidStudy(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors reported by the analytic and sampling machinery.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A nonlinear solve failed to converge (often a phase-boundary breach).
    #[error("solver failure: {0}")]
    Solver(String),
    /// A root/branch tracking step could not be completed.
    #[error("tracking failure: {0}")]
    Tracking(String),
    /// The sampled configuration left the stable region.
    #[error("sampler divergence: {0}")]
    Divergence(String),
    /// Malformed combinatorial input (pairings, rotations).
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

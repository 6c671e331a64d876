use thiserror::Error;

/// Errors raised by the spectrum solver, the dynamics and the gate compilers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("flux grid window [{x_min}, {x_max}] does not bracket a potential minimum (lowest sample at the window edge)")]
    GridMissesMinimum { x_min: f64, x_max: f64 },

    #[error("eigensolver did not converge for level {level} after {iterations} inverse iterations (relative residual {residual:.3e})")]
    EigenNonConvergence {
        level: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("level index {index} out of range: only {available} levels solved")]
    LevelOutOfRange { index: usize, available: usize },

    #[error("no intermediate level above |1> satisfies min(phi_0a, phi_1a) > {threshold} * phi_01 among {available} solved levels; solve more levels or change the flux bias")]
    NoIntermediateLevel { threshold: f64, available: usize },

    #[error("effective two-level model undefined for zero detuning")]
    ZeroDetuning,

    #[error("effective coupling g must be positive, got {0}")]
    NonPositiveCoupling(f64),

    #[error("matrix is not unitary: max |U^dagger U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized: |norm^2 - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("leakage to |a> of {leakage:.4} after segment {segment} exceeds bound {bound}")]
    LeakageExceeded {
        segment: usize,
        leakage: f64,
        bound: f64,
    },

    #[error("pulse sequence `{0}` has no segments")]
    EmptySequence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

use thiserror::Error;

use crate::evolve::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a time integration stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BlowupCause {
    /// A sample became NaN or infinite.
    NonFinite,
    /// `||grad u||_2` exceeded the configured fraction of `xi_max * ||u||_2`.
    ResolutionExhausted,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field and grid disagree: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("spectral support reaches {reach:.6} but the grid Nyquist band ends at {xi_max:.6}")]
    Aliasing { reach: f64, xi_max: f64 },

    #[error("alpha cover leaves xi = {xi:?} uncovered (floor {floor:e}); try C >= {suggested_c}")]
    Coverage { xi: Vec<f64>, floor: f64, suggested_c: f64 },

    #[error("no decomposition piece with index {0}")]
    UnknownIndex(usize),

    #[error("homogeneous norm with s = {s} < 0 is undefined for a field with a nonzero zero mode")]
    ZeroMode { s: f64 },

    #[error("boundary amplitude is {ratio:e} of the peak; x-weighted quadrature is not trustworthy")]
    BoundaryWarning { ratio: f64 },

    #[error("evolution stopped at t = {last_valid_time} ({cause:?})")]
    BlowupDetected { last_valid_time: f64, cause: BlowupCause, partial: Box<Trajectory> },

    #[error("Picard iteration failed to contract; ratio history {ratios:?}")]
    ContractionFailure { ratios: Vec<f64>, differences: Vec<f64> },

    #[error("window [2^(j+1/4), 2^(j+1/2)) holds no admissible k for alpha = {alpha}, j = {j}")]
    WindowEmpty { alpha: f64, j: u32 },

    #[error("piece with |k| = {k} < 3 would make ln^2|k| <= 1")]
    LogGuard { k: u64 },

    #[error("{0}")]
    PieceOutOfBand(String),

    #[error("not enough data: need {needed}, got {got} ({what})")]
    InsufficientData { needed: usize, got: usize, what: &'static str },

    #[error("{what} did not converge after {attempts} refinements (last relative change {last_change:e})")]
    NonConvergent { what: &'static str, attempts: usize, last_change: f64 },

    #[error("bump supports overlap along the separation axis; the co-area Jacobian is singular")]
    SupportOverlap,
}

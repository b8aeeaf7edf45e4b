use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants fall into two families: parameter problems detected before any
/// computation starts (`InvalidParameter`, `Unresolved`, `Schema`, ...) and
/// invariant violations detected while a run is in progress
/// (`NonFinite`, `Invariant`). The CLI maps the first family to exit code 2
/// and the second to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("grid mismatch: expected N = {expected}, got N = {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("frequency {frequency} is not resolved on an N = {n} grid (needs frequency <= {limit})")]
    Unresolved { frequency: u64, n: usize, limit: usize },

    #[error("time {t} is outside the velocity schedule [0, {horizon})")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("non-finite value in field at t = {t}")]
    NonFinite { t: f64 },

    #[error("invariant violated at t = {t}: {what}")]
    Invariant { t: f64, what: String },

    #[error("trajectory has {found} snapshots; {needed} required")]
    InsufficientSnapshots { found: usize, needed: usize },

    #[error("test function support [{lo}, {hi}] is not contained in the xi grid [{xi_min}, {xi_max}]")]
    SupportNotContained { lo: f64, hi: f64, xi_min: f64, xi_max: f64 },

    #[error("{0}")]
    Schema(String),

    #[error("sweep produced no successful runs")]
    EmptySweep,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures that happen mid-run (as opposed to bad input).
    pub fn is_runtime_violation(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::Invariant { .. })
    }
}

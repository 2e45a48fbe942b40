use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weights are not on the simplex (sum = {sum}, min = {min})")]
    NotOnSimplex { sum: f64, min: f64 },

    #[error("matrix `{0}` is not symmetric")]
    NotSymmetric(String),

    #[error("matrix `{0}` is not diagonal")]
    NotDiagonal(String),

    #[error("matrix `{0}` is not positive definite")]
    NotPositiveDefinite(String),

    #[error("rate condition violated: {0}")]
    C2Violated(String),

    #[error("iteration did not converge after {iterations} iterations (last update {last_update:e})")]
    Divergence {
        iterations: usize,
        last_update: f64,
        last_iterate: Vec<f64>,
    },

    #[error("simulation blew up at t = {time}: norm {norm:e} exceeds guard {guard:e}")]
    BlowUp { time: f64, norm: f64, guard: f64 },

    #[error("history underrun: requested t = {requested}, oldest stored t = {oldest}")]
    HistoryUnderrun { requested: f64, oldest: f64 },

    #[error("not enough samples in fit window: {0} (need at least 10)")]
    TooFewSamples(usize),

    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),

    #[error("unknown nonlinearity `{0}`")]
    UnknownNonlinearity(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

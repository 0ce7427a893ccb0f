use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} samples per component, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{op} needs {expected} component(s), got {got}")]
    ComponentMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("field has a nonzero mean; {0} is singular at k = 0")]
    NonzeroMean(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("band j = {j} outside the resolvable range [{min}, {max}]")]
    BandOutOfRange { j: i32, min: i32, max: i32 },

    #[error("non-finite coefficient in {field} at t = {t}")]
    NonFinite { field: &'static str, t: f64 },

    #[error("Hall CFL violated: dt = {dt} exceeds bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

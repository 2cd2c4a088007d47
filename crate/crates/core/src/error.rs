use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("representation mismatch: expected {expected} field")]
    Representation { expected: &'static str },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("parity mismatch: {0}")]
    Parity(String),
    #[error("field has nonzero vertical mean (max |<f>| = {0:e})")]
    NonzeroVerticalMean(f64),
    #[error("vorticity component requires i != j, got ({0}, {0})")]
    SameAxes(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
    #[error("CFL violation: dt = {dt:e} exceeds limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("recurrence window violated: T = {t_final:e} >= T_rec = {t_rec:e}")]
    Recurrence { t_final: f64, t_rec: f64 },
    #[error("config error in key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("snapshot parse error at line {line}: {msg}")]
    Snapshot { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

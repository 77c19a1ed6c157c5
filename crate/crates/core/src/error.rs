use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample {index} has magnitude {value} >= 1")]
    SampleOutOfRange { index: usize, value: f64 },

    #[error("sigma-delta state diverged: |u[{index}]| = {value:e} exceeds {threshold:e}")]
    Instability {
        index: usize,
        value: f64,
        threshold: f64,
    },

    #[error("input of length {len} is too short for {needed} samples of support")]
    WindowTooShort { len: usize, needed: usize },

    #[error("bit sequence entry {index} is {value}, expected -1 or +1")]
    NotABit { index: usize, value: i64 },

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error("kernel and stream disagree: {0}")]
    ParamMismatch(String),

    #[error("evaluation at t = {t} needs samples outside the available window")]
    GuardViolation { t: f64 },

    #[error("quadrature did not converge: {0}")]
    NotConverged(String),

    #[error("empty evaluation interior")]
    EmptyInterior,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid subsampling: {0}")]
    InvalidSubsampling(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("profiles do not cross inside 1..={n}: {reason}")]
    NoCrossing { n: usize, reason: String },

    #[error("empty criterion path")]
    EmptyPath,

    #[error("degenerate draw: minimal error is exactly zero")]
    DegenerateDraw,

    #[error("efficiency value {0} is below 1")]
    EfficiencyBelowOne(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular frequency v = {v}: log argument vanishes")]
    SingularFrequency { v: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter p must satisfy 0<p<1, got {0}")]
    InvalidParam(f64),

    #[error("sample must contain at least one observation")]
    EmptySample,

    #[error("observation {value} at index {index} is outside the support (values must be >= 1)")]
    OutOfSupport { index: usize, value: u64 },

    #[error("{method} requires at least {required} observations, got {got}")]
    SampleTooSmall {
        method: &'static str,
        required: usize,
        got: usize,
    },

    #[error("Stirling table needs row {requested} but the configured cap is {cap} rows")]
    Capacity { requested: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

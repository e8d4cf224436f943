use thiserror::Error;

/// Errors raised by the simulator, the readout pipelines and the analysis helpers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FsrError {
    #[error("capacity exceeded: {requested} qubits requested, maximum is {max}")]
    Capacity { requested: usize, max: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("cannot normalize a zero vector")]
    Normalization,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no post-selected mass: the truncated register was never observed")]
    NoMass,

    #[error("singular evaluation point: series sum {0:e} is numerically zero")]
    SingularPoint(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FsrError>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(FsrError::Shape(msg.into()))
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(FsrError::Domain(msg.into()))
}

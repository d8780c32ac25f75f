use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient points: need at least 2, got {0}")]
    InsufficientPoints(usize),
    #[error("insufficient correspondences: need at least 4, got {0}")]
    InsufficientCorrespondences(usize),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("point maps to infinity (w = {0:e})")]
    PointAtInfinity(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

use crate::ratfun::PoleError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Pole(#[from] PoleError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("support error: {0}")]
    Support(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("dimension overflow: {0}")]
    Dimension(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("protocol: {0}")]
    Protocol(String),
}

pub type Result<V> = std::result::Result<V, Error>;

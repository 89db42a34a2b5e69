use thiserror::Error;

use crate::circuits::CircuitError;
use crate::qsim::QsimError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: expected length {expected}, got {actual}")]
    Length {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("payload of {actual} bits exceeds the configured width of {max} bits")]
    PayloadOverflow { max: usize, actual: usize },

    #[error("corrupt ciphertext: {0}")]
    CorruptCiphertext(String),

    #[error("verification key and returned key disagree: {0}")]
    KeyMismatch(String),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Circuit(#[from] CircuitError),

    #[error(transparent)]
    Quantum(#[from] QsimError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

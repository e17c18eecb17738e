use std::io;

use thiserror::Error;

/// Errors produced across the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: expected {expected}x{expected} at pitch {expected_pitch}, got {got}x{got} at pitch {got_pitch}")]
    GridMismatch {
        expected: usize,
        expected_pitch: f64,
        got: usize,
        got_pitch: f64,
    },

    #[error("beam does not fit the entrance pupil: 4*w0 = {span} exceeds aperture side {aperture}")]
    Pupil { span: f64, aperture: f64 },

    #[error("spectrum is not normalized: sum = {0}")]
    Unnormalized(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing trace: {0}")]
    MissingTrace(&'static str),

    #[error("non-finite loss at epoch {epoch}, step {step}")]
    NonFinite { epoch: usize, step: usize },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error class: 1 validation, 2 I/O, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            Error::NonFinite { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors surfaced by instance construction, analysis, and file handling.
///
/// Shape mismatches inside the GF(2) kernels are programming errors and panic
/// instead; everything a config file or CLI flag can trigger lands here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("labeling invalid: {0}")]
    InvalidLabeling(String),

    #[error("coloring is not a set indicator: {0}")]
    NotIndicator(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed file: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 2 for usage and size
    /// limits, 1 for violated invariants and bad inputs.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidParameter(_) | Error::TooLarge(_) => 2,
            _ => 1,
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library. Preconditions that indicate programmer
/// error (shape mismatches, invalid configuration) are reported rather than
/// panicking so the CLI can exit with a single-line diagnostic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("target column '{0}' not found in header")]
    MissingTarget(String),

    #[error("malformed cells (row, column): {0}")]
    MalformedCells(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("fuzzy rule references unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("feature mask has no set bits")]
    EmptyMask,

    #[error("mask length {mask} does not match feature count {features}")]
    MaskLength { mask: usize, features: usize },

    #[error("row width {got} does not match model input width {expected}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("length mismatch: targets {targets} vs predictions {predictions}")]
    LengthMismatch { targets: usize, predictions: usize },

    #[error("training diverged at epoch {epoch}: loss is not finite (learning rate too high?)")]
    Diverged { epoch: usize },
}

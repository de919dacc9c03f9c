use std::path::PathBuf;

/// Errors produced by curveflow operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("unsupported image format: {0}")]
    Format(String),

    #[error("non-finite value at iteration {iteration} ({context})")]
    Divergence { iteration: usize, context: String },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("no readable images in {}", .0.display())]
    EmptyCorpus(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

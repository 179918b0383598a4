use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {width}x{height} does not match {len} pixels")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("malformed PGM: {0}")]
    Format(String),

    #[error("unsupported PGM maxval {0}: only 8-bit images (maxval 255) are accepted")]
    UnsupportedDepth(u64),

    #[error("truncated PGM pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("image contains no pixels")]
    EmptyImage,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

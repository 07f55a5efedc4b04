use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image data has {len} entries, expected {expected} for side {n}")]
    DataLength { n: usize, len: usize, expected: usize },

    #[error("image side must be positive")]
    EmptyImage,

    #[error("image contains a non-finite value at linear index {0}")]
    NonFiniteData(usize),

    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("invalid box bounds [{lower}, {upper}]: lower must be below upper")]
    InvalidBox { lower: f64, upper: f64 },

    #[error("malformed PGM header: {0}")]
    PgmHeader(String),

    #[error("PGM image is not square ({width}x{height})")]
    NonSquare { width: usize, height: usize },

    #[error("PGM maxval {0} exceeds 255")]
    MaxvalTooLarge(u32),

    #[error("PGM pixel data truncated: expected {expected} samples, found {found}")]
    PgmTruncated { expected: usize, found: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel {rows}x{cols} does not fit in a {n}x{n} image")]
    KernelTooLarge { rows: usize, cols: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reference image is identically zero")]
    ZeroReference,

    #[error("noise field is identically zero")]
    ZeroNoise,

    #[error("non-finite value encountered at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

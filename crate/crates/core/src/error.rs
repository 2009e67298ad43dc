use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("cannot decode PNG {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported color model in {path}: {model}")]
    UnsupportedColor { path: PathBuf, model: String },

    #[error("invalid NPY data: {0}")]
    Npy(String),

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("patch size {patch_size} does not divide image of height {height} and width {width}")]
    PatchSize {
        height: usize,
        width: usize,
        patch_size: usize,
    },

    #[error("no admissible patch size divides image side {image_side}")]
    NoAdmissiblePatch { image_side: usize },

    #[error("channel {channel} out of range for tensor with {channels} channels")]
    ChannelOutOfRange { channel: usize, channels: usize },

    #[error("channel mismatch: expected {expected}, got {actual}")]
    ChannelMismatch { expected: usize, actual: usize },

    #[error("complex has {cells} cells, above the oracle limit of {limit}")]
    ComplexTooLarge { cells: usize, limit: usize },

    #[error("diagram has {points} points in dimension {dim}, above the matching limit of {limit}")]
    DiagramTooLarge {
        dim: u8,
        points: usize,
        limit: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid weights: {0}")]
    Weights(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

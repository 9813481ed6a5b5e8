use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Input file uses a format or dtype outside the supported subset.
    #[error("unsupported format: {0}")]
    Format(String),

    /// Input file violates its own declared layout.
    #[error("corrupt file: {0}")]
    Corrupt(String),

    /// Volume has fewer than two distinct values and cannot be normalized.
    #[error("degenerate volume: all voxels share one value")]
    DegenerateVolume,

    /// Mask contains no foreground voxels.
    #[error("empty ROI: mask has no foreground voxels")]
    EmptyRoi,

    #[error("weight file invalid: {0}")]
    WeightFormat(String),

    #[error("requested layer {requested} not available (network exposes {available})")]
    Layer { requested: usize, available: usize },

    /// Texture matrix cannot be built (e.g. no co-occurring voxel pairs).
    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(&'static str),

    #[error("missing modality: {0}")]
    MissingModality(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("test undefined: {0}")]
    UndefinedTest(&'static str),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("AUC undefined: only one class present")]
    UndefinedAuc,

    #[error("config error: {0}")]
    Config(String),

    #[error("ingest error: {0}")]
    Ingest(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

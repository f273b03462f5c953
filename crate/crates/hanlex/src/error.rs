use std::path::PathBuf;

use thiserror::Error;

/// Unified error type for corpus ingestion, file formats, configuration and
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// Input bytes are not valid in the requested encoding.
    #[error("cannot decode input as {encoding} at byte offset {offset}")]
    Decoding { encoding: String, offset: usize },

    /// The requested encoding label is not recognized.
    #[error("unsupported encoding {0:?}")]
    UnsupportedEncoding(String),

    /// A structured input file (TSV, segmented text) violates its format.
    #[error("{origin}:{line}: {detail}")]
    Format {
        origin: String,
        line: usize,
        detail: String,
    },

    /// A lexicon file lists the same surface twice.
    #[error("{origin}:{line}: duplicate surface {surface:?}")]
    DuplicateSurface {
        origin: String,
        line: usize,
        surface: String,
    },

    /// A configuration value is out of range or malformed.
    #[error("config: {key}: {detail}")]
    Config { key: String, detail: String },

    /// Two segmentations being compared do not cover the same characters.
    #[error("segmentations cover different character sequences")]
    MismatchedText,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

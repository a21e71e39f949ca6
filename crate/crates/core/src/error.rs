//! Error type shared by the whole crate.

use std::path::PathBuf;

use crate::topology::OverlayKind;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter or configuration field violates its contract. The message
    /// names the offending field.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A protocol step was driven with an overlay built for another mode.
    #[error("wrong overlay kind: expected {expected}, got {actual}")]
    WrongOverlayKind {
        expected: OverlayKind,
        actual: OverlayKind,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

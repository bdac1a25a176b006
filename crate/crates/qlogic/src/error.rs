use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Logic(#[from] qlogic_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error(
        "fixture {fixture}: annotation {field} is {expected} in the manifest, recomputed {found}"
    )]
    AnnotationMismatch {
        fixture: String,
        field: &'static str,
        expected: String,
        found: String,
    },
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

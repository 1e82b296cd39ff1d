use std::path::{Path, PathBuf};

use crate::storage::SiteId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("store error: {0}")]
    Store(#[from] rusqlite::Error),
    #[error("store schema version {found} is newer than supported version {supported}")]
    SchemaTooNew { found: i64, supported: i64 },
    #[error("unknown site id {0}")]
    UnknownSite(SiteId),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("corrupt store row: {0}")]
    Corrupt(String),
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),
    #[error("{0}")]
    Report(String),
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

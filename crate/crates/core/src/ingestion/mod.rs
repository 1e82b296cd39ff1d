//! Site discovery from a directory mirror and homepage fetching.

mod directory;
mod fetch;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use url::Url;

pub use directory::{extract_directory_entries, scan_directory_mirror, ScanReport};
pub use fetch::{
    fetch_homepage, registrable_domain, FetchConfig, FetchOutcome, FetchResult, FetchedPage,
    Fetcher, NeverFlag, ThreatClassifier,
};

/// A site listed in the directory.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteRecord {
    pub url: String,
    pub category_path: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidRecord {
    #[error("not an absolute URL: {0:?}")]
    Url(String),
    #[error("empty category path")]
    EmptyCategory,
}

impl SiteRecord {
    pub fn new(url: &str, category_path: &str, description: &str) -> Result<Self, InvalidRecord> {
        let url = url.trim();
        if url.is_empty() || Url::parse(url).is_err() {
            return Err(InvalidRecord::Url(url.to_owned()));
        }
        if category_path.is_empty() {
            return Err(InvalidRecord::EmptyCategory);
        }
        Ok(SiteRecord {
            url: url.to_owned(),
            category_path: category_path.to_owned(),
            description: description.to_owned(),
        })
    }

    /// Records are unique on `(url, category_path)`.
    pub fn key(&self) -> (&str, &str) {
        (&self.url, &self.category_path)
    }
}

/// Why a site could not be evaluated. Every kind surfaces as an `E`
/// verdict for the whole site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorKind {
    RedirectedOffSite,
    NetworkFailure,
    Timeout,
    ServerBlocked,
    ThreatFlagged,
    EvaluationFailed,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 6] = [
        ErrorKind::RedirectedOffSite,
        ErrorKind::NetworkFailure,
        ErrorKind::Timeout,
        ErrorKind::ServerBlocked,
        ErrorKind::ThreatFlagged,
        ErrorKind::EvaluationFailed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::RedirectedOffSite => "redirected_off_site",
            ErrorKind::NetworkFailure => "network_failure",
            ErrorKind::Timeout => "timeout",
            ErrorKind::ServerBlocked => "server_blocked",
            ErrorKind::ThreatFlagged => "threat_flagged",
            ErrorKind::EvaluationFailed => "evaluation_failed",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown error kind {0:?}")]
pub struct UnknownErrorKind(pub String);

impl FromStr for ErrorKind {
    type Err = UnknownErrorKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownErrorKind(s.to_owned()))
    }
}

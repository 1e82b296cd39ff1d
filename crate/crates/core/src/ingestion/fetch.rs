use std::io::Read;
use std::time::{Duration, Instant};

use reqwest::blocking::Client;
use reqwest::header::{ACCEPT, CONTENT_TYPE, LOCATION};
use reqwest::redirect::Policy;
use reqwest::StatusCode;
use time::OffsetDateTime;
use url::{Host, Url};

use super::ErrorKind;
use crate::storage::MAX_BODY_BYTES;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchConfig {
    pub timeout_secs: u64,
    pub max_redirects: u32,
    pub user_agent: String,
    pub politeness_delay_ms: u64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            timeout_secs: 30,
            max_redirects: 5,
            user_agent: "hutlint/1.0".to_owned(),
            politeness_delay_ms: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchedPage {
    /// Response body, read up to one byte past the storage cap.
    pub body: Vec<u8>,
    pub final_url: String,
    pub http_status: u16,
    pub fetched_at: OffsetDateTime,
    /// Charset parameter of the `Content-Type` header, if any.
    pub charset: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchOutcome {
    Fetched(FetchedPage),
    Failed(ErrorKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchResult {
    pub outcome: FetchOutcome,
    /// HTTP requests issued, redirects included.
    pub requests: u32,
}

impl FetchResult {
    pub fn error_kind(&self) -> Option<ErrorKind> {
        match self.outcome {
            FetchOutcome::Failed(kind) => Some(kind),
            FetchOutcome::Fetched(_) => None,
        }
    }
}

/// Decides whether fetched content should be withheld from evaluation.
pub trait ThreatClassifier: Send + Sync {
    fn is_threat(&self, url: &str, body: &[u8]) -> bool;
}

/// Classifier that never flags anything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeverFlag;

impl ThreatClassifier for NeverFlag {
    fn is_threat(&self, _url: &str, _body: &[u8]) -> bool {
        false
    }
}

/// Registrable domain of a URL's host (`www.a.example.co.uk` maps to
/// `example.co.uk`). IP addresses and hosts without a public suffix
/// compare as themselves.
pub fn registrable_domain(url: &Url) -> Option<String> {
    match url.host()? {
        Host::Domain(d) => {
            let d = d.trim_end_matches('.').to_ascii_lowercase();
            let reg = psl::domain_str(&d).map(str::to_owned);
            Some(reg.unwrap_or(d))
        }
        Host::Ipv4(ip) => Some(ip.to_string()),
        Host::Ipv6(ip) => Some(ip.to_string()),
    }
}

pub struct Fetcher {
    client: Client,
    config: FetchConfig,
    classifier: Box<dyn ThreatClassifier>,
}

impl Fetcher {
    pub fn new(config: FetchConfig) -> Self {
        Self::with_classifier(config, Box::new(NeverFlag))
    }

    pub fn with_classifier(config: FetchConfig, classifier: Box<dyn ThreatClassifier>) -> Self {
        let client = Client::builder()
            .redirect(Policy::none())
            .user_agent(config.user_agent.clone())
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .expect("TLS-less HTTP client always builds");
        Fetcher {
            client,
            config,
            classifier,
        }
    }

    pub fn config(&self) -> &FetchConfig {
        &self.config
    }

    /// GETs `url`, following same-site redirects. Every failure is
    /// reported as an [`ErrorKind`]; nothing is propagated.
    pub fn fetch(&self, url: &str) -> FetchResult {
        let deadline = Instant::now() + Duration::from_secs(self.config.timeout_secs);
        let mut requests = 0;
        let outcome = self.fetch_inner(url, deadline, &mut requests);
        FetchResult { outcome, requests }
    }

    fn fetch_inner(&self, url: &str, deadline: Instant, requests: &mut u32) -> FetchOutcome {
        let Ok(mut current) = Url::parse(url) else {
            return FetchOutcome::Failed(ErrorKind::NetworkFailure);
        };
        let site = registrable_domain(&current);
        for hop in 0..=self.config.max_redirects {
            let remaining = deadline.saturating_duration_since(Instant::now());
            if remaining.is_zero() {
                return FetchOutcome::Failed(ErrorKind::Timeout);
            }
            *requests += 1;
            let resp = match self
                .client
                .get(current.clone())
                .header(ACCEPT, "text/html")
                .timeout(remaining)
                .send()
            {
                Ok(resp) => resp,
                Err(err) => return FetchOutcome::Failed(classify(&err, deadline)),
            };
            let status = resp.status();
            if status.is_redirection() {
                let next = resp
                    .headers()
                    .get(LOCATION)
                    .and_then(|l| l.to_str().ok())
                    .and_then(|l| current.join(l).ok());
                let Some(next) = next else {
                    return FetchOutcome::Failed(ErrorKind::NetworkFailure);
                };
                if registrable_domain(&next) != site {
                    return FetchOutcome::Failed(ErrorKind::RedirectedOffSite);
                }
                if hop == self.config.max_redirects {
                    break;
                }
                current = next;
                continue;
            }
            if matches!(
                status,
                StatusCode::FORBIDDEN | StatusCode::TOO_MANY_REQUESTS
            ) {
                return FetchOutcome::Failed(ErrorKind::ServerBlocked);
            }
            if !status.is_success() {
                return FetchOutcome::Failed(ErrorKind::NetworkFailure);
            }
            let charset = resp
                .headers()
                .get(CONTENT_TYPE)
                .and_then(|v| v.to_str().ok())
                .and_then(content_type_charset);
            let mut body = Vec::new();
            if let Err(err) = resp.take(MAX_BODY_BYTES as u64 + 1).read_to_end(&mut body) {
                let timed_out =
                    err.kind() == std::io::ErrorKind::TimedOut || Instant::now() >= deadline;
                return FetchOutcome::Failed(if timed_out {
                    ErrorKind::Timeout
                } else {
                    ErrorKind::NetworkFailure
                });
            }
            if self.classifier.is_threat(current.as_str(), &body) {
                return FetchOutcome::Failed(ErrorKind::ThreatFlagged);
            }
            return FetchOutcome::Fetched(FetchedPage {
                body,
                final_url: current.to_string(),
                http_status: status.as_u16(),
                fetched_at: OffsetDateTime::now_utc(),
                charset,
            });
        }
        // redirect budget exhausted
        FetchOutcome::Failed(ErrorKind::NetworkFailure)
    }
}

fn classify(err: &reqwest::Error, deadline: Instant) -> ErrorKind {
    if err.is_timeout() || Instant::now() >= deadline {
        ErrorKind::Timeout
    } else {
        ErrorKind::NetworkFailure
    }
}

fn content_type_charset(value: &str) -> Option<String> {
    value.split(';').skip(1).find_map(|param| {
        let (k, v) = param.split_once('=')?;
        k.trim()
            .eq_ignore_ascii_case("charset")
            .then(|| v.trim().trim_matches('"').to_owned())
    })
}

/// One-off fetch with a fresh client.
pub fn fetch_homepage(url: &str, cfg: &FetchConfig) -> FetchResult {
    Fetcher::new(cfg.clone()).fetch(url)
}

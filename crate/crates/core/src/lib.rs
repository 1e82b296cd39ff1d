//! Homepage usability audit engine.
//!
//! Parses page source into a lenient element tree ([`dom`]), checks it
//! against a catalog of seventeen usability guidelines ([`guidelines`]),
//! scores and aggregates results ([`scoring`]), and drives a resumable
//! ingest, fetch, evaluate and report pipeline over a directory mirror
//! ([`ingestion`], [`storage`], [`pipeline`], [`report`]).

pub mod dom;
pub mod error;
pub mod guidelines;
pub mod ingestion;
pub mod pipeline;
pub mod report;
pub mod scoring;
pub mod storage;
pub mod synth;

pub use dom::{parse_document, Document, ElementRef};
pub use error::{Error, Result};
pub use guidelines::{evaluate_page, run_guideline, GuidelineId, Verdict, VerdictVector};
pub use ingestion::{ErrorKind, FetchConfig, SiteRecord};
pub use report::ReportFormat;
pub use scoring::{violation_percentage, CategorySummary, Outcome, SiteEvaluation};
pub use storage::{QueryFilter, SiteId, Store};

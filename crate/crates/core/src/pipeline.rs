//! The four pipeline steps over a [`Store`]: ingest the directory mirror,
//! fetch homepages, evaluate stored sources, and gather report rows.
//!
//! Each step only touches work left pending by earlier runs, so steps can
//! be re-run safely after an interruption.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;
use std::sync::{mpsc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use url::Url;

use crate::dom::parse_document;
use crate::error::{Error, Result};
use crate::guidelines::evaluate_page;
use crate::ingestion::{scan_directory_mirror, ErrorKind, FetchConfig, Fetcher, ThreatClassifier};
use crate::scoring::{
    guideline_breakdown, rank_sites, summarize_by_category, violation_percentage, CategorySummary,
    GuidelineBreakdown, Outcome, SiteEvaluation,
};
use crate::storage::{QueryFilter, SiteId, Store, StoredSite, StoredSource, MAX_BODY_BYTES};

const EVALUATE_BATCH: usize = 256;
const FETCH_WRITE_BATCH: usize = 32;

/// Limits beyond which a stored page is recorded as
/// [`ErrorKind::EvaluationFailed`] instead of being scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    pub max_bytes: usize,
    pub max_duration: Duration,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            max_bytes: MAX_BODY_BYTES,
            max_duration: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub scanned_files: usize,
    /// Distinct records found in the mirror.
    pub records: usize,
    /// Records not already in the store.
    pub inserted: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FetchSummary {
    pub inputs: usize,
    pub stored: usize,
    pub errors: usize,
    pub by_kind: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvaluateSummary {
    /// Stored sources taken up by this run.
    pub inputs: usize,
    pub tested: usize,
    pub errors: usize,
    /// Fetch failures recorded as errored evaluations.
    pub carried_fetch_errors: usize,
}

/// Step 1: scan `mirror_root` and store every listed site.
pub fn ingest(store: &mut Store, mirror_root: &Path) -> Result<IngestSummary> {
    let scan = scan_directory_mirror(mirror_root)?;
    let inserted = store.put_sites(&scan.records)?;
    Ok(IngestSummary {
        scanned_files: scan.scanned_files,
        records: scan.records.len(),
        inserted,
        errors: scan.errors(),
    })
}

fn host_key(url: &str) -> String {
    Url::parse(url)
        .ok()
        .and_then(|u| u.host_str().map(str::to_ascii_lowercase))
        .unwrap_or_default()
}

/// Step 2: fetch every pending site. Requests run on `concurrency`
/// workers with at most one request in flight per host; results are
/// written by the calling thread.
pub fn fetch_pending(
    store: &mut Store,
    config: &FetchConfig,
    concurrency: usize,
    classifier: Option<Box<dyn ThreatClassifier>>,
) -> Result<FetchSummary> {
    if store.counts()?.sites == 0 {
        return Err(Error::MissingPrerequisite(
            "no sites in store; run ingest first".into(),
        ));
    }
    let pending = store.pending_fetch()?;
    let mut summary = FetchSummary {
        inputs: pending.len(),
        ..Default::default()
    };
    if pending.is_empty() {
        return Ok(summary);
    }

    let mut by_host: BTreeMap<String, Vec<StoredSite>> = BTreeMap::new();
    for site in pending {
        by_host
            .entry(host_key(&site.record.url))
            .or_default()
            .push(site);
    }
    let queue: Mutex<VecDeque<Vec<StoredSite>>> = Mutex::new(by_host.into_values().collect());
    let fetcher = match classifier {
        Some(c) => Fetcher::with_classifier(config.clone(), c),
        None => Fetcher::new(config.clone()),
    };
    let delay = Duration::from_millis(config.politeness_delay_ms);
    let workers = concurrency.max(1);

    thread::scope(|scope| -> Result<()> {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            let fetcher = &fetcher;
            scope.spawn(move || loop {
                let Some(group) = queue.lock().expect("queue lock").pop_front() else {
                    break;
                };
                for (i, site) in group.into_iter().enumerate() {
                    if i > 0 && !delay.is_zero() {
                        thread::sleep(delay);
                    }
                    let result = fetcher.fetch(&site.record.url);
                    if tx.send((site.id, result)).is_err() {
                        return;
                    }
                }
            });
        }
        drop(tx);

        let mut batch = Vec::with_capacity(FETCH_WRITE_BATCH);
        let mut flush = |batch: &mut Vec<(SiteId, crate::ingestion::FetchResult)>,
                         summary: &mut FetchSummary|
         -> Result<()> {
            let refs: Vec<_> = batch.iter().map(|(id, r)| (*id, r)).collect();
            store.put_sources(&refs)?;
            for (_, r) in batch.drain(..) {
                match r.error_kind() {
                    Some(kind) => {
                        summary.errors += 1;
                        *summary.by_kind.entry(kind.to_string()).or_default() += 1;
                    }
                    None => summary.stored += 1,
                }
            }
            Ok(())
        };
        for item in rx {
            batch.push(item);
            if batch.len() >= FETCH_WRITE_BATCH {
                flush(&mut batch, &mut summary)?;
            }
        }
        flush(&mut batch, &mut summary)
    })?;
    Ok(summary)
}

/// Scores one stored page, or reports why it could not be scored.
pub fn evaluate_source(source: &StoredSource, budget: &EvalBudget) -> Outcome {
    if source.truncated || source.body.len() > budget.max_bytes {
        return Outcome::Errored(ErrorKind::EvaluationFailed);
    }
    let started = Instant::now();
    let doc = parse_document(&source.body, source.charset.as_deref());
    let verdicts = evaluate_page(&doc, &source.final_url);
    if started.elapsed() > budget.max_duration {
        return Outcome::Errored(ErrorKind::EvaluationFailed);
    }
    Outcome::Evaluated {
        verdicts,
        violation_pct: violation_percentage(&verdicts),
    }
}

/// Step 3: evaluate every stored source lacking an evaluation and record
/// fetch failures as errored evaluations.
pub fn evaluate_pending(store: &mut Store, budget: &EvalBudget) -> Result<EvaluateSummary> {
    let counts = store.counts()?;
    if counts.sources == 0 && counts.fetch_failures == 0 {
        return Err(Error::MissingPrerequisite(
            "no fetched sources in store; run fetch first".into(),
        ));
    }
    let mut summary = EvaluateSummary::default();

    let carried: Vec<(SiteId, Outcome)> = store
        .unrecorded_fetch_failures()?
        .into_iter()
        .map(|(id, kind)| (id, Outcome::Errored(kind)))
        .collect();
    summary.carried_fetch_errors = carried.len();
    store.put_evaluations(&carried)?;

    let pending = store.pending_evaluation()?;
    summary.inputs = pending.len();
    for chunk in pending.chunks(EVALUATE_BATCH) {
        let sources = chunk
            .iter()
            .map(|&id| store.get_source(id)?.ok_or(Error::UnknownSite(id)))
            .collect::<Result<Vec<_>>>()?;
        let outcomes: Vec<(SiteId, Outcome)> = sources
            .par_iter()
            .map(|src| (src.site_id, evaluate_source(src, budget)))
            .collect();
        for (_, o) in &outcomes {
            match o {
                Outcome::Evaluated { .. } => summary.tested += 1,
                Outcome::Errored(_) => summary.errors += 1,
            }
        }
        store.put_evaluations(&outcomes)?;
    }
    Ok(summary)
}

/// Evaluations matching `filter`, ranked, truncated to `limit`.
pub fn ranked_evaluations(
    store: &Store,
    filter: &QueryFilter,
    limit: Option<usize>,
) -> Result<Vec<SiteEvaluation>> {
    let evals: Vec<_> = store
        .query(filter)?
        .into_iter()
        .filter_map(|r| r.evaluation)
        .collect();
    let mut ranked = rank_sites(evals);
    if let Some(n) = limit {
        ranked.truncate(n);
    }
    Ok(ranked)
}

pub fn category_summaries(store: &Store, filter: &QueryFilter) -> Result<Vec<CategorySummary>> {
    let evals: Vec<_> = store
        .query(filter)?
        .into_iter()
        .filter_map(|r| r.evaluation)
        .collect();
    Ok(summarize_by_category(&evals))
}

pub fn category_breakdown(store: &Store, filter: &QueryFilter) -> Result<Vec<GuidelineBreakdown>> {
    let evals: Vec<_> = store
        .query(filter)?
        .into_iter()
        .filter_map(|r| r.evaluation)
        .collect();
    Ok(guideline_breakdown(&evals))
}

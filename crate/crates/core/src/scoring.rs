//! Violation percentages, site ranking and per-category aggregation.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::guidelines::{GuidelineId, Verdict, VerdictVector};
use crate::ingestion::ErrorKind;
use crate::storage::SiteId;

/// Top-level directory categories a site can be filed under.
pub const DIRECTORY_CATEGORIES: [&str; 14] = [
    "Arts_and_Entertainment",
    "Business_and_Economy",
    "Education",
    "Government",
    "Guides_and_Directories",
    "Health",
    "Maps_and_Views",
    "News_and_Media",
    "Recreation_and_Sports",
    "Science_and_Environment",
    "Society_and_Culture",
    "Transportation",
    "Travel_and_Tourism",
    "Weather",
];

pub const UNCATEGORISED: &str = "Uncategorised";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Evaluated {
        verdicts: VerdictVector,
        violation_pct: u8,
    },
    Errored(ErrorKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteEvaluation {
    pub site_id: SiteId,
    pub url: String,
    pub category_path: String,
    pub outcome: Outcome,
}

impl SiteEvaluation {
    pub fn evaluated(
        site_id: SiteId,
        url: &str,
        category_path: &str,
        verdicts: VerdictVector,
    ) -> Self {
        SiteEvaluation {
            site_id,
            url: url.to_owned(),
            category_path: category_path.to_owned(),
            outcome: Outcome::Evaluated {
                verdicts,
                violation_pct: violation_percentage(&verdicts),
            },
        }
    }

    pub fn errored(site_id: SiteId, url: &str, category_path: &str, kind: ErrorKind) -> Self {
        SiteEvaluation {
            site_id,
            url: url.to_owned(),
            category_path: category_path.to_owned(),
            outcome: Outcome::Errored(kind),
        }
    }

    pub fn violation_pct(&self) -> Option<u8> {
        match self.outcome {
            Outcome::Evaluated { violation_pct, .. } => Some(violation_pct),
            Outcome::Errored(_) => None,
        }
    }

    pub fn verdicts(&self) -> Option<&VerdictVector> {
        match &self.outcome {
            Outcome::Evaluated { verdicts, .. } => Some(verdicts),
            Outcome::Errored(_) => None,
        }
    }
}

/// `round_half_up(100 * violations / 17)`. The denominator is always the
/// full catalog size, so Neutral verdicts dilute the score like Respect.
pub fn violation_percentage(vv: &VerdictVector) -> u8 {
    pct_for_violations(vv.count(Verdict::Violate))
}

pub(crate) fn pct_for_violations(violations: usize) -> u8 {
    let n = GuidelineId::ALL.len();
    // (100v + n/2) / n with the half taken exactly: (200v + n) / 2n
    ((200 * violations + n) / (2 * n)) as u8
}

/// Evaluated sites by descending percentage then URL, followed by errored
/// sites in URL order.
pub fn rank_sites(mut evals: Vec<SiteEvaluation>) -> Vec<SiteEvaluation> {
    evals.sort_by(|a, b| {
        match (a.violation_pct(), b.violation_pct()) {
            (Some(x), Some(y)) => y.cmp(&x).then_with(|| a.url.cmp(&b.url)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => a.url.cmp(&b.url),
        }
        .then_with(|| a.category_path.cmp(&b.category_path))
        .then_with(|| a.site_id.cmp(&b.site_id))
    });
    evals
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySummary {
    pub category: String,
    pub occurrences: u64,
    pub errors: u64,
    pub evaluated: u64,
    pub sum_violation_pct: u64,
    /// Sum over evaluated sites divided by all occurrences, errored sites
    /// included.
    pub avg_violation_pct: f64,
}

impl CategorySummary {
    /// Builds a summary from published-style totals.
    pub fn from_totals(
        category: &str,
        occurrences: u64,
        errors: u64,
        sum_violation_pct: u64,
    ) -> Self {
        assert!(errors <= occurrences, "errors exceed occurrences");
        let avg = if occurrences == 0 {
            0.0
        } else {
            sum_violation_pct as f64 / occurrences as f64
        };
        CategorySummary {
            category: category.to_owned(),
            occurrences,
            errors,
            evaluated: occurrences - errors,
            sum_violation_pct,
            avg_violation_pct: avg,
        }
    }

    /// Average over evaluated sites only.
    pub fn avg_over_evaluated(&self) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.sum_violation_pct as f64 / self.evaluated as f64
        }
    }
}

pub fn summarize_category(category: &str, evals: &[SiteEvaluation]) -> CategorySummary {
    let occurrences = evals.len() as u64;
    let errors = evals.iter().filter(|e| e.violation_pct().is_none()).count() as u64;
    let sum: u64 = evals
        .iter()
        .filter_map(|e| e.violation_pct())
        .map(u64::from)
        .sum();
    CategorySummary::from_totals(category, occurrences, errors, sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cannot average an empty list of category summaries")]
pub struct NoSummaries;

/// Unweighted mean of the category averages.
pub fn mean_of_category_averages(summaries: &[CategorySummary]) -> Result<f64, NoSummaries> {
    if summaries.is_empty() {
        return Err(NoSummaries);
    }
    Ok(summaries.iter().map(|s| s.avg_violation_pct).sum::<f64>() / summaries.len() as f64)
}

/// First path segment naming a known directory category.
pub fn assign_category(category_path: &str) -> &'static str {
    category_path
        .split('/')
        .find_map(|seg| DIRECTORY_CATEGORIES.iter().find(|c| **c == seg).copied())
        .unwrap_or(UNCATEGORISED)
}

/// Groups evaluations by assigned category and summarizes each group.
/// Output is ordered by category name.
pub fn summarize_by_category(evals: &[SiteEvaluation]) -> Vec<CategorySummary> {
    let mut groups: BTreeMap<&str, Vec<SiteEvaluation>> = BTreeMap::new();
    for e in evals {
        groups
            .entry(assign_category(&e.category_path))
            .or_default()
            .push(e.clone());
    }
    groups
        .into_iter()
        .map(|(cat, list)| summarize_category(cat, &list))
        .collect()
}

/// Per-category count of Violate verdicts for each guideline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuidelineBreakdown {
    pub category: String,
    pub evaluated: u64,
    pub violations: [u64; 17],
}

impl GuidelineBreakdown {
    /// Share of evaluated sites violating `id`.
    pub fn rate(&self, id: GuidelineId) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.violations[id.index()] as f64 / self.evaluated as f64
        }
    }
}

pub fn guideline_breakdown(evals: &[SiteEvaluation]) -> Vec<GuidelineBreakdown> {
    let mut groups: BTreeMap<&str, GuidelineBreakdown> = BTreeMap::new();
    for e in evals {
        let cat = assign_category(&e.category_path);
        let entry = groups.entry(cat).or_insert_with(|| GuidelineBreakdown {
            category: cat.to_owned(),
            evaluated: 0,
            violations: [0; 17],
        });
        if let Some(vv) = e.verdicts() {
            entry.evaluated += 1;
            for (id, v) in vv.iter() {
                if v == Verdict::Violate {
                    entry.violations[id.index()] += 1;
                }
            }
        }
    }
    groups.into_values().collect()
}

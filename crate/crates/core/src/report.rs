//! Site and category reports in CSV, JSON and plain-text table form.
//!
//! CSV uses commas, LF line endings and quotes only fields that need it,
//! so output is byte-stable for a given input.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::guidelines::{GuidelineId, VerdictVector};
use crate::scoring::{
    mean_of_category_averages, CategorySummary, GuidelineBreakdown, SiteEvaluation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "text" | "text-table" => Ok(ReportFormat::Text),
            other => Err(Error::Report(format!("unknown report format {other:?}"))),
        }
    }
}

const ERROR_CELL: &str = "E";

fn site_header() -> Vec<&'static str> {
    let mut h = vec!["web_site_address", "category_path"];
    h.extend(GuidelineId::ALL.iter().map(|g| g.code()));
    h.push("pct_v");
    h
}

fn site_cells(e: &SiteEvaluation) -> Vec<String> {
    let mut cells = vec![e.url.clone(), e.category_path.clone()];
    match e.verdicts() {
        Some(vv) => cells.extend(vv.as_array().iter().map(|v| v.letter().to_string())),
        None => cells.extend(std::iter::repeat_n(ERROR_CELL.to_owned(), 17)),
    }
    cells.push(e.violation_pct().map(|p| p.to_string()).unwrap_or_default());
    cells
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, cell) in cells.enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let _ = write!(s, "{:<width$}", cell, width = widths[i]);
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

#[derive(Serialize)]
struct SiteJson<'a> {
    web_site_address: &'a str,
    category_path: &'a str,
    verdicts: BTreeMap<&'static str, String>,
    pct_v: Option<u8>,
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report values serialize");
    out.push(b'\n');
    out
}

/// Per-site table; `rows` are expected in ranked order.
pub fn render_site_report(rows: &[SiteEvaluation], format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Csv => csv_bytes(&site_header(), rows.iter().map(site_cells)),
        ReportFormat::Text => {
            let cells: Vec<_> = rows.iter().map(site_cells).collect();
            text_table(&site_header(), &cells).into_bytes()
        }
        ReportFormat::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|e| {
                    let letters = site_cells(e);
                    SiteJson {
                        web_site_address: &e.url,
                        category_path: &e.category_path,
                        verdicts: GuidelineId::ALL
                            .iter()
                            .zip(&letters[2..19])
                            .map(|(g, l)| (g.code(), l.clone()))
                            .collect(),
                        pct_v: e.violation_pct(),
                    }
                })
                .collect();
            to_json(&items)
        }
    }
}

/// A row recovered from a CSV site report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSiteRow {
    pub web_site_address: String,
    pub category_path: String,
    /// `None` for errored sites.
    pub verdicts: Option<VerdictVector>,
    pub pct_v: Option<u8>,
}

/// Reads back a CSV site report.
pub fn parse_site_csv(bytes: &[u8]) -> Result<Vec<ParsedSiteRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let bad = |msg: String| Error::Report(format!("malformed site report: {msg}"));
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != site_header() {
        return Err(bad("unexpected header".into()));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let letters: String = (2..19).map(|i| &rec[i]).collect();
        let verdicts = if letters == ERROR_CELL.repeat(17) {
            None
        } else {
            Some(VerdictVector::from_letters(&letters).map_err(|e| bad(e.to_string()))?)
        };
        let pct_v = match &rec[19] {
            "" => None,
            p => Some(p.parse().map_err(|_| bad(format!("pct {p:?}")))?),
        };
        out.push(ParsedSiteRow {
            web_site_address: rec[0].to_owned(),
            category_path: rec[1].to_owned(),
            verdicts,
            pct_v,
        });
    }
    Ok(out)
}

const CATEGORY_HEADER: [&str; 7] = [
    "category",
    "total_occurrences",
    "errors",
    "evaluated",
    "sum_violation_pct",
    "avg_violation_pct",
    "avg_over_evaluated",
];

/// Category summaries sorted by average descending, name ascending on ties.
pub fn sort_categories(summaries: &[CategorySummary]) -> Vec<CategorySummary> {
    let mut sorted = summaries.to_vec();
    sorted.sort_by(|a, b| {
        b.avg_violation_pct
            .total_cmp(&a.avg_violation_pct)
            .then_with(|| a.category.cmp(&b.category))
    });
    sorted
}

fn fixed(x: f64, places: usize) -> String {
    format!("{x:.places$}")
}

fn category_cells(s: &CategorySummary) -> Vec<String> {
    vec![
        s.category.clone(),
        s.occurrences.to_string(),
        s.errors.to_string(),
        s.evaluated.to_string(),
        s.sum_violation_pct.to_string(),
        fixed(s.avg_violation_pct, 4),
        fixed(s.avg_over_evaluated(), 4),
    ]
}

/// Parses a fixed-point string back to a number so JSON carries exactly
/// the displayed digits.
fn rounded(x: f64, places: usize) -> f64 {
    fixed(x, places).parse().expect("formatted float parses")
}

#[derive(Serialize)]
struct CategoryJson<'a> {
    category: &'a str,
    total_occurrences: u64,
    errors: u64,
    evaluated: u64,
    sum_violation_pct: u64,
    avg_violation_pct: f64,
    avg_over_evaluated: f64,
}

#[derive(Serialize)]
struct CategoryReportJson<'a> {
    categories: Vec<CategoryJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_of_averages: Option<f64>,
}

/// Per-category table with a trailing mean-of-averages line.
pub fn render_category_report(summaries: &[CategorySummary], format: ReportFormat) -> Vec<u8> {
    let sorted = sort_categories(summaries);
    let mean = mean_of_category_averages(&sorted).ok();
    match format {
        ReportFormat::Csv => {
            let mut rows: Vec<Vec<String>> = sorted.iter().map(category_cells).collect();
            if let Some(m) = mean {
                let mut trailer = vec![String::new(); CATEGORY_HEADER.len()];
                trailer[0] = "mean_of_averages".to_owned();
                trailer[5] = fixed(m, 2);
                rows.push(trailer);
            }
            csv_bytes(&CATEGORY_HEADER, rows)
        }
        ReportFormat::Text => {
            let rows: Vec<_> = sorted.iter().map(category_cells).collect();
            let mut out = text_table(&CATEGORY_HEADER, &rows);
            if let Some(m) = mean {
                let _ = writeln!(out, "mean of averages: {}", fixed(m, 2));
            }
            out.into_bytes()
        }
        ReportFormat::Json => to_json(&CategoryReportJson {
            categories: sorted
                .iter()
                .map(|s| CategoryJson {
                    category: &s.category,
                    total_occurrences: s.occurrences,
                    errors: s.errors,
                    evaluated: s.evaluated,
                    sum_violation_pct: s.sum_violation_pct,
                    avg_violation_pct: rounded(s.avg_violation_pct, 4),
                    avg_over_evaluated: rounded(s.avg_over_evaluated(), 4),
                })
                .collect(),
            mean_of_averages: mean.map(|m| rounded(m, 2)),
        }),
    }
}

/// Share of evaluated sites violating each guideline, per category.
pub fn render_guideline_breakdown(rows: &[GuidelineBreakdown], format: ReportFormat) -> Vec<u8> {
    let mut header = vec!["category", "evaluated"];
    header.extend(GuidelineId::ALL.iter().map(|g| g.code()));
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|b| {
            let mut row = vec![b.category.clone(), b.evaluated.to_string()];
            row.extend(GuidelineId::ALL.iter().map(|&g| fixed(b.rate(g), 4)));
            row
        })
        .collect();
    match format {
        ReportFormat::Csv => csv_bytes(&header, cells),
        ReportFormat::Text => text_table(&header, &cells).into_bytes(),
        ReportFormat::Json => {
            let items: Vec<BTreeMap<&str, serde_json::Value>> = rows
                .iter()
                .map(|b| {
                    let mut m = BTreeMap::new();
                    m.insert("category", b.category.clone().into());
                    m.insert("evaluated", b.evaluated.into());
                    let rates: BTreeMap<&str, f64> = GuidelineId::ALL
                        .iter()
                        .map(|&g| (g.code(), rounded(b.rate(g), 4)))
                        .collect();
                    m.insert("violation_rates", serde_json::to_value(rates).expect("map"));
                    m
                })
                .collect();
            to_json(&items)
        }
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use hutlint_core::ingestion::{FetchOutcome, Fetcher};
use hutlint_core::pipeline::{
    category_breakdown, category_summaries, evaluate_pending, fetch_pending, ingest,
    ranked_evaluations, EvalBudget,
};
use hutlint_core::report::{
    render_category_report, render_guideline_breakdown, render_site_report,
};
use hutlint_core::storage::StatusFilter;
use hutlint_core::{
    evaluate_page, parse_document, violation_percentage, Error, FetchConfig, QueryFilter,
    ReportFormat, Store, Verdict,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_PREREQUISITE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hutlint",
    version,
    about = "Audit homepages against a catalog of usability guidelines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a directory mirror and record the listed sites.
    Ingest {
        #[arg(long)]
        mirror_root: PathBuf,
        #[arg(long)]
        db: PathBuf,
    },
    /// Fetch the homepage of every site not yet fetched.
    Fetch {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        fetch: FetchArgs,
    },
    /// Evaluate every fetched page not yet evaluated.
    Evaluate {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print site or category reports.
    Report {
        #[command(subcommand)]
        kind: ReportKind,
    },
    /// Evaluate a single page from a file or URL.
    Check {
        /// Local file path or http(s) URL.
        target: String,
        /// URL the page is treated as living at. Defaults to the target URL.
        #[arg(long)]
        base_url: Option<String>,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: ReportFormat,
        #[command(flatten)]
        fetch: FetchArgs,
    },
    /// Ingest, fetch and evaluate in one go.
    RunAll {
        #[arg(long)]
        mirror_root: PathBuf,
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        fetch: FetchArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long, default_value_t = 8)]
    concurrency: usize,
    #[arg(long, default_value_t = 30)]
    timeout_secs: u64,
    #[arg(long, default_value_t = 5)]
    max_redirects: u32,
    #[arg(long, default_value = "hutlint/1.0")]
    user_agent: String,
    /// Pause between requests to the same host.
    #[arg(long, default_value_t = 0)]
    politeness_delay_ms: u64,
}

impl FetchArgs {
    fn config(&self) -> FetchConfig {
        FetchConfig {
            timeout_secs: self.timeout_secs,
            max_redirects: self.max_redirects,
            user_agent: self.user_agent.clone(),
            politeness_delay_ms: self.politeness_delay_ms,
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Wall-clock limit for evaluating one page.
    #[arg(long, default_value_t = 10)]
    max_eval_secs: u64,
}

impl BudgetArgs {
    fn budget(&self) -> EvalBudget {
        EvalBudget {
            max_duration: Duration::from_secs(self.max_eval_secs),
            ..EvalBudget::default()
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: ReportFormat,
    /// Keep sites whose category path starts with these whole segments.
    #[arg(long)]
    category: Option<String>,
    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReportKind {
    /// One row per site, ranked by violation percentage.
    Sites {
        #[command(flatten)]
        common: ReportArgs,
        #[arg(long)]
        min_pct: Option<i64>,
        /// evaluated, errored or pending
        #[arg(long, value_parser = parse_status)]
        status: Option<StatusFilter>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// One row per directory category.
    Categories {
        #[command(flatten)]
        common: ReportArgs,
        /// Per-guideline violation rates instead of averages.
        #[arg(long)]
        per_guideline: bool,
    },
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_status(s: &str) -> Result<StatusFilter, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MissingPrerequisite(_) => EXIT_PREREQUISITE,
            Error::InvalidFilter(_) | Error::Report(_) => EXIT_USAGE,
            _ => EXIT_IO,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hutlint: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Ingest { mirror_root, db } => {
            let mut store = Store::open(&db)?;
            run_ingest(&mut store, &mirror_root)
        }
        Command::Fetch { db, fetch } => {
            let mut store = Store::open_existing(&db)?;
            run_fetch(&mut store, &fetch)
        }
        Command::Evaluate { db, budget } => {
            let mut store = Store::open_existing(&db)?;
            run_evaluate(&mut store, &budget)
        }
        Command::RunAll {
            mirror_root,
            db,
            fetch,
            budget,
        } => {
            let mut store = Store::open(&db)?;
            run_ingest(&mut store, &mirror_root)?;
            run_fetch(&mut store, &fetch)?;
            run_evaluate(&mut store, &budget)
        }
        Command::Report { kind } => run_report(kind),
        Command::Check {
            target,
            base_url,
            format,
            fetch,
        } => run_check(&target, base_url, format, &fetch),
    }
}

fn run_ingest(store: &mut Store, root: &Path) -> Result<(), Failure> {
    let s = ingest(store, root)?;
    println!(
        "ingest: files: {}, records: {}, new: {}, errors: {}",
        s.scanned_files, s.records, s.inserted, s.errors
    );
    Ok(())
}

fn run_fetch(store: &mut Store, args: &FetchArgs) -> Result<(), Failure> {
    let s = fetch_pending(store, &args.config(), args.concurrency, None)?;
    println!(
        "fetch: inputs: {}, stored: {}, errors: {}",
        s.inputs, s.stored, s.errors
    );
    for (kind, n) in &s.by_kind {
        println!("  {kind}: {n}");
    }
    Ok(())
}

fn run_evaluate(store: &mut Store, args: &BudgetArgs) -> Result<(), Failure> {
    let s = evaluate_pending(store, &args.budget())?;
    println!(
        "evaluate: inputs: {}, tested: {}, errors: {}, fetch errors recorded: {}",
        s.inputs, s.tested, s.errors, s.carried_fetch_errors
    );
    Ok(())
}

fn filter(common: &ReportArgs) -> QueryFilter {
    QueryFilter {
        category_prefix: common.category.clone(),
        ..QueryFilter::default()
    }
}

fn run_report(kind: ReportKind) -> Result<(), Failure> {
    let (bytes, out) = match kind {
        ReportKind::Sites {
            common,
            min_pct,
            status,
            limit,
        } => {
            let store = Store::open_existing(&common.db)?;
            let f = QueryFilter {
                min_pct,
                status,
                ..filter(&common)
            };
            let rows = ranked_evaluations(&store, &f, limit)?;
            (render_site_report(&rows, common.format), common.out)
        }
        ReportKind::Categories {
            common,
            per_guideline,
        } => {
            let store = Store::open_existing(&common.db)?;
            let f = filter(&common);
            let bytes = if per_guideline {
                render_guideline_breakdown(&category_breakdown(&store, &f)?, common.format)
            } else {
                render_category_report(&category_summaries(&store, &f)?, common.format)
            };
            (bytes, common.out)
        }
    };
    match out {
        Some(path) => fs::write(&path, bytes).map_err(|e| io_failure(&path, e)),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

fn is_url(target: &str) -> bool {
    let lower = target.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://")
}

fn run_check(
    target: &str,
    base_url: Option<String>,
    format: ReportFormat,
    args: &FetchArgs,
) -> Result<(), Failure> {
    let (body, charset, page_url) = if is_url(target) {
        let result = Fetcher::new(args.config()).fetch(target);
        match result.outcome {
            FetchOutcome::Fetched(page) => (page.body, page.charset, page.final_url),
            FetchOutcome::Failed(kind) => {
                return Err(Failure {
                    code: EXIT_IO,
                    message: format!("{target}: fetch failed: {kind}"),
                })
            }
        }
    } else {
        let path = Path::new(target);
        let body = fs::read(path).map_err(|e| io_failure(path, e))?;
        (body, None, "http://localhost/".to_owned())
    };
    let base = base_url.unwrap_or(page_url);
    let doc = parse_document(&body, charset.as_deref());
    let verdicts = evaluate_page(&doc, &base);
    let pct = violation_percentage(&verdicts);

    let mut out = String::new();
    match format {
        ReportFormat::Json => {
            let map: serde_json::Map<_, _> = verdicts
                .iter()
                .map(|(g, v)| {
                    (
                        g.code().to_owned(),
                        serde_json::Value::from(v.letter().to_string()),
                    )
                })
                .collect();
            let value = serde_json::json!({ "target": target, "base_url": base, "verdicts": map, "pct_v": pct });
            out.push_str(&serde_json::to_string_pretty(&value).expect("json value serializes"));
            out.push('\n');
        }
        ReportFormat::Text | ReportFormat::Csv => {
            for (g, v) in verdicts.iter() {
                out.push_str(&format!("{:<4} {}  {}\n", g.code(), v.letter(), g.name()));
            }
            out.push_str(&format!(
                "violations: {} of 17 ({pct}%)\n",
                verdicts.count(Verdict::Violate)
            ));
        }
    }
    std::io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| io_failure(Path::new("<stdout>"), e))
}

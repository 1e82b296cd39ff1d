mod support;

use hutlint_core::pipeline::{
    category_summaries, evaluate_pending, fetch_pending, ingest, ranked_evaluations, EvalBudget,
};
use hutlint_core::report::{parse_site_csv, render_site_report};
use hutlint_core::storage::StatusFilter;
use hutlint_core::{Error, ErrorKind, FetchConfig, QueryFilter, ReportFormat, Store};
use support::{Route, TestServer};

struct Fixture {
    _dir: tempfile::TempDir,
    root: std::path::PathBuf,
    db: std::path::PathBuf,
    server: TestServer,
}

fn fixture() -> Fixture {
    let server = TestServer::start(vec![
        ("/pattern/", Route::Html(support::PATTERN_PAGE.into())),
        ("/clean/", Route::Html(support::CLEAN_PAGE.into())),
        ("/moved/", Route::Redirect("/clean/".into())),
        ("/blocked/", Route::Status(403)),
    ]);
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("mirror");
    let (p, c, m, b) = (
        server.url("/pattern/"),
        server.url("/clean/"),
        server.url("/moved/"),
        server.url("/blocked/"),
    );
    support::write_listing(
        &root,
        "Regional/Asia/Nepal/Weather",
        &[(&p, "P", "pattern"), (&c, "C", "clean")],
    );
    support::write_listing(
        &root,
        "Regional/Asia/Nepal/Health",
        &[(&m, "M", "moved"), (&b, "B", "blocked")],
    );
    let db = dir.path().join("audit.sqlite");
    Fixture {
        _dir: dir,
        root,
        db,
        server,
    }
}

fn cfg() -> FetchConfig {
    FetchConfig {
        timeout_secs: 5,
        ..FetchConfig::default()
    }
}

#[test]
fn full_run_and_rerun_are_stable() {
    let f = fixture();
    let mut store = Store::open(&f.db).unwrap();
    assert!(matches!(
        fetch_pending(&mut store, &cfg(), 4, None),
        Err(Error::MissingPrerequisite(_))
    ));
    assert!(matches!(
        evaluate_pending(&mut store, &EvalBudget::default()),
        Err(Error::MissingPrerequisite(_))
    ));

    let ing = ingest(&mut store, &f.root).unwrap();
    assert_eq!((ing.records, ing.inserted, ing.errors), (4, 4, 0));
    let fetched = fetch_pending(&mut store, &cfg(), 4, None).unwrap();
    assert_eq!((fetched.inputs, fetched.stored, fetched.errors), (4, 3, 1));
    assert_eq!(fetched.by_kind.get("server_blocked"), Some(&1));
    let ev = evaluate_pending(&mut store, &EvalBudget::default()).unwrap();
    assert_eq!((ev.tested, ev.errors, ev.carried_fetch_errors), (3, 0, 1));

    let ranked = ranked_evaluations(&store, &QueryFilter::default(), None).unwrap();
    let first = render_site_report(&ranked, ReportFormat::Csv);
    let rows = parse_site_csv(&first).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0].web_site_address, f.server.url("/pattern/"));
    assert_eq!(rows[0].pct_v, Some(71));
    assert_eq!(rows[3].web_site_address, f.server.url("/blocked/"));
    assert_eq!(rows[3].pct_v, None);

    // a second pass has nothing left to do and changes nothing
    drop(store);
    let mut store = Store::open_existing(&f.db).unwrap();
    assert_eq!(ingest(&mut store, &f.root).unwrap().inserted, 0);
    assert_eq!(
        fetch_pending(&mut store, &cfg(), 4, None).unwrap().inputs,
        0
    );
    assert_eq!(
        evaluate_pending(&mut store, &EvalBudget::default())
            .unwrap()
            .inputs,
        0
    );
    let again = render_site_report(
        &ranked_evaluations(&store, &QueryFilter::default(), None).unwrap(),
        ReportFormat::Csv,
    );
    assert_eq!(first, again);

    let moved = store
        .sites()
        .unwrap()
        .into_iter()
        .find(|s| s.record.url.ends_with("/moved/"))
        .unwrap();
    assert_eq!(
        store.get_source(moved.id).unwrap().unwrap().final_url,
        f.server.url("/clean/")
    );
}

#[test]
fn filters_and_category_summaries() {
    let f = fixture();
    let mut store = Store::open(&f.db).unwrap();
    ingest(&mut store, &f.root).unwrap();
    fetch_pending(&mut store, &cfg(), 2, None).unwrap();
    evaluate_pending(&mut store, &EvalBudget::default()).unwrap();

    let weather = QueryFilter {
        category_prefix: Some("Regional/Asia/Nepal/Weather".into()),
        ..Default::default()
    };
    assert_eq!(ranked_evaluations(&store, &weather, None).unwrap().len(), 2);
    let partial = QueryFilter {
        category_prefix: Some("Regional/Asia/Nep".into()),
        ..Default::default()
    };
    assert!(ranked_evaluations(&store, &partial, None)
        .unwrap()
        .is_empty());
    let high = QueryFilter {
        min_pct: Some(50),
        ..Default::default()
    };
    assert_eq!(ranked_evaluations(&store, &high, None).unwrap().len(), 1);
    let errored = QueryFilter {
        status: Some(StatusFilter::Errored),
        ..Default::default()
    };
    let e = ranked_evaluations(&store, &errored, None).unwrap();
    assert_eq!(e.len(), 1);
    assert!(matches!(
        e[0].outcome,
        hutlint_core::Outcome::Errored(ErrorKind::ServerBlocked)
    ));
    assert_eq!(
        ranked_evaluations(&store, &QueryFilter::default(), Some(2))
            .unwrap()
            .len(),
        2
    );

    let summaries = category_summaries(&store, &QueryFilter::default()).unwrap();
    let names: Vec<_> = summaries.iter().map(|s| s.category.as_str()).collect();
    assert_eq!(names, ["Health", "Weather"]);
    let weather = &summaries[1];
    assert_eq!(
        (
            weather.occurrences,
            weather.errors,
            weather.sum_violation_pct
        ),
        (2, 0, 71)
    );
    let health = &summaries[0];
    assert_eq!(
        (health.occurrences, health.errors, health.sum_violation_pct),
        (2, 1, 0)
    );
    assert_eq!(health.avg_violation_pct, 0.0);

    let bad = QueryFilter {
        min_pct: Some(101),
        ..Default::default()
    };
    assert!(matches!(
        ranked_evaluations(&store, &bad, None),
        Err(Error::InvalidFilter(_))
    ));
}

#[test]
fn oversized_page_fails_evaluation_only() {
    let big = format!(
        "<html><body>{}</body></html>",
        "<p>filler text</p>".repeat(200_000)
    );
    let server = TestServer::start(vec![
        ("/big/", Route::Html(big)),
        ("/ok/", Route::Html("<title>t</title>".into())),
    ]);
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("mirror");
    support::write_listing(
        &root,
        "Top/Weather",
        &[
            (&server.url("/big/"), "B", "big"),
            (&server.url("/ok/"), "O", "ok"),
        ],
    );
    let mut store = Store::open(&dir.path().join("db.sqlite")).unwrap();
    ingest(&mut store, &root).unwrap();
    assert_eq!(
        fetch_pending(&mut store, &cfg(), 1, None).unwrap().stored,
        2
    );
    let ev = evaluate_pending(&mut store, &EvalBudget::default()).unwrap();
    assert_eq!((ev.tested, ev.errors), (1, 1));
    let big_site = store
        .sites()
        .unwrap()
        .into_iter()
        .find(|s| s.record.url.ends_with("/big/"))
        .unwrap();
    assert!(store.get_source(big_site.id).unwrap().unwrap().truncated);
}

//! Single-file SQLite store shared by the pipeline steps.
//!
//! Three tables: `sites` (directory records plus fetch status), `sources`
//! (zlib-compressed homepage bodies) and `evaluations` (17-letter verdict
//! string and percentage, or an error kind). A `meta` row carries the
//! schema version; stores written by a newer version are refused.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use flate2::read::ZlibDecoder;
use flate2::write::ZlibEncoder;
use flate2::Compression;
use rusqlite::{params, Connection, OptionalExtension, Row, Transaction};
use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::error::{Error, Result};
use crate::guidelines::VerdictVector;
use crate::ingestion::{ErrorKind, FetchOutcome, FetchResult, SiteRecord};
use crate::scoring::{Outcome, SiteEvaluation};

pub const SCHEMA_VERSION: i64 = 1;

/// Bodies longer than this are truncated and flagged.
pub const MAX_BODY_BYTES: usize = 2 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SiteId(pub i64);

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteStatus {
    Pending,
    Fetched,
    FetchFailed(ErrorKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredSite {
    pub id: SiteId,
    pub record: SiteRecord,
    pub status: SiteStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredSource {
    pub site_id: SiteId,
    pub fetched_at: OffsetDateTime,
    pub final_url: String,
    pub http_status: u16,
    pub charset: Option<String>,
    pub body: Vec<u8>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusFilter {
    Evaluated,
    Errored,
    /// No evaluation row yet.
    Pending,
}

impl FromStr for StatusFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "evaluated" => Ok(StatusFilter::Evaluated),
            "errored" | "error" | "e" => Ok(StatusFilter::Errored),
            "pending" => Ok(StatusFilter::Pending),
            other => Err(Error::InvalidFilter(format!("unknown status {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryFilter {
    /// Whole-segment prefix of the category path.
    pub category_prefix: Option<String>,
    pub min_pct: Option<i64>,
    pub status: Option<StatusFilter>,
}

impl QueryFilter {
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.category_prefix {
            if p.trim_matches('/').is_empty() {
                return Err(Error::InvalidFilter("empty category prefix".into()));
            }
        }
        if let Some(p) = self.min_pct {
            if !(0..=100).contains(&p) {
                return Err(Error::InvalidFilter(format!("min_pct {p} outside 0..=100")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRow {
    pub site: StoredSite,
    pub evaluation: Option<SiteEvaluation>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StoreCounts {
    pub sites: u64,
    pub sources: u64,
    pub fetch_failures: u64,
    pub evaluated: u64,
    pub errored: u64,
}

pub struct Store {
    conn: Connection,
    path: PathBuf,
}

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS sites (
    id INTEGER PRIMARY KEY,
    url TEXT NOT NULL,
    category_path TEXT NOT NULL,
    description TEXT NOT NULL,
    fetch_status TEXT NOT NULL DEFAULT 'pending',
    fetch_error TEXT,
    UNIQUE (url, category_path)
);
CREATE TABLE IF NOT EXISTS sources (
    site_id INTEGER PRIMARY KEY REFERENCES sites(id),
    fetched_at TEXT NOT NULL,
    final_url TEXT NOT NULL,
    http_status INTEGER NOT NULL,
    charset TEXT,
    body BLOB NOT NULL,
    body_len INTEGER NOT NULL,
    truncated INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS evaluations (
    site_id INTEGER PRIMARY KEY REFERENCES sites(id),
    verdicts TEXT,
    violation_pct INTEGER,
    error_kind TEXT,
    CHECK ((verdicts IS NULL) = (violation_pct IS NULL)),
    CHECK ((verdicts IS NULL) <> (error_kind IS NULL)),
    CHECK (verdicts IS NULL OR length(verdicts) = 17)
);
";

impl Store {
    /// Opens or creates the store at `path`.
    pub fn open(path: &Path) -> Result<Self> {
        let conn = Connection::open(path)?;
        conn.busy_timeout(std::time::Duration::from_secs(30))?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        conn.pragma_update(None, "foreign_keys", "ON")?;
        conn.execute_batch(SCHEMA)?;
        let found: Option<i64> = conn
            .query_row(
                "SELECT value FROM meta WHERE key = 'schema_version'",
                [],
                |r| r.get(0),
            )
            .optional()?;
        match found {
            Some(v) if v > SCHEMA_VERSION => {
                return Err(Error::SchemaTooNew {
                    found: v,
                    supported: SCHEMA_VERSION,
                })
            }
            Some(_) => {}
            None => {
                conn.execute(
                    "INSERT INTO meta (key, value) VALUES ('schema_version', ?1)",
                    [SCHEMA_VERSION],
                )?;
            }
        }
        Ok(Store {
            conn,
            path: path.to_path_buf(),
        })
    }

    /// Opens an existing store; fails if `path` does not exist.
    pub fn open_existing(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingPrerequisite(format!(
                "store {} does not exist; run ingest first",
                path.display()
            )));
        }
        Self::open(path)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Inserts records not already present; returns how many were new.
    pub fn put_sites(&mut self, records: &[SiteRecord]) -> Result<usize> {
        let tx = self.conn.transaction()?;
        let mut inserted = 0;
        {
            let mut stmt = tx.prepare(
                "INSERT INTO sites (url, category_path, description) VALUES (?1, ?2, ?3)
                 ON CONFLICT (url, category_path) DO UPDATE SET description = excluded.description",
            )?;
            let mut exists =
                tx.prepare("SELECT 1 FROM sites WHERE url = ?1 AND category_path = ?2")?;
            for r in records {
                let known = exists.exists(params![r.url, r.category_path])?;
                stmt.execute(params![r.url, r.category_path, r.description])?;
                if !known {
                    inserted += 1;
                }
            }
        }
        tx.commit()?;
        Ok(inserted)
    }

    pub fn site(&self, id: SiteId) -> Result<Option<StoredSite>> {
        self.conn
            .query_row(
                "SELECT id, url, category_path, description, fetch_status, fetch_error
                 FROM sites WHERE id = ?1",
                [id.0],
                |r| Ok(site_from_row(r)),
            )
            .optional()?
            .transpose()
    }

    pub fn sites(&self) -> Result<Vec<StoredSite>> {
        self.sites_where("1 = 1")
    }

    /// Sites that have neither a source nor a recorded fetch failure.
    pub fn pending_fetch(&self) -> Result<Vec<StoredSite>> {
        self.sites_where("fetch_status = 'pending'")
    }

    fn sites_where(&self, clause: &str) -> Result<Vec<StoredSite>> {
        let sql = format!(
            "SELECT id, url, category_path, description, fetch_status, fetch_error
             FROM sites WHERE {clause} ORDER BY id"
        );
        let mut stmt = self.conn.prepare(&sql)?;
        let rows = stmt.query_map([], |r| Ok(site_from_row(r)))?;
        let mut out = Vec::new();
        for row in rows {
            out.push(row??);
        }
        Ok(out)
    }

    /// Records a fetch result, replacing any earlier source and evaluation
    /// for the site.
    pub fn put_source(&mut self, site_id: SiteId, result: &FetchResult) -> Result<()> {
        self.put_sources(&[(site_id, result)])
    }

    /// Transactional batch form of [`Store::put_source`].
    pub fn put_sources(&mut self, batch: &[(SiteId, &FetchResult)]) -> Result<()> {
        let tx = self.conn.transaction()?;
        for (site_id, result) in batch {
            put_source_tx(&tx, *site_id, result)?;
        }
        tx.commit()?;
        Ok(())
    }

    pub fn get_source(&self, site_id: SiteId) -> Result<Option<StoredSource>> {
        let row = self
            .conn
            .query_row(
                "SELECT fetched_at, final_url, http_status, charset, body, body_len, truncated
                 FROM sources WHERE site_id = ?1",
                [site_id.0],
                |r| {
                    Ok((
                        r.get::<_, String>(0)?,
                        r.get::<_, String>(1)?,
                        r.get::<_, u16>(2)?,
                        r.get::<_, Option<String>>(3)?,
                        r.get::<_, Vec<u8>>(4)?,
                        r.get::<_, i64>(5)?,
                        r.get::<_, bool>(6)?,
                    ))
                },
            )
            .optional()?;
        let Some((fetched_at, final_url, http_status, charset, packed, len, truncated)) = row
        else {
            return Ok(None);
        };
        let fetched_at = OffsetDateTime::parse(&fetched_at, &Rfc3339)
            .map_err(|e| Error::Corrupt(format!("fetched_at {fetched_at:?}: {e}")))?;
        let mut body = Vec::with_capacity(len.max(0) as usize);
        ZlibDecoder::new(packed.as_slice())
            .read_to_end(&mut body)
            .map_err(|e| Error::Corrupt(format!("body of site {site_id}: {e}")))?;
        if body.len() as i64 != len {
            return Err(Error::Corrupt(format!(
                "body length mismatch for site {site_id}"
            )));
        }
        Ok(Some(StoredSource {
            site_id,
            fetched_at,
            final_url,
            http_status,
            charset,
            body,
            truncated,
        }))
    }

    pub fn put_evaluation(&mut self, site_id: SiteId, outcome: &Outcome) -> Result<()> {
        self.put_evaluations(&[(site_id, outcome.clone())])
    }

    pub fn put_evaluations(&mut self, batch: &[(SiteId, Outcome)]) -> Result<()> {
        let tx = self.conn.transaction()?;
        {
            let mut stmt = tx.prepare(
                "INSERT OR REPLACE INTO evaluations (site_id, verdicts, violation_pct, error_kind)
                 VALUES (?1, ?2, ?3, ?4)",
            )?;
            for (site_id, outcome) in batch {
                ensure_site(&tx, *site_id)?;
                match outcome {
                    Outcome::Evaluated {
                        verdicts,
                        violation_pct,
                    } => stmt.execute(params![
                        site_id.0,
                        verdicts.to_letters(),
                        violation_pct,
                        Option::<String>::None
                    ])?,
                    Outcome::Errored(kind) => stmt.execute(params![
                        site_id.0,
                        Option::<String>::None,
                        Option::<i64>::None,
                        kind.as_str()
                    ])?,
                };
            }
        }
        tx.commit()?;
        Ok(())
    }

    /// Sites with a stored source but no evaluation.
    pub fn pending_evaluation(&self) -> Result<Vec<SiteId>> {
        self.ids(
            "SELECT s.site_id FROM sources s
             LEFT JOIN evaluations e ON e.site_id = s.site_id
             WHERE e.site_id IS NULL ORDER BY s.site_id",
        )
    }

    /// Sites whose fetch failed and that carry no evaluation row yet.
    pub fn unrecorded_fetch_failures(&self) -> Result<Vec<(SiteId, ErrorKind)>> {
        let mut stmt = self.conn.prepare(
            "SELECT s.id, s.fetch_error FROM sites s
             LEFT JOIN evaluations e ON e.site_id = s.id
             WHERE s.fetch_status = 'failed' AND e.site_id IS NULL ORDER BY s.id",
        )?;
        let rows = stmt.query_map([], |r| {
            Ok((r.get::<_, i64>(0)?, r.get::<_, Option<String>>(1)?))
        })?;
        let mut out = Vec::new();
        for row in rows {
            let (id, kind) = row?;
            let kind = parse_kind(kind.as_deref())?;
            out.push((SiteId(id), kind));
        }
        Ok(out)
    }

    fn ids(&self, sql: &str) -> Result<Vec<SiteId>> {
        let mut stmt = self.conn.prepare(sql)?;
        let rows = stmt.query_map([], |r| r.get::<_, i64>(0))?;
        rows.map(|r| r.map(SiteId).map_err(Error::from)).collect()
    }

    /// Sites joined with their evaluations, filtered; ordered by site id.
    pub fn query(&self, filter: &QueryFilter) -> Result<Vec<QueryRow>> {
        filter.validate()?;
        let mut sql = String::from(
            "SELECT s.id, s.url, s.category_path, s.description, s.fetch_status, s.fetch_error,
                    e.site_id, e.verdicts, e.violation_pct, e.error_kind
             FROM sites s LEFT JOIN evaluations e ON e.site_id = s.id WHERE 1 = 1",
        );
        let mut args: Vec<rusqlite::types::Value> = Vec::new();
        if let Some(prefix) = &filter.category_prefix {
            let prefix = prefix.trim_end_matches('/').to_owned();
            args.push(prefix.clone().into());
            args.push(format!("{prefix}/").into());
            sql.push_str(&format!(
                " AND (s.category_path = ?{} OR substr(s.category_path, 1, length(?{n})) = ?{n})",
                args.len() - 1,
                n = args.len()
            ));
        }
        if let Some(min) = filter.min_pct {
            args.push(min.into());
            sql.push_str(&format!(" AND e.violation_pct >= ?{}", args.len()));
        }
        match filter.status {
            Some(StatusFilter::Evaluated) => sql.push_str(" AND e.verdicts IS NOT NULL"),
            Some(StatusFilter::Errored) => sql.push_str(" AND e.error_kind IS NOT NULL"),
            Some(StatusFilter::Pending) => sql.push_str(" AND e.site_id IS NULL"),
            None => {}
        }
        sql.push_str(" ORDER BY s.id");
        let mut stmt = self.conn.prepare(&sql)?;
        let rows = stmt.query_map(rusqlite::params_from_iter(args), |r| {
            let site = site_from_row(r);
            let eval_id: Option<i64> = r.get(6)?;
            let verdicts: Option<String> = r.get(7)?;
            let pct: Option<i64> = r.get(8)?;
            let kind: Option<String> = r.get(9)?;
            Ok((site, eval_id, verdicts, pct, kind))
        })?;
        let mut out = Vec::new();
        for row in rows {
            let (site, eval_id, verdicts, pct, kind) = row?;
            let site = site?;
            let evaluation = match eval_id {
                None => None,
                Some(_) => Some(evaluation_from_parts(&site, verdicts, pct, kind)?),
            };
            out.push(QueryRow { site, evaluation });
        }
        Ok(out)
    }

    /// All stored evaluations.
    pub fn evaluations(&self) -> Result<Vec<SiteEvaluation>> {
        Ok(self
            .query(&QueryFilter::default())?
            .into_iter()
            .filter_map(|r| r.evaluation)
            .collect())
    }

    pub fn counts(&self) -> Result<StoreCounts> {
        let one = |sql: &str| -> Result<u64> {
            Ok(self.conn.query_row(sql, [], |r| r.get::<_, i64>(0))? as u64)
        };
        Ok(StoreCounts {
            sites: one("SELECT count(*) FROM sites")?,
            sources: one("SELECT count(*) FROM sources")?,
            fetch_failures: one("SELECT count(*) FROM sites WHERE fetch_status = 'failed'")?,
            evaluated: one("SELECT count(*) FROM evaluations WHERE verdicts IS NOT NULL")?,
            errored: one("SELECT count(*) FROM evaluations WHERE error_kind IS NOT NULL")?,
        })
    }
}

fn ensure_site(tx: &Transaction<'_>, site_id: SiteId) -> Result<()> {
    let known = tx
        .prepare_cached("SELECT 1 FROM sites WHERE id = ?1")?
        .exists([site_id.0])?;
    if known {
        Ok(())
    } else {
        Err(Error::UnknownSite(site_id))
    }
}

fn put_source_tx(tx: &Transaction<'_>, site_id: SiteId, result: &FetchResult) -> Result<()> {
    ensure_site(tx, site_id)?;
    tx.execute("DELETE FROM sources WHERE site_id = ?1", [site_id.0])?;
    tx.execute("DELETE FROM evaluations WHERE site_id = ?1", [site_id.0])?;
    match &result.outcome {
        FetchOutcome::Fetched(page) => {
            let truncated = page.body.len() > MAX_BODY_BYTES;
            let body = &page.body[..page.body.len().min(MAX_BODY_BYTES)];
            let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
            enc.write_all(body)
                .and_then(|_| enc.flush())
                .map_err(|e| Error::Corrupt(format!("compressing body: {e}")))?;
            let packed = enc
                .finish()
                .map_err(|e| Error::Corrupt(format!("compressing body: {e}")))?;
            let fetched_at = page
                .fetched_at
                .format(&Rfc3339)
                .map_err(|e| Error::Corrupt(format!("timestamp: {e}")))?;
            tx.execute(
                "INSERT INTO sources
                 (site_id, fetched_at, final_url, http_status, charset, body, body_len, truncated)
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)",
                params![
                    site_id.0,
                    fetched_at,
                    page.final_url,
                    page.http_status,
                    page.charset,
                    packed,
                    body.len() as i64,
                    truncated
                ],
            )?;
            tx.execute(
                "UPDATE sites SET fetch_status = 'fetched', fetch_error = NULL WHERE id = ?1",
                [site_id.0],
            )?;
        }
        FetchOutcome::Failed(kind) => {
            tx.execute(
                "UPDATE sites SET fetch_status = 'failed', fetch_error = ?2 WHERE id = ?1",
                params![site_id.0, kind.as_str()],
            )?;
        }
    }
    Ok(())
}

fn parse_kind(kind: Option<&str>) -> Result<ErrorKind> {
    kind.ok_or_else(|| Error::Corrupt("missing error kind".into()))?
        .parse()
        .map_err(|e| Error::Corrupt(format!("{e}")))
}

fn site_from_row(r: &Row<'_>) -> Result<StoredSite> {
    let status: String = r.get(4)?;
    let error: Option<String> = r.get(5)?;
    let status = match status.as_str() {
        "pending" => SiteStatus::Pending,
        "fetched" => SiteStatus::Fetched,
        "failed" => SiteStatus::FetchFailed(parse_kind(error.as_deref())?),
        other => return Err(Error::Corrupt(format!("fetch status {other:?}"))),
    };
    Ok(StoredSite {
        id: SiteId(r.get(0)?),
        record: SiteRecord {
            url: r.get(1)?,
            category_path: r.get(2)?,
            description: r.get(3)?,
        },
        status,
    })
}

fn evaluation_from_parts(
    site: &StoredSite,
    verdicts: Option<String>,
    pct: Option<i64>,
    kind: Option<String>,
) -> Result<SiteEvaluation> {
    let outcome = match (verdicts, pct, kind) {
        (Some(v), Some(p), None) => {
            let verdicts =
                VerdictVector::from_letters(&v).map_err(|e| Error::Corrupt(e.to_string()))?;
            let violation_pct = u8::try_from(p)
                .ok()
                .filter(|p| *p <= 100)
                .ok_or_else(|| Error::Corrupt(format!("violation_pct {p}")))?;
            Outcome::Evaluated {
                verdicts,
                violation_pct,
            }
        }
        (None, None, Some(k)) => Outcome::Errored(parse_kind(Some(&k))?),
        _ => {
            return Err(Error::Corrupt(format!(
                "evaluation row for site {}",
                site.id
            )))
        }
    };
    Ok(SiteEvaluation {
        site_id: site.id,
        url: site.record.url.clone(),
        category_path: site.record.category_path.clone(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidelines::Verdict;
    use crate::ingestion::FetchedPage;
    use crate::scoring::violation_percentage;

    fn store() -> (tempfile::TempDir, Store) {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(&dir.path().join("hut.db")).unwrap();
        (dir, store)
    }

    fn rec(url: &str, path: &str) -> SiteRecord {
        SiteRecord::new(url, path, "d").unwrap()
    }

    fn fetched(body: Vec<u8>) -> FetchResult {
        FetchResult {
            outcome: FetchOutcome::Fetched(FetchedPage {
                body,
                final_url: "http://a.example/".into(),
                http_status: 200,
                fetched_at: OffsetDateTime::from_unix_timestamp(1_322_885_566).unwrap(),
                charset: Some("utf-8".into()),
            }),
            requests: 1,
        }
    }

    fn failed(kind: ErrorKind) -> FetchResult {
        FetchResult {
            outcome: FetchOutcome::Failed(kind),
            requests: 1,
        }
    }

    fn vv(violations: usize) -> Outcome {
        let mut arr = [Verdict::Neutral; 17];
        arr.iter_mut()
            .take(violations)
            .for_each(|v| *v = Verdict::Violate);
        let verdicts = VerdictVector::new(arr);
        Outcome::Evaluated {
            verdicts,
            violation_pct: violation_percentage(&verdicts),
        }
    }

    #[test]
    fn put_sites_is_idempotent() {
        let (_d, mut s) = store();
        let recs = [
            rec("http://a.example/", "A"),
            rec("http://b.example/", "A"),
            rec("http://a.example/", "B"),
        ];
        assert_eq!(s.put_sites(&recs).unwrap(), 3);
        assert_eq!(s.put_sites(&recs).unwrap(), 0);
        let more = [
            rec("http://c.example/", "A"),
            rec("http://d.example/", "A"),
            rec("http://a.example/", "A"),
        ];
        assert_eq!(s.put_sites(&more).unwrap(), 2);
        assert_eq!(s.sites().unwrap().len(), 5);
    }

    #[test]
    fn source_roundtrip_and_overwrite() {
        let (_d, mut s) = store();
        s.put_sites(&[rec("http://a.example/", "A")]).unwrap();
        let id = s.sites().unwrap()[0].id;
        let body: Vec<u8> = (0..1024u32).map(|i| (i * 7 % 251) as u8).collect();
        s.put_source(id, &fetched(body.clone())).unwrap();
        let got = s.get_source(id).unwrap().unwrap();
        assert_eq!(got.body, body);
        assert!(!got.truncated);
        assert_eq!(got.charset.as_deref(), Some("utf-8"));
        assert_eq!(got.fetched_at.unix_timestamp(), 1_322_885_566);

        s.put_source(id, &fetched(b"second".to_vec())).unwrap();
        assert_eq!(s.get_source(id).unwrap().unwrap().body, b"second");
        assert_eq!(s.site(id).unwrap().unwrap().status, SiteStatus::Fetched);
    }

    #[test]
    fn failed_fetch_leaves_no_source() {
        let (_d, mut s) = store();
        s.put_sites(&[rec("http://a.example/", "A")]).unwrap();
        let id = s.sites().unwrap()[0].id;
        s.put_source(id, &fetched(b"x".to_vec())).unwrap();
        s.put_source(id, &failed(ErrorKind::Timeout)).unwrap();
        assert!(s.get_source(id).unwrap().is_none());
        assert_eq!(
            s.site(id).unwrap().unwrap().status,
            SiteStatus::FetchFailed(ErrorKind::Timeout)
        );
        assert_eq!(
            s.unrecorded_fetch_failures().unwrap(),
            vec![(id, ErrorKind::Timeout)]
        );
        assert!(s.pending_fetch().unwrap().is_empty());
    }

    #[test]
    fn oversized_body_truncated_with_flag() {
        let (_d, mut s) = store();
        s.put_sites(&[rec("http://a.example/", "A")]).unwrap();
        let id = s.sites().unwrap()[0].id;
        s.put_source(id, &fetched(vec![b'a'; MAX_BODY_BYTES + 10]))
            .unwrap();
        let got = s.get_source(id).unwrap().unwrap();
        assert!(got.truncated);
        assert_eq!(got.body.len(), MAX_BODY_BYTES);
    }

    #[test]
    fn unknown_site_rejected() {
        let (_d, mut s) = store();
        assert!(matches!(
            s.put_source(SiteId(42), &failed(ErrorKind::Timeout)),
            Err(Error::UnknownSite(_))
        ));
        assert!(matches!(
            s.put_evaluation(SiteId(42), &vv(1)),
            Err(Error::UnknownSite(_))
        ));
    }

    #[test]
    fn batch_is_all_or_nothing() {
        let (_d, mut s) = store();
        s.put_sites(&[rec("http://a.example/", "A")]).unwrap();
        let id = s.sites().unwrap()[0].id;
        let err = s.put_evaluations(&[(id, vv(3)), (SiteId(999), vv(1))]);
        assert!(err.is_err());
        assert!(s.evaluations().unwrap().is_empty());
    }

    #[test]
    fn query_filters() {
        let (_d, mut s) = store();
        s.put_sites(&[
            rec("http://a.example/", "Regional/Asia/India/Health"),
            rec("http://b.example/", "Regional/Asia/India/Weather"),
            rec("http://c.example/", "Regional/Asia/Nepal/Weather"),
            rec("http://d.example/", "Regional/Asia/Indiana"),
        ])
        .unwrap();
        let ids: Vec<_> = s.sites().unwrap().iter().map(|x| x.id).collect();
        s.put_evaluation(ids[0], &vv(11)).unwrap();
        s.put_evaluation(ids[1], &vv(12)).unwrap();
        s.put_evaluation(ids[2], &vv(12)).unwrap();
        s.put_evaluation(ids[3], &Outcome::Errored(ErrorKind::ServerBlocked))
            .unwrap();

        let min = QueryFilter {
            min_pct: Some(71),
            ..Default::default()
        };
        assert_eq!(s.query(&min).unwrap().len(), 2);
        let india = QueryFilter {
            category_prefix: Some("Regional/Asia/India".into()),
            ..Default::default()
        };
        let rows = s.query(&india).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r
            .site
            .record
            .category_path
            .starts_with("Regional/Asia/India/")));
        let errored = QueryFilter {
            status: Some(StatusFilter::Errored),
            ..Default::default()
        };
        let rows = s.query(&errored).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            rows[0].evaluation.as_ref().unwrap().outcome,
            Outcome::Errored(ErrorKind::ServerBlocked)
        );
        assert_eq!(s.query(&QueryFilter::default()).unwrap().len(), 4);
    }

    #[test]
    fn malformed_filters_rejected() {
        let (_d, s) = store();
        let bad = QueryFilter {
            min_pct: Some(101),
            ..Default::default()
        };
        assert!(matches!(s.query(&bad), Err(Error::InvalidFilter(_))));
        let empty = QueryFilter {
            category_prefix: Some("/".into()),
            ..Default::default()
        };
        assert!(matches!(s.query(&empty), Err(Error::InvalidFilter(_))));
        assert!("sideways".parse::<StatusFilter>().is_err());
    }

    #[test]
    fn newer_schema_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hut.db");
        {
            let s = Store::open(&path).unwrap();
            s.conn
                .execute(
                    "UPDATE meta SET value = ?1 WHERE key = 'schema_version'",
                    [SCHEMA_VERSION + 1],
                )
                .unwrap();
        }
        assert!(matches!(
            Store::open(&path),
            Err(Error::SchemaTooNew { .. })
        ));
    }

    #[test]
    fn open_existing_requires_file() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Store::open_existing(&dir.path().join("none.db")),
            Err(Error::MissingPrerequisite(_))
        ));
    }
}

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use super::SiteRecord;
use crate::dom::{collapse_whitespace, parse_document, Document, ElementRef, NodeRef};
use crate::error::{Error, Result};

const INDEX_FILE: &str = "index.html";
const LISTING_CLASS: &str = "directory-url";

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub records: Vec<SiteRecord>,
    /// `index.html` files read and parsed.
    pub scanned_files: usize,
    /// `index.html` entries that could not be read.
    pub failed_files: Vec<PathBuf>,
}

impl ScanReport {
    pub fn errors(&self) -> usize {
        self.failed_files.len()
    }
}

/// Walks `root` for `index.html` files and collects the sites they list.
/// The category path of each record is the file's directory relative to
/// `root`, joined with `/`.
pub fn scan_directory_mirror(root: &Path) -> Result<ScanReport> {
    let meta = fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(
                std::io::ErrorKind::NotADirectory,
                "mirror root is not a directory",
            ),
        ));
    }
    fs::read_dir(root).map_err(|e| Error::io(root, e))?;

    let mut report = ScanReport::default();
    let mut seen = HashSet::new();
    let walker = WalkDir::new(root).sort_by_file_name().into_iter();
    for entry in walker {
        let entry = match entry {
            Ok(entry) => entry,
            Err(err) => {
                report
                    .failed_files
                    .push(err.path().map(Path::to_path_buf).unwrap_or_default());
                continue;
            }
        };
        if entry.file_name() != INDEX_FILE || entry.file_type().is_dir() {
            continue;
        }
        let bytes = match fs::read(entry.path()) {
            Ok(bytes) => bytes,
            Err(_) => {
                report.failed_files.push(entry.path().to_path_buf());
                continue;
            }
        };
        report.scanned_files += 1;
        let category = category_path(root, entry.path());
        let doc = parse_document(&bytes, None);
        for record in extract_directory_entries(&doc, &category) {
            if seen.insert((record.url.clone(), record.category_path.clone())) {
                report.records.push(record);
            }
        }
    }
    Ok(report)
}

fn category_path(root: &Path, index_file: &Path) -> String {
    let dir = index_file.parent().unwrap_or(root);
    let rel = dir.strip_prefix(root).unwrap_or(dir);
    let parts: Vec<_> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect();
    if parts.is_empty() {
        "/".to_owned()
    } else {
        parts.join("/")
    }
}

/// Sites listed under `<ul class="directory-url">`: one record per `li`
/// with an anchor, using the first anchor's href. The description is the
/// item's remaining text minus a leading dash or colon separator. Items
/// whose href is not an absolute URL are dropped.
pub fn extract_directory_entries(doc: &Document, category_path: &str) -> Vec<SiteRecord> {
    let mut out = Vec::new();
    let lists = doc.elements().filter(|e| {
        e.tag() == "ul"
            && e.attr("class")
                .is_some_and(|c| c.split_ascii_whitespace().any(|c| c == LISTING_CLASS))
    });
    for ul in lists {
        for li in ul.child_elements().filter(|c| c.tag() == "li") {
            let Some(anchor) = li.descendants().find(|e| e.tag() == "a") else {
                continue;
            };
            let Some(href) = anchor.attr("href") else {
                continue;
            };
            let text = text_without(&li, &anchor);
            let description = text.trim_start_matches(['-', '–', '—', ':', ' ']);
            if let Ok(record) = SiteRecord::new(href, category_path, description) {
                out.push(record);
            }
        }
    }
    out
}

/// Collapsed text of `el` leaving out the subtree rooted at `skip`.
fn text_without(el: &ElementRef<'_>, skip: &ElementRef<'_>) -> String {
    let mut raw = String::new();
    let mut stack: Vec<NodeRef<'_>> = el.children().collect();
    stack.reverse();
    while let Some(node) = stack.pop() {
        match node {
            NodeRef::Text(t) => raw.push_str(t),
            NodeRef::Element(child) if child == *skip => raw.push(' '),
            NodeRef::Element(child) => {
                let mut kids: Vec<_> = child.children().collect();
                kids.reverse();
                stack.extend(kids);
            }
        }
    }
    collapse_whitespace(&raw)
}

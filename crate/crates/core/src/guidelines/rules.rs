use std::collections::{HashMap, HashSet};

use url::Url;

use super::{GuidelineId, Verdict};
use crate::dom::{collapse_whitespace, Document, ElementRef};

const DATE_META_NAMES: &[&str] = &["date", "last-modified", "dc.date", "revised"];
const AUTHOR_META_NAMES: &[&str] = &["author", "dc.creator"];
const HOME_HREFS: &[&str] = &[
    "/",
    "./",
    "index.html",
    "index.htm",
    "default.htm",
    "default.html",
];
const INDEX_FILES: &[&str] = &["index.html", "index.htm", "default.htm", "default.html"];
const HOME_LABELS: &[&str] = &["home", "homepage", "home page"];
const PORTABLE_FONTS: &[&str] = &[
    "arial",
    "helvetica",
    "times",
    "times new roman",
    "courier",
    "courier new",
    "georgia",
    "verdana",
    "serif",
    "sans-serif",
    "monospace",
    "cursive",
    "fantasy",
];
/// Any of these puts a page in a frames context.
const FRAME_TAGS: &[&str] = &["frameset", "frame", "iframe"];

/// Evaluates one guideline. `base_url` is the page's own absolute URL and
/// is only consulted by the link-to-home rule.
pub fn run_guideline(doc: &Document, id: GuidelineId, base_url: &str) -> Verdict {
    match id {
        GuidelineId::LinkLabel => link_label(doc),
        GuidelineId::Freshness => freshness(doc),
        GuidelineId::NoframesValidity => noframes_validity(doc),
        GuidelineId::LinkToHome => link_to_home(doc, base_url),
        GuidelineId::FrameTitles => gated(elements(doc, &["frame", "iframe"]), |f| {
            f.non_blank_attr("title").is_none()
        }),
        GuidelineId::TableCoding => gated(elements(doc, &["table"]), lacks_dimensions),
        GuidelineId::ImageCoding => gated(elements(doc, &["img"]), lacks_dimensions),
        GuidelineId::ExplicitMailto => explicit_mailto(doc),
        GuidelineId::PageTitle => page_title(doc),
        GuidelineId::TableHeaders => table_headers(doc),
        GuidelineId::LinkTargets => link_targets(doc),
        GuidelineId::PortableFontFaces => portable_fonts(doc),
        GuidelineId::ImageAlt => gated(elements(doc, &["img"]), |img| {
            img.non_blank_attr("alt").is_none()
        }),
        GuidelineId::FramesResizing => gated(elements(doc, &["frameset"]), absolute_frame_sizes),
        GuidelineId::FormCoding => gated(elements(doc, &["form"]), lacks_form_buttons),
        GuidelineId::KeywordsDescription => keywords_description(doc),
        GuidelineId::MarqueeBlink => respect_unless(doc.contains_any(&["marquee", "blink"])),
    }
}

fn elements<'a>(doc: &'a Document, tags: &[&str]) -> Vec<ElementRef<'a>> {
    doc.elements().filter(|e| tags.contains(&e.tag())).collect()
}

/// Neutral when nothing is in scope, Violate when any in-scope element
/// fails, Respect otherwise.
fn gated<'a>(scope: Vec<ElementRef<'a>>, violates: impl Fn(&ElementRef<'a>) -> bool) -> Verdict {
    if scope.is_empty() {
        Verdict::Neutral
    } else {
        respect_unless(scope.iter().any(violates))
    }
}

fn respect_unless(violated: bool) -> Verdict {
    if violated {
        Verdict::Violate
    } else {
        Verdict::Respect
    }
}

fn lacks_dimensions(el: &ElementRef<'_>) -> bool {
    el.non_blank_attr("width").is_none() || el.non_blank_attr("height").is_none()
}

fn anchors(doc: &Document) -> impl Iterator<Item = ElementRef<'_>> {
    doc.elements().filter(|e| e.tag() == "a")
}

/// Trims, drops the fragment and strips one trailing slash. Empty for
/// same-page fragment links.
fn normalize_href(raw: &str) -> &str {
    let href = raw.trim();
    let href = href.split_once('#').map_or(href, |(before, _)| before);
    match href.strip_suffix('/') {
        Some(stripped) if !stripped.is_empty() => stripped,
        _ => href,
    }
}

fn link_label(doc: &Document) -> Verdict {
    let mut groups: HashMap<&str, Vec<String>> = HashMap::new();
    for a in anchors(doc) {
        let Some(href) = a.non_blank_attr("href") else {
            continue;
        };
        let key = normalize_href(href);
        if key.is_empty() {
            continue;
        }
        groups.entry(key).or_default().push(a.label());
    }
    let mut shared = groups
        .values()
        .filter(|labels| labels.len() >= 2)
        .peekable();
    if shared.peek().is_none() {
        return Verdict::Neutral;
    }
    respect_unless(shared.any(|labels| labels.iter().any(|l| l != &labels[0])))
}

fn meta_named<'a>(
    doc: &'a Document,
    names: &'a [&str],
) -> impl Iterator<Item = ElementRef<'a>> + 'a {
    doc.elements().filter(move |m| {
        m.tag() == "meta"
            && m.attr("name")
                .is_some_and(|n| names.contains(&n.trim().to_ascii_lowercase().as_str()))
    })
}

fn has_meta_content(doc: &Document, names: &[&str]) -> bool {
    meta_named(doc, names).any(|m| m.non_blank_attr("content").is_some())
}

fn freshness(doc: &Document) -> Verdict {
    let dated = has_meta_content(doc, DATE_META_NAMES)
        || doc.elements().any(|m| {
            m.tag() == "meta"
                && m.attr("http-equiv")
                    .is_some_and(|h| h.trim().eq_ignore_ascii_case("last-modified"))
                && m.non_blank_attr("content").is_some()
        });
    let authored = has_meta_content(doc, AUTHOR_META_NAMES)
        || doc
            .elements()
            .any(|e| e.tag() == "address" && !e.text_content().is_empty());
    respect_unless(!(dated && authored))
}

fn noframes_validity(doc: &Document) -> Verdict {
    if !doc.contains_any(FRAME_TAGS) {
        return Verdict::Neutral;
    }
    let navigable = doc.elements().filter(|e| e.tag() == "noframes").any(|nf| {
        nf.descendants()
            .any(|a| a.tag() == "a" && a.non_blank_attr("href").is_some())
    });
    respect_unless(!navigable)
}

fn link_to_home(doc: &Document, base_url: &str) -> Verdict {
    let base = Url::parse(base_url).ok();
    let found = anchors(doc).any(|a| {
        let label = a.label().to_lowercase();
        if HOME_LABELS.contains(&label.as_str()) {
            return true;
        }
        let Some(href) = a.attr("href") else {
            return false;
        };
        let href = href.trim();
        let href = href.split_once('#').map_or(href, |(before, _)| before);
        if href.is_empty() {
            return false;
        }
        if HOME_HREFS.contains(&href.to_ascii_lowercase().as_str()) {
            return true;
        }
        match (&base, base.as_ref().and_then(|b| b.join(href).ok())) {
            (Some(base), Some(target)) => same_page(base, &target),
            _ => false,
        }
    });
    respect_unless(!found)
}

fn same_page(a: &Url, b: &Url) -> bool {
    fn page_path(u: &Url) -> String {
        let mut path = u.path().to_ascii_lowercase();
        for index in INDEX_FILES {
            if path.ends_with(index) && path[..path.len() - index.len()].ends_with('/') {
                path.truncate(path.len() - index.len());
                break;
            }
        }
        while path.ends_with('/') {
            path.pop();
        }
        path
    }
    a.host_str() == b.host_str()
        && a.port_or_known_default() == b.port_or_known_default()
        && page_path(a) == page_path(b)
        && a.query() == b.query()
}

fn explicit_mailto(doc: &Document) -> Verdict {
    let mailto: Vec<_> = anchors(doc)
        .filter_map(|a| {
            let href = a.attr("href")?.trim();
            let scheme = href.get(..7)?;
            scheme
                .eq_ignore_ascii_case("mailto:")
                .then(|| (a, &href[7..]))
        })
        .collect();
    if mailto.is_empty() {
        return Verdict::Neutral;
    }
    respect_unless(mailto.iter().any(|(a, rest)| {
        let address = rest.split('?').next().unwrap_or("").trim().to_lowercase();
        address.is_empty() || !a.label().to_lowercase().contains(&address)
    }))
}

fn page_title(doc: &Document) -> Verdict {
    let title = doc
        .elements()
        .find(|e| e.tag() == "title" && e.ancestor("svg").is_none());
    respect_unless(title.is_none_or(|t| t.text_content().is_empty()))
}

fn table_headers(doc: &Document) -> Verdict {
    let tables = elements(doc, &["table"]);
    let owners: HashSet<_> = doc
        .elements()
        .filter(|e| e.tag() == "th")
        .filter_map(|th| th.ancestor("table").map(|t| t.id()))
        .collect();
    gated(tables, |t| !owners.contains(&t.id()))
}

fn link_targets(doc: &Document) -> Verdict {
    if !doc.contains_any(FRAME_TAGS) {
        return Verdict::Neutral;
    }
    respect_unless(doc.elements().any(|e| {
        e.attr("target")
            .is_some_and(|t| t.trim().eq_ignore_ascii_case("_blank"))
    }))
}

fn font_faces(face: &str) -> impl Iterator<Item = String> + '_ {
    face.split(',')
        .map(|f| {
            f.trim()
                .trim_matches(|c| c == '"' || c == '\'')
                .trim()
                .to_lowercase()
        })
        .filter(|f| !f.is_empty())
}

fn portable_fonts(doc: &Document) -> Verdict {
    let faces: Vec<&str> = doc
        .elements()
        .filter(|e| e.tag() == "font")
        .filter_map(|f| f.non_blank_attr("face"))
        .collect();
    if faces.is_empty() {
        return Verdict::Neutral;
    }
    respect_unless(faces.iter().any(|face| {
        !font_faces(face).any(|f| PORTABLE_FONTS.contains(&collapse_whitespace(&f).as_str()))
    }))
}

fn absolute_frame_sizes(frameset: &ElementRef<'_>) -> bool {
    ["rows", "cols"].iter().any(|attr| {
        frameset.attr(attr).is_some_and(|spec| {
            spec.split(',').any(|tok| {
                let tok = tok.trim();
                !tok.is_empty() && tok.bytes().all(|b| b.is_ascii_digit())
            })
        })
    })
}

fn control_type(el: &ElementRef<'_>) -> Option<String> {
    el.attr("type").map(|t| t.trim().to_ascii_lowercase())
}

fn lacks_form_buttons(form: &ElementRef<'_>) -> bool {
    let mut submit = false;
    let mut reset = false;
    for el in form.descendants() {
        let ty = control_type(&el);
        match (el.tag(), ty.as_deref()) {
            ("input", Some("submit" | "image")) => submit = true,
            ("button", None | Some("submit")) => submit = true,
            ("input" | "button", Some("reset")) => reset = true,
            _ => {}
        }
    }
    !(submit && reset)
}

fn keywords_description(doc: &Document) -> Verdict {
    respect_unless(
        !(has_meta_content(doc, &["keywords"]) && has_meta_content(doc, &["description"])),
    )
}

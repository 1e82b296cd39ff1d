//! Lenient HTML document model.
//!
//! Pages are decoded, tokenized and assembled into an immutable arena tree
//! of elements and text. Parsing never fails: unknown tags are kept,
//! unclosed tags are closed by a small set of recovery rules, and comments,
//! doctypes and processing instructions are dropped. Nesting deeper than
//! [`MAX_DEPTH`] is flattened into the deepest allowed element.

use std::fmt::Write as _;

use encoding_rs::Encoding;
use regex::bytes::Regex;
use std::sync::OnceLock;

/// Maximum element nesting depth kept in the tree.
pub const MAX_DEPTH: usize = 512;

/// Bytes inspected when looking for a `<meta charset>` declaration.
const CHARSET_PRESCAN_BYTES: usize = 4096;

const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "basefont", "bgsound", "br", "col", "embed", "frame", "hr", "img", "input",
    "isindex", "keygen", "link", "meta", "param", "source", "track", "wbr",
];

/// Elements whose content is not tokenized as markup.
const RAW_TEXT_ELEMENTS: &[&str] = &["script", "style", "xmp", "iframe", "noembed", "plaintext"];
/// Raw elements whose content still has character references decoded.
const RCDATA_ELEMENTS: &[&str] = &["title", "textarea"];

/// Start tags that close an open `p`.
const CLOSES_P: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "center",
    "dir",
    "div",
    "dl",
    "fieldset",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "header",
    "hr",
    "menu",
    "nav",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "ul",
    "li",
    "dd",
    "dt",
];

/// Elements that stop searches for generic open elements.
const SCOPE_BOUNDARY: &[&str] = &[
    "table", "td", "th", "caption", "marquee", "object", "applet", "template", "button",
];

const TABLE_SECTIONS: &[&str] = &["tbody", "thead", "tfoot", "caption", "colgroup"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeData {
    Document,
    Element { tag: String, attrs: Vec<Attribute> },
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    data: NodeData,
}

/// A parsed page. Node storage is a flat arena in document order.
#[derive(Debug, Clone)]
pub struct Document {
    nodes: Vec<Node>,
    source_length: usize,
}

/// Two documents are equal when their trees are equal; the source length
/// is not compared.
impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

impl Eq for Document {}

/// Borrowed handle to an element (or the synthetic document root).
#[derive(Clone, Copy)]
pub struct ElementRef<'a> {
    doc: &'a Document,
    id: NodeId,
}

/// A child of an element: either an element or a run of text.
#[derive(Clone, Copy, Debug)]
pub enum NodeRef<'a> {
    Element(ElementRef<'a>),
    Text(&'a str),
}

impl std::fmt::Debug for ElementRef<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ElementRef")
            .field("id", &self.id)
            .field("tag", &self.tag())
            .field("attrs", &self.attrs())
            .finish()
    }
}

impl PartialEq for ElementRef<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.doc, other.doc) && self.id == other.id
    }
}

impl Document {
    pub fn root(&self) -> ElementRef<'_> {
        ElementRef {
            doc: self,
            id: NodeId(0),
        }
    }

    /// Number of input bytes the document was parsed from.
    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Number of element nodes, excluding the document root.
    pub fn element_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.data, NodeData::Element { .. }))
            .count()
    }

    /// All elements in depth-first pre-order.
    pub fn elements(&self) -> impl Iterator<Item = ElementRef<'_>> {
        self.root().descendants()
    }

    /// All elements named `tag` (lowercase) in document order.
    pub fn select(&self, tag: &str) -> Vec<ElementRef<'_>> {
        self.elements().filter(|e| e.tag() == tag).collect()
    }

    /// True when at least one element with any of `tags` exists.
    pub fn contains_any(&self, tags: &[&str]) -> bool {
        self.elements().any(|e| tags.contains(&e.tag()))
    }

    /// Serializes the element tree back to markup.
    pub fn to_html(&self) -> String {
        let mut out = String::with_capacity(self.source_length);
        for child in self.root().children() {
            write_node(&mut out, child);
        }
        out
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }
}

fn write_node(out: &mut String, start: NodeRef<'_>) {
    enum Step<'a> {
        Open(NodeRef<'a>),
        Raw(&'a str),
        Close(&'a str),
    }
    let mut stack = vec![Step::Open(start)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Close(tag) => {
                let _ = write!(out, "</{tag}>");
            }
            Step::Raw(t) => out.push_str(t),
            Step::Open(NodeRef::Text(t)) => out.push_str(&escape_text(t)),
            Step::Open(NodeRef::Element(el)) => {
                let tag = el.tag();
                out.push('<');
                out.push_str(tag);
                for a in el.attrs() {
                    let _ = write!(out, " {}=\"{}\"", a.name, escape_attr(&a.value));
                }
                out.push('>');
                if is_void(tag) {
                    continue;
                }
                stack.push(Step::Close(tag));
                let raw = RAW_TEXT_ELEMENTS.contains(&tag);
                let children: Vec<_> = el.children().collect();
                for child in children.into_iter().rev() {
                    stack.push(match child {
                        NodeRef::Text(t) if raw => Step::Raw(t),
                        other => Step::Open(other),
                    });
                }
            }
        }
    }
}

fn escape_text(t: &str) -> String {
    html_escape::encode_text(t).into_owned()
}

fn escape_attr(v: &str) -> String {
    html_escape::encode_double_quoted_attribute(v).into_owned()
}

fn is_void(tag: &str) -> bool {
    VOID_ELEMENTS.contains(&tag)
}

impl<'a> ElementRef<'a> {
    /// Lowercase tag name; empty for the document root.
    pub fn tag(&self) -> &'a str {
        match &self.doc.node(self.id).data {
            NodeData::Element { tag, .. } => tag,
            _ => "",
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn attrs(&self) -> &'a [Attribute] {
        match &self.doc.node(self.id).data {
            NodeData::Element { attrs, .. } => attrs,
            _ => &[],
        }
    }

    /// Case-insensitive attribute lookup.
    pub fn attr(&self, name: &str) -> Option<&'a str> {
        self.attrs()
            .iter()
            .find(|a| a.name.eq_ignore_ascii_case(name))
            .map(|a| a.value.as_str())
    }

    /// Attribute value if present and not blank.
    pub fn non_blank_attr(&self, name: &str) -> Option<&'a str> {
        self.attr(name).filter(|v| !v.trim().is_empty())
    }

    pub fn parent(&self) -> Option<ElementRef<'a>> {
        self.doc
            .node(self.id)
            .parent
            .map(|id| ElementRef { doc: self.doc, id })
    }

    pub fn children(&self) -> impl Iterator<Item = NodeRef<'a>> + 'a {
        let doc = self.doc;
        doc.node(self.id)
            .children
            .iter()
            .map(move |&id| match &doc.node(id).data {
                NodeData::Text(t) => NodeRef::Text(t),
                _ => NodeRef::Element(ElementRef { doc, id }),
            })
    }

    pub fn child_elements(&self) -> impl Iterator<Item = ElementRef<'a>> + 'a {
        self.children().filter_map(|c| match c {
            NodeRef::Element(e) => Some(e),
            NodeRef::Text(_) => None,
        })
    }

    /// Descendant elements in pre-order, excluding `self`.
    pub fn descendants(&self) -> Descendants<'a> {
        let mut stack: Vec<NodeId> = self.doc.node(self.id).children.clone();
        stack.reverse();
        Descendants {
            doc: self.doc,
            stack,
        }
    }

    /// Nearest proper ancestor with the given tag.
    pub fn ancestor(&self, tag: &str) -> Option<ElementRef<'a>> {
        let mut cur = self.parent();
        while let Some(el) = cur {
            if el.tag() == tag {
                return Some(el);
            }
            cur = el.parent();
        }
        None
    }

    /// Descendant text joined in document order, whitespace collapsed.
    pub fn text_content(&self) -> String {
        let mut raw = String::new();
        self.walk_text(|piece| raw.push_str(piece), false);
        collapse_whitespace(&raw)
    }

    /// Visible label: descendant text plus the alt text of descendant
    /// images, whitespace collapsed.
    pub fn label(&self) -> String {
        let mut raw = String::new();
        self.walk_text(|piece| raw.push_str(piece), true);
        collapse_whitespace(&raw)
    }

    fn walk_text(&self, mut sink: impl FnMut(&str), with_alt: bool) {
        let doc = self.doc;
        let mut stack: Vec<NodeId> = doc.node(self.id).children.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let node = doc.node(id);
            match &node.data {
                NodeData::Text(t) => sink(t),
                NodeData::Element { tag, .. } => {
                    if with_alt && tag == "img" {
                        if let Some(alt) = (ElementRef { doc, id }).attr("alt") {
                            sink(" ");
                            sink(alt);
                            sink(" ");
                        }
                    }
                    stack.extend(node.children.iter().rev().copied());
                }
                NodeData::Document => {}
            }
        }
    }
}

pub struct Descendants<'a> {
    doc: &'a Document,
    stack: Vec<NodeId>,
}

impl<'a> Iterator for Descendants<'a> {
    type Item = ElementRef<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(id) = self.stack.pop() {
            let node = self.doc.node(id);
            if let NodeData::Element { .. } = node.data {
                self.stack.extend(node.children.iter().rev().copied());
                return Some(ElementRef { doc: self.doc, id });
            }
        }
        None
    }
}

/// Collapses runs of whitespace to one space and trims both ends.
pub fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Document-order list of elements named `tag`.
pub fn select_elements<'a>(doc: &'a Document, tag: &str) -> Vec<ElementRef<'a>> {
    doc.select(tag)
}

/// Text content of an element; see [`ElementRef::text_content`].
pub fn text_content(el: ElementRef<'_>) -> String {
    el.text_content()
}

/// Parses raw page bytes. `encoding_hint` is a charset label such as one
/// taken from a `Content-Type` header; it overrides any `<meta>` charset.
pub fn parse_document(bytes: &[u8], encoding_hint: Option<&str>) -> Document {
    let text = decode(bytes, encoding_hint);
    let mut builder = TreeBuilder::new(bytes.len());
    Tokenizer::new(&text).run(&mut builder);
    builder.finish()
}

fn meta_charset_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"(?i)<meta[^>]*?charset\s*=\s*["']?\s*([a-z0-9_\-.:]+)"#).expect("valid regex")
    })
}

/// Charset declared by a `<meta>` tag near the start of the page.
pub fn sniff_meta_charset(bytes: &[u8]) -> Option<&'static Encoding> {
    let head = &bytes[..bytes.len().min(CHARSET_PRESCAN_BYTES)];
    let caps = meta_charset_regex().captures(head)?;
    let enc = Encoding::for_label(caps.get(1)?.as_bytes())?;
    // A meta tag readable as ASCII cannot be UTF-16.
    if enc == encoding_rs::UTF_16LE || enc == encoding_rs::UTF_16BE {
        return Some(encoding_rs::UTF_8);
    }
    Some(enc)
}

fn decode(bytes: &[u8], hint: Option<&str>) -> String {
    if let Some((enc, bom_len)) = Encoding::for_bom(bytes) {
        return enc
            .decode_without_bom_handling(&bytes[bom_len..])
            .0
            .into_owned();
    }
    let enc = hint
        .and_then(|h| Encoding::for_label(h.trim().as_bytes()))
        .or_else(|| sniff_meta_charset(bytes))
        .unwrap_or(encoding_rs::UTF_8);
    enc.decode_without_bom_handling(bytes).0.into_owned()
}

struct TreeBuilder {
    nodes: Vec<Node>,
    /// Open elements; index 0 is the document root.
    stack: Vec<NodeId>,
    source_length: usize,
}

impl TreeBuilder {
    fn new(source_length: usize) -> Self {
        TreeBuilder {
            nodes: vec![Node {
                parent: None,
                children: Vec::new(),
                data: NodeData::Document,
            }],
            stack: vec![NodeId(0)],
            source_length,
        }
    }

    fn finish(self) -> Document {
        Document {
            nodes: self.nodes,
            source_length: self.source_length,
        }
    }

    fn current(&self) -> NodeId {
        *self.stack.last().expect("root is never popped")
    }

    fn tag_at(&self, idx: usize) -> &str {
        match &self.nodes[self.stack[idx].0].data {
            NodeData::Element { tag, .. } => tag,
            _ => "",
        }
    }

    fn push_node(&mut self, data: NodeData) -> NodeId {
        let parent = self.current();
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            parent: Some(parent),
            children: Vec::new(),
            data,
        });
        self.nodes[parent.0].children.push(id);
        id
    }

    fn text(&mut self, s: &str) {
        if s.is_empty() {
            return;
        }
        let cur = self.current();
        if let Some(&last) = self.nodes[cur.0].children.last() {
            if let NodeData::Text(existing) = &mut self.nodes[last.0].data {
                existing.push_str(s);
                return;
            }
        }
        self.push_node(NodeData::Text(s.to_owned()));
    }

    /// Index of the nearest open element in `targets`, searching from the
    /// top of the stack and giving up at any element in `stop`.
    fn find_open(&self, targets: &[&str], stop: &[&str]) -> Option<usize> {
        for idx in (1..self.stack.len()).rev() {
            let tag = self.tag_at(idx);
            if targets.contains(&tag) {
                return Some(idx);
            }
            if stop.contains(&tag) {
                return None;
            }
        }
        None
    }

    fn close_from(&mut self, idx: usize) {
        self.stack.truncate(idx);
    }

    /// Index of the nearest open table, or 0 when outside any table.
    fn table_floor(&self) -> usize {
        (1..self.stack.len())
            .rev()
            .find(|&i| self.tag_at(i) == "table")
            .unwrap_or(0)
    }

    fn first_open_above(&self, floor: usize, targets: &[&str]) -> Option<usize> {
        (floor + 1..self.stack.len()).find(|&i| targets.contains(&self.tag_at(i)))
    }

    fn close_implied(&mut self, tag: &str) {
        if CLOSES_P.contains(&tag) {
            if let Some(idx) = self.find_open(&["p"], SCOPE_BOUNDARY) {
                self.close_from(idx);
            }
        }
        match tag {
            "li" => {
                if let Some(idx) =
                    self.find_open(&["li"], &["ul", "ol", "menu", "table", "td", "th"])
                {
                    self.close_from(idx);
                }
            }
            "dt" | "dd" => {
                if let Some(idx) = self.find_open(&["dt", "dd"], &["dl", "table", "td", "th"]) {
                    self.close_from(idx);
                }
            }
            "option" => {
                if self.tag_at(self.stack.len() - 1) == "option" {
                    self.stack.pop();
                }
            }
            "optgroup" => {
                if let Some(idx) = self.find_open(&["option", "optgroup"], &["select"]) {
                    self.close_from(idx);
                }
            }
            "a" => {
                if let Some(idx) = self.find_open(&["a"], &["table", "td", "th", "caption"]) {
                    self.close_from(idx);
                }
            }
            "tr" => {
                let floor = self.table_floor();
                if let Some(idx) = self.first_open_above(floor, &["tr", "td", "th"]) {
                    self.close_from(idx);
                }
            }
            "td" | "th" => {
                let floor = self.table_floor();
                if let Some(idx) = self.first_open_above(floor, &["td", "th"]) {
                    self.close_from(idx);
                }
            }
            "tbody" | "thead" | "tfoot" | "caption" | "colgroup" => {
                let floor = self.table_floor();
                let mut set = vec!["tr", "td", "th"];
                set.extend_from_slice(TABLE_SECTIONS);
                if let Some(idx) = self.first_open_above(floor, &set) {
                    self.close_from(idx);
                }
            }
            "body" | "frameset" => {
                if let Some(idx) = self.find_open(&["head"], &[]) {
                    self.close_from(idx);
                }
            }
            _ => {}
        }
    }

    /// Returns whether the element was inserted.
    fn start(&mut self, tag: String, attrs: Vec<Attribute>, self_closing: bool) -> bool {
        if matches!(tag.as_str(), "html" | "head" | "body")
            && self.find_open(&[&tag], &[]).is_some()
        {
            return false;
        }
        self.close_implied(&tag);
        if self.stack.len() > MAX_DEPTH {
            return false;
        }
        let keep_open = !is_void(&tag) && !self_closing;
        let id = self.push_node(NodeData::Element { tag, attrs });
        if keep_open {
            self.stack.push(id);
        }
        true
    }

    fn end(&mut self, tag: &str) {
        if is_void(tag) {
            return;
        }
        let stop: &[&str] = match tag {
            "td" | "th" | "tr" | "tbody" | "thead" | "tfoot" | "caption" | "colgroup" => &["table"],
            "li" => &["ul", "ol", "table", "td", "th"],
            "dt" | "dd" => &["dl", "table", "td", "th"],
            "html" | "body" | "head" => &[],
            _ => SCOPE_BOUNDARY,
        };
        if let Some(idx) = self.find_open(&[tag], stop) {
            self.close_from(idx);
        }
    }
}

struct Tokenizer<'s> {
    src: &'s str,
    pos: usize,
}

enum StartTag {
    Tag {
        name: String,
        attrs: Vec<Attribute>,
        self_closing: bool,
    },
    /// Input ended inside the tag.
    Truncated,
}

impl<'s> Tokenizer<'s> {
    fn new(src: &'s str) -> Self {
        Tokenizer { src, pos: 0 }
    }

    fn bytes(&self) -> &'s [u8] {
        self.src.as_bytes()
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.bytes().get(self.pos + offset).copied()
    }

    fn run(mut self, out: &mut TreeBuilder) {
        while self.pos < self.src.len() {
            let next_lt = self.rest().find('<').map(|i| self.pos + i);
            let text_end = next_lt.unwrap_or(self.src.len());
            if text_end > self.pos {
                out.text(&decode_entities(&self.src[self.pos..text_end]));
                self.pos = text_end;
            }
            if next_lt.is_none() {
                break;
            }
            self.markup(out);
        }
    }

    /// Handles the construct starting at `<`.
    fn markup(&mut self, out: &mut TreeBuilder) {
        let rest = self.rest();
        if let Some(body) = rest.strip_prefix("<!--") {
            if body.starts_with('>') {
                self.pos += 5;
            } else if body.starts_with("->") {
                self.pos += 6;
            } else {
                self.pos = match body.find("-->") {
                    Some(i) => self.pos + 4 + i + 3,
                    None => self.src.len(),
                };
            }
            return;
        }
        match self.peek_at(1) {
            Some(b'!') | Some(b'?') => self.skip_past_gt(),
            Some(b'/') => match self.peek_at(2) {
                Some(c) if c.is_ascii_alphabetic() => {
                    self.pos += 2;
                    let name = self.read_tag_name();
                    match self.rest().find('>') {
                        Some(i) => {
                            self.pos += i + 1;
                            out.end(&name);
                        }
                        None => self.pos = self.src.len(),
                    }
                }
                Some(b'>') => self.pos += 3,
                _ => self.skip_past_gt(),
            },
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                match self.read_start_tag() {
                    StartTag::Truncated => self.pos = self.src.len(),
                    StartTag::Tag {
                        name,
                        attrs,
                        self_closing,
                    } => {
                        let raw = RAW_TEXT_ELEMENTS.contains(&name.as_str());
                        let rcdata = RCDATA_ELEMENTS.contains(&name.as_str());
                        let tag = name.clone();
                        out.start(name, attrs, self_closing);
                        if (raw || rcdata) && !self_closing {
                            self.raw_text(out, &tag, rcdata);
                        }
                    }
                }
            }
            _ => {
                out.text("<");
                self.pos += 1;
            }
        }
    }

    fn skip_past_gt(&mut self) {
        self.pos = match self.rest().find('>') {
            Some(i) => self.pos + i + 1,
            None => self.src.len(),
        };
    }

    fn read_tag_name(&mut self) -> String {
        let rest = self.rest();
        let len = rest
            .find(|c: char| c.is_ascii_whitespace() || c == '/' || c == '>')
            .unwrap_or(rest.len());
        self.pos += len;
        rest[..len].to_ascii_lowercase()
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start_matches(|c: char| c.is_ascii_whitespace());
        self.pos += rest.len() - trimmed.len();
    }

    fn read_start_tag(&mut self) -> StartTag {
        let name = self.read_tag_name();
        let mut attrs: Vec<Attribute> = Vec::new();
        loop {
            self.skip_ws();
            match self.peek_at(0) {
                None => return StartTag::Truncated,
                Some(b'>') => {
                    self.pos += 1;
                    return StartTag::Tag {
                        name,
                        attrs,
                        self_closing: false,
                    };
                }
                Some(b'/') => {
                    if self.peek_at(1) == Some(b'>') {
                        self.pos += 2;
                        return StartTag::Tag {
                            name,
                            attrs,
                            self_closing: true,
                        };
                    }
                    self.pos += 1;
                    continue;
                }
                Some(_) => {}
            }
            let rest = self.rest();
            // A leading '=' belongs to the name.
            let skip = usize::from(rest.starts_with('='));
            let len = rest[skip..]
                .find(|c: char| c.is_ascii_whitespace() || c == '/' || c == '>' || c == '=')
                .map_or(rest.len(), |i| i + skip);
            let attr_name = rest[..len].to_ascii_lowercase();
            self.pos += len;
            self.skip_ws();
            let mut value = String::new();
            if self.peek_at(0) == Some(b'=') {
                self.pos += 1;
                self.skip_ws();
                match self.peek_at(0) {
                    Some(q @ (b'"' | b'\'')) => {
                        let body = &self.rest()[1..];
                        match body.find(q as char) {
                            Some(end) => {
                                value = decode_entities(&body[..end]);
                                self.pos += end + 2;
                            }
                            None => return StartTag::Truncated,
                        }
                    }
                    _ => {
                        let rest = self.rest();
                        let end = rest
                            .find(|c: char| c.is_ascii_whitespace() || c == '>')
                            .unwrap_or(rest.len());
                        value = decode_entities(&rest[..end]);
                        self.pos += end;
                    }
                }
            }
            if !attrs.iter().any(|a| a.name == attr_name) {
                attrs.push(Attribute {
                    name: attr_name,
                    value,
                });
            }
        }
    }

    /// Consumes element content up to the matching end tag.
    fn raw_text(&mut self, out: &mut TreeBuilder, tag: &str, decode: bool) {
        let rest = self.rest();
        let needle = format!("</{tag}");
        let lower = rest.to_ascii_lowercase();
        let mut search = 0;
        let end = loop {
            match lower[search..].find(&needle) {
                Some(i) => {
                    let at = search + i;
                    let after = lower.as_bytes().get(at + needle.len()).copied();
                    if matches!(after, None | Some(b'>' | b'/'))
                        || after.is_some_and(|c| c.is_ascii_whitespace())
                    {
                        break Some(at);
                    }
                    search = at + needle.len();
                }
                None => break None,
            }
        };
        let content_end = end.unwrap_or(rest.len());
        let content = &rest[..content_end];
        if decode {
            out.text(&decode_entities(content));
        } else {
            out.text(content);
        }
        self.pos += content_end;
        if end.is_some() {
            self.skip_past_gt();
            out.end(tag);
        }
    }
}

fn decode_entities(s: &str) -> String {
    if s.contains('&') {
        html_escape::decode_html_entities(s).into_owned()
    } else {
        s.to_owned()
    }
}

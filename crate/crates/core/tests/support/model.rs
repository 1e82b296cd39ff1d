//! Random page model for guideline properties, and per-rule fixtures.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::sample::select;

pub const BASE: &str = "http://www.example.org/";

type Attrs = Vec<(&'static str, String)>;

#[derive(Debug, Clone)]
pub enum Node {
    El {
        tag: &'static str,
        attrs: Attrs,
        kids: Vec<Node>,
    },
    Text(String),
}

const VOID: &[&str] = &["img", "input", "meta", "frame", "br"];
const RAW: &[&str] = &["iframe", "title", "textarea", "script"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render(nodes: &[Node]) -> String {
    let mut out = String::new();
    for n in nodes {
        render_into(n, &mut out);
    }
    out
}

fn render_into(node: &Node, out: &mut String) {
    match node {
        Node::Text(t) => out.push_str(&esc(t)),
        Node::El { tag, attrs, kids } => {
            out.push('<');
            out.push_str(tag);
            for (k, v) in attrs {
                out.push_str(&format!(" {k}=\"{}\"", esc(v)));
            }
            out.push('>');
            if VOID.contains(tag) {
                return;
            }
            if RAW.contains(tag) {
                out.push_str("raw");
            } else {
                for k in kids {
                    render_into(k, out);
                }
            }
            out.push_str(&format!("</{tag}>"));
        }
    }
}

/// Removes every subtree rooted at one of `tags`.
pub fn prune(nodes: &[Node], tags: &[&str]) -> Vec<Node> {
    nodes
        .iter()
        .filter_map(|n| match n {
            Node::El { tag, .. } if tags.contains(tag) => None,
            Node::El { tag, attrs, kids } => Some(Node::El {
                tag,
                attrs: attrs.clone(),
                kids: prune(kids, tags),
            }),
            Node::Text(t) => Some(Node::Text(t.clone())),
        })
        .collect()
}

fn opt(
    name: &'static str,
    values: Vec<&'static str>,
) -> impl Strategy<Value = Option<(&'static str, String)>> {
    proptest::option::of(select(values).prop_map(move |v| (name, v.to_owned())))
}

fn attrs(parts: Vec<Option<(&'static str, String)>>) -> Attrs {
    parts.into_iter().flatten().collect()
}

fn leaf() -> impl Strategy<Value = Node> {
    let el = |tag: &'static str, a: Attrs| Node::El {
        tag,
        attrs: a,
        kids: Vec::new(),
    };
    prop_oneof![
        select(vec![
            "news",
            "home",
            "Home",
            "contact",
            " ",
            "a@example.org"
        ])
        .prop_map(|t| Node::Text(t.into())),
        (
            opt("alt", vec!["", " ", "logo", "Home"]),
            opt("width", vec!["10", ""]),
            opt("height", vec!["10"])
        )
            .prop_map(move |(a, w, h)| el(
                "img",
                attrs(vec![Some(("src", "i.gif".into())), a, w, h])
            )),
        opt("type", vec!["text", "submit", "reset", "image", "hidden"])
            .prop_map(move |t| el("input", attrs(vec![t]))),
        (
            select(vec!["keywords", "description", "date", "author"]),
            opt("content", vec!["x", ""])
        )
            .prop_map(move |(n, c)| el("meta", attrs(vec![Some(("name", n.into())), c]))),
        opt("title", vec!["menu", " "]).prop_map(move |t| el("frame", attrs(vec![t]))),
        opt("title", vec!["side", ""])
            .prop_map(move |t| el("iframe", attrs(vec![Some(("src", "/s".into())), t]))),
        select(vec!["T", " "]).prop_map(|t| Node::El {
            tag: "title",
            attrs: Vec::new(),
            kids: vec![Node::Text(t.into())]
        }),
        Just(el("br", Vec::new())),
    ]
}

fn container() -> impl Strategy<Value = (&'static str, Attrs)> {
    prop_oneof![
        select(vec![
            "div", "p", "span", "ul", "li", "noframes", "address", "b", "tr", "td", "th", "button"
        ])
        .prop_map(|t| (t, Vec::new())),
        (
            select(vec![
                "/a",
                "/a/",
                "/b#x",
                "#top",
                "/",
                "index.html",
                "mailto:a@example.org",
                "http://www.example.org/"
            ]),
            opt("target", vec!["_blank", "_self"]),
        )
            .prop_map(|(h, t)| ("a", attrs(vec![Some(("href", h.into())), t]))),
        (opt("width", vec!["100%", ""]), opt("height", vec!["20"]))
            .prop_map(|(w, h)| ("table", attrs(vec![w, h]))),
        opt("face", vec!["Arial", "Tahoma", "", "Verdana, Mangal"])
            .prop_map(|f| ("font", attrs(vec![f]))),
        Just(("form", Vec::new())),
        (
            opt("cols", vec!["100,*", "25%,*", "*,*"]),
            opt("rows", vec!["50,50"])
        )
            .prop_map(|(c, r)| ("frameset", attrs(vec![c, r]))),
        select(vec!["marquee", "blink"]).prop_map(|t| (t, Vec::new())),
    ]
}

fn node() -> impl Strategy<Value = Node> {
    leaf().prop_recursive(4, 48, 5, |inner| {
        (container(), prop::collection::vec(inner, 0..5))
            .prop_map(|((tag, attrs), kids)| Node::El { tag, attrs, kids })
    })
}

/// Body content of a random page.
pub fn page() -> impl Strategy<Value = Vec<Node>> {
    prop::collection::vec(node(), 0..8)
}

/// Tags whose removal must leave each gated guideline not applicable.
pub fn scope_tags(code: &str) -> &'static [&'static str] {
    match code {
        "1.1" | "5.1" => &["a"],
        "3.1" | "6.1" => &["frameset", "frame", "iframe"],
        "3.3" => &["frame", "iframe"],
        "4.1" | "5.3" => &["table"],
        "4.2" | "7.1" => &["img"],
        "6.2" => &["font"],
        "7.2" => &["frameset"],
        "8.1" => &["form"],
        _ => &[],
    }
}

/// One violating element per element-local guideline.
pub fn violator(code: &str) -> Option<&'static str> {
    Some(match code {
        "3.3" => r#"<iframe src="/v"></iframe>"#,
        "4.1" => r#"<table><tr><th>h</th></tr></table>"#,
        "4.2" => r#"<img src="v.gif" alt="v">"#,
        "5.1" => r#"<a href="mailto:v@example.org">write to us</a>"#,
        "5.3" => r#"<table width="1" height="1"><tr><td>x</td></tr></table>"#,
        "6.2" => r#"<font face="Tahoma">x</font>"#,
        "7.1" => r#"<img src="v.gif">"#,
        "7.2" => r#"<frameset cols="100,*"><frame title="t"></frameset>"#,
        "8.1" => r#"<form><input type="text"></form>"#,
        _ => return None,
    })
}

pub const ELEMENT_LOCAL: &[&str] = &[
    "3.3", "4.1", "4.2", "5.1", "5.3", "6.2", "7.1", "7.2", "8.1",
];

/// Minimal pages per guideline, evaluated at [`BASE`].
pub struct RuleFixture {
    pub code: &'static str,
    pub respect: &'static str,
    pub violate: &'static str,
    pub neutral: Option<&'static str>,
}

pub const RULE_FIXTURES: &[RuleFixture] = &[
    RuleFixture {
        code: "1.1",
        respect: r#"<a href="/a">About</a><a href="/a/">About</a>"#,
        violate: r#"<a href="/a">About</a><a href="/a">Company</a>"#,
        neutral: Some(r#"<a href="/a">About</a><a href="/b">Blog</a>"#),
    },
    RuleFixture {
        code: "2.1",
        respect: r#"<meta name="date" content="2011-01-01"><meta name="author" content="Web team">"#,
        violate: r#"<meta name="date" content="2011-01-01"><p>x</p>"#,
        neutral: None,
    },
    RuleFixture {
        code: "3.1",
        respect: r#"<frameset cols="50%,*"><frame src="a.html"><noframes><a href="/a">Enter</a></noframes></frameset>"#,
        violate: r#"<frameset cols="50%,*"><frame src="a.html"><noframes>No frames</noframes></frameset>"#,
        neutral: Some("<p>x</p>"),
    },
    RuleFixture {
        code: "3.2",
        respect: r#"<a href="index.html">Start</a>"#,
        violate: r#"<a href="/a">About</a>"#,
        neutral: None,
    },
    RuleFixture {
        code: "3.3",
        respect: r#"<iframe src="/s" title="Sidebar"></iframe>"#,
        violate: r#"<iframe src="/s" title=" "></iframe>"#,
        neutral: Some("<p>x</p>"),
    },
    RuleFixture {
        code: "4.1",
        respect: r#"<table width="100%" height="20"><tr><td>x</td></tr></table>"#,
        violate: r#"<table width="100%"><tr><td>x</td></tr></table>"#,
        neutral: Some("<p>x</p>"),
    },
    RuleFixture {
        code: "4.2",
        respect: r#"<img src="a.gif" width="10" height="10">"#,
        violate: r#"<img src="a.gif" height="10">"#,
        neutral: Some("<p>x</p>"),
    },
    RuleFixture {
        code: "5.1",
        respect: r#"<a href="mailto:info@example.org">Mail info@example.org</a>"#,
        violate: r#"<a href="mailto:info@example.org">Contact us</a>"#,
        neutral: Some(r#"<a href="/contact">Contact us</a>"#),
    },
    RuleFixture {
        code: "5.2",
        respect: "<title>Example</title>",
        violate: "<title> </title>",
        neutral: None,
    },
    RuleFixture {
        code: "5.3",
        respect: "<table><tr><th>Topic</th></tr><tr><td>x</td></tr></table>",
        violate: "<table><tr><td>x</td></tr></table>",
        neutral: Some("<p>x</p>"),
    },
    RuleFixture {
        code: "6.1",
        respect: r#"<iframe src="/s"></iframe><a href="/a" target="_self">About</a>"#,
        violate: r#"<iframe src="/s"></iframe><a href="/a" target="_blank">About</a>"#,
        neutral: Some(r#"<a href="/a" target="_blank">About</a>"#),
    },
    RuleFixture {
        code: "6.2",
        respect: r#"<font face="Verdana, Arial">x</font>"#,
        violate: r#"<font face="Tahoma">x</font>"#,
        neutral: Some(r#"<font size="2">x</font>"#),
    },
    RuleFixture {
        code: "7.1",
        respect: r#"<img src="a.gif" alt="Logo">"#,
        violate: r#"<img src="a.gif" alt="Logo"><img src="b.gif" alt="  ">"#,
        neutral: Some("<p>x</p>"),
    },
    RuleFixture {
        code: "7.2",
        respect: r#"<frameset cols="25%,*"><frame src="a.html"></frameset>"#,
        violate: r#"<frameset cols="180,*"><frame src="a.html"></frameset>"#,
        neutral: Some(r#"<iframe src="/s"></iframe>"#),
    },
    RuleFixture {
        code: "8.1",
        respect: r#"<form><input type="text"><button>Go</button><input type="reset"></form>"#,
        violate: r#"<form><input type="text"><input type="submit"></form>"#,
        neutral: Some("<p>x</p>"),
    },
    RuleFixture {
        code: "9.1",
        respect: r#"<meta name="keywords" content="a"><meta name="description" content="b">"#,
        violate: r#"<meta name="keywords" content="a">"#,
        neutral: None,
    },
    RuleFixture {
        code: "9.2",
        respect: "<p>Welcome</p>",
        violate: "<blink>Welcome</blink>",
        neutral: None,
    },
];

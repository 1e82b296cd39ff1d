//! Local HTTP server and directory-mirror builders shared by integration
//! and acceptance tests.

#![allow(dead_code)]

pub mod model;

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

#[derive(Debug, Clone)]
pub enum Route {
    Html(String),
    /// Body with an explicit `Content-Type` value.
    Typed(&'static str, Vec<u8>),
    Redirect(String),
    Status(u16),
    /// Accepts the request and never answers.
    Hang,
}

pub struct TestServer {
    pub base: String,
    pub port: u16,
    log: Arc<Mutex<Vec<String>>>,
}

impl TestServer {
    pub fn start(routes: Vec<(&str, Route)>) -> TestServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind test server");
        let port = listener.local_addr().expect("local addr").port();
        let routes: Arc<HashMap<String, Route>> =
            Arc::new(routes.into_iter().map(|(p, r)| (p.to_owned(), r)).collect());
        let log = Arc::new(Mutex::new(Vec::new()));
        let log2 = Arc::clone(&log);
        thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let routes = Arc::clone(&routes);
                let log = Arc::clone(&log2);
                thread::spawn(move || serve(stream, &routes, &log));
            }
        });
        TestServer {
            base: format!("http://127.0.0.1:{port}"),
            port,
            log,
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    /// Paths requested so far, in arrival order.
    pub fn requests(&self) -> Vec<String> {
        self.log.lock().unwrap().clone()
    }
}

fn serve(mut stream: TcpStream, routes: &HashMap<String, Route>, log: &Mutex<Vec<String>>) {
    let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).is_err() {
        return;
    }
    loop {
        let mut line = String::new();
        match reader.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) if line == "\r\n" || line == "\n" => break,
            Ok(_) => {}
        }
    }
    let path = request_line
        .split_whitespace()
        .nth(1)
        .unwrap_or("/")
        .to_owned();
    log.lock().unwrap().push(path.clone());

    let (status, headers, body): (u16, Vec<(String, String)>, Vec<u8>) = match routes.get(&path) {
        Some(Route::Html(body)) => (
            200,
            vec![("Content-Type".into(), "text/html".into())],
            body.clone().into_bytes(),
        ),
        Some(Route::Typed(ct, body)) => (
            200,
            vec![("Content-Type".into(), (*ct).into())],
            body.clone(),
        ),
        Some(Route::Redirect(to)) => (302, vec![("Location".into(), to.clone())], Vec::new()),
        Some(Route::Status(code)) => (*code, Vec::new(), Vec::new()),
        Some(Route::Hang) => {
            thread::sleep(Duration::from_secs(60));
            return;
        }
        None => (404, Vec::new(), Vec::new()),
    };
    let mut head = format!(
        "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n",
        body.len()
    );
    for (k, v) in headers {
        head.push_str(&format!("{k}: {v}\r\n"));
    }
    head.push_str("\r\n");
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(&body);
    let _ = stream.flush();
}

/// A bound socket that never accepts, so connections stall.
pub fn silent_listener() -> (TcpListener, String) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind silent listener");
    let url = format!(
        "http://127.0.0.1:{}/",
        listener.local_addr().unwrap().port()
    );
    (listener, url)
}

/// Writes `<root>/<category>/index.html` listing `entries` as
/// `(url, label, description)`.
pub fn write_listing(root: &Path, category: &str, entries: &[(&str, &str, &str)]) {
    let dir = root.join(category);
    fs::create_dir_all(&dir).expect("create category dir");
    let mut html = String::from(
        "<html><head><title>Directory</title></head><body>\n<ul class=\"directory-url\">\n",
    );
    for (url, label, desc) in entries {
        html.push_str(&format!(
            "<li><a href=\"{url}\">{label}</a> - {desc}</li>\n"
        ));
    }
    html.push_str("</ul></body></html>\n");
    fs::write(dir.join("index.html"), html).expect("write listing");
}

/// Places an `index.html` under `category` that cannot be read.
pub fn write_unreadable_listing(root: &Path, category: &str) {
    let dir = root.join(category);
    fs::create_dir_all(&dir).expect("create category dir");
    #[cfg(unix)]
    std::os::unix::fs::symlink(dir.join("missing-target.html"), dir.join("index.html"))
        .expect("dangling symlink");
}

/// Homepage violating or missing guidelines in the pattern
/// `VVNVNVVRVVNVVNVVV` when evaluated at `http://www.example.org/`.
pub const PATTERN_PAGE: &str = r#"<html><head></head><body>
<marquee>Welcome</marquee>
<a href="/news">News</a> <a href="/news">Latest</a>
<table><tr><td><img src="logo.gif"></td></tr></table>
<font face="Tahoma">Hello</font>
<a href="mailto:info@example.org">info@example.org</a>
<form action="/s"><input type="text" name="q"><input type="submit"></form>
</body></html>"#;

/// Page that respects every guideline when evaluated at `http://www.example.org/`.
pub const CLEAN_PAGE: &str = r#"<html><head><title>Example</title>
<meta name="keywords" content="example"><meta name="description" content="An example site">
<meta name="author" content="Web team"><meta name="date" content="2011-01-01">
</head><body>
<a href="/">Home</a> <a href="/about">About</a> <a href="/about">About</a>
<table width="100%" height="40"><tr><th>Topic</th><td>x</td></tr></table>
<img src="a.gif" alt="logo" width="10" height="10">
<a href="mailto:info@example.org">info@example.org</a>
<font face="Arial">Hi</font>
<iframe src="/side" title="side"></iframe>
<noframes><a href="/plain">Plain</a></noframes>
<frameset cols="50%,*"><frame src="a.html" title="a"></frameset>
<form action="/s"><input type="text" name="q"><input type="submit"><input type="reset"></form>
</body></html>"#;

//! Seeded generator of realistic-looking homepages for load tests and
//! benchmarks. The same seed always yields the same bytes.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "news", "travel", "weather", "forecast", "hotel", "market", "school", "temple", "river",
    "festival", "guide", "city", "rail", "office", "health", "clinic", "garden", "museum",
    "library", "sports", "club", "tour", "island", "valley", "district", "service",
];
const FONTS: &[&str] = &[
    "Tahoma",
    "Verdana",
    "MS Gothic",
    "Arial",
    "Mangal",
    "Georgia",
];

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n)
        .map(|_| *WORDS.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Builds a homepage of roughly `target_bytes` bytes.
pub fn homepage(seed: u64, target_bytes: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::with_capacity(target_bytes + 2048);
    s.push_str("<!DOCTYPE html PUBLIC \"-//W3C//DTD XHTML 1.0 Transitional//EN\">\n<html><head>");
    if rng.gen_bool(0.7) {
        let _ = write!(s, "<title>{}</title>", words(&mut rng, 3));
    }
    if rng.gen_bool(0.4) {
        let _ = write!(
            s,
            "<meta name=\"keywords\" content=\"{}\">",
            words(&mut rng, 4)
        );
    }
    if rng.gen_bool(0.4) {
        let _ = write!(
            s,
            "<meta name=\"description\" content=\"{}\">",
            words(&mut rng, 8)
        );
    }
    if rng.gen_bool(0.1) {
        s.push_str("<meta name=\"author\" content=\"Webmaster\"><meta name=\"date\" content=\"2011-12-03\">");
    }
    s.push_str("</head>\n");

    if rng.gen_bool(0.05) {
        let cols = if rng.gen_bool(0.5) { "180,*" } else { "25%,*" };
        let _ = write!(s, "<frameset cols=\"{cols}\"><frame src=\"menu.html\"");
        if rng.gen_bool(0.5) {
            s.push_str(" title=\"menu\"");
        }
        s.push_str("><frame src=\"main.html\" title=\"main\"><noframes>");
        if rng.gen_bool(0.5) {
            s.push_str("<a href=\"main.html\">Enter</a>");
        }
        s.push_str("</noframes></frameset>");
    }

    s.push_str("<body>\n");
    if rng.gen_bool(0.1) {
        let _ = write!(s, "<marquee>{}</marquee>", words(&mut rng, 5));
    }
    let mut block = 0u32;
    while s.len() < target_bytes {
        block += 1;
        match rng.gen_range(0..6) {
            0 => {
                let w = if rng.gen_bool(0.3) {
                    " width=\"100%\" height=\"20\""
                } else {
                    " width=\"600\""
                };
                let _ = write!(s, "<table{w} border=\"0\"><tr>");
                if rng.gen_bool(0.3) {
                    let _ = write!(s, "<th>{}</th>", words(&mut rng, 2));
                }
                for _ in 0..rng.gen_range(2..6) {
                    let _ = write!(
                        s,
                        "<td><a href=\"/p{}.html\">{}</a></td>",
                        rng.gen_range(0..40),
                        words(&mut rng, 2)
                    );
                }
                s.push_str("</tr></table>\n");
            }
            1 => {
                let _ = write!(s, "<img src=\"img/{block}.gif\"");
                if rng.gen_bool(0.6) {
                    let _ = write!(s, " alt=\"{}\"", words(&mut rng, 2));
                }
                if rng.gen_bool(0.4) {
                    s.push_str(" width=\"120\" height=\"60\"");
                }
                s.push_str(">\n");
            }
            2 => {
                let face = FONTS.choose(&mut rng).expect("non-empty");
                let _ = writeln!(
                    s,
                    "<p><font face=\"{face}\">{}</font></p>",
                    words(&mut rng, 25)
                );
            }
            3 => {
                let _ = write!(s, "<ul>");
                for _ in 0..rng.gen_range(3..8) {
                    let target = if rng.gen_bool(0.1) {
                        " target=\"_blank\""
                    } else {
                        ""
                    };
                    let _ = write!(
                        s,
                        "<li><a href=\"/section/{}\"{target}>{}</a>",
                        rng.gen_range(0..30),
                        words(&mut rng, 2)
                    );
                }
                s.push_str("</ul>\n");
            }
            4 => {
                s.push_str("<form action=\"/search\"><input type=\"text\" name=\"q\">");
                if rng.gen_bool(0.8) {
                    s.push_str("<input type=\"submit\" value=\"Go\">");
                }
                if rng.gen_bool(0.2) {
                    s.push_str("<input type=\"reset\">");
                }
                s.push_str("</form>\n");
            }
            _ => {
                let _ = writeln!(
                    s,
                    "<div class=\"box\"><h3>{}</h3><p>{}<br>{}</p></div>",
                    words(&mut rng, 3),
                    words(&mut rng, 30),
                    words(&mut rng, 20)
                );
            }
        }
    }
    if rng.gen_bool(0.5) {
        s.push_str("<a href=\"/\">Home</a>");
    }
    if rng.gen_bool(0.3) {
        let label = if rng.gen_bool(0.5) {
            "info@example.com"
        } else {
            "Contact us"
        };
        let _ = write!(s, " | <a href=\"mailto:info@example.com\">{label}</a>");
    }
    s.push_str("\n</body></html>\n");
    s
}

//! Line-oriented text format.
//!
//! ```text
//! v <order> <steiner|partial>
//! # tag pg2 3          (optional, machine-readable provenance)
//! # any other comment
//! b <i> <j> <k>
//! ```
//!
//! Blocks are written in canonical order. Coordinate labels travel in a
//! separate sidecar of `l <index> <digits>` lines.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::system::{GeometryTag, Kind, Labels, Triple, TripleSystem, Variant};

pub fn serialize(ts: &TripleSystem) -> String {
    let mut out = String::with_capacity(16 + ts.triples().len() * 12);
    writeln!(out, "v {} {}", ts.order(), ts.kind()).unwrap();
    if ts.tag().variant != Variant::Plain {
        writeln!(out, "# tag {}", ts.tag().variant).unwrap();
    }
    for [a, b, c] in ts.triples() {
        writeln!(out, "b {a} {b} {c}").unwrap();
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_variant(line: usize, words: &[&str]) -> Result<Variant> {
    let arg = || -> Result<u64> {
        words
            .get(1)
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| parse_err(line, "tag needs a numeric parameter"))
    };
    Ok(match words.first().copied() {
        Some("plain") => Variant::Plain,
        Some("pg2") => Variant::Pg2(arg()? as usize),
        Some("ag3") => Variant::Ag3(arg()? as usize),
        Some("perturbed-pg") => Variant::PerturbedPg(arg()? as usize),
        Some("section4") => Variant::Section4(arg()? as usize),
        Some("random") => Variant::Random(arg()?),
        _ => return Err(parse_err(line, "unknown tag")),
    })
}

pub fn parse(text: &str) -> Result<TripleSystem> {
    let mut header: Option<(usize, Kind)> = None;
    let mut variant = Variant::Plain;
    let mut triples: Vec<Triple> = Vec::new();
    let mut block_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let words: Vec<&str> = comment.split_whitespace().collect();
            if words.first() == Some(&"tag") {
                variant = parse_variant(line_no, &words[1..])?;
            }
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "v" => {
                if header.is_some() {
                    return Err(parse_err(line_no, "duplicate header"));
                }
                if words.len() != 3 {
                    return Err(parse_err(line_no, "expected `v <order> <steiner|partial>`"));
                }
                let order = words[1]
                    .parse()
                    .map_err(|_| parse_err(line_no, "bad order"))?;
                let kind = match words[2] {
                    "steiner" => Kind::Steiner,
                    "partial" => Kind::Partial,
                    other => return Err(parse_err(line_no, format!("unknown kind `{other}`"))),
                };
                header = Some((order, kind));
            }
            "b" => {
                let Some((order, _)) = header else {
                    return Err(parse_err(line_no, "block before header"));
                };
                if words.len() != 4 {
                    return Err(parse_err(line_no, "expected `b <i> <j> <k>`"));
                }
                let mut t = [0usize; 3];
                for (slot, w) in t.iter_mut().zip(&words[1..]) {
                    *slot = w
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad index `{w}`")))?;
                    if *slot >= order {
                        return Err(parse_err(line_no, format!("index {slot} out of range")));
                    }
                }
                if t[0] == t[1] || t[0] == t[2] || t[1] == t[2] {
                    return Err(parse_err(line_no, "repeated index in block"));
                }
                triples.push(t);
                block_lines.push(line_no);
            }
            other => return Err(parse_err(line_no, format!("unknown record `{other}`"))),
        }
    }
    let (order, kind) = header.ok_or_else(|| parse_err(1, "missing header"))?;
    TripleSystem::build_tagged(order, triples, kind, GeometryTag::new(variant, None))
}

pub fn serialize_labels(labels: &Labels) -> String {
    let mut out = String::new();
    for (p, v) in labels {
        let digits: String = v.iter().map(|d| char::from(b'0' + d)).collect();
        writeln!(out, "l {p} {digits}").unwrap();
    }
    out
}

pub fn parse_labels(text: &str) -> Result<Labels> {
    let mut labels = Labels::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 3 || words[0] != "l" {
            return Err(parse_err(i + 1, "expected `l <index> <digits>`"));
        }
        let p = words[1]
            .parse()
            .map_err(|_| parse_err(i + 1, "bad index"))?;
        let digits = words[2]
            .bytes()
            .map(|b| match b {
                b'0'..=b'9' => Ok(b - b'0'),
                _ => Err(parse_err(i + 1, "bad digit")),
            })
            .collect::<Result<Vec<u8>>>()?;
        labels.insert(p, digits);
    }
    Ok(labels)
}

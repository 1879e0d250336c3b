//! Command output that renders either as aligned text or as CSV.

use std::fmt::Write as _;

use clap::ValueEnum;
use sts_core::{PointSet, TripleSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

#[derive(Debug, Clone)]
enum Entry {
    /// Free text; omitted from CSV.
    Note(String),
    Field(String, String),
    Table(Vec<String>, Vec<Vec<String>>),
    Check(String, bool, String),
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    entries: Vec<Entry>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        for line in text.into().lines() {
            self.entries.push(Entry::Note(line.to_string()));
        }
        self
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push(Entry::Field(key.into(), value.to_string()));
        self
    }

    pub fn table(&mut self, header: &[&str], rows: Vec<Vec<String>>) -> &mut Self {
        self.entries
            .push(Entry::Table(header.iter().map(|h| h.to_string()).collect(), rows));
        self
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.entries.push(Entry::Check(name.into(), passed, detail.into()));
        self
    }

    pub fn all_checks_pass(&self) -> bool {
        self.entries
            .iter()
            .all(|e| !matches!(e, Entry::Check(_, false, _)))
    }

    pub fn has_checks(&self) -> bool {
        self.entries.iter().any(|e| matches!(e, Entry::Check(..)))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            match e {
                Entry::Note(s) => writeln!(out, "{s}").unwrap(),
                Entry::Field(k, v) => writeln!(out, "{k}: {v}").unwrap(),
                Entry::Check(name, ok, detail) => {
                    let tag = if *ok { "PASS" } else { "FAIL" };
                    if detail.is_empty() {
                        writeln!(out, "{tag} {name}").unwrap();
                    } else {
                        writeln!(out, "{tag} {name}: {detail}").unwrap();
                    }
                }
                Entry::Table(header, rows) => {
                    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
                    for row in rows {
                        for (w, cell) in widths.iter_mut().zip(row) {
                            *w = (*w).max(cell.chars().count());
                        }
                    }
                    let line = |cells: &[String]| {
                        let padded: Vec<String> = cells
                            .iter()
                            .zip(&widths)
                            .map(|(c, &w)| format!("{c:<w$}"))
                            .collect();
                        padded.join("  ").trim_end().to_string()
                    };
                    writeln!(out, "{}", line(header)).unwrap();
                    for row in rows {
                        writeln!(out, "{}", line(row)).unwrap();
                    }
                }
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, cells: &[&str]| {
            let escaped: Vec<String> = cells.iter().map(|c| csv_escape(c)).collect();
            writeln!(out, "{}", escaped.join(",")).unwrap();
        };
        for e in &self.entries {
            match e {
                Entry::Note(_) => {}
                Entry::Field(k, v) => row(&mut out, &[k, v]),
                Entry::Check(name, ok, detail) => {
                    row(&mut out, &["check", name, if *ok { "PASS" } else { "FAIL" }, detail])
                }
                Entry::Table(header, rows) => {
                    let h: Vec<&str> = header.iter().map(String::as_str).collect();
                    row(&mut out, &h);
                    for r in rows {
                        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
                        row(&mut out, &cells);
                    }
                }
            }
        }
        out
    }
}

fn csv_escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// `{0,1,2}`, followed by the coordinate vectors when the system has labels.
pub fn show_set(ts: &TripleSystem, s: &PointSet) -> String {
    let idx = format!("{{{s}}}");
    match &ts.tag().labels {
        Some(labels) if s.iter().all(|p| labels.contains_key(&p)) => {
            let vecs: Vec<String> = s
                .iter()
                .map(|p| labels[&p].iter().map(|d| char::from(b'0' + d)).collect())
                .collect();
            format!("{idx} [{}]", vecs.join(" "))
        }
        _ => idx,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_csv() {
        let mut r = Report::new();
        r.note("hello")
            .field("size", 3)
            .table(&["n", "bound"], vec![vec!["2".into(), "4".into()], vec!["10".into(), "64".into()]])
            .check("ok", true, "a,b");
        assert_eq!(r.render(Format::Text), "hello\nsize: 3\nn   bound\n2   4\n10  64\nPASS ok: a,b\n");
        assert_eq!(r.render(Format::Csv), "size,3\nn,bound\n2,4\n10,64\ncheck,ok,PASS,\"a,b\"\n");
        assert!(r.all_checks_pass());
        r.check("bad", false, "");
        assert!(!r.all_checks_pass());
    }
}

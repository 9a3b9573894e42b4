//! Reports and their three renderings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "toposcalc.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
    Dot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    /// Hex sha256 over the command line and every input file.
    pub digest: String,
    pub results: Value,
    /// `false` when a checked property fails.
    pub verdict: bool,
    pub dot: Option<String>,
    pub timing_ms: Option<f64>,
}

/// Digests named inputs in order; names and contents are length-prefixed.
pub fn digest<'a>(parts: impl IntoIterator<Item = (&'a str, &'a [u8])>) -> String {
    let mut h = Sha256::new();
    for (name, bytes) in parts {
        for chunk in [name.as_bytes(), bytes] {
            h.update((chunk.len() as u64).to_le_bytes());
            h.update(chunk);
        }
    }
    hex::encode(h.finalize())
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("schema".into(), json!(SCHEMA));
        doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        doc.insert("command".into(), json!(self.command));
        doc.insert("inputs_sha256".into(), json!(self.digest));
        doc.insert("verdict".into(), json!(if self.verdict { "pass" } else { "fail" }));
        doc.insert("results".into(), self.results.clone());
        if let Some(ms) = self.timing_ms {
            doc.insert("timing_ms".into(), json!(ms));
        }
        Value::Object(doc)
    }

    /// `None` for dot output when the command draws no diagram.
    pub fn render(&self, format: Format) -> Option<String> {
        match format {
            Format::Json => Some(serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"),
            Format::Table => {
                let mut out = String::new();
                table(&mut out, "", &self.to_json());
                Some(out)
            }
            Format::Dot => self.dot.clone(),
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(a.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", "))
        }
        _ => None,
    }
}

/// Flattens a value into `path  value` lines.
fn table(out: &mut String, path: &str, v: &Value) {
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{path:<40} {s}");
        return;
    }
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| table(out, &join(k), x)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| table(out, &join(&i.to_string()), x)),
        _ => unreachable!(),
    }
}

/// Minimal DOT writer.
#[derive(Default)]
pub struct Dot {
    body: String,
}

impl Dot {
    pub fn new() -> Dot {
        Dot::default()
    }

    pub fn node(&mut self, id: &str, label: &str) {
        let _ = writeln!(self.body, "  {} [label={}];", quote(id), quote(label));
    }

    pub fn edge(&mut self, from: &str, to: &str, label: Option<&str>) {
        match label {
            Some(l) => {
                let _ = writeln!(self.body, "  {} -> {} [label={}];", quote(from), quote(to), quote(l));
            }
            None => {
                let _ = writeln!(self.body, "  {} -> {};", quote(from), quote(to));
            }
        }
    }

    pub fn finish(self, name: &str, rankdir: &str) -> String {
        format!("digraph {} {{\n  rankdir={rankdir};\n{}}}\n", quote(name), self.body)
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_boundaries() {
        assert_ne!(digest([("ab", b"c".as_slice())]), digest([("a", b"bc".as_slice())]));
        assert_eq!(digest([("x", b"1".as_slice())]).len(), 64);
    }

    #[test]
    fn table_flattens() {
        let r = Report {
            command: "omega".into(),
            digest: "0".into(),
            results: json!({"sizes": {"a": 2}, "names": ["x", "y"]}),
            verdict: true,
            dot: None,
            timing_ms: None,
        };
        let t = r.render(Format::Table).unwrap();
        assert!(t.contains("results.sizes.a"));
        assert!(t.contains("x, y"));
        assert!(r.render(Format::Dot).is_none());
    }
}

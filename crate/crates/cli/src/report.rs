//! Reports as JSON documents, with a plain-text rendering of the same data.

use oqec::{ComplexMatrix, C64};
use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// An ordered report under construction.
#[derive(Clone, Debug, Default)]
pub struct Report(Map<String, Value>);

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.set("schema", SCHEMA);
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix(x: &ComplexMatrix) -> Value {
    Value::Array(
        (0..x.rows())
            .map(|i| Value::Array((0..x.cols()).map(|j| complex(x[(i, j)])).collect()))
            .collect(),
    )
}

pub fn blocks(dims: &[(usize, usize)]) -> Value {
    Value::Array(dims.iter().map(|&(m, n)| json!({"m": m, "n": n})).collect())
}

pub fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            text(value, 0, &mut out);
            out
        }
    }
}

fn is_leaf(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|x| !x.is_object()),
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(x) => match x.as_f64() {
            Some(f) if x.is_f64() => format_float(f),
            _ => x.to_string(),
        },
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn format_float(f: f64) -> String {
    if f == 0.0 || (1e-3..1e4).contains(&f.abs()) {
        let s = format!("{f:.6}");
        let s = s.trim_end_matches('0');
        s.strip_suffix('.').unwrap_or(s).to_string()
    } else {
        format!("{f:.3e}")
    }
}

fn text(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_leaf(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    text(x, depth + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                text(x, depth + 1, out);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_layout() {
        let mut r = Report::new("demo");
        r.set("residual", 1.5e-12).set("blocks", blocks(&[(2, 1), (1, 1)]));
        let s = render(&r.into_value(), Format::Text);
        assert_eq!(
            s,
            "schema: 1\ncommand: demo\nresidual: 1.500e-12\nblocks:\n  [0]\n    m: 2\n    n: 1\n  [1]\n    m: 1\n    n: 1\n"
        );
    }

    #[test]
    fn floats() {
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-3e-11), "-3.000e-11");
    }
}

//! Rendering of command results as JSON, aligned tables, or CSV.
//!
//! Tables and CSV are projections of the JSON value: objects flatten to
//! dotted paths, arrays of objects to indexed paths, and arrays of plain
//! values print as compact JSON.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// A single record or a list of homogeneous records.
pub enum Output {
    Record(Value),
    Records(Vec<Value>),
}

fn is_plain_array(items: &[Value]) -> bool {
    items.iter().all(|v| !v.is_object())
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `(path, value)` leaves of `v` in document order.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    go(&path, child, out);
                }
            }
            Value::Array(items) if !is_plain_array(items) => {
                for (i, child) in items.iter().enumerate() {
                    go(&format!("{prefix}[{i}]"), child, out);
                }
            }
            other => out.push((prefix.to_string(), scalar(other))),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out
}

fn columns(rows: &[Vec<(String, String)>]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for row in rows {
        for (k, _) in row {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

fn cell<'a>(row: &'a [(String, String)], col: &str) -> &'a str {
    row.iter().find(|(k, _)| k == col).map_or("", |(_, v)| v.as_str())
}

pub fn render(out: &Output, format: Format) -> io::Result<String> {
    Ok(match (out, format) {
        (Output::Record(v), Format::Json) => serde_json::to_string_pretty(v)? + "\n",
        (Output::Records(vs), Format::Json) => serde_json::to_string_pretty(vs)? + "\n",
        (Output::Record(v), Format::Table) => {
            let rows = flatten(v);
            let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            rows.iter().map(|(k, val)| format!("{k:<width$}  {val}\n")).collect()
        }
        (Output::Records(vs), Format::Table) => {
            let rows: Vec<_> = vs.iter().map(flatten).collect();
            let cols = columns(&rows);
            let widths: Vec<usize> = cols
                .iter()
                .map(|c| rows.iter().map(|r| cell(r, c).chars().count()).max().unwrap_or(0).max(c.chars().count()))
                .collect();
            let line = |cells: Vec<&str>| {
                let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                parts.join("  ").trim_end().to_string() + "\n"
            };
            let mut s = line(cols.iter().map(String::as_str).collect());
            for r in &rows {
                s += &line(cols.iter().map(|c| cell(r, c)).collect());
            }
            s
        }
        (out, Format::Csv) => {
            let rows: Vec<_> = match out {
                Output::Record(v) => vec![flatten(v)],
                Output::Records(vs) => vs.iter().map(flatten).collect(),
            };
            let cols = columns(&rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&cols)?;
            for r in &rows {
                w.write_record(cols.iter().map(|c| cell(r, c)))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8 input")
        }
    })
}

pub fn emit(out: &Output, format: Format) -> io::Result<()> {
    let text = render(out, format)?;
    let mut stdout = io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening() {
        let v = json!({"a": 1, "g": [3, 3], "s": [{"t": "x", "n": 2}], "o": {"k": null}});
        assert_eq!(
            flatten(&v),
            vec![
                ("a".into(), "1".into()),
                ("g".into(), "[3,3]".into()),
                ("s[0].t".into(), "x".into()),
                ("s[0].n".into(), "2".into()),
                ("o.k".into(), "".into()),
            ]
        );
    }

    #[test]
    fn csv_and_table_share_cells() {
        let out = Output::Records(vec![json!({"r": 1, "v": "a,b"}), json!({"r": 2, "w": 5})]);
        let csv = render(&out, Format::Csv).unwrap();
        assert_eq!(csv, "r,v,w\n1,\"a,b\",\n2,,5\n");
        let table = render(&out, Format::Table).unwrap();
        assert_eq!(table, "r  v    w\n1  a,b\n2       5\n");
    }
}

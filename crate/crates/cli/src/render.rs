use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// A finished command result.
///
/// `doc` is the JSON document; the CSV and table views are the array under
/// `rows_key`, or `doc` itself as a single row when there is none.
#[derive(Debug)]
pub struct Report {
    pub doc: Value,
    pub rows_key: Option<&'static str>,
    /// Emit `rows_key` as JSON lines instead of one document.
    pub json_lines: bool,
    /// A built-in check failed; the report is still printed.
    pub failed: bool,
    /// Printed above the table view.
    pub header: Option<String>,
}

impl Report {
    pub fn new(doc: Value, rows_key: Option<&'static str>) -> Self {
        Report { doc, rows_key, json_lines: false, failed: false, header: None }
    }

    pub fn rows(&self) -> Vec<Map<String, Value>> {
        let single = |v: &Value| match v {
            Value::Object(m) => m.clone(),
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other.clone());
                m
            }
        };
        match self.rows_key.and_then(|k| self.doc.get(k)) {
            Some(Value::Array(a)) => a.iter().map(single).collect(),
            _ => vec![single(&self.doc)],
        }
    }
}

/// Scalars print as themselves, nested values as compact JSON.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

fn columns(rows: &[Map<String, Value>]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

fn grid(rows: &[Map<String, Value>]) -> (Vec<String>, Vec<Vec<String>>) {
    let cols = columns(rows);
    let body = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect())
        .collect();
    (cols, body)
}

pub fn render(rep: &Report, format: Format) -> Result<String, String> {
    match format {
        Format::Json if rep.json_lines => {
            let mut s = String::new();
            for r in rep.rows() {
                s.push_str(&Value::Object(r).to_string());
                s.push('\n');
            }
            Ok(s)
        }
        Format::Json => serde_json::to_string_pretty(&rep.doc)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string()),
        Format::Csv => {
            let (cols, body) = grid(&rep.rows());
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&cols).map_err(|e| e.to_string())?;
            for r in body {
                w.write_record(&r).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
        Format::Table => {
            let (cols, body) = grid(&rep.rows());
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    body.iter()
                        .map(|r| r[i].chars().count())
                        .chain([c.chars().count()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            let mut s = String::new();
            if let Some(header) = &rep.header {
                s.push_str(header);
                s.push_str("\n\n");
            }
            s.push_str(&line(&cols));
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            s.push_str(&line(&rule));
            for r in &body {
                s.push_str(&line(r));
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn cells() {
        assert_eq!(cell(&json!(null)), "");
        assert_eq!(cell(&json!("4/5")), "4/5");
        assert_eq!(cell(&json!(-3)), "-3");
        assert_eq!(cell(&json!({"a": "1"})), r#"{"a":"1"}"#);
    }

    #[test]
    fn csv_uses_union_of_keys() {
        let rep = Report::new(json!({"rows": [{"a": 1}, {"a": 2, "b": [1, 2]}]}), Some("rows"));
        let s = render(&rep, Format::Csv).unwrap();
        assert_eq!(s, "a,b\n1,\n2,\"[1,2]\"\n");
    }

    #[test]
    fn single_row_without_key() {
        let rep = Report::new(json!({"x": 1}), None);
        assert_eq!(render(&rep, Format::Table).unwrap(), "x\n-\n1\n");
    }
}

//! Tables with a `#` header block, written as CSV or as a JSON mirror.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::OutputFormat;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(s: &str) -> Cell {
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(v) = s.parse() {
                return Cell::Int(v);
            }
        }
        match s.parse::<f64>() {
            Ok(v) => Cell::Num(v),
            Err(_) => Cell::Text(s.to_string()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// `(key, value)` pairs of the header block.
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            header: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.header.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut out = String::new();
        for (k, v) in &self.header {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Input(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut header = Map::new();
        for (k, v) in &self.header {
            let parsed = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.clone()));
            header.insert(k.clone(), parsed);
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({ "header": header, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
        s.push('\n');
        s
    }

    /// Reads a CSV with an optional `#` header block. Errors name the offending line.
    pub fn from_csv(text: &str) -> CliResult<Table> {
        let mut table = Table::default();
        let mut body_start = 0;
        let mut header_lines = 0;
        for line in text.lines() {
            let Some(rest) = line.strip_prefix('#') else { break };
            let rest = rest.strip_prefix(' ').unwrap_or(rest);
            let (k, v) = rest.split_once(": ").unwrap_or((rest, ""));
            table.header.push((k.to_string(), v.to_string()));
            body_start += line.len() + 1;
            header_lines += 1;
        }
        let body = text.get(body_start..).unwrap_or("");
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let cols = reader
            .headers()
            .map_err(|e| CliError::Input(format!("line {}: {e}", header_lines + 1)))?;
        table.columns = cols.iter().map(|c| c.trim().to_string()).collect();
        for (i, rec) in reader.records().enumerate() {
            let line = header_lines + 2 + i;
            let rec = rec.map_err(|e| CliError::Input(format!("line {line}: {e}")))?;
            table.rows.push(rec.iter().map(|c| Cell::parse(c.trim())).collect());
        }
        Ok(table)
    }

    pub fn emit(&self, format: OutputFormat, out: Option<&Path>) -> CliResult<()> {
        let text = match format {
            OutputFormat::Csv => self.to_csv()?,
            OutputFormat::Json => self.to_json(),
        };
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::io("<stdout>", e))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["T_mK", "n", "status"]);
        t.meta("command", "rates");
        t.meta("config", r#"{"seed":1}"#);
        t.push(vec![Cell::Num(20.0), Cell::Num(1.0 / 3.0), "ok".into()]);
        t.push(vec![Cell::Num(f64::NAN), Cell::Num(f64::INFINITY), "out_of_range".into()]);
        t.push(vec![Cell::Num(-1.5e-300), Cell::Int(7), "ok".into()]);
        t
    }

    #[test]
    fn csv_round_trip_is_idempotent() {
        let text = sample().to_csv().unwrap();
        let back = Table::from_csv(&text).unwrap();
        assert_eq!(back.to_csv().unwrap(), text);
        assert_eq!(back.header, sample().header);
    }

    #[test]
    fn floats_keep_full_precision() {
        let text = sample().to_csv().unwrap();
        let back = Table::from_csv(&text).unwrap();
        assert_eq!(back.rows[0][1], Cell::Num(1.0 / 3.0));
    }

    #[test]
    fn ragged_row_names_line() {
        let err = Table::from_csv("# a: b\nx,y\n1,2\n3\n").unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn json_mirror_has_config_object_and_nulls() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["header"]["config"]["seed"], 1);
        assert!(v["rows"][1]["T_mK"].is_null());
        assert_eq!(v["rows"][0]["status"], "ok");
    }
}

//! Result files.
//!
//! CSV: `#`-prefixed metadata lines (tool and version, resolved config,
//! summary, notes), then a header row and data rows.
//! JSON: `{"metadata": {...}, "summary": {...}, "columns": [...], "rows": [...]}`
//! with the same cells. Map keys are sorted and floats use the shortest
//! round-trip representation, so equal runs give byte-equal files.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, config: &RunConfig, columns: &[&'static str]) -> Self {
        Self {
            command,
            config: config.clone(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Map::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        self.summary.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    fn metadata(&self) -> Value {
        json!({
            "tool": "npspec",
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "notes": self.notes,
        })
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "metadata": self.metadata(),
            "summary": self.summary,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut out = String::new();
        out.push_str(&format!("# npspec {VERSION} {}\n", self.command));
        out.push_str(&format!("# config {}\n", json!(self.config)));
        out.push_str(&format!("# summary {}\n", Value::Object(self.summary.clone())));
        for n in &self.notes {
            out.push_str(&format!("# note {n}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(cell)).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))?);
        Ok(out)
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    /// Writes to `config.out`, or stdout when unset.
    pub fn emit(&self) -> CliResult<()> {
        let text = self.render(self.config.format)?;
        match &self.config.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Output(e.to_string())),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

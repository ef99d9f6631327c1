//! Result serialization: CSV and JSON with an embedded metadata block.
//!
//! Every output starts from the fully resolved configuration plus the
//! artifact version, so a file is reproducible from its own contents. CSV
//! carries metadata as leading `# key=value` comment lines and floats at 12
//! significant digits; JSON keeps floats as shortest round-trip decimal
//! strings so LLR values survive exactly.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::OutFormat;

/// Schema version stamped into every output (documented in docs/schemas.md).
pub const SCHEMA_VERSION: &str = "1";

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    /// Float rendered at 12 significant digits in CSV, exact string in JSON.
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn from_bool(b: bool) -> Self {
        Cell::Int(b as i64)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_sig12(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Value::String(format!("{v}")),
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.11e}")
}

/// A result table with metadata.
#[derive(Debug, Clone)]
pub struct Table {
    pub metadata: BTreeMap<String, String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(metadata: BTreeMap<String, String>, header: Vec<&'static str>) -> Self {
        Self {
            metadata,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutFormat) -> String {
        match format {
            OutFormat::Csv => self.render_csv(),
            OutFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            out.push_str(&format!("# {key}={value}\n"));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, cell)| (k.to_string(), cell.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "metadata": meta, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
        text.push('\n');
        text
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn write(&self, path: Option<&Path>, format: OutFormat) -> Result<()> {
        let text = self.render(format);
        match path {
            Some(path) => fs::write(path, text)
                .with_context(|| format!("cannot write output file {}", path.display()))?,
            None => {
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .context("cannot write to stdout")?;
            }
        }
        Ok(())
    }
}

/// Reads back a CSV table written by [`Table::write`]: metadata, header,
/// and raw string cells.
pub fn read_csv(text: &str) -> (BTreeMap<String, String>, Vec<String>, Vec<Vec<String>>) {
    let mut metadata = BTreeMap::new();
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once('=') {
                metadata.insert(k.to_string(), v.to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        if header.is_empty() {
            header = cells;
        } else {
            rows.push(cells);
        }
    }
    (metadata, header, rows)
}

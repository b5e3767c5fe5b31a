//! Tables with reproducibility metadata, rendered as CSV or JSON.

use std::io::Write;

use serde_json::{json, Map, Value};

pub const TOOL: &str = "edm-pareto";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Float(f64),
    Int(u64),
    Bool(bool),
    Floats(Vec<f64>),
    Missing,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

/// 17 significant digits, `.` separator, `NaN`/`inf`/`-inf` for non-finite values.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Floats(vs) => vs.iter().map(|&v| format_float(v)).collect::<Vec<_>>().join(","),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        let float = |v: f64| {
            if v.is_finite() {
                json!(v)
            } else {
                json!(format_float(v))
            }
        };
        match self {
            Cell::Str(s) => json!(s),
            Cell::Float(v) => float(*v),
            Cell::Int(v) => json!(v),
            Cell::Bool(b) => json!(b),
            Cell::Floats(vs) => Value::Array(vs.iter().map(|&v| float(v)).collect()),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub command: String,
    pub seed: u64,
    /// resolved configuration, in display order
    pub config: Vec<(String, Cell)>,
    pub notes: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(command: &str, seed: u64, config: Vec<(String, Cell)>, columns: &[&str]) -> Self {
        Document {
            command: command.to_string(),
            seed,
            config,
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.notes.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = out;
        writeln!(out, "# tool: {TOOL} {VERSION}")?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# seed: {}", self.seed)?;
        for (k, v) in &self.config {
            writeln!(out, "# config.{k}: {}", one_line(&v.text()))?;
        }
        for (k, v) in &self.notes {
            writeln!(out, "# note.{k}: {}", one_line(&v.text()))?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> Value {
        let pairs = |items: &[(String, Cell)]| -> Value {
            Value::Object(items.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
        };
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "config": pairs(&self.config),
            "notes": pairs(&self.notes),
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        writeln!(out)
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

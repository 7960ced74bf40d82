use std::io::Write;

use fhlab::precision::format_sci;
use fhlab::Float;
use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::CliError;

/// Significant digits of every emitted extended-precision number.
pub const SIG_DIGITS: usize = 30;
/// Enough to round-trip a double.
pub const F64_DIGITS: usize = 17;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(String),
    Null,
}

impl Cell {
    pub fn float(x: &Float) -> Cell {
        Cell::Num(format_sci(x, SIG_DIGITS))
    }

    pub fn f64(x: f64) -> Cell {
        if !x.is_finite() {
            return Cell::Null;
        }
        Cell::Num(format_sci(&Float::with_val(53, x), F64_DIGITS))
    }

    /// Fixed three decimals, for timings.
    pub fn seconds(x: f64) -> Cell {
        Cell::Num(format!("{x:.3}"))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(s) => s.parse::<Number>().map(Value::Number).unwrap_or(Value::Null),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    s.push_str(&line.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        for (k, c) in self.columns.iter().zip(row) {
                            m.insert((*k).to_string(), c.json());
                        }
                        Value::Object(m)
                    })
                    .collect();
                let mut top = Map::new();
                top.insert("command".into(), Value::from(self.command));
                top.insert("rows".into(), Value::Array(rows));
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }
}

pub fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io("stdout".into(), e))
        }
    }
}

//! Tabular output: CSV with a mandatory header, or JSON lines.
//!
//! CSV floats carry 17 significant digits (`{:.16e}`), enough to parse back
//! to the identical `f64`. Non-finite values are written as `inf`, `-inf`
//! and `NaN` in both formats.

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    #[value(name = "json-lines")]
    JsonLines,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

/// A row type with a fixed set of columns.
pub trait Record {
    fn columns() -> Vec<String>;
    fn cells(&self) -> Vec<Cell>;
}

/// Homogeneous rows under one header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn from_records<R: Record>(records: &[R]) -> Self {
        Table {
            columns: R::columns(),
            rows: records.iter().map(Record::cells).collect(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Float(x) => format_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Float(x) => Number::from_f64(*x)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(format_float(*x))),
        Cell::Int(i) => Value::from(*i),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

pub fn emit_table(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            // writing into a Vec cannot fail
            w.write_record(&table.columns).expect("in-memory csv");
            for row in &table.rows {
                w.write_record(row.iter().map(csv_field)).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
        }
        Format::JsonLines => {
            let mut out = String::new();
            for row in &table.rows {
                let obj: Map<String, Value> = table
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(json_value))
                    .collect();
                out.push_str(&Value::Object(obj).to_string());
                out.push('\n');
            }
            out
        }
    }
}

pub fn emit<R: Record>(records: &[R], format: Format) -> String {
    emit_table(&Table::from_records(records), format)
}

//! Result tables and their CSV / JSON encodings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// Significant digits written for floating-point cells.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric view of a column; non-numeric cells become NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(v) => *v,
                    Cell::Int(v) => *v as f64,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(|c| match c {
                    Cell::Num(v) => format_number(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => s.clone(),
                }))?;
            }
            w.flush()?;
            Ok(())
        };
        write(&mut w).expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flushed")).expect("UTF-8 input")
    }

    /// Array of row objects keyed by column name. Non-finite numbers become null.
    pub fn to_json_value(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Num(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
                        Cell::Int(x) => Value::from(*x),
                        Cell::Text(s) => Value::String(s.clone()),
                    };
                    obj.insert(name.clone(), v);
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_json_value())?;
        s.push('\n');
        Ok(s)
    }

    /// Inverse of [`Table::to_json`]; columns follow the first object's key order.
    pub fn from_json(text: &str) -> Result<Table> {
        let value: Value = serde_json::from_str(text)?;
        let rows = value.as_array().ok_or_else(|| Error::InvalidInput("expected a JSON array".into()))?;
        let Some(first) = rows.first() else {
            return Ok(Table::default());
        };
        let first = first.as_object().ok_or_else(|| Error::InvalidInput("expected JSON objects".into()))?;
        let mut table = Table::new(&first.keys().collect::<Vec<_>>());
        for row in rows {
            let obj = row.as_object().ok_or_else(|| Error::InvalidInput("expected JSON objects".into()))?;
            let mut cells = Vec::with_capacity(table.columns.len());
            for name in &table.columns {
                let cell = match obj.get(name) {
                    Some(Value::Number(n)) if n.is_i64() => Cell::Int(n.as_i64().expect("checked")),
                    Some(Value::Number(n)) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                    Some(Value::String(s)) => Cell::Text(s.clone()),
                    Some(Value::Null) => Cell::Num(f64::NAN),
                    _ => return Err(Error::InvalidInput(format!("missing or invalid field '{name}'"))),
                };
                cells.push(cell);
            }
            table.rows.push(cells);
        }
        Ok(table)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        let text = self.render(format)?;
        let mut f = std::fs::File::create(path)?;
        f.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// `%.12g`-style formatting: shortest of fixed and exponent notation,
/// trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mut out = String::new();
        let _ = write!(out, "{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs());
        out
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(-2.25), "-2.25");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(1.0 / 58.0), "0.0172413793103");
        assert_eq!(format_number(1.5e-7), "1.5e-07");
        assert_eq!(format_number(2870.0), "2870");
        assert_eq!(format_number(1e15), "1e+15");
        assert_eq!(format_number(123456789012.0), "123456789012");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn twelve_digits_round_trip_closely() {
        for x in [0.170903344, 0.999999999999, 1.2345678901234e-5, -7.5] {
            let y: f64 = format_number(x).parse().unwrap();
            assert!((x - y).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn csv_quoting() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Num(1.0), Cell::Text("x,\"y\"".into())]);
        t.push(vec![Cell::Int(3), Cell::Text(String::new())]);
        assert_eq!(t.to_csv(), "a,b\r\n1,\"x,\"\"y\"\"\"\r\n3,\r\n");
    }

    #[test]
    fn json_round_trip() {
        let mut t = Table::new(&["cycle", "p_down", "flags"]);
        t.push(vec![Cell::Int(1), Cell::Num(0.1 + 0.2), Cell::Text("mw_selective".into())]);
        t.push(vec![Cell::Int(2), Cell::Num(1.0 / 3.0), Cell::Text(String::new())]);
        let back = Table::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    #[should_panic]
    fn row_width_checked() {
        let mut t = Table::new(&["a"]);
        t.push(vec![]);
    }
}

//! Table rendering. CSV numbers use a fixed nine-significant-digit decimal
//! form so output is byte-stable across platforms and locales.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    /// A bracket `[lo, hi]`, rendered `lo:hi`.
    Range(f64, f64),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => escape(s),
            Cell::Range(lo, hi) => format!("{}:{}", format_number(*lo), format_number(*hi)),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Range(lo, hi) => json!([lo, hi]),
            Cell::Empty => Value::Null,
        }
    }
}

/// Nine significant digits in plain decimal notation.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // The exponent after rounding to nine significant digits.
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Printed as a leading `#` line in CSV and a `note` field in JSON.
    pub note: Option<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), note: None }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Cell in the first row under `column`.
    pub fn first(&self, column: &str) -> Option<&Cell> {
        let idx = self.columns.iter().position(|c| *c == column)?;
        self.rows.first().map(|r| &r[idx])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(note) = &self.note {
            out.push_str("# ");
            out.push_str(note);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, cell)| (c.to_string(), cell.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = json!({ "columns": self.columns, "rows": rows });
        if let Some(note) = &self.note {
            doc["note"] = json!(note);
        }
        let mut s = serde_json::to_string_pretty(&doc).expect("json serialisation");
        s.push('\n');
        s
    }
}

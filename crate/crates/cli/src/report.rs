//! Report envelope, unit-tagged values and plot-ready tables.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::Command;
use crate::inputs::InputEcho;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// `{"value": v, "unit": u}`.
pub fn q(value: f64, unit: &str) -> Value {
    json!({ "value": value, "unit": unit })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "fecarbon".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: Command,
    pub seed: Option<u64>,
    pub inputs: InputEcho,
    /// Nested breakdowns; every number is a `{value, unit}` pair.
    pub results: Value,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Columns carry units; text columns use `-`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Table {
            columns: columns
                .iter()
                .map(|(n, u)| (n.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
        }
    }

    /// Long format: one row per quantity.
    pub fn quantities() -> Self {
        Table::new(&[("quantity", "-"), ("value", "-"), ("unit", "-")])
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_quantity(&mut self, name: &str, value: f64, unit: &str) {
        self.push(vec![name.into(), value.into(), unit.into()]);
    }

    fn header(&self) -> Vec<String> {
        self.columns
            .iter()
            .map(|(n, u)| if u == "-" { n.clone() } else { format!("{n} ({u})") })
            .collect()
    }

    /// Numbers in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => v.to_string(),
                Cell::Text(t) => t.clone(),
                Cell::Empty => String::new(),
            }))
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = std::iter::once(self.header())
            .chain(self.rows.iter().map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Num(v) => human(*v),
                        Cell::Text(t) => t.clone(),
                        Cell::Empty => "-".into(),
                    })
                    .collect()
            }))
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| cells.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (n, row) in cells.iter().enumerate() {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if n == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        out
    }
}

/// Six significant digits, scientific outside [1e-3, 1e6).
fn human(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e6).contains(&a) {
        let decimals = (5 - a.log10().floor() as i32).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.5e}")
    }
}

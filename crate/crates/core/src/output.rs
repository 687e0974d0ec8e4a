//! CSV and JSON artifacts.
//!
//! Every number goes through [`fmt_num`] so CSV and JSON carry the same
//! 12-significant-digit values and reruns produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::basis::label;
use crate::dynamics::Trajectory;
use crate::entanglement::EntanglementReport;
use crate::error::{Error, Result};
use crate::experiments::{PointStatus, Scenario, SweepResult};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` with 12 significant digits, fixed or scientific like C's `%.12g`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// `x` rounded to the value printed by [`fmt_num`].
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_num(x).parse().expect("fmt_num output parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::from(round_sig(*x)),
            Cell::Num(x) => Value::from(fmt_num(*x)),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Named columns and rows of cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Array of objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(r.iter().map(Cell::json))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(pretty(&self.to_json())? + "\n"),
        }
    }

    /// Writes `<dir>/<stem>.<ext>` and returns its path.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{stem}.{}", format.extension()));
        fs::write(&path, self.render(format)?)?;
        Ok(path)
    }
}

fn pretty(v: &Value) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))
}

/// `t_us`, real and imaginary parts per basis state, `raw_norm`.
pub fn trajectory_table(tr: &Trajectory) -> Table {
    let n = tr.samples.first().map_or(0, |s| s.state.n());
    let mut cols = vec!["t_us".to_string()];
    for part in ["re", "im"] {
        cols.extend((0..1usize << n).map(|i| format!("{part}_{}", label(i, n))));
    }
    cols.push("raw_norm".into());
    let mut t = Table::new(cols);
    for s in &tr.samples {
        let a = s.state.amplitudes();
        let mut row = vec![Cell::Num(s.t)];
        row.extend(a.iter().map(|z| Cell::Num(z.re)));
        row.extend(a.iter().map(|z| Cell::Num(z.im)));
        row.push(Cell::Num(s.raw_norm));
        t.push(row);
    }
    t
}

/// Column names of a report of an `n`-qubit state.
pub fn report_columns(n: usize) -> Vec<String> {
    let mut cols = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            cols.push(format!("C{}{}", j + 1, k + 1));
        }
    }
    if n == 3 {
        cols.push("tau".into());
    }
    cols.extend((1..=n).map(|j| format!("S{j}")));
    if n == 3 {
        cols.push("class".into());
    }
    cols
}

fn report_cells(r: Option<&EntanglementReport>, n: usize) -> Vec<Cell> {
    let Some(r) = r else {
        return vec![Cell::Empty; report_columns(n).len()];
    };
    let mut cells: Vec<Cell> = r.concurrences.iter().map(|p| Cell::Num(p.value)).collect();
    if let Some(tau) = r.tangle {
        cells.push(Cell::Num(tau));
    }
    cells.extend(r.entropies.iter().map(|&s| Cell::Num(s)));
    if let Some(c) = r.class {
        cells.push(Cell::Text(c.as_str().into()));
    }
    cells
}

/// `t_us` followed by the report columns.
pub fn report_table(reports: &[EntanglementReport], n: usize) -> Table {
    let mut cols = vec!["t_us".to_string()];
    cols.extend(report_columns(n));
    let mut t = Table::new(cols);
    for r in reports {
        let mut row = vec![Cell::Num(r.t)];
        row.extend(report_cells(Some(r), n));
        t.push(row);
    }
    t
}

/// Axis columns, report columns, `raw_norm`, optional `phase`, `status`.
pub fn sweep_table(res: &SweepResult, n: usize) -> Table {
    let with_phase = res.points.iter().any(|p| p.phase.is_some());
    let mut cols = res.axis_names.clone();
    cols.extend(report_columns(n));
    cols.push("raw_norm".into());
    if with_phase {
        cols.push("phase".into());
    }
    cols.push("status".into());
    let mut t = Table::new(cols);
    for p in &res.points {
        let mut row: Vec<Cell> = p.coords.iter().map(|&x| Cell::Num(x)).collect();
        row.extend(report_cells(p.report.as_ref(), n));
        row.push(p.raw_norm.map_or(Cell::Empty, Cell::Num));
        if with_phase {
            row.push(p.phase.map_or(Cell::Empty, |ph| Cell::Text(ph.to_string())));
        }
        row.push(Cell::Text(
            match p.status {
                PointStatus::Ok => "ok",
                PointStatus::Vanished => "vanished",
            }
            .into(),
        ));
        t.push(row);
    }
    t
}

/// Contents of `meta.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scenario: Scenario,
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminated_at: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_boundary: Option<f64>,
}

impl Meta {
    pub fn new(command: &str, scenario: &Scenario) -> Self {
        Self {
            tool: "nhe".into(),
            version: crate::VERSION.into(),
            command: command.into(),
            scenario: scenario.clone(),
            files: Vec::new(),
            terminated_at: None,
            failed_points: None,
            phase_boundary: None,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join("meta.json");
        let v = serde_json::to_value(self).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(&path, pretty(&v)? + "\n")?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

//! CSV ingestion and report emission.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use lfsm_core::TimeSeries;
use serde_json::{Map, Number, Value};

use crate::error::{CliError, CliResult};

/// Relative tolerance on the spacing of timestamps.
pub const SPACING_TOL: f64 = 1e-6;

/// Reads a two-column `(timestamp, value)` file with a header, or a single
/// value column when `dt` is given. A header row is detected by a
/// non-numeric first field.
pub fn ingest_csv(path: &Path, dt: Option<f64>) -> CliResult<TimeSeries> {
    let file = File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut width = None;
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            let row = e.position().map_or(k as u64 + 1, |p| p.line());
            CliError::at_row(row, format!("unreadable record: {e}"))
        })?;
        let row = rec.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && rec.iter().any(|f| f.parse::<f64>().is_err()) {
            width = Some(rec.len());
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(CliError::at_row(row, format!("expected {w} fields, found {}", rec.len())));
        }
        let field = |i: usize, name: &str| -> CliResult<f64> {
            let raw = rec.get(i).unwrap_or("");
            if raw.is_empty() {
                return Err(CliError::at_row(row, format!("missing {name}")));
            }
            let v: f64 = raw
                .parse()
                .map_err(|_| CliError::at_row(row, format!("cannot parse {name} `{raw}`")))?;
            if !v.is_finite() {
                return Err(CliError::at_row(row, format!("{name} `{raw}` is not finite")));
            }
            Ok(v)
        };
        match w {
            1 => values.push(field(0, "value")?),
            2 => {
                times.push((row, field(0, "timestamp")?));
                values.push(field(1, "value")?);
            }
            _ => {
                return Err(CliError::at_row(
                    row,
                    format!("expected one or two columns, found {w}"),
                ))
            }
        }
    }
    if values.len() < 2 {
        return Err(CliError::input(format!(
            "{} holds {} observations, at least 2 are needed",
            path.display(),
            values.len()
        )));
    }

    let (step, t0) = if times.is_empty() {
        let dt = dt.ok_or_else(|| CliError::input("a single-column input needs --dt"))?;
        (dt, 0.0)
    } else {
        let step = times[1].1 - times[0].1;
        if !(step > 0.0) {
            return Err(CliError::at_row(times[1].0, "timestamps must be strictly increasing"));
        }
        for w in times.windows(2) {
            let gap = w[1].1 - w[0].1;
            if !(gap > 0.0) {
                return Err(CliError::at_row(w[1].0, "timestamps must be strictly increasing"));
            }
            if (gap - step).abs() > SPACING_TOL * step {
                return Err(CliError::at_row(
                    w[1].0,
                    format!("non-uniform spacing: step {gap} where {step} was expected"),
                ));
            }
        }
        if let Some(dt) = dt {
            if (dt - step).abs() > SPACING_TOL * step {
                return Err(CliError::input(format!(
                    "--dt {dt} disagrees with the timestamp spacing {step}"
                )));
            }
        }
        (step, times[0].1)
    };
    Ok(TimeSeries::new(values, step, t0)?)
}

/// `x` with 12 significant digits, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => fmt_num(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// A single record, emitted as a JSON object rather than an array.
    pub record: bool,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            record: false,
        }
    }

    pub fn record(fields: Vec<(&str, Cell)>) -> Self {
        let (columns, row): (Vec<String>, Vec<Cell>) =
            fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Self { columns, rows: vec![row], record: true }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> Value {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(map)
            })
            .collect();
        if self.record && objects.len() == 1 {
            objects.into_iter().next().unwrap_or(Value::Null)
        } else {
            Value::Array(objects)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Output of one command: a main table plus optional named side tables.
#[derive(Debug, Clone)]
pub struct Report {
    pub name: &'static str,
    pub main: Table,
    pub sections: Vec<(&'static str, Table)>,
}

impl Report {
    pub fn single(name: &'static str, main: Table) -> Self {
        Self { name, main, sections: Vec::new() }
    }

    pub fn to_json(&self) -> Value {
        if self.sections.is_empty() {
            return self.main.to_json();
        }
        let mut map = Map::new();
        map.insert(self.name.to_string(), self.main.to_json());
        for (name, t) in &self.sections {
            map.insert(name.to_string(), t.to_json());
        }
        Value::Object(map)
    }
}

/// Writes `report` to `out`, or to standard output. In CSV, side tables go
/// next to the output file as `<stem>.<section>.csv`; on standard output
/// only the main table is written.
pub fn emit_report(report: &Report, format: Format, out: Option<&Path>) -> CliResult<()> {
    let unwritable = |p: &Path, e: io::Error| CliError::input(format!("cannot write {}: {e}", p.display()));
    match (format, out) {
        (Format::Json, None) => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{}", pretty(&report.to_json()))?;
        }
        (Format::Json, Some(p)) => {
            std::fs::write(p, pretty(&report.to_json()) + "\n").map_err(|e| unwritable(p, e))?;
        }
        (Format::Csv, None) => report.main.write_csv(io::stdout().lock())?,
        (Format::Csv, Some(p)) => {
            let f = File::create(p).map_err(|e| unwritable(p, e))?;
            report.main.write_csv(f).map_err(|e| unwritable(p, e))?;
            for (name, t) in &report.sections {
                let side = sibling(p, name);
                let f = File::create(&side).map_err(|e| unwritable(&side, e))?;
                t.write_csv(f).map_err(|e| unwritable(&side, e))?;
            }
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub fn sibling(path: &Path, section: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}.{section}.{ext}"))
}

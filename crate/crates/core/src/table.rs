//! The reference B-series table and series file I/O.
//!
//! Two interchange formats are supported. JSON:
//!
//! ```json
//! {"d": 3, "B": ["0.3959", "0.4375", "0.4538"], "label": "optional"}
//! ```
//!
//! CSV, a header row and exactly one data row:
//!
//! ```text
//! d,B0,B1,B2
//! 3,0.3959,0.4375,0.4538
//! ```
//!
//! Values travel as decimal strings in both formats and are never routed
//! through binary floating point. Exponent notation is rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;

use crate::series::{parse_decimal, BSeries, SeriesError};

/// Columns `B_0..B_5` for d = 2, 3, 4, 5, as printed (four decimals).
const BUILTIN: [(u32, [&str; 6]); 4] = [
    (2, [".1931", ".2556", ".2921", ".2993", ".2906", ".2814"]),
    (3, [".3959", ".4375", ".4538", ".4524", ".4468", ".4445"]),
    (4, [".5397", ".5710", ".5801", ".5781", ".5751", ".5745"]),
    (5, [".6513", ".6763", ".6821", ".6803", ".6786", ".6785"]),
];

pub const BUILTIN_LABEL: &str = "reference table";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("unsupported dimension {0}: the built-in table covers d = 2..=5")]
    UnsupportedDimension(u32),
}

/// The built-in column for dimension `d`.
pub fn builtin_series(d: u32) -> Result<BSeries, TableError> {
    let (_, col) = BUILTIN.iter().find(|(dim, _)| *dim == d).ok_or(TableError::UnsupportedDimension(d))?;
    Ok(BSeries::parse(d, col.iter(), BUILTIN_LABEL).expect("built-in table is well formed"))
}

/// Series keyed by dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTable {
    entries: BTreeMap<u32, BSeries>,
}

impl SeriesTable {
    pub fn builtin() -> Self {
        BUILTIN.iter().map(|(d, _)| builtin_series(*d).unwrap()).collect()
    }

    pub fn get(&self, d: u32) -> Option<&BSeries> {
        self.entries.get(&d)
    }

    /// Inserts or replaces the series for its dimension.
    pub fn insert(&mut self, series: BSeries) -> Option<BSeries> {
        self.entries.insert(series.dimension(), series)
    }

    pub fn dimensions(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BSeries> {
        self.entries.values()
    }
}

impl FromIterator<BSeries> for SeriesTable {
    fn from_iter<I: IntoIterator<Item = BSeries>>(iter: I) -> Self {
        SeriesTable { entries: iter.into_iter().map(|s| (s.dimension(), s)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Json,
    Csv,
}

impl SeriesFormat {
    /// Guesses the format from a file name's extension.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(SeriesFormat::Json),
            "csv" => Some(SeriesFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for SeriesFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(SeriesFormat::Json),
            "csv" => Ok(SeriesFormat::Csv),
            other => Err(format!("unknown series format {other:?} (expected json or csv)")),
        }
    }
}

/// Where in the input a problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Position {
    /// 1-based line and column.
    Text { line: u64, column: u64 },
    /// A named field, e.g. `B[2]` or `d`.
    Field(String),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Text { line, column } => write!(f, "line {line}, column {column}"),
            Position::Field(name) => write!(f, "field {name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {message}")]
pub struct LoadError {
    pub position: Position,
    pub message: String,
}

impl LoadError {
    fn at_field(field: impl Into<String>, message: impl Into<String>) -> Self {
        LoadError { position: Position::Field(field.into()), message: message.into() }
    }

    fn at_line(line: u64, column: u64, message: impl Into<String>) -> Self {
        LoadError { position: Position::Text { line, column }, message: message.into() }
    }
}

/// Reads one series from `source`.
pub fn load_series(mut source: impl Read, format: SeriesFormat) -> Result<BSeries, LoadError> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| LoadError::at_line(1, 1, format!("unreadable input: {e}")))?;
    match format {
        SeriesFormat::Json => load_json(&text),
        SeriesFormat::Csv => load_csv(&text),
    }
}

fn parse_values(values: &[(String, String)]) -> Result<(), LoadError> {
    for (field, text) in values {
        parse_decimal(text).map_err(|e| LoadError::at_field(field.clone(), format!("{text:?}: {e}")))?;
    }
    if values.len() < 2 {
        return Err(LoadError::at_field("B", SeriesError::TooShort(values.len()).to_string()));
    }
    Ok(())
}

fn parse_dimension(field: &str, n: Option<u64>) -> Result<u32, LoadError> {
    n.filter(|&d| d >= 1)
        .and_then(|d| u32::try_from(d).ok())
        .ok_or_else(|| LoadError::at_field(field, "dimension must be a positive integer"))
}

fn load_json(text: &str) -> Result<BSeries, LoadError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| LoadError::at_line(e.line() as u64, e.column() as u64, e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| LoadError::at_line(1, 1, "expected a JSON object"))?;

    let d = obj.get("d").ok_or_else(|| LoadError::at_field("d", "missing dimension field"))?;
    let d = parse_dimension("d", d.as_u64())?;

    let b = obj.get("B").ok_or_else(|| LoadError::at_field("B", "missing field"))?;
    let b = b.as_array().ok_or_else(|| LoadError::at_field("B", "expected an array of decimal strings"))?;
    let values = b
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::String(s) => Ok((format!("B[{i}]"), s.clone())),
            _ => Err(LoadError::at_field(format!("B[{i}]"), "expected a decimal string")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    parse_values(&values)?;

    let label = match obj.get("label") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(LoadError::at_field("label", "expected a string")),
    };
    Ok(BSeries::parse(d, values.iter().map(|(_, s)| s), label).expect("values validated above"))
}

fn csv_error(e: csv::Error) -> LoadError {
    let (line, msg) = match e.position() {
        Some(p) => (p.line(), e.to_string()),
        None => (1, e.to_string()),
    };
    LoadError::at_line(line, 1, msg)
}

fn load_csv(text: &str) -> Result<BSeries, LoadError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.get(0) != Some("d") {
        return Err(LoadError::at_line(1, 1, "header must start with \"d\""));
    }
    for (i, name) in header.iter().enumerate().skip(1) {
        if name != format!("B{}", i - 1) {
            return Err(LoadError::at_line(1, i as u64 + 1, format!("expected header B{}, found {name:?}", i - 1)));
        }
    }

    let mut records = reader.records();
    let row = match records.next() {
        Some(r) => r.map_err(csv_error)?,
        None => return Err(LoadError::at_line(2, 1, "missing data row")),
    };
    if let Some(extra) = records.next() {
        let line = extra.ok().and_then(|r| r.position().map(|p| p.line())).unwrap_or(3);
        return Err(LoadError::at_line(line, 1, "expected exactly one data row"));
    }
    let line = row.position().map_or(2, |p| p.line());

    let d = row.get(0).unwrap_or_default();
    let d = parse_dimension("d", d.parse::<u64>().ok())
        .map_err(|e| LoadError::at_line(line, 1, format!("{}: {d:?}", e.message)))?;
    let values: Vec<(String, String)> =
        row.iter().skip(1).enumerate().map(|(i, s)| (format!("B{i}"), s.to_owned())).collect();
    parse_values(&values).map_err(|e| match e.position {
        Position::Field(f) => LoadError::at_line(line, 1, format!("{f}: {}", e.message)),
        p => LoadError { position: p, message: e.message },
    })?;
    Ok(BSeries::parse(d, values.iter().map(|(_, s)| s), "").expect("values validated above"))
}

/// Writes a series in the JSON interchange format.
pub fn series_to_json(series: &BSeries) -> String {
    serde_json::to_string(series).expect("series serialises")
}

/// Writes a series in the CSV interchange format. The label is not carried.
pub fn series_to_csv(series: &BSeries) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> =
        std::iter::once("d".to_owned()).chain((0..series.len()).map(|i| format!("B{i}"))).collect();
    w.write_record(&header).unwrap();
    let row: Vec<String> =
        std::iter::once(series.dimension().to_string()).chain(series.digits().iter().cloned()).collect();
    w.write_record(&row).unwrap();
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_columns() {
        assert_eq!(builtin_series(3).unwrap().digits(), [".3959", ".4375", ".4538", ".4524", ".4468", ".4445"]);
        assert_eq!(builtin_series(5).unwrap().digits(), [".6513", ".6763", ".6821", ".6803", ".6786", ".6785"]);
        let err = builtin_series(7).unwrap_err();
        assert!(err.to_string().contains("unsupported dimension"));
        assert!(builtin_series(1).is_err());
    }

    #[test]
    fn builtin_table_shape() {
        let t = SeriesTable::builtin();
        assert_eq!(t.dimensions().collect::<Vec<_>>(), vec![2, 3, 4, 5]);
        assert!(t.iter().all(|s| s.len() == 6));
    }

    #[test]
    fn json_loads() {
        let s = load_series(r#"{"d":3,"B":["0.3959","0.4375","0.4538"]}"#.as_bytes(), SeriesFormat::Json).unwrap();
        assert_eq!((s.dimension(), s.len()), (3, 3));
        assert_eq!(s.label(), "");
        let s = load_series(r#"{"d":2,"B":[".1",".2"],"label":"x"}"#.as_bytes(), SeriesFormat::Json).unwrap();
        assert_eq!(s.label(), "x");
    }

    #[test]
    fn json_errors_carry_positions() {
        let e = load_series(r#"{"d":3,"B":["0.1"]}"#.as_bytes(), SeriesFormat::Json).unwrap_err();
        assert!(e.to_string().contains("need at least 2 values"), "{e}");

        let e = load_series(r#"{"B":["0.1","0.2"]}"#.as_bytes(), SeriesFormat::Json).unwrap_err();
        assert_eq!(e.position, Position::Field("d".into()));

        let e = load_series(r#"{"d":3,"B":["0.1",0.2]}"#.as_bytes(), SeriesFormat::Json).unwrap_err();
        assert_eq!(e.position, Position::Field("B[1]".into()));

        let e = load_series(r#"{"d":3,"B":["0.1","1e-2"]}"#.as_bytes(), SeriesFormat::Json).unwrap_err();
        assert_eq!(e.position, Position::Field("B[1]".into()));
        assert!(e.message.contains("exponent"));

        let e = load_series(r#"{"d":0,"B":["0.1","0.2"]}"#.as_bytes(), SeriesFormat::Json).unwrap_err();
        assert_eq!(e.position, Position::Field("d".into()));

        let e = load_series("{\"d\":3,\n\"B\":[\"0.1\",]}".as_bytes(), SeriesFormat::Json).unwrap_err();
        assert!(matches!(e.position, Position::Text { line: 2, .. }), "{e}");
    }

    #[test]
    fn csv_loads() {
        let s = load_series("d,B0,B1\n9,0.1,0.2".as_bytes(), SeriesFormat::Csv).unwrap();
        assert_eq!((s.dimension(), s.len()), (9, 2));
        assert_eq!(s.digits(), ["0.1", "0.2"]);
    }

    #[test]
    fn csv_errors_carry_positions() {
        let e = load_series("d,B0\n9,0.1".as_bytes(), SeriesFormat::Csv).unwrap_err();
        assert!(e.message.contains("need at least 2 values"));

        let e = load_series("d,B0,B2\n9,0.1,0.2".as_bytes(), SeriesFormat::Csv).unwrap_err();
        assert_eq!(e.position, Position::Text { line: 1, column: 3 });

        let e = load_series("d,B0,B1\n9,0.1,abc".as_bytes(), SeriesFormat::Csv).unwrap_err();
        assert_eq!(e.position, Position::Text { line: 2, column: 1 });
        assert!(e.message.starts_with("B1"));

        let e = load_series("d,B0,B1\nx,0.1,0.2".as_bytes(), SeriesFormat::Csv).unwrap_err();
        assert!(e.message.contains("dimension"));

        let e = load_series("d,B0,B1\n9,0.1,0.2\n9,0.1,0.2".as_bytes(), SeriesFormat::Csv).unwrap_err();
        assert_eq!(e.position, Position::Text { line: 3, column: 1 });

        let e = load_series("d,B0,B1\n9,0.1".as_bytes(), SeriesFormat::Csv).unwrap_err();
        assert!(matches!(e.position, Position::Text { line: 2, .. }), "{e}");

        assert!(load_series("d,B0,B1\n".as_bytes(), SeriesFormat::Csv).is_err());
        assert!(load_series("x,B0,B1\n1,2,3".as_bytes(), SeriesFormat::Csv).is_err());
    }

    #[test]
    fn builtin_round_trips_through_both_formats() {
        for s in SeriesTable::builtin().iter() {
            let j = load_series(series_to_json(s).as_bytes(), SeriesFormat::Json).unwrap();
            assert_eq!(&j, s);
            let c = load_series(series_to_csv(s).as_bytes(), SeriesFormat::Csv).unwrap();
            assert_eq!(c.digits(), s.digits());
        }
    }

    #[test]
    fn format_from_path() {
        use std::path::Path;
        assert_eq!(SeriesFormat::from_path(Path::new("a/s.JSON")), Some(SeriesFormat::Json));
        assert_eq!(SeriesFormat::from_path(Path::new("s.csv")), Some(SeriesFormat::Csv));
        assert_eq!(SeriesFormat::from_path(Path::new("s.txt")), None);
    }
}

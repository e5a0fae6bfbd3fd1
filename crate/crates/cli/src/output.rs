//! CSV and JSON table writers. Output depends only on the table and its
//! metadata, so identical runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use arraymirror_core::SweepTable;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const UNITS_NOTE: &str = "reduced units: lengths in probe wavelengths (lambda = 1), rates and detunings in single-atom linewidths (Gamma_e = 1), k' = 2 pi";

/// `printf("%.12e")`: 12 fractional digits, signed exponent with at least
/// two digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn render_csv(table: &SweepTable) -> String {
    let mut out = String::new();
    out.push_str(&table.columns.join(","));
    out.push_str(",flags\n");
    for (row, flags) in table.rows.iter().zip(&table.flags) {
        for v in row {
            out.push_str(&format_number(*v));
            out.push(',');
        }
        let _ = writeln!(out, "{flags}");
    }
    out
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// `{"meta": …, "data": {column: [...], "flags": [...]}}`. Non-finite
/// values become `null`; the flags say why.
pub fn render_json(table: &SweepTable, meta: Map<String, Value>) -> String {
    let mut data = Map::new();
    for (j, name) in table.columns.iter().enumerate() {
        data.insert(
            name.clone(),
            Value::Array(table.rows.iter().map(|r| number(r[j])).collect()),
        );
    }
    data.insert(
        "flags".into(),
        Value::Array(table.flags.iter().map(|f| Value::String(f.to_string())).collect()),
    );
    let mut meta = meta;
    meta.insert(
        "axes".into(),
        Value::Array(
            table
                .axes
                .iter()
                .map(|a| {
                    let mut m = Map::new();
                    m.insert("name".into(), Value::String(a.name.clone()));
                    m.insert("count".into(), Value::from(a.values.len()));
                    m.insert(
                        "values".into(),
                        Value::Array(a.values.iter().map(|v| number(*v)).collect()),
                    );
                    Value::Object(m)
                })
                .collect(),
        ),
    );
    let mut root = Map::new();
    root.insert("meta".into(), Value::Object(meta));
    root.insert("data".into(), Value::Object(data));
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json");
    s.push('\n');
    s
}

/// Standard metadata block: version, units and the effective config.
pub fn base_meta(command: &str, config: &impl serde::Serialize) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    m.insert("units".into(), Value::String(UNITS_NOTE.into()));
    m.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    m
}

/// Writes to `path`, or stdout when `path` is `None` or `-`. Empty tables
/// are rejected before anything is created.
pub fn write_table(
    table: &SweepTable,
    meta: Map<String, Value>,
    format: Format,
    path: Option<&Path>,
) -> Result<(), CliError> {
    if table.is_empty() {
        return Err(CliError::Invalid("refusing to write an empty table".into()));
    }
    let body = match format {
        Format::Csv => render_csv(table),
        Format::Json => render_json(table, meta),
    };
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, body.as_bytes()).map_err(|e| CliError::Io(p.display().to_string(), e))
        }
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io("stdout".into(), e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use arraymirror_core::{Axis, Flags};

    #[test]
    fn c_style_exponents() {
        assert_eq!(format_number(1.0), "1.000000000000e+00");
        assert_eq!(format_number(-0.00123), "-1.230000000000e-03");
        assert_eq!(format_number(6.02e23), "6.020000000000e+23");
        assert_eq!(format_number(1e-300), "1.000000000000e-300");
        assert_eq!(format_number(0.0), "0.000000000000e+00");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }

    fn sample() -> SweepTable {
        let mut t = SweepTable::new(vec![Axis::new("x", vec![0.0, 1.0])], &["x", "y"]);
        t.push(vec![0.0, 2.5], Flags::NONE);
        t.push(
            vec![1.0, f64::INFINITY],
            Flags::ANOMALY_DIVERGENCE | Flags::ANOMALY_PROXIMITY,
        );
        t
    }

    #[test]
    fn csv_layout() {
        let s = render_csv(&sample());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "x,y,flags");
        assert_eq!(lines[1], "0.000000000000e+00,2.500000000000e+00,none");
        assert!(
            lines[2].ends_with(",inf,anomaly_proximity|anomaly_divergence"),
            "{}",
            lines[2]
        );
        assert!(!s.contains('\r'));
    }

    #[test]
    fn json_nulls_and_meta() {
        let v: Value = serde_json::from_str(&render_json(&sample(), base_meta("test", &"cfg"))).unwrap();
        assert_eq!(v["data"]["y"][1], Value::Null);
        assert_eq!(v["data"]["y"][0], 2.5);
        assert_eq!(v["meta"]["command"], "test");
        assert_eq!(v["meta"]["axes"][0]["count"], 2);
        assert_eq!(v["data"]["flags"][0], "none");
    }

    #[test]
    fn empty_table_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        let t = SweepTable::new(vec![], &["a"]);
        assert!(write_table(&t, Map::new(), Format::Csv, Some(&p)).is_err());
        assert!(!p.exists());
    }
}

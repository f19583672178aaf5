//! Tables and their CSV / JSON renderings.

use std::fs;
use std::path::Path;

use udw_core::analysis::SweepRow;

use crate::config::Format;
use crate::error::{CliError, Result};

/// Columns of every `point` and `sweep` table.
pub const SWEEP_COLUMNS: [&str; 5] = ["axis", "P", "Xabs", "concurrence", "err"];

/// A rectangular block of numbers. `meta` only appears in the JSON form.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// 17 significant digits: enough to read every `f64` back exactly.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        // Keeps -0 and 0 distinct without the exponent noise.
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    format!("{v:.16e}")
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            meta: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn sweep(rows: &[SweepRow]) -> Self {
        let mut t = Table::new(SWEEP_COLUMNS);
        for r in rows {
            t.push(vec![r.axis_value, r.p, r.x_abs, r.concurrence, r.err]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Non-finite values become `null`.
    pub fn to_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let doc = serde_json::json!({
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables always serialise");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            4.0,
        ] {
            let s = fmt_num(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let rows = [
            SweepRow {
                axis_value: 0.5,
                p: 0.25,
                x_abs: 0.125,
                concurrence: 0.0,
                err: 1e-9,
            },
            SweepRow::failed(1.0),
        ];
        let csv = Table::sweep(&rows).to_csv();
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], "axis,P,Xabs,concurrence,err");
        assert_eq!(
            lines[1],
            "5.0000000000000000e-1,2.5000000000000000e-1,1.2500000000000000e-1,0,1.0000000000000001e-9"
        );
        assert_eq!(lines[2], "1.0000000000000000e0,NaN,NaN,NaN,inf");
        assert_eq!(lines[3], "");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_nulls_non_finite() {
        let t = Table::sweep(&[SweepRow::failed(2.0)]).with_meta("scenario", "parallel");
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["meta"]["scenario"], "parallel");
        assert_eq!(v["columns"][1], "P");
        assert_eq!(v["rows"][0][0], 2.0);
        assert!(v["rows"][0][1].is_null() && v["rows"][0][4].is_null());
    }
}

//! Column tables in a small CSV dialect:
//!
//! ```text
//! # key=value
//! # key=value
//! z,col_a,col_b
//! 0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::types::DecayCurve;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveTable {
    metadata: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains([',', '\n', '\r']) {
        return Err(Error::invalid(
            "column",
            format!("invalid column name {name:?}"),
        ));
    }
    Ok(())
}

impl CurveTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Result<Self> {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        if columns.is_empty() {
            return Err(Error::invalid(
                "column",
                "a table needs at least one column",
            ));
        }
        for c in &columns {
            check_name(c)?;
        }
        Ok(Self {
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
        })
    }

    /// Table whose first column is the shared `z` grid of `curves`.
    pub fn from_curves(curves: &[&DecayCurve]) -> Result<Self> {
        let first = curves
            .first()
            .ok_or_else(|| Error::invalid("curves", "need at least one curve"))?;
        let mut table = Self::new(
            std::iter::once("z".to_string()).chain(curves.iter().map(|c| c.label().to_string())),
        )?;
        for c in curves {
            if c.points().len() != first.points().len()
                || c.zs().zip(first.zs()).any(|(a, b)| a != b)
            {
                return Err(Error::invalid("curves", "curves must share one z grid"));
            }
        }
        for (i, &(z, _)) in first.points().iter().enumerate() {
            let mut row = vec![z];
            row.extend(curves.iter().map(|c| c.points()[i].1));
            table.push_row(row)?;
        }
        Ok(table)
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl ToString) -> Result<()> {
        let key = key.into();
        let value = value.to_string();
        if key.is_empty() || key.contains(['=', '\n', '\r']) || value.contains(['\n', '\r']) {
            return Err(Error::invalid("metadata", format!("invalid entry {key:?}")));
        }
        self.metadata.push((key, value));
        Ok(())
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(
                "row",
                format!("expected {} values, got {}", self.columns.len(), row.len()),
            ));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Pairs the first column with column `name` as a curve.
    pub fn curve(&self, name: &str) -> Result<DecayCurve> {
        let values = self
            .column(name)
            .ok_or_else(|| Error::invalid("column", format!("no column {name:?}")))?;
        let zs = self.rows.iter().map(|r| r[0]);
        DecayCurve::new(name, zs.zip(values).collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table output is UTF-8")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let csv_err = |reason: String| Error::Csv {
                line: line_no,
                reason,
            };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if columns.is_some() {
                    return Err(csv_err("metadata after header".into()));
                }
                let (k, v) = rest
                    .trim_start()
                    .split_once('=')
                    .ok_or_else(|| csv_err("metadata line without '='".into()))?;
                metadata.push((k.to_string(), v.to_string()));
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(str::to_string).collect()),
                Some(cols) => {
                    let row = line
                        .split(',')
                        .map(|f| f.parse::<f64>().map_err(|e| csv_err(format!("{f:?}: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    if row.len() != cols.len() {
                        return Err(csv_err(format!(
                            "expected {} fields, got {}",
                            cols.len(),
                            row.len()
                        )));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or(Error::Csv {
            line: 0,
            reason: "missing header".into(),
        })?;
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }
}

impl DecayCurve {
    pub fn to_csv(&self) -> String {
        CurveTable::from_curves(&[self])
            .expect("a valid curve always forms a table")
            .to_csv_string()
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let table = CurveTable::parse(text)?;
        if table.columns().len() != 2 {
            return Err(Error::Csv {
                line: 0,
                reason: "a curve file has exactly two columns".into(),
            });
        }
        let label = table.columns()[1].clone();
        table.curve(&label)
    }
}

//! Report rows and their CSV and JSON encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One `(parameter tuple, check)` result. Informational rows carry no bound and always pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub param: String,
    pub check: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub pass: bool,
}

impl Row {
    /// `value ≤ bound`, slack `bound − value`.
    pub fn at_most(param: &str, check: &str, value: f64, bound: f64) -> Self {
        Self::checked(param, check, value, bound, bound - value)
    }

    /// `value ≥ bound`, slack `value − bound`.
    pub fn at_least(param: &str, check: &str, value: f64, bound: f64) -> Self {
        Self::checked(param, check, value, bound, value - bound)
    }

    /// A check whose slack is computed by the caller; passes iff `slack ≥ 0`.
    pub fn checked(param: &str, check: &str, value: f64, bound: f64, slack: f64) -> Self {
        Row {
            param: param.to_owned(),
            check: check.to_owned(),
            value,
            bound: Some(bound),
            slack: Some(slack),
            pass: slack >= 0.0,
        }
    }

    /// Accept a slack down to `−tol` to absorb rounding.
    pub fn tolerate(mut self, tol: f64) -> Self {
        if let Some(s) = self.slack {
            self.pass = s >= -tol;
        }
        self
    }

    pub fn info(param: &str, check: &str, value: f64) -> Self {
        Row {
            param: param.to_owned(),
            check: check.to_owned(),
            value,
            bound: None,
            slack: None,
            pass: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub failed: usize,
    pub passed: bool,
    /// Checks that failed, as `param/check`.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<C: Serialize> {
    pub config: C,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl<C: Serialize> Report<C> {
    pub fn new(config: C, rows: Vec<Row>) -> Self {
        let failures: Vec<String> = rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{}/{}", r.param, r.check))
            .collect();
        Report {
            config,
            summary: Summary {
                rows: rows.len(),
                failed: failures.len(),
                passed: failures.is_empty(),
                failures,
            },
            rows,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<(), CliError> {
        match format {
            Format::Csv => write_csv(&self.rows, out),
            Format::Json => {
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, self)?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Row>, CliError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<Vec<Row>, _>>()
        .map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_constructors() {
        let r = Row::at_most("R=0.5", "gluing", 1e-11, 1e-9);
        assert!(r.pass);
        assert_eq!(r.slack, Some(1e-9 - 1e-11));
        assert!(!Row::at_least("R=0.1", "product", -1.3, -1e-12).pass);
        assert!(Row::info("grid", "spread", 2.6).pass);
        assert!(Row::at_most("p", "v", 1.0 + 1e-12, 1.0).tolerate(1e-9).pass);
        assert!(!Row::at_most("p", "v", 1.0 + 1e-6, 1.0).tolerate(1e-9).pass);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![
            Row::at_most("a", "x", 0.1 + 0.2, 1.0 / 3.0),
            Row::info("b", "y", -7.123456789012345e-300),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("param,check,value,bound,slack,pass\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn summary_lists_failures() {
        let rep = Report::new(
            "cfg",
            vec![
                Row::at_most("p", "ok", 0.0, 1.0),
                Row::at_most("q", "bad", 2.0, 1.0),
            ],
        );
        assert!(!rep.passed());
        assert_eq!(rep.summary.failures, vec!["q/bad".to_owned()]);
    }
}

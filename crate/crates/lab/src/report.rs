//! Experiment reports: provenance, per-trial values, summary tables and monitors.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    pub command: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: u64,
    /// `None` for a degenerate trial (zero denominator).
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Summary {
    pub max: f64,
    pub median: f64,
    /// Fitted slope of `log2 max-ratio` against `log2 N`, when several `N` were run.
    pub slope: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        let median = match v.len() {
            0 => 0.0,
            l if l % 2 == 1 => v[l / 2],
            l => 0.5 * (v[l / 2 - 1] + v[l / 2]),
        };
        Self { max: v.last().copied().unwrap_or(0.0), median, slope: None }
    }
}

/// Named table with string cells; numbers are written with full round-trip precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cells of a column parsed as numbers (`inf` allowed).
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column(name)?;
        self.rows.iter().map(|r| r[c].parse::<f64>().ok()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| LabError::io(path, e))?;
        Ok(())
    }
}

/// Number formatted so that parsing returns the same bits.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// A monitored quantity with an optional limit; `ok` is false when the limit is breached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    pub name: String,
    pub value: f64,
    pub limit: Option<f64>,
    pub ok: bool,
}

impl Monitor {
    /// `value <= limit` when a limit is given.
    pub fn at_most(name: &str, value: f64, limit: Option<f64>) -> Self {
        let ok = limit.map_or(true, |l| value <= l) && !value.is_nan();
        Self { name: name.into(), value, limit, ok }
    }

    /// Pass/fail check with no numeric limit.
    pub fn check(name: &str, passed: bool) -> Self {
        Self { name: name.into(), value: f64::from(u8::from(passed)), limit: Some(1.0), ok: passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config_hash: String,
    pub provenance: Provenance,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    pub tables: Vec<Table>,
    pub monitors: Vec<Monitor>,
    pub annotations: Vec<String>,
}

impl ExperimentReport {
    pub fn new(config_hash: String, seed: u64, command: &str) -> Self {
        Self {
            config_hash,
            provenance: Provenance { seed, version: env!("CARGO_PKG_VERSION").into(), command: command.into() },
            trials: Vec::new(),
            summary: Summary::default(),
            tables: Vec::new(),
            monitors: Vec::new(),
            annotations: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("report serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn breaches(&self) -> Vec<&Monitor> {
        self.monitors.iter().filter(|m| !m.ok).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, f64::INFINITY, -2.5] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[3.0, 1.0, 2.0, f64::NAN]);
        assert_eq!((s.max, s.median), (3.0, 2.0));
        assert_eq!(Summary::of(&[1.0, 2.0]).median, 1.5);
        assert_eq!(Summary::of(&[]).max, 0.0);
    }

    #[test]
    fn report_json_identity() {
        let mut r = ExperimentReport::new("abc".into(), 5, "test");
        r.trials.push(TrialRecord { n: 8, trial: 0, ratio: Some(0.1) });
        r.trials.push(TrialRecord { n: 8, trial: 1, ratio: None });
        let mut t = Table::new("t", &["x", "y"]);
        t.push(vec![num(1.0), num(f64::INFINITY)]);
        r.tables.push(t);
        r.monitors.push(Monitor::at_most("m", 2.0, Some(1.0)));
        let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.hash(), r.hash());
        assert_eq!(r.breaches().len(), 1);
        assert_eq!(back.table("t").unwrap().numbers("y").unwrap(), vec![f64::INFINITY]);
    }
}

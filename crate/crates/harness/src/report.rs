//! Run reports: a JSON document with one record per test point, a CSV
//! summary, and timings kept in a separate sidecar so the report itself is
//! byte-for-byte reproducible.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dataset: String,
    pub task: String,
    pub method: String,
    pub lambda: f64,
    pub epsilon: f64,
    pub k: usize,
    pub eligible: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointVerdict {
    Robust,
    NotRobust,
    /// The approximate check could not decide.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub base: f64,
    pub lo: f64,
    pub hi: f64,
    pub verdict: PointVerdict,
    /// Label changes of the counterexample, for refuted points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(usize, f64)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRate {
    pub name: String,
    pub robust: usize,
    pub total: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub robust: usize,
    pub total: usize,
    pub rate: f64,
    pub groups: Vec<GroupRate>,
}

fn rate(robust: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        robust as f64 / total as f64
    }
}

impl Aggregates {
    pub fn from_points(points: &[PointRecord], group_names: &[String]) -> Self {
        let robust = points.iter().filter(|p| p.verdict == PointVerdict::Robust).count();
        let groups = group_names
            .iter()
            .map(|g| {
                let members: Vec<&PointRecord> =
                    points.iter().filter(|p| p.groups.contains(g)).collect();
                let r = members.iter().filter(|p| p.verdict == PointVerdict::Robust).count();
                GroupRate {
                    name: g.clone(),
                    robust: r,
                    total: members.len(),
                    rate: rate(r, members.len()),
                }
            })
            .collect();
        Aggregates {
            robust,
            total: points.len(),
            rate: rate(robust, points.len()),
            groups,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub fit_seconds: f64,
    pub box_seconds: Option<f64>,
    pub certify_seconds: f64,
    pub per_point_mean_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub points: Vec<PointRecord>,
    pub aggregates: Aggregates,
    #[serde(skip)]
    pub timing: Timing,
}

impl RunReport {
    pub fn group_names(&self) -> Vec<String> {
        self.aggregates.groups.iter().map(|g| g.name.clone()).collect()
    }

    /// Recomputes the aggregates from the per-point records.
    pub fn recompute(&self) -> Aggregates {
        Aggregates::from_points(&self.points, &self.group_names())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Writes `path` (JSON), plus `<stem>.csv` and `<stem>.timing.json`
    /// beside it. Returns the paths written.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        let json = self.to_json()?;
        fs::write(path, json + "\n").map_err(|e| HarnessError::io(path, e))?;
        let csv_path = path.with_extension("csv");
        self.write_csv_summary(&csv_path)?;
        let timing_path = path.with_extension("timing.json");
        let timing = serde_json::to_string_pretty(&self.timing)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        fs::write(&timing_path, timing + "\n").map_err(|e| HarnessError::io(&timing_path, e))?;
        Ok(vec![path.to_path_buf(), csv_path, timing_path])
    }

    pub fn write_csv_summary(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record(["index", "base", "lo", "hi", "verdict", "changed"])
            .map_err(|e| csv_io(path, e))?;
        for p in &self.points {
            let verdict = match p.verdict {
                PointVerdict::Robust => "robust",
                PointVerdict::NotRobust => "not_robust",
                PointVerdict::Unknown => "unknown",
            };
            let changed = p.witness.as_ref().map_or(0, Vec::len);
            w.write_record([
                p.index.to_string(),
                p.base.to_string(),
                p.lo.to_string(),
                p.hi.to_string(),
                verdict.to_string(),
                changed.to_string(),
            ])
            .map_err(|e| csv_io(path, e))?;
        }
        w.flush().map_err(|e| HarnessError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn csv_io(path: &Path, e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::io(path, io),
        other => HarnessError::Config(format!("{}: {other:?}", path.display())),
    }
}

/// Writes rows of a serializable type as CSV with a header.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

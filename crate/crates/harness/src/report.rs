use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use vclab_core::vcdim::ShatterWitness;

use crate::context::GraphContext;
use crate::error::Result;

pub const CSV_SCHEMA: &str = "vclab-csv-v1";
pub const REPORT_SCHEMA: &str = "vclab-report-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIPPED")]
    Skipped,
    /// Recorded measurement that is not a checked claim.
    #[serde(rename = "INFO")]
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
            Verdict::Info => "INFO",
        })
    }
}

/// One CSV line. Column order is part of the schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub suite: String,
    pub family: String,
    pub q: String,
    pub t: String,
    pub n: usize,
    pub d: String,
    pub lambda: String,
    #[serde(rename = "U_size")]
    pub u_size: usize,
    #[serde(rename = "Uprime_size")]
    pub uprime_size: String,
    pub trial: u64,
    pub seed: u64,
    pub metric: String,
    pub value: String,
    pub bound: String,
    pub pass: Verdict,
}

/// Fixed-precision rendering so reruns produce identical bytes.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() && x.abs() < 1e15 && x == x.trunc() {
        format!("{x:.0}")
    } else if x.is_finite() && x.abs() >= 1e-4 && x.abs() < 1e15 {
        format!("{x:.6}")
    } else {
        format!("{x:.6e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub metric: String,
    pub value: String,
    pub bound: String,
    pub pass: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct VcRecord {
    /// `(k, found)` for each randomised `vc_at_least` run.
    pub at_least: Vec<(usize, bool)>,
    pub dimension: Option<usize>,
    /// False when `dimension` is only a certified lower bound.
    pub exact: bool,
    pub witness: Option<ShatterWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdComparison {
    pub name: String,
    pub threshold: f64,
    pub target_vc: usize,
    pub size_meets_threshold: bool,
    pub observed_vc: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub suite: String,
    pub graph_hash: String,
    pub u_size: usize,
    pub uprime_size: Option<usize>,
    pub trial: u64,
    pub seed: u64,
    pub census: BTreeMap<String, String>,
    pub vc: Option<VcRecord>,
    pub thresholds: Vec<ThresholdComparison>,
    pub checks: Vec<CheckRecord>,
    /// Not reproducible; ignore when diffing reports.
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<CsvRow>,
    pub records: Vec<ExperimentRecord>,
    /// Human-readable failure descriptions with enough detail to replay.
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.rows.iter().all(|r| r.pass != Verdict::Fail)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.rows.iter().filter(|r| r.pass == verdict).count()
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.rows.extend(other.rows);
        self.records.extend(other.records);
        self.failures.extend(other.failures);
    }

    /// CSV body without the timestamped header line.
    pub fn csv_body(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record([
                "suite", "family", "q", "t", "n", "d", "lambda", "U_size", "Uprime_size", "trial",
                "seed", "metric", "value", "bound", "pass",
            ])?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn csv_text(&self) -> Result<String> {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(format!(
            "# {CSV_SCHEMA} suite={} generated={stamp}\n{}",
            self.suite,
            self.csv_body()?
        ))
    }

    pub fn json_value(&self) -> serde_json::Value {
        serde_json::json!({ "schema": REPORT_SCHEMA, "records": self.records })
    }

    /// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        std::fs::write(&csv_path, self.csv_text()?)?;
        std::fs::write(&json_path, serde_json::to_string_pretty(&self.json_value())? + "\n")?;
        Ok((csv_path, json_path))
    }
}

/// Strips the `#` header line from a CSV file produced by [`SuiteReport::write`].
pub fn csv_body_of(text: &str) -> &str {
    match text.strip_prefix('#') {
        Some(rest) => rest.split_once('\n').map_or("", |(_, body)| body),
        None => text,
    }
}

/// Builder for rows that share the graph columns.
pub struct RowContext<'a> {
    pub suite: &'a str,
    pub ctx: &'a GraphContext,
}

impl RowContext<'_> {
    #[allow(clippy::too_many_arguments)]
    pub fn row(
        &self,
        u_size: usize,
        uprime: Option<usize>,
        trial: u64,
        seed: u64,
        metric: &str,
        value: String,
        bound: String,
        pass: Verdict,
    ) -> CsvRow {
        let c = self.ctx;
        CsvRow {
            suite: self.suite.to_string(),
            family: c.family.clone(),
            q: c.q.map(|q| q.to_string()).unwrap_or_default(),
            t: c.t.map(|t| t.to_string()).unwrap_or_default(),
            n: c.graph.n(),
            d: c.profile.d.map(|d| d.to_string()).unwrap_or_default(),
            lambda: format!("{:.9}", c.profile.lambda),
            u_size,
            uprime_size: uprime.map(|u| u.to_string()).unwrap_or_default(),
            trial,
            seed,
            metric: metric.to_string(),
            value,
            bound,
            pass,
        }
    }
}

pub fn merge_reports(dir: &Path) -> Result<(serde_json::Value, usize, usize)> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    let mut records = Vec::new();
    let mut fails = 0usize;
    let mut rows = 0usize;
    for path in entries {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => {
                let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
                if v.get("schema").and_then(|s| s.as_str()) != Some(REPORT_SCHEMA) {
                    continue;
                }
                if let Some(rs) = v.get("records").and_then(|r| r.as_array()) {
                    records.extend(rs.iter().cloned());
                }
            }
            Some("csv") => {
                let text = std::fs::read_to_string(&path)?;
                let mut rdr = csv::Reader::from_reader(csv_body_of(&text).as_bytes());
                let headers = rdr.headers()?.clone();
                let Some(col) = headers.iter().position(|h| h == "pass") else {
                    continue;
                };
                for rec in rdr.records() {
                    let rec = rec?;
                    rows += 1;
                    if rec.get(col) == Some("FAIL") {
                        fails += 1;
                    }
                }
            }
            _ => {}
        }
    }
    Ok((
        serde_json::json!({ "schema": REPORT_SCHEMA, "records": records }),
        rows,
        fails,
    ))
}

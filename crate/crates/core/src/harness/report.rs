//! CSV and JSON reports of a run.
//!
//! File layout inside the output directory:
//!
//! | file              | contents                                             |
//! |-------------------|------------------------------------------------------|
//! | `trials.csv`      | `trial,scheme,K,M,pt_dbm,n_max,idf_calls,ms`         |
//! | `aggregate.csv`   | `scheme,K,M,pt_dbm,mean_nmax,stderr,mean_idf_calls,trials` |
//! | `convergence.csv` | `scheme,K,M,pt_dbm,trials,running_mean`              |
//! | `summary.json`    | config echo, seed, fits, failure and mismatch counts |

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CurveFit, RunOutput};
use crate::error::{param, Result};
use crate::mimo::Scheme;
use crate::units::mw_to_dbm;

pub const TRIALS_HEADER: [&str; 8] = [
    "trial",
    "scheme",
    "K",
    "M",
    "pt_dbm",
    "n_max",
    "idf_calls",
    "ms",
];
pub const AGGREGATE_HEADER: [&str; 8] = [
    "scheme",
    "K",
    "M",
    "pt_dbm",
    "mean_nmax",
    "stderr",
    "mean_idf_calls",
    "trials",
];
pub const CONVERGENCE_HEADER: [&str; 6] = ["scheme", "K", "M", "pt_dbm", "trials", "running_mean"];

#[derive(Debug, Clone, Serialize)]
struct Summary<'a> {
    version: &'static str,
    seed: u64,
    empty_run: bool,
    sinr_threshold_db: f64,
    max_power_dbm: Vec<f64>,
    config: &'a super::ExperimentConfig,
    cells: usize,
    records: usize,
    failed_trials: usize,
    failures: &'a [super::TrialFailure],
    brute_force_mismatches: Option<usize>,
    fits: &'a [CurveFit],
}

/// Paths of the files written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub trials: PathBuf,
    pub aggregate: PathBuf,
    pub convergence: PathBuf,
    pub summary: PathBuf,
}

pub fn trials_csv(run: &RunOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRIALS_HEADER)?;
    for r in &run.records {
        w.write_record([
            r.trial.to_string(),
            r.cell.scheme.to_string(),
            r.cell.pairs.to_string(),
            r.cell.antennas.to_string(),
            r.cell.pt_dbm.to_string(),
            r.n_max.to_string(),
            r.idf_calls.to_string(),
            format!("{:.3}", r.ms),
        ])?;
    }
    finish(w)
}

pub fn aggregate_csv(run: &RunOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AGGREGATE_HEADER)?;
    for a in &run.aggregates {
        w.write_record([
            a.cell.scheme.to_string(),
            a.cell.pairs.to_string(),
            a.cell.antennas.to_string(),
            a.cell.pt_dbm.to_string(),
            a.mean_nmax.to_string(),
            a.stderr.to_string(),
            a.mean_idf_calls.to_string(),
            a.trials.to_string(),
        ])?;
    }
    finish(w)
}

pub fn convergence_csv(run: &RunOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CONVERGENCE_HEADER)?;
    for a in &run.aggregates {
        for (i, m) in a.running_mean.iter().enumerate() {
            w.write_record([
                a.cell.scheme.to_string(),
                a.cell.pairs.to_string(),
                a.cell.antennas.to_string(),
                a.cell.pt_dbm.to_string(),
                (i + 1).to_string(),
                m.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn summary_json(run: &RunOutput) -> Result<String> {
    let summary = Summary {
        version: env!("CARGO_PKG_VERSION"),
        seed: run.config.params.rng_seed,
        empty_run: run.records.is_empty(),
        sinr_threshold_db: run.config.sinr_threshold_db(),
        max_power_dbm: run.config.pt_dbm.clone(),
        config: &run.config,
        cells: run.aggregates.len(),
        records: run.records.len(),
        failed_trials: run.failures.len(),
        failures: &run.failures,
        brute_force_mismatches: run.config.brute_force.then(|| run.mismatches()),
        fits: &run.fits,
    };
    let mut s = serde_json::to_string_pretty(&summary)?;
    s.push('\n');
    Ok(s)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| param(e.to_string()))
}

/// Writes all report files into `dir`, creating it if needed.
pub fn emit_report(run: &RunOutput, dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(dir)?;
    let files = ReportFiles {
        trials: dir.join("trials.csv"),
        aggregate: dir.join("aggregate.csv"),
        convergence: dir.join("convergence.csv"),
        summary: dir.join("summary.json"),
    };
    fs::write(&files.trials, trials_csv(run)?)?;
    fs::write(&files.aggregate, aggregate_csv(run)?)?;
    fs::write(&files.convergence, convergence_csv(run)?)?;
    fs::write(&files.summary, summary_json(run)?)?;
    Ok(files)
}

/// One row of an aggregate CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct AggregateRow {
    pub scheme: String,
    #[serde(rename = "K")]
    pub pairs: usize,
    #[serde(rename = "M")]
    pub antennas: usize,
    pub pt_dbm: f64,
    pub mean_nmax: f64,
    pub stderr: f64,
    pub mean_idf_calls: f64,
    pub trials: usize,
}

impl AggregateRow {
    pub fn scheme(&self) -> Result<Scheme> {
        self.scheme.parse()
    }
}

pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<AggregateRow>, _>>()?;
    Ok(rows)
}

/// Formats a power cap for display, e.g. `20 dBm (100 mW)`.
pub fn describe_power(mw: f64) -> String {
    format!("{} dBm ({mw} mW)", mw_to_dbm(mw))
}

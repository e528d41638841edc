//! Seeded Monte Carlo driver for average link-count experiments.
//!
//! Each trial draws its scenario from a private ChaCha stream keyed by
//! `(master seed, K, trial index)`. The key deliberately omits the scheme,
//! antenna count and power cap, so every cell of a sweep with the same K
//! sees the same node placements (common random numbers); comparisons
//! across schemes and power caps are then paired. Trials run on a bounded
//! rayon pool and results are merged in trial order, so outputs do not
//! depend on the worker count.

pub mod config;
pub mod fit;
pub mod report;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::ExperimentConfig;
pub use fit::{fit_line, fit_two_stage, FitParams, LineFit};

use crate::error::{param, Error, Result};
use crate::mimo::{EffectiveChannels, Scheme, SchemeConfig};
use crate::scenario::{build_scenario, SimParams};
use crate::selection::{self, SelectionResult};
use crate::units::dbm_to_mw;

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub scheme: Scheme,
    pub pairs: usize,
    pub antennas: usize,
    pub pt_dbm: f64,
}

impl Cell {
    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig::new(self.scheme, self.antennas)
    }

    /// Parameters for this cell: the base set with the cell's power cap.
    pub fn params(&self, base: &SimParams) -> SimParams {
        SimParams {
            max_power_mw: dbm_to_mw(self.pt_dbm),
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub cell: Cell,
    pub n_max: usize,
    pub idf_calls: usize,
    /// Wall time in milliseconds; zero when timing is disabled.
    pub ms: f64,
    /// Exhaustive-search result when validation is enabled.
    pub brute_force: Option<SelectionResult>,
}

impl TrialRecord {
    pub fn mismatch(&self) -> bool {
        self.brute_force
            .as_ref()
            .is_some_and(|b| b.n_max != self.n_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub cell: Cell,
    /// Estimate of the average link count C(K, M).
    pub mean_nmax: f64,
    pub stderr: f64,
    pub mean_idf_calls: f64,
    pub trials: usize,
    /// Running mean of `n_max` after each successful trial (convergence view).
    pub running_mean: Vec<f64>,
    pub mean_brute_force_calls: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub cell: Cell,
    pub trial: usize,
    pub message: String,
}

/// Fitted curve for one (scheme, M, P_T) group of a K sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveFit {
    pub scheme: Scheme,
    pub antennas: usize,
    pub pt_dbm: f64,
    pub fit: FitParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<TrialFailure>,
    pub fits: Vec<CurveFit>,
}

impl RunOutput {
    pub fn mismatches(&self) -> usize {
        self.records.iter().filter(|r| r.mismatch()).count()
    }

    pub fn aggregate(
        &self,
        scheme: Scheme,
        pairs: usize,
        antennas: usize,
        pt_dbm: f64,
    ) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| {
            a.cell.scheme == scheme
                && a.cell.pairs == pairs
                && a.cell.antennas == antennas
                && a.cell.pt_dbm == pt_dbm
        })
    }
}

/// Sweep cells ordered by scheme, antennas, power cap, then K.
pub fn cells(config: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for &scheme in &config.schemes {
        for &antennas in &config.antennas {
            for &pt_dbm in &config.pt_dbm {
                for &pairs in &config.pairs {
                    out.push(Cell {
                        scheme,
                        pairs,
                        antennas,
                        pt_dbm,
                    });
                }
            }
        }
    }
    out
}

/// Random stream of trial `trial` for pair count `pairs`.
pub fn trial_rng(master_seed: u64, pairs: usize, trial: usize) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&(pairs as u64).to_le_bytes());
    seed[16..24].copy_from_slice(&(trial as u64).to_le_bytes());
    seed[24..].copy_from_slice(b"mncl-sim");
    ChaCha8Rng::from_seed(seed)
}

fn run_one(config: &ExperimentConfig, cell: Cell, trial: usize) -> Result<TrialRecord> {
    let start = config.timing.then(Instant::now);
    let params = cell.params(&config.params);
    let mut rng = trial_rng(params.rng_seed, cell.pairs, trial);
    let scenario = build_scenario(&params, cell.pairs, cell.scheme_config(), &mut rng)?;
    let eff = EffectiveChannels::new(&scenario)?;
    let result = selection::bols(cell.pairs, selection::idf_oracle(&eff, &params))?;
    let brute_force = if config.brute_force {
        Some(selection::brute_force(
            cell.pairs,
            config.k_cap,
            selection::idf_oracle(&eff, &params),
        )?)
    } else {
        None
    };
    Ok(TrialRecord {
        trial,
        cell,
        n_max: result.n_max,
        idf_calls: result.oracle_calls,
        ms: start.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3),
        brute_force,
    })
}

/// Runs every trial of every cell and aggregates the results.
///
/// Trials that fail numerically are excluded from the aggregates and listed
/// in [`RunOutput::failures`].
pub fn run_trials(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let cells = cells(config);
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.trials).map(move |t| (c, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| param(format!("cannot build worker pool: {e}")))?;
    let outcomes: Vec<Result<TrialRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, t)| run_one(config, cells[c], t))
            .collect()
    });

    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (&(c, t), outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(r) => records.push(r),
            Err(e @ (Error::Numeric(_) | Error::Contract(_))) => failures.push(TrialFailure {
                cell: cells[c],
                trial: t,
                message: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }

    let aggregates = aggregate(&cells, &records);
    let fits = fit_curves(&aggregates);
    Ok(RunOutput {
        config: config.clone(),
        records,
        aggregates,
        failures,
        fits,
    })
}

/// Per-cell statistics, in cell order. Cells without successful trials are
/// omitted.
pub fn aggregate(cells: &[Cell], records: &[TrialRecord]) -> Vec<Aggregate> {
    cells
        .iter()
        .filter_map(|cell| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.cell == *cell).collect();
            if rs.is_empty() {
                return None;
            }
            let n = rs.len() as f64;
            let values: Vec<f64> = rs.iter().map(|r| r.n_max as f64).collect();
            let mean = values.iter().sum::<f64>() / n;
            let stderr = if rs.len() > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            let mut acc = 0.0;
            let running_mean = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    acc += v;
                    acc / (i + 1) as f64
                })
                .collect();
            let brute: Vec<usize> = rs
                .iter()
                .filter_map(|r| r.brute_force.as_ref().map(|b| b.oracle_calls))
                .collect();
            Some(Aggregate {
                cell: *cell,
                mean_nmax: mean,
                stderr,
                mean_idf_calls: rs.iter().map(|r| r.idf_calls as f64).sum::<f64>() / n,
                trials: rs.len(),
                running_mean,
                mean_brute_force_calls: (!brute.is_empty())
                    .then(|| brute.iter().sum::<usize>() as f64 / brute.len() as f64),
            })
        })
        .collect()
}

/// Fits the two-segment curve to every (scheme, M, P_T) group whose K sweep
/// has enough points; groups that do not are skipped.
pub fn fit_curves(aggregates: &[Aggregate]) -> Vec<CurveFit> {
    let mut groups: Vec<(Scheme, usize, f64)> = Vec::new();
    for a in aggregates {
        let key = (a.cell.scheme, a.cell.antennas, a.cell.pt_dbm);
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    groups
        .into_iter()
        .filter_map(|(scheme, antennas, pt_dbm)| {
            let points: Vec<(usize, f64)> = aggregates
                .iter()
                .filter(|a| {
                    a.cell.scheme == scheme
                        && a.cell.antennas == antennas
                        && a.cell.pt_dbm == pt_dbm
                })
                .map(|a| (a.cell.pairs, a.mean_nmax))
                .collect();
            fit_two_stage(&points, antennas).ok().map(|fit| CurveFit {
                scheme,
                antennas,
                pt_dbm,
                fit,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            schemes: vec![Scheme::RxDiversity],
            pairs: vec![1],
            antennas: vec![1],
            trials: 1,
            timing: false,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn single_trial() {
        let out = run_trials(&small_config()).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.records[0].n_max <= 1);
        assert_eq!(out.aggregates.len(), 1);
        assert!(out.failures.is_empty());
    }

    #[test]
    fn thread_count_does_not_change_records() {
        let mut cfg = ExperimentConfig {
            schemes: vec![Scheme::Beamforming, Scheme::Stbc],
            pairs: vec![3, 4],
            antennas: vec![2],
            trials: 6,
            timing: false,
            ..ExperimentConfig::default()
        };
        cfg.threads = 1;
        let a = run_trials(&cfg).unwrap();
        cfg.threads = 8;
        let b = run_trials(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.aggregates, b.aggregates);
    }

    #[test]
    fn cells_share_topology_across_schemes() {
        let mut a = trial_rng(5, 4, 2);
        let mut b = trial_rng(5, 4, 2);
        let params = SimParams::default();
        let s1 = build_scenario(
            &params,
            4,
            SchemeConfig::new(Scheme::RxDiversity, 2),
            &mut a,
        )
        .unwrap();
        let s2 = build_scenario(
            &params,
            4,
            SchemeConfig::new(Scheme::Beamforming, 3),
            &mut b,
        )
        .unwrap();
        assert_eq!(s1.topology, s2.topology);
        let s3 = build_scenario(
            &params,
            4,
            SchemeConfig::new(Scheme::RxDiversity, 2),
            &mut trial_rng(5, 4, 3),
        )
        .unwrap();
        assert_ne!(s1.topology, s3.topology);
    }

    #[test]
    fn aggregate_statistics() {
        let cell = Cell {
            scheme: Scheme::RxDiversity,
            pairs: 4,
            antennas: 1,
            pt_dbm: 20.0,
        };
        let records: Vec<TrialRecord> = [1usize, 2, 3, 2]
            .iter()
            .enumerate()
            .map(|(t, &n)| TrialRecord {
                trial: t,
                cell,
                n_max: n,
                idf_calls: 10,
                ms: 0.0,
                brute_force: None,
            })
            .collect();
        let agg = aggregate(&[cell], &records);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].mean_nmax, 2.0);
        // sample sd = sqrt(2/3), se = sd / 2
        assert!((agg[0].stderr - (2.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(agg[0].running_mean, vec![1.0, 1.5, 2.0, 2.0]);
    }
}

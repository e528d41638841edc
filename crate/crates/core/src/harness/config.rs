//! Experiment configuration and the `key = value` config file format.
//!
//! ```text
//! # beamforming curve, M = 4
//! scheme = beamforming
//! pairs = 1-15
//! antennas = 4
//! trials = 300
//! seed = 7
//! pt_dbm = 20
//! ```
//!
//! List-valued keys (`scheme`, `pairs`, `antennas`, `pt_dbm`) take comma
//! separated items; integer items may be ranges `a-b`, and `scheme = all`
//! selects every scheme.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{param, Result};
use crate::mimo::Scheme;
use crate::scenario::SimParams;
use crate::selection::BRUTE_FORCE_CAP;
use crate::units::{db_to_linear, dbm_to_mw, linear_to_db, mw_to_dbm};

/// Execution-only settings (`threads`, `out_dir`) are left out of the
/// serialized echo so reports do not depend on where or how wide a run was.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Physical parameters; `max_power_mw` is overridden per cell by
    /// `pt_dbm`.
    pub params: SimParams,
    pub schemes: Vec<Scheme>,
    pub pairs: Vec<usize>,
    pub antennas: Vec<usize>,
    pub pt_dbm: Vec<f64>,
    pub trials: usize,
    /// Worker threads; 0 uses all available cores.
    #[serde(skip)]
    pub threads: usize,
    /// Record per-trial wall time. Timing makes the trial CSV
    /// non-reproducible, so it is off for reproducibility runs.
    pub timing: bool,
    /// Also run the exhaustive search on every trial.
    pub brute_force: bool,
    /// Largest K accepted by the exhaustive search.
    pub k_cap: usize,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let params = SimParams::default();
        Self {
            pt_dbm: vec![mw_to_dbm(params.max_power_mw)],
            params,
            schemes: vec![Scheme::Beamforming],
            pairs: vec![10],
            antennas: vec![4],
            trials: 100,
            threads: 0,
            timing: true,
            brute_force: false,
            k_cap: BRUTE_FORCE_CAP,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.schemes.is_empty()
            || self.pairs.is_empty()
            || self.antennas.is_empty()
            || self.pt_dbm.is_empty()
        {
            return Err(param("sweep lists must be nonempty"));
        }
        if self.pairs.contains(&0) {
            return Err(param("pair counts must be at least 1"));
        }
        if self.antennas.contains(&0) {
            return Err(param("antenna counts must be at least 1"));
        }
        if self.pt_dbm.iter().any(|p| !p.is_finite()) {
            return Err(param("power caps must be finite"));
        }
        if self.trials == 0 {
            return Err(param("trial count must be at least 1"));
        }
        if self.brute_force {
            if let Some(&k) = self.pairs.iter().find(|&&k| k > self.k_cap) {
                return Err(param(format!(
                    "brute-force validation limited to K <= {}, got {k}",
                    self.k_cap
                )));
            }
        }
        Ok(())
    }

    /// Parses a config file on top of the defaults.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_config_text(text)?;
        Ok(cfg)
    }

    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(param(format!("line {}: expected key = value", n + 1)));
            };
            self.set(key.trim(), value.trim())
                .map_err(|e| param(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    /// Sets one key. Keys match the long CLI flag names with `_` for `-`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scheme" | "schemes" => self.schemes = parse_schemes(value)?,
            "pairs" => self.pairs = parse_usize_list(value)?,
            "antennas" => self.antennas = parse_usize_list(value)?,
            "pt_dbm" => self.pt_dbm = parse_f64_list(value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "seed" => self.params.rng_seed = parse_num(key, value)?,
            "radius_m" => self.params.disk_radius_m = parse_num(key, value)?,
            "sinr_db" => self.params.sinr_threshold = db_to_linear(parse_num(key, value)?),
            "imax" => self.params.max_iterations = parse_num(key, value)?,
            "pathloss_exponent" => self.params.pathloss_exponent = parse_num(key, value)?,
            "reference_distance_m" => self.params.reference_distance_m = parse_num(key, value)?,
            "reference_loss_db" => self.params.reference_loss_db = parse_num(key, value)?,
            "noise_psd_dbm_hz" => self.params.noise_psd_dbm_hz = parse_num(key, value)?,
            "noise_figure_db" => self.params.noise_figure_db = parse_num(key, value)?,
            "bandwidth_hz" => self.params.bandwidth_hz = parse_num(key, value)?,
            "convergence_tolerance" => self.params.convergence_tolerance = parse_num(key, value)?,
            "threads" => self.threads = parse_num(key, value)?,
            "timing" => self.timing = parse_bool(key, value)?,
            "brute_force" => self.brute_force = parse_bool(key, value)?,
            "k_cap" => self.k_cap = parse_num(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            other => return Err(param(format!("unknown config key '{other}'"))),
        }
        if let Some(&first) = self.pt_dbm.first() {
            self.params.max_power_mw = dbm_to_mw(first);
        }
        Ok(())
    }

    pub fn sinr_threshold_db(&self) -> f64 {
        linear_to_db(self.params.sinr_threshold)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| param(format!("invalid value '{value}' for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(param(format!("invalid boolean '{value}' for {key}"))),
    }
}

pub fn parse_schemes(value: &str) -> Result<Vec<Scheme>> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(Scheme::ALL.to_vec());
    }
    value.split(',').map(|s| s.parse()).collect()
}

/// Parses `1,3,5-8` style lists.
pub fn parse_usize_list(value: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) => {
                let a: usize = parse_num("range start", a)?;
                let b: usize = parse_num("range end", b)?;
                if a > b {
                    return Err(param(format!("empty range '{item}'")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_num("list item", item)?),
        }
    }
    if out.is_empty() {
        return Err(param(format!("empty list '{value}'")));
    }
    Ok(out)
}

pub fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num("list item", s))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(param(format!("empty list '{value}'")));
    }
    Ok(out)
}

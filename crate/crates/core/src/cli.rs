//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parameter error, 2 runtime or numeric error,
//! 3 when `validate` finds a search mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{param, Error, Result};
use crate::harness::config::{parse_f64_list, parse_schemes, parse_usize_list};
use crate::harness::report::{emit_report, read_aggregate_csv};
use crate::harness::{fit_two_stage, run_trials, ExperimentConfig, RunOutput};
use crate::units::{db_to_linear, dbm_to_mw};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAM: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mncl",
    version,
    about = "Maximum number of concurrent links in MIMO ad hoc networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file, with flag overrides.
    Simulate(RunArgs),
    /// Cartesian sweep over pair counts, antennas, power caps and schemes.
    Sweep(RunArgs),
    /// Fit the two-segment curve to an aggregate CSV.
    Fit(FitArgs),
    /// Compare backtracking selection against exhaustive search.
    Validate(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pair counts, e.g. `10` or `1-15` or `5,10,15`.
    #[arg(long)]
    pairs: Option<String>,
    /// Receive antenna counts, same list syntax as --pairs.
    #[arg(long)]
    antennas: Option<String>,
    /// rxdiv, stbc, beamforming, a comma list, or `all`.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "radius-m")]
    radius_m: Option<f64>,
    /// Power caps in dBm, comma separated.
    #[arg(long = "pt-dbm", allow_hyphen_values = true)]
    pt_dbm: Option<String>,
    #[arg(long = "sinr-db", allow_hyphen_values = true)]
    sinr_db: Option<f64>,
    #[arg(long)]
    imax: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Write zeros instead of wall times so outputs are reproducible.
    #[arg(long = "no-timing")]
    no_timing: bool,
    #[arg(long = "k-cap")]
    k_cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Aggregate CSV written by `simulate` or `sweep`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    antennas: Option<usize>,
    #[arg(long = "pt-dbm", allow_hyphen_values = true)]
    pt_dbm: Option<f64>,
}

impl RunArgs {
    fn into_config(self, validate: bool) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| param(format!("cannot read config {}: {e}", path.display())))?;
                ExperimentConfig::from_config_text(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.pairs {
            cfg.pairs = parse_usize_list(v)?;
        }
        if let Some(v) = &self.antennas {
            cfg.antennas = parse_usize_list(v)?;
        }
        if let Some(v) = &self.scheme {
            cfg.schemes = parse_schemes(v)?;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.params.rng_seed = v;
        }
        if let Some(v) = self.radius_m {
            cfg.params.disk_radius_m = v;
        }
        if let Some(v) = &self.pt_dbm {
            cfg.pt_dbm = parse_f64_list(v)?;
            cfg.params.max_power_mw = dbm_to_mw(cfg.pt_dbm[0]);
        }
        if let Some(v) = self.sinr_db {
            cfg.params.sinr_threshold = db_to_linear(v);
        }
        if let Some(v) = self.imax {
            cfg.params.max_iterations = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        if self.no_timing {
            cfg.timing = false;
        }
        if let Some(v) = self.k_cap {
            cfg.k_cap = v;
        }
        if let Some(v) = self.out {
            cfg.out_dir = Some(v);
        }
        if validate {
            cfg.brute_force = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `argv` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T, W>(argv: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAM } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Param(_) => EXIT_PARAM,
        _ => EXIT_RUNTIME,
    }
}

fn dispatch<W: Write>(command: Command, out: &mut W) -> Result<i32> {
    match command {
        Command::Simulate(args) | Command::Sweep(args) => {
            let cfg = args.into_config(false)?;
            let run = run_trials(&cfg)?;
            print_aggregates(&run, out)?;
            finish_run(&run, out)
        }
        Command::Validate(args) => {
            let cfg = args.into_config(true)?;
            let run = run_trials(&cfg)?;
            print_aggregates(&run, out)?;
            let mismatches = run.mismatches();
            writeln!(out, "mismatches: {mismatches}")?;
            let code = finish_run(&run, out)?;
            Ok(if mismatches > 0 { EXIT_MISMATCH } else { code })
        }
        Command::Fit(args) => fit(args, out),
    }
}

fn print_aggregates<W: Write>(run: &RunOutput, out: &mut W) -> Result<()> {
    writeln!(
        out,
        "scheme       K   M  pt_dbm  C(K,M)   stderr   idf_calls  brute_calls"
    )?;
    for a in &run.aggregates {
        let brute = a
            .mean_brute_force_calls
            .map_or_else(|| "-".to_string(), |b| format!("{b:.1}"));
        writeln!(
            out,
            "{:<11} {:>2} {:>3} {:>7} {:>7.3} {:>8.4} {:>11.1} {:>12}",
            a.cell.scheme.name(),
            a.cell.pairs,
            a.cell.antennas,
            a.cell.pt_dbm,
            a.mean_nmax,
            a.stderr,
            a.mean_idf_calls,
            brute
        )?;
    }
    for f in &run.fits {
        writeln!(
            out,
            "fit {} M={} pt={} dBm: a1={:.4} b1={:.4} a2={:.4} b2={:.4}",
            f.scheme,
            f.antennas,
            f.pt_dbm,
            f.fit.diversity.intercept,
            f.fit.diversity.slope,
            f.fit.multiuser.intercept,
            f.fit.multiuser.slope
        )?;
    }
    Ok(())
}

fn finish_run<W: Write>(run: &RunOutput, out: &mut W) -> Result<i32> {
    if let Some(dir) = &run.config.out_dir {
        let files = emit_report(run, dir)?;
        writeln!(
            out,
            "wrote {}",
            files.summary.parent().unwrap_or(dir).display()
        )?;
    }
    if !run.failures.is_empty() {
        writeln!(out, "failed trials: {}", run.failures.len())?;
        return Ok(EXIT_RUNTIME);
    }
    Ok(EXIT_OK)
}

fn fit<W: Write>(args: FitArgs, out: &mut W) -> Result<i32> {
    let rows = read_aggregate_csv(&args.input)?;
    let scheme = args.scheme.as_deref().map(str::parse).transpose()?;
    let mut groups: Vec<(String, usize, f64)> = Vec::new();
    for r in &rows {
        let key = (r.scheme.clone(), r.antennas, r.pt_dbm);
        if scheme.is_some_and(|s: crate::mimo::Scheme| r.scheme().ok() != Some(s)) {
            continue;
        }
        if args.antennas.is_some_and(|m| m != r.antennas)
            || args.pt_dbm.is_some_and(|p| p != r.pt_dbm)
        {
            continue;
        }
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    if groups.is_empty() {
        return Err(param("no aggregate rows match the selection"));
    }
    for (scheme, m, pt) in groups {
        let points: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.scheme == scheme && r.antennas == m && r.pt_dbm == pt)
            .map(|r| (r.pairs, r.mean_nmax))
            .collect();
        let f = fit_two_stage(&points, m)?;
        writeln!(out, "{scheme} M={m} pt_dbm={pt}")?;
        writeln!(
            out,
            "  segment 1 (K=1..{m}): a={} b={} rss={:e}",
            round4(f.diversity.intercept),
            round4(f.diversity.slope),
            f.diversity.rss
        )?;
        writeln!(
            out,
            "  segment 2 (K={}..15): a={} b={} rss={:e}",
            m + 1,
            round4(f.multiuser.intercept),
            round4(f.multiuser.slope),
            f.multiuser.rss
        )?;
    }
    Ok(EXIT_OK)
}

/// Rounds to 4 decimals and clears negative zero.
fn round4(x: f64) -> f64 {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

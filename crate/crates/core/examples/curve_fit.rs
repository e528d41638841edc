// Two-segment linear model of C(K, M): a diversity segment for K <= M and a
// multiuser segment for K > M, fitted by least squares to simulated means.
//
//     cargo run --release --example curve_fit

use mncl::harness::fit::fit_two_stage;
use mncl::harness::{run_trials, ExperimentConfig};
use mncl::mimo::Scheme;

fn run() -> mncl::Result<()> {
    let antennas = 2;
    let cfg = ExperimentConfig {
        schemes: vec![Scheme::Beamforming],
        pairs: (1..=6).collect(),
        antennas: vec![antennas],
        trials: 20,
        timing: false,
        ..ExperimentConfig::default()
    };
    let run = run_trials(&cfg)?;
    let points: Vec<(usize, f64)> = run
        .aggregates
        .iter()
        .map(|a| (a.cell.pairs, a.mean_nmax))
        .collect();
    let fit = fit_two_stage(&points, antennas)?;
    println!(
        "K <= {antennas}: C = {:.3} + {:.3} K\nK >  {antennas}: C = {:.3} + {:.3} K",
        fit.diversity.intercept, fit.diversity.slope, fit.multiuser.intercept, fit.multiuser.slope
    );
    println!("\n K  simulated  model");
    for &(k, c) in &points {
        println!("{k:>2}  {c:>9.2}  {:>5.2}", fit.predict(k));
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

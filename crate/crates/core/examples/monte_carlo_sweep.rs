// Seeded Monte Carlo sweep over pair counts and antenna counts, written out
// as CSV and JSON reports. Results do not depend on the thread count.
//
//     cargo run --release --example monte_carlo_sweep [out-dir]

use mncl::harness::report::emit_report;
use mncl::harness::{run_trials, ExperimentConfig};
use mncl::mimo::Scheme;

fn run() -> mncl::Result<()> {
    let cfg = ExperimentConfig {
        schemes: vec![Scheme::RxDiversity, Scheme::Beamforming],
        pairs: vec![2, 4, 6],
        antennas: vec![1, 2],
        trials: 20,
        timing: false,
        ..ExperimentConfig::default()
    };
    let run = run_trials(&cfg)?;
    println!("scheme       K  M  C(K,M)  stderr  tests/trial");
    for a in &run.aggregates {
        println!(
            "{:<11} {:>2} {:>2}  {:>6.2}  {:>6.3}  {:>11.1}",
            a.cell.scheme.name(),
            a.cell.pairs,
            a.cell.antennas,
            a.mean_nmax,
            a.stderr,
            a.mean_idf_calls
        );
    }

    let single = run_trials(&ExperimentConfig {
        threads: 1,
        ..cfg.clone()
    })?;
    assert_eq!(single.records, run.records);

    if let Some(dir) = std::env::args().nth(1) {
        let files = emit_report(&run, std::path::Path::new(&dir))?;
        println!("summary written to {}", files.summary.display());
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

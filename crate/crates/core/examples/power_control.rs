// Iterative feasibility test for a fixed set of pairs: powers climb from zero
// until every stream meets the SINR target, a pair runs out of power, or the
// iteration budget is spent.
//
//     cargo run --example power_control

use mncl::mimo::{EffectiveChannels, Scheme, SchemeConfig};
use mncl::power::{idf_observed, FeasibilityResult, PairSet};
use mncl::scenario::{build_scenario, SimParams};
use mncl::units::mw_to_dbm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run() -> mncl::Result<()> {
    let params = SimParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let scenario = build_scenario(
        &params,
        5,
        SchemeConfig::new(Scheme::Beamforming, 3),
        &mut rng,
    )?;
    let eff = EffectiveChannels::new(&scenario)?;

    for labels in [vec![1, 2], vec![1, 2, 3], vec![1, 2, 3, 4, 5]] {
        let set = PairSet::from_labels(&labels)?;
        let mut trace = Vec::new();
        let result = idf_observed(&eff, &set, &params, |n, p| {
            if n <= 3 {
                trace.push((
                    n,
                    set.indices()
                        .iter()
                        .map(|&k| p.pair_total(k))
                        .collect::<Vec<_>>(),
                ));
            }
        })?;
        println!("pairs {set}:");
        for (n, totals) in trace {
            let dbm: Vec<String> = totals
                .iter()
                .map(|&p| {
                    if p > 0.0 {
                        format!("{:.1}", mw_to_dbm(p))
                    } else {
                        "-inf".into()
                    }
                })
                .collect();
            println!("  iteration {n}: powers (dBm) [{}]", dbm.join(", "));
        }
        match result {
            FeasibilityResult::Feasible(point) => println!(
                "  feasible after {} iterations, max power {:.1} dBm",
                point.iterations,
                set.indices()
                    .iter()
                    .map(|&k| mw_to_dbm(point.powers.pair_total(k)))
                    .fold(f64::MIN, f64::max)
            ),
            FeasibilityResult::Infeasible { cause, iterations } => {
                println!("  infeasible after {iterations} iterations: {cause:?}")
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

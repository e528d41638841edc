// Largest set of pairs that can be active at once: backtracking search
// against exhaustive enumeration on the same realization.
//
//     cargo run --example link_selection

use mncl::mimo::{EffectiveChannels, Scheme, SchemeConfig};
use mncl::scenario::{build_scenario, SimParams};
use mncl::selection::{bols, brute_force, idf_oracle, BRUTE_FORCE_CAP};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run() -> mncl::Result<()> {
    let params = SimParams::default();
    let pairs = 8;
    for scheme in Scheme::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let scenario = build_scenario(&params, pairs, SchemeConfig::new(scheme, 2), &mut rng)?;
        let eff = EffectiveChannels::new(&scenario)?;
        let fast = bols(pairs, idf_oracle(&eff, &params))?;
        let slow = brute_force(pairs, BRUTE_FORCE_CAP, idf_oracle(&eff, &params))?;
        assert_eq!(fast.n_max, slow.n_max);
        println!(
            "{scheme:<11} n_max = {}  best {}  backtracking {:>3} tests, exhaustive {:>3} tests",
            fast.n_max, fast.best_set, fast.oracle_calls, slow.oracle_calls
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

// MMSE receive weights and SINR for each MIMO scheme on one realization,
// with every pair transmitting at full power.
//
//     cargo run --example mmse_receiver

use mncl::linalg;
use mncl::mimo::{interference_covariance, mmse_solve, EffectiveChannels, Scheme, SchemeConfig};
use mncl::power::PowerVector;
use mncl::scenario::{build_scenario, SimParams};
use mncl::units::linear_to_db;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run() -> mncl::Result<()> {
    let params = SimParams::default();
    let pairs = 3;
    let antennas = 2;
    for scheme in Scheme::ALL {
        // same seed for every scheme: identical placements, comparable numbers
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let scenario = build_scenario(
            &params,
            pairs,
            SchemeConfig::new(scheme, antennas),
            &mut rng,
        )?;
        let eff = EffectiveChannels::new(&scenario)?;

        let mut powers = PowerVector::zeros(pairs, eff.streams());
        for k in 0..pairs {
            for l in 0..eff.streams() {
                powers.set(k, l, params.max_power_mw / eff.streams() as f64);
            }
        }

        println!("{scheme} (receiver dimension {}):", eff.dimension());
        for k in 0..pairs {
            for l in 0..eff.streams() {
                let phi = interference_covariance(&eff, k, l, &powers)?;
                let h = eff.desired(k, l);
                let out = mmse_solve(&phi, h)?;
                let sinr = powers.get(k, l) * eff.gain(k, k) * out.quadratic;
                println!(
                    "  pair {} stream {}: SINR {:>6.2} dB, |w^H h| = {:.3}",
                    k + 1,
                    l + 1,
                    linear_to_db(sinr),
                    linalg::dot(&out.weight, h).norm()
                );
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

// Draw one network realization: pairs dropped in a disk, path loss from the
// log-distance model, Rayleigh fading per antenna, thermal noise floor.
//
//     cargo run --example scenario_sampling

use mncl::mimo::{Scheme, SchemeConfig};
use mncl::scenario::{build_scenario, path_gain, SimParams};
use mncl::units::linear_to_db;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run() -> mncl::Result<()> {
    let params = SimParams::default();
    println!("noise floor: {:.3e} mW", params.noise_power());
    for d in [1.0, 10.0, 50.0, 100.0] {
        println!(
            "path gain at {d:>5} m: {:>7.1} dB",
            linear_to_db(path_gain(d, &params)?)
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let scenario = build_scenario(
        &params,
        4,
        SchemeConfig::new(Scheme::Beamforming, 2),
        &mut rng,
    )?;
    let ch = &scenario.channels;
    println!("\npair  tx (m)            rx (m)            link gain (dB)");
    for k in 0..scenario.pair_count() {
        let tx = scenario.topology.tx_positions[k];
        let rx = scenario.topology.rx_positions[k];
        println!(
            "{:>4}  ({:>6.1}, {:>6.1})  ({:>6.1}, {:>6.1})  {:>8.1}",
            k + 1,
            tx.x,
            tx.y,
            rx.x,
            rx.y,
            linear_to_db(ch.gain(k, k))
        );
    }
    println!(
        "\nfading vector Tx1 antenna 1 -> Rx1 ({} receive antennas): {:?}",
        ch.rx_antennas(),
        ch.fading(0, 0, 0)
    );

    // realizations are plain data and round-trip through JSON
    let json = scenario.to_json()?;
    assert_eq!(mncl::scenario::Scenario::from_json(&json)?, scenario);
    println!("scenario JSON: {} bytes", json.len());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

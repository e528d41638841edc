#![allow(dead_code)]

use mncl::mimo::{EffectiveChannels, Scheme, SchemeConfig};
use mncl::scenario::{build_scenario, Scenario, SimParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scenario(seed: u64, pairs: usize, scheme: Scheme, antennas: usize) -> Scenario {
    let params = SimParams::default();
    build_scenario(
        &params,
        pairs,
        SchemeConfig::new(scheme, antennas),
        &mut rng(seed),
    )
    .unwrap()
}

pub fn model(seed: u64, pairs: usize, scheme: Scheme, antennas: usize) -> EffectiveChannels {
    EffectiveChannels::new(&scenario(seed, pairs, scheme, antennas)).unwrap()
}

pub fn random_scheme<R: Rng>(rng: &mut R) -> Scheme {
    Scheme::ALL[rng.random_range(0..3)]
}

pub fn cn<R: Rng>(rng: &mut R) -> Complex64 {
    mncl::scenario::complex_gaussian(rng)
}

pub fn random_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| cn(rng)).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

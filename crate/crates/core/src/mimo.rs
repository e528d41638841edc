//! Effective channels for the three MIMO schemes and the MMSE receiver.
//!
//! Every scheme is reduced to the same shape: each pair carries one or two
//! streams, and each (receiver, transmitter, stream) triple has an effective
//! channel vector of dimension `D`. Receive diversity and transmit
//! beamforming use `D = M`; Alamouti STBC stacks the two time slots into
//! `D = 2M`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, numeric, param, Error, Result};
use crate::linalg::{self, CMat, Cholesky};
use crate::power::PowerVector;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// `1 x M` receive diversity (also the SISO baseline at `M = 1`).
    RxDiversity,
    /// `2 x M` Alamouti space-time block code.
    Stbc,
    /// `M x M` transmit beamforming along the dominant right singular vector.
    Beamforming,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::RxDiversity, Scheme::Stbc, Scheme::Beamforming];

    pub fn streams(self) -> usize {
        match self {
            Scheme::Stbc => 2,
            Scheme::RxDiversity | Scheme::Beamforming => 1,
        }
    }

    pub fn tx_antennas(self, rx_antennas: usize) -> usize {
        match self {
            Scheme::RxDiversity => 1,
            Scheme::Stbc => 2,
            Scheme::Beamforming => rx_antennas,
        }
    }

    /// Short name used in CLI flags and reports.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::RxDiversity => "rxdiv",
            Scheme::Stbc => "stbc",
            Scheme::Beamforming => "beamforming",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rxdiv" | "rxdiversity" | "rx-diversity" => Ok(Scheme::RxDiversity),
            "stbc" => Ok(Scheme::Stbc),
            "beamforming" | "bf" => Ok(Scheme::Beamforming),
            other => Err(param(format!(
                "unknown scheme '{other}' (expected rxdiv, stbc or beamforming)"
            ))),
        }
    }
}

/// A scheme together with its receive-antenna count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub rx_antennas: usize,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, rx_antennas: usize) -> Self {
        Self {
            scheme,
            rx_antennas,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rx_antennas == 0 {
            return Err(param("receive antenna count must be at least 1"));
        }
        Ok(())
    }

    pub fn streams(&self) -> usize {
        self.scheme.streams()
    }

    pub fn tx_antennas(&self) -> usize {
        self.scheme.tx_antennas(self.rx_antennas)
    }

    /// Dimension of the effective receive space.
    pub fn dimension(&self) -> usize {
        match self.scheme {
            Scheme::Stbc => 2 * self.rx_antennas,
            _ => self.rx_antennas,
        }
    }
}

/// Transmit weight for beamforming: the unit dominant eigenvector of
/// `H_kkᴴ H_kk`, where column `m` of `H_kk` is the fading vector from
/// transmit antenna `m`.
pub fn beamforming_weight(h_kk: &CMat) -> Result<Vec<Complex64>> {
    if h_kk.as_slice().iter().any(|z| !z.is_finite()) {
        return Err(numeric("non-finite channel matrix"));
    }
    let (u, _) = linalg::dominant_eigenvector(&h_kk.gram())?;
    Ok(u)
}

/// Alamouti stacking of the two per-antenna channels into the
/// `[slot 1; conj(slot 2)]` receive domain.
pub fn stbc_stack(h1: &[Complex64], h2: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    assert_eq!(h1.len(), h2.len(), "antenna vectors must have equal length");
    let first = h1
        .iter()
        .copied()
        .chain(h2.iter().map(|z| z.conj()))
        .collect();
    let second = h2
        .iter()
        .copied()
        .chain(h1.iter().map(|z| -z.conj()))
        .collect();
    (first, second)
}

/// Effective per-stream channel vectors of one scenario.
#[derive(Debug, Clone)]
pub struct EffectiveChannels {
    config: SchemeConfig,
    pairs: usize,
    dim: usize,
    gains: Vec<f64>,
    noise_power: f64,
    /// Vectors indexed by (rx `k`, tx `i`, stream `l`).
    vectors: Vec<Complex64>,
    beam_weights: Option<Vec<Vec<Complex64>>>,
}

impl EffectiveChannels {
    /// Builds effective channels, computing beamforming weights once per
    /// scenario where the scheme needs them.
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let config = scenario.scheme;
        let ch = &scenario.channels;
        let k = ch.pairs();
        let m = config.rx_antennas;
        if ch.rx_antennas() != m || ch.tx_antennas() != config.tx_antennas() {
            return Err(contract("channel tensor does not match the scheme"));
        }
        let dim = config.dimension();
        let streams = config.streams();
        let mut vectors = Vec::with_capacity(k * k * streams * dim);

        let beam_weights = match config.scheme {
            Scheme::Beamforming => Some(
                (0..k)
                    .map(|i| {
                        let cols: Vec<Vec<Complex64>> =
                            (0..m).map(|a| ch.fading(i, i, a).to_vec()).collect();
                        beamforming_weight(&CMat::from_columns(&cols))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };

        for rx in 0..k {
            for tx in 0..k {
                match config.scheme {
                    Scheme::RxDiversity => vectors.extend_from_slice(ch.fading(rx, tx, 0)),
                    Scheme::Stbc => {
                        let (a, b) = stbc_stack(ch.fading(rx, tx, 0), ch.fading(rx, tx, 1));
                        vectors.extend(a);
                        vectors.extend(b);
                    }
                    Scheme::Beamforming => {
                        // the interferer steers with its own weight
                        let u = &beam_weights.as_ref().expect("weights built above")[tx];
                        let mut v = vec![Complex64::new(0.0, 0.0); m];
                        for (a, ua) in u.iter().enumerate() {
                            for (dst, h) in v.iter_mut().zip(ch.fading(rx, tx, a)) {
                                *dst += h * ua;
                            }
                        }
                        vectors.extend(v);
                    }
                }
            }
        }

        Ok(Self {
            config,
            pairs: k,
            dim,
            gains: (0..k * k).map(|i| ch.gain(i / k, i % k)).collect(),
            noise_power: ch.noise_power(),
            vectors,
            beam_weights,
        })
    }

    /// Beamforming model with the transmit weights supplied explicitly.
    pub fn with_beam_weights(scenario: &Scenario, weights: Vec<Vec<Complex64>>) -> Result<Self> {
        if scenario.scheme.scheme != Scheme::Beamforming {
            return Err(contract(
                "explicit beam weights need the beamforming scheme",
            ));
        }
        let m = scenario.scheme.rx_antennas;
        let k = scenario.pair_count();
        if weights.len() != k || weights.iter().any(|u| u.len() != m) {
            return Err(contract("beam weight dimensions do not match the scenario"));
        }
        let mut eff = Self::new(scenario)?;
        let ch = &scenario.channels;
        for rx in 0..k {
            for (tx, u) in weights.iter().enumerate() {
                let mut v = vec![Complex64::new(0.0, 0.0); m];
                for (a, ua) in u.iter().enumerate() {
                    for (dst, h) in v.iter_mut().zip(ch.fading(rx, tx, a)) {
                        *dst += h * ua;
                    }
                }
                let start = eff.offset(rx, tx, 0);
                eff.vectors[start..start + m].copy_from_slice(&v);
            }
        }
        eff.beam_weights = Some(weights);
        Ok(eff)
    }

    pub fn config(&self) -> SchemeConfig {
        self.config
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn streams(&self) -> usize {
        self.config.streams()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn gain(&self, rx: usize, tx: usize) -> f64 {
        self.gains[rx * self.pairs + tx]
    }

    pub fn beam_weights(&self) -> Option<&[Vec<Complex64>]> {
        self.beam_weights.as_deref()
    }

    fn offset(&self, rx: usize, tx: usize, stream: usize) -> usize {
        ((rx * self.pairs + tx) * self.streams() + stream) * self.dim
    }

    /// Effective vector seen at Rx `rx` for stream `stream` of Tx `tx`.
    pub fn vector(&self, rx: usize, tx: usize, stream: usize) -> &[Complex64] {
        let start = self.offset(rx, tx, stream);
        &self.vectors[start..start + self.dim]
    }

    /// Desired channel of stream `stream` of pair `k`.
    pub fn desired(&self, k: usize, stream: usize) -> &[Complex64] {
        self.vector(k, k, stream)
    }
}

/// Interference-plus-noise covariance seen by stream `stream` of pair `k`:
/// every other stream with nonzero power contributes `P ρ h hᴴ`, including
/// the pair's own second STBC stream, plus `σ² I`.
pub fn interference_covariance(
    eff: &EffectiveChannels,
    k: usize,
    stream: usize,
    powers: &PowerVector,
) -> Result<CMat> {
    if powers.pairs() != eff.pairs() || powers.streams() != eff.streams() {
        return Err(contract("power vector does not match the channel model"));
    }
    if k >= eff.pairs() || stream >= eff.streams() {
        return Err(contract(format!("stream ({k}, {stream}) out of range")));
    }
    let mut phi = CMat::scaled_identity(eff.dimension(), eff.noise_power());
    for i in 0..eff.pairs() {
        for l in 0..eff.streams() {
            if i == k && l == stream {
                continue;
            }
            let p = powers.get(i, l);
            if p > 0.0 {
                phi.add_outer(p * eff.gain(k, i), eff.vector(k, i, l));
            }
        }
    }
    Ok(phi)
}

/// MMSE combiner and the quadratic form `hᴴ Φ⁻¹ h`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmseOutput {
    pub weight: Vec<Complex64>,
    /// `hᴴ Φ⁻¹ h`; the SINR is this times the desired stream's received power.
    pub quadratic: f64,
}

/// `w = Φ⁻¹h / (hᴴΦ⁻¹h)` through a Cholesky solve.
pub fn mmse_solve(phi: &CMat, h: &[Complex64]) -> Result<MmseOutput> {
    if phi.rows() != h.len() || phi.cols() != h.len() {
        return Err(contract("covariance and channel dimensions differ"));
    }
    let x = Cholesky::factor(phi)?.solve(h);
    let q = linalg::dot(h, &x).re;
    if !(q > 0.0) || !q.is_finite() {
        return Err(numeric(format!("degenerate MMSE quadratic form {q:e}")));
    }
    let weight = x.into_iter().map(|z| z / q).collect();
    Ok(MmseOutput {
        weight,
        quadratic: q,
    })
}

pub fn mmse_weight(phi: &CMat, h: &[Complex64]) -> Result<Vec<Complex64>> {
    mmse_solve(phi, h).map(|o| o.weight)
}

/// Post-MMSE SINR `P ρ hᴴ Φ⁻¹ h`.
pub fn mmse_sinr(power: f64, gain: f64, h: &[Complex64], phi: &CMat) -> Result<f64> {
    if power == 0.0 {
        return Ok(0.0);
    }
    Ok(power * gain * mmse_solve(phi, h)?.quadratic)
}

/// SINR achieved by an arbitrary combiner `w`:
/// `P ρ |wᴴh|² / (wᴴ Φ w)`.
pub fn sinr_with_weight(
    power: f64,
    gain: f64,
    h: &[Complex64],
    phi: &CMat,
    w: &[Complex64],
) -> f64 {
    let signal = power * gain * linalg::dot(w, h).norm_sqr();
    let denom = linalg::dot(w, &phi.mul_vec(w)).re;
    signal / denom
}

//! Random network realizations: node placement, path loss, Rayleigh fading
//! and receiver noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::mimo::SchemeConfig;
use crate::units::{db_to_linear, dbm_to_mw};

/// Physical and algorithmic parameters of a simulation.
///
/// Powers and thresholds are stored linearly (mW and plain ratios); use the
/// `*_dbm`/`*_db` constructors at configuration boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub pathloss_exponent: f64,
    /// Reference distance `d0` in meters.
    pub reference_distance_m: f64,
    /// Path loss at the reference distance, dB.
    pub reference_loss_db: f64,
    /// Thermal noise power spectral density, dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    /// Per-pair transmit power cap, mW.
    pub max_power_mw: f64,
    /// Per-stream SINR floor, linear.
    pub sinr_threshold: f64,
    pub disk_radius_m: f64,
    pub max_iterations: usize,
    /// Relative tolerance used for fixed-point self-consistency checks.
    pub convergence_tolerance: f64,
    pub rng_seed: u64,
}

impl Default for SimParams {
    /// The reference parameter set: 1 m / 46 dB reference loss with exponent
    /// 3, -174 dBm/Hz noise, 4 dB noise figure, 1 MHz bandwidth, 20 dBm power
    /// cap, 10 dB SINR threshold and a 100 m disk.
    fn default() -> Self {
        Self {
            pathloss_exponent: 3.0,
            reference_distance_m: 1.0,
            reference_loss_db: 46.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 4.0,
            bandwidth_hz: 1e6,
            max_power_mw: dbm_to_mw(20.0),
            sinr_threshold: db_to_linear(10.0),
            disk_radius_m: 100.0,
            max_iterations: 200,
            convergence_tolerance: 1e-8,
            rng_seed: 1,
        }
    }
}

impl SimParams {
    pub fn with_max_power_dbm(mut self, dbm: f64) -> Self {
        self.max_power_mw = dbm_to_mw(dbm);
        self
    }

    pub fn with_sinr_threshold_db(mut self, db: f64) -> Self {
        self.sinr_threshold = db_to_linear(db);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pathloss exponent", self.pathloss_exponent),
            ("reference distance", self.reference_distance_m),
            ("bandwidth", self.bandwidth_hz),
            ("max power", self.max_power_mw),
            ("sinr threshold", self.sinr_threshold),
            ("convergence tolerance", self.convergence_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(param(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("reference loss", self.reference_loss_db),
            ("noise psd", self.noise_psd_dbm_hz),
            ("noise figure", self.noise_figure_db),
        ] {
            if !v.is_finite() {
                return Err(param(format!("{name} must be finite")));
            }
        }
        if !(self.disk_radius_m >= self.reference_distance_m) || !self.disk_radius_m.is_finite() {
            return Err(param(format!(
                "disk radius {} m is below the reference distance {} m",
                self.disk_radius_m, self.reference_distance_m
            )));
        }
        if self.max_iterations == 0 {
            return Err(param("max iterations must be at least 1"));
        }
        Ok(())
    }

    /// Receiver noise power in mW.
    pub fn noise_power(&self) -> f64 {
        noise_power(self)
    }
}

/// A 2-D point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub tx_positions: Vec<Point>,
    pub rx_positions: Vec<Point>,
}

impl Topology {
    pub fn pair_count(&self) -> usize {
        self.tx_positions.len()
    }
}

/// Large-scale gains, small-scale fading and noise for one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    pairs: usize,
    tx_antennas: usize,
    rx_antennas: usize,
    /// `gains[k * K + j]` is the power ratio from Tx `j` to Rx `k`.
    gains: Vec<f64>,
    /// Fading vectors indexed by (rx `k`, tx `j`, tx antenna `m`), each of
    /// length `rx_antennas`.
    fading: Vec<Complex64>,
    noise_power: f64,
}

impl ChannelSet {
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx_antennas
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx_antennas
    }

    /// Power ratio ρ from Tx `tx` to Rx `rx`.
    pub fn gain(&self, rx: usize, tx: usize) -> f64 {
        self.gains[rx * self.pairs + tx]
    }

    /// Fading vector from antenna `antenna` of Tx `tx` to the array of Rx `rx`.
    pub fn fading(&self, rx: usize, tx: usize, antenna: usize) -> &[Complex64] {
        let m = self.rx_antennas;
        let start = ((rx * self.pairs + tx) * self.tx_antennas + antenna) * m;
        &self.fading[start..start + m]
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }
}

/// One realization of node locations and channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: SimParams,
    pub scheme: SchemeConfig,
    pub topology: Topology,
    pub channels: ChannelSet,
}

impl Scenario {
    pub fn pair_count(&self) -> usize {
        self.topology.pair_count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_radius(radius: f64, params: &SimParams) -> Result<()> {
    if !(radius >= params.reference_distance_m) || !radius.is_finite() {
        return Err(param(format!(
            "disk radius {radius} m is below the reference distance {} m",
            params.reference_distance_m
        )));
    }
    Ok(())
}

/// Draws `K` transmitters then `K` receivers uniformly over a disk.
pub fn sample_topology<R: Rng + ?Sized>(
    pairs: usize,
    radius: f64,
    params: &SimParams,
    rng: &mut R,
) -> Result<Topology> {
    if pairs == 0 {
        return Err(param("pair count must be at least 1"));
    }
    check_radius(radius, params)?;
    let mut point = || {
        let r = radius * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        Point {
            x: r * theta.cos(),
            y: r * theta.sin(),
        }
    };
    let tx_positions = (0..pairs).map(|_| point()).collect();
    let rx_positions = (0..pairs).map(|_| point()).collect();
    Ok(Topology {
        tx_positions,
        rx_positions,
    })
}

/// Power ratio after log-distance path loss; distances below `d0` are
/// clamped to `d0`.
pub fn path_gain(distance: f64, params: &SimParams) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(param(format!("distance must be positive, got {distance}")));
    }
    Ok(clamped_gain(distance, params))
}

fn clamped_gain(distance: f64, params: &SimParams) -> f64 {
    let d0 = params.reference_distance_m;
    let d = distance.max(d0);
    let loss_db = params.reference_loss_db + 10.0 * params.pathloss_exponent * (d / d0).log10();
    10f64.powf(-loss_db / 10.0)
}

/// Thermal noise power over the band plus noise figure, in mW.
pub fn noise_power(params: &SimParams) -> f64 {
    let dbm = params.noise_psd_dbm_hz + 10.0 * params.bandwidth_hz.log10() + params.noise_figure_db;
    dbm_to_mw(dbm)
}

/// One circularly symmetric CN(0, 1) draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws the i.i.d. CN(0, 1) fading tensor, ordered (rx, tx, tx antenna, rx
/// antenna).
pub fn sample_channels<R: Rng + ?Sized>(
    pairs: usize,
    tx_antennas: usize,
    rx_antennas: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if pairs == 0 || tx_antennas == 0 || rx_antennas == 0 {
        return Err(param("pair and antenna counts must be at least 1"));
    }
    let len = pairs * pairs * tx_antennas * rx_antennas;
    Ok((0..len).map(|_| complex_gaussian(rng)).collect())
}

/// Samples a complete realization for `pairs` transceiver pairs.
///
/// The topology is drawn before the fading, so two schemes fed the same
/// random stream share node locations.
pub fn build_scenario<R: Rng + ?Sized>(
    params: &SimParams,
    pairs: usize,
    scheme: SchemeConfig,
    rng: &mut R,
) -> Result<Scenario> {
    params.validate()?;
    scheme.validate()?;
    let topology = sample_topology(pairs, params.disk_radius_m, params, rng)?;
    let n_tx = scheme.tx_antennas();
    let m = scheme.rx_antennas;
    let fading = sample_channels(pairs, n_tx, m, rng)?;
    let gains = (0..pairs)
        .flat_map(|k| {
            let topology = &topology;
            (0..pairs).map(move |j| {
                let d = topology.tx_positions[j].distance(topology.rx_positions[k]);
                clamped_gain(d, params)
            })
        })
        .collect();
    Ok(Scenario {
        params: params.clone(),
        scheme,
        channels: ChannelSet {
            pairs,
            tx_antennas: n_tx,
            rx_antennas: m,
            gains,
            fading,
            noise_power: noise_power(params),
        },
        topology,
    })
}

/// Assembles a scenario from explicit positions and fading.
///
/// Used for hand-built instances; `fading` follows the ordering of
/// [`sample_channels`].
pub fn scenario_from_parts(
    params: &SimParams,
    scheme: SchemeConfig,
    topology: Topology,
    fading: Vec<Complex64>,
) -> Result<Scenario> {
    params.validate()?;
    scheme.validate()?;
    let pairs = topology.pair_count();
    if pairs == 0 || topology.rx_positions.len() != pairs {
        return Err(param(
            "topology must hold the same nonzero number of Tx and Rx nodes",
        ));
    }
    let n_tx = scheme.tx_antennas();
    let m = scheme.rx_antennas;
    if fading.len() != pairs * pairs * n_tx * m {
        return Err(crate::error::contract(format!(
            "fading tensor has {} entries, expected {}",
            fading.len(),
            pairs * pairs * n_tx * m
        )));
    }
    let gains = (0..pairs)
        .flat_map(|k| {
            let topology = &topology;
            (0..pairs).map(move |j| {
                clamped_gain(
                    topology.tx_positions[j].distance(topology.rx_positions[k]),
                    params,
                )
            })
        })
        .collect();
    Ok(Scenario {
        params: params.clone(),
        scheme,
        channels: ChannelSet {
            pairs,
            tx_antennas: n_tx,
            rx_antennas: m,
            gains,
            fading,
            noise_power: noise_power(params),
        },
        topology,
    })
}

/// Like [`scenario_from_parts`] but with the gain matrix given directly
/// (row `k`, column `j` is Tx `j` to Rx `k`) instead of derived from
/// positions. The stored topology places every node at the origin.
pub fn scenario_from_gains(
    params: &SimParams,
    scheme: SchemeConfig,
    gains: Vec<f64>,
    fading: Vec<Complex64>,
) -> Result<Scenario> {
    let pairs = (gains.len() as f64).sqrt().round() as usize;
    if pairs == 0 || pairs * pairs != gains.len() {
        return Err(crate::error::contract(
            "gain matrix must be square and nonempty",
        ));
    }
    if gains.iter().any(|g| !(*g > 0.0)) {
        return Err(param("gains must be positive"));
    }
    let origin = Point { x: 0.0, y: 0.0 };
    let topology = Topology {
        tx_positions: vec![origin; pairs],
        rx_positions: vec![origin; pairs],
    };
    let mut scenario = scenario_from_parts(params, scheme, topology, fading)?;
    scenario.channels.gains = gains;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimo::Scheme;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_gains() {
        let p = SimParams::default();
        assert_eq!(path_gain(1.0, &p).unwrap(), 10f64.powf(-4.6));
        assert!(rel(path_gain(10.0, &p).unwrap(), 10f64.powf(-7.6)) < 1e-12);
        assert!(rel(path_gain(100.0, &p).unwrap(), 10f64.powf(-10.6)) < 1e-12);
        // below d0 clamps
        assert_eq!(path_gain(0.3, &p).unwrap(), path_gain(1.0, &p).unwrap());
        assert!(matches!(path_gain(0.0, &p), Err(crate::Error::Param(_))));
        assert!(matches!(path_gain(-2.0, &p), Err(crate::Error::Param(_))));
    }

    #[test]
    fn noise_examples() {
        let p = SimParams::default();
        assert!(rel(noise_power(&p), 1e-11) < 1e-12);
        let q = SimParams {
            noise_figure_db: 0.0,
            bandwidth_hz: 1.0,
            ..p.clone()
        };
        assert!(rel(noise_power(&q), 10f64.powf(-17.4)) < 1e-12);
        let r = SimParams {
            bandwidth_hz: 20e6,
            ..p
        };
        let dbm = crate::units::mw_to_dbm(noise_power(&r));
        assert!((dbm - (-96.9897)).abs() < 1e-3, "{dbm}");
    }

    #[test]
    fn topology_in_disk() {
        let p = SimParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = sample_topology(1, 100.0, &p, &mut rng).unwrap();
        assert_eq!(t.tx_positions.len(), 1);
        assert_eq!(t.rx_positions.len(), 1);
        assert!(t.tx_positions[0].norm() <= 100.0 && t.rx_positions[0].norm() <= 100.0);
        assert!(matches!(
            sample_topology(3, 0.5, &p, &mut rng),
            Err(crate::Error::Param(_))
        ));
        assert!(matches!(
            sample_topology(0, 100.0, &p, &mut rng),
            Err(crate::Error::Param(_))
        ));
    }

    #[test]
    fn radial_second_moment() {
        // E[r^2 / R^2] = ∫0^1 s^2 · 2s ds = 1/2 for the uniform disk.
        let p = SimParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut acc = 0.0;
        let mut n = 0usize;
        while n < 100_000 {
            let t = sample_topology(4, 100.0, &p, &mut rng).unwrap();
            for pt in t.tx_positions.iter().chain(&t.rx_positions) {
                acc += (pt.norm() / 100.0).powi(2);
                n += 1;
            }
        }
        let mean = acc / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn fading_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // 2 pairs x 1 tx antenna x 2 rx antennas = 8 entries per draw
        let draws = 125_000;
        let mut power = 0.0;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut corr = Complex64::new(0.0, 0.0);
        let mut n = 0usize;
        for _ in 0..draws {
            let h = sample_channels(2, 1, 2, &mut rng).unwrap();
            for z in &h {
                power += z.norm_sqr();
                mean += z;
                n += 1;
            }
            for pair in h.chunks_exact(2) {
                corr += pair[0] * pair[1].conj();
            }
        }
        assert_eq!(n, 1_000_000);
        let nf = n as f64;
        assert!((power / nf - 1.0).abs() < 0.01);
        assert!((mean / nf).norm() < 0.01);
        assert!((corr / (nf / 2.0)).norm() < 0.01);
    }

    #[test]
    fn scenario_shape_and_determinism() {
        let p = SimParams::default();
        let scheme = SchemeConfig::new(Scheme::RxDiversity, 2);
        let a = build_scenario(&p, 2, scheme, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = build_scenario(&p, 2, scheme, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.channels.tx_antennas(), 1);
        assert_eq!(a.channels.fading(1, 0, 0).len(), 2);
        assert_eq!(a.channels.gains.len(), 4);
        let back = Scenario::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);

        for (scheme, n_tx) in [
            (SchemeConfig::new(Scheme::Stbc, 3), 2),
            (SchemeConfig::new(Scheme::Beamforming, 3), 3),
        ] {
            let s = build_scenario(&p, 2, scheme, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
            assert_eq!(s.channels.tx_antennas(), n_tx);
            // topology drawn first, so shared across schemes
            assert_eq!(s.topology, a.topology);
        }
    }

    #[test]
    fn coincident_nodes_clamp() {
        let p = SimParams::default();
        let scheme = SchemeConfig::new(Scheme::RxDiversity, 1);
        let here = Point { x: 5.0, y: -3.0 };
        let topo = Topology {
            tx_positions: vec![here],
            rx_positions: vec![here],
        };
        let s = scenario_from_parts(&p, scheme, topo, vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(s.channels.gain(0, 0), path_gain(1.0, &p).unwrap());
    }

    #[test]
    fn gain_strictly_decreasing() {
        let p = SimParams::default();
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let d = 1.0 + i as f64 * 0.5;
            let g = path_gain(d, &p).unwrap();
            assert!(g < last);
            last = g;
        }
    }
}

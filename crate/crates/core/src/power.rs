//! QoS power control and the iterative feasibility test (IDF).
//!
//! The mapping `m(P)` sets every active stream's next power to the level
//! that would exactly meet the SINR threshold against the interference of
//! the current state, using the MMSE combiner recomputed at that state.
//! Starting from zero power the iterates increase monotonically towards the
//! minimal fixed point when one exists; IDF watches them and stops on the
//! first of: a pair exceeding the power cap, every stream meeting the
//! threshold, or the iteration cap.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::linalg::{self, CMat};
use crate::mimo::{self, EffectiveChannels};
use crate::scenario::SimParams;

/// Relative slack on SINR comparisons against the threshold.
pub const SINR_SLACK: f64 = 1e-12;

/// Sorted set of 0-based pair indices. Displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct PairSet(Vec<usize>);

impl PairSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds a set from strictly increasing indices.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(contract(format!(
                "pair indices must be strictly increasing: {indices:?}"
            )));
        }
        Ok(Self(indices))
    }

    /// Sorts and deduplicates arbitrary indices.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    /// Set with 1-based labels, as used when talking about pairs `1..=K`.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(contract("pair labels start at 1"));
        }
        Self::new(labels.iter().map(|l| l - 1).collect())
    }

    pub fn full(k: usize) -> Self {
        Self((0..k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().map(|k| k + 1).collect()
    }

    pub fn is_subset_of(&self, other: &PairSet) -> bool {
        self.0.iter().all(|&k| other.contains(k))
    }

    pub(crate) fn check_range(&self, k: usize) -> Result<()> {
        match self.max() {
            Some(m) if m >= k => Err(contract(format!("pair {} exceeds K = {k}", m + 1))),
            _ => Ok(()),
        }
    }

    pub(crate) fn indices_mut(&mut self) -> &mut Vec<usize> {
        &mut self.0
    }
}

impl fmt::Display for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        f.write_str("}")
    }
}

/// Per-pair, per-stream transmit powers in mW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerVector {
    pairs: usize,
    streams: usize,
    values: Vec<f64>,
}

impl PowerVector {
    pub fn zeros(pairs: usize, streams: usize) -> Self {
        Self {
            pairs,
            streams,
            values: vec![0.0; pairs * streams],
        }
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    pub fn get(&self, k: usize, stream: usize) -> f64 {
        self.values[k * self.streams + stream]
    }

    pub fn set(&mut self, k: usize, stream: usize, p: f64) {
        self.values[k * self.streams + stream] = p;
    }

    /// Total power of pair `k` over its streams.
    pub fn pair_total(&self, k: usize) -> f64 {
        self.values[k * self.streams..(k + 1) * self.streams]
            .iter()
            .sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            values: self.values.iter().map(|p| p * a).collect(),
            ..self.clone()
        }
    }

    /// Zeroes every pair outside `set`.
    pub fn restricted_to(&self, set: &PairSet) -> Self {
        let mut out = Self::zeros(self.pairs, self.streams);
        for &k in set.indices() {
            for l in 0..self.streams {
                out.set(k, l, self.get(k, l));
            }
        }
        out
    }
}

/// Why a pair set was declared infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibleCause {
    /// Some pair's power exceeded the cap.
    PowerExceeded,
    /// The threshold was not reached within the iteration budget.
    IterationLimit,
}

/// Powers, combiners and SINRs at which every active stream meets the
/// threshold. Weights and SINRs are listed per active stream, in pair order
/// then stream order.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub powers: PowerVector,
    pub weights: Vec<Vec<Complex64>>,
    pub sinrs: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityResult {
    Feasible(OperatingPoint),
    Infeasible {
        cause: InfeasibleCause,
        iterations: usize,
    },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }

    pub fn iterations(&self) -> usize {
        match self {
            FeasibilityResult::Feasible(p) => p.iterations,
            FeasibilityResult::Infeasible { iterations, .. } => *iterations,
        }
    }
}

/// MMSE state of one active stream at a given power vector.
#[derive(Debug, Clone)]
struct StreamState {
    pair: usize,
    stream: usize,
    weight: Vec<Complex64>,
    sinr: f64,
}

fn check_inputs(eff: &EffectiveChannels, set: &PairSet, powers: &PowerVector) -> Result<()> {
    set.check_range(eff.pairs())?;
    if powers.pairs() != eff.pairs() || powers.streams() != eff.streams() {
        return Err(contract("power vector does not match the channel model"));
    }
    Ok(())
}

/// Covariance restricted to the active set; inactive pairs carry no power.
fn active_covariance(
    eff: &EffectiveChannels,
    set: &PairSet,
    k: usize,
    stream: usize,
    powers: &PowerVector,
) -> CMat {
    let mut phi = CMat::scaled_identity(eff.dimension(), eff.noise_power());
    for &i in set.indices() {
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
    phi
}

fn evaluate(
    eff: &EffectiveChannels,
    set: &PairSet,
    powers: &PowerVector,
) -> Result<Vec<StreamState>> {
    let mut out = Vec::with_capacity(set.len() * eff.streams());
    for &k in set.indices() {
        for l in 0..eff.streams() {
            let phi = active_covariance(eff, set, k, l, powers);
            let mmse = mimo::mmse_solve(&phi, eff.desired(k, l))?;
            out.push(StreamState {
                pair: k,
                stream: l,
                sinr: powers.get(k, l) * eff.gain(k, k) * mmse.quadratic,
                weight: mmse.weight,
            });
        }
    }
    Ok(out)
}

/// Applies the update to every active stream given its MMSE combiner at the
/// current powers.
fn update(
    eff: &EffectiveChannels,
    set: &PairSet,
    powers: &PowerVector,
    states: &[StreamState],
    threshold: f64,
) -> PowerVector {
    let mut next = PowerVector::zeros(eff.pairs(), eff.streams());
    for st in states {
        let (k, l) = (st.pair, st.stream);
        let w = &st.weight;
        let mut interference = 0.0;
        for &i in set.indices() {
            for li in 0..eff.streams() {
                if i == k && li == l {
                    continue;
                }
                let p = powers.get(i, li);
                if p > 0.0 {
                    interference +=
                        p * eff.gain(k, i) * linalg::dot(w, eff.vector(k, i, li)).norm_sqr();
                }
            }
        }
        let noise = eff.noise_power() * linalg::norm_sqr(w);
        next.set(k, l, threshold * (interference + noise) / eff.gain(k, k));
    }
    next
}

/// One application of the power mapping `m`: `P_{n+1} = m(P_n)`.
///
/// Pairs outside `set` get zero power.
pub fn power_step(
    eff: &EffectiveChannels,
    set: &PairSet,
    powers: &PowerVector,
    threshold: f64,
) -> Result<PowerVector> {
    check_inputs(eff, set, powers)?;
    let restricted = powers.restricted_to(set);
    let states = evaluate(eff, set, &restricted)?;
    Ok(update(eff, set, &restricted, &states, threshold))
}

fn meets_threshold(sinr: f64, threshold: f64) -> bool {
    sinr >= threshold * (1.0 - SINR_SLACK)
}

fn within_cap(set: &PairSet, powers: &PowerVector, cap: f64) -> bool {
    set.indices().iter().all(|&k| powers.pair_total(k) <= cap)
}

/// Whether every active stream meets the SINR threshold under MMSE
/// reception at `powers`, with every active pair within the power cap.
pub fn is_supported(
    eff: &EffectiveChannels,
    set: &PairSet,
    powers: &PowerVector,
    params: &SimParams,
) -> Result<bool> {
    check_inputs(eff, set, powers)?;
    if !within_cap(set, powers, params.max_power_mw) {
        return Ok(false);
    }
    let restricted = powers.restricted_to(set);
    let states = evaluate(eff, set, &restricted)?;
    Ok(states
        .iter()
        .all(|s| meets_threshold(s.sinr, params.sinr_threshold)))
}

/// Per-stream MMSE SINRs at `powers`, in pair then stream order.
pub fn stream_sinrs(
    eff: &EffectiveChannels,
    set: &PairSet,
    powers: &PowerVector,
) -> Result<Vec<f64>> {
    check_inputs(eff, set, powers)?;
    Ok(evaluate(eff, set, &powers.restricted_to(set))?
        .into_iter()
        .map(|s| s.sinr)
        .collect())
}

/// Iterative Determination of Feasibility starting from zero power.
pub fn idf(
    eff: &EffectiveChannels,
    set: &PairSet,
    params: &SimParams,
) -> Result<FeasibilityResult> {
    idf_observed(eff, set, params, |_, _| {})
}

/// [`idf`] with a callback receiving each iterate `(n, P_n)`, starting with
/// `P_0 = 0`.
pub fn idf_observed<F>(
    eff: &EffectiveChannels,
    set: &PairSet,
    params: &SimParams,
    observe: F,
) -> Result<FeasibilityResult>
where
    F: FnMut(usize, &PowerVector),
{
    idf_from(
        eff,
        set,
        params,
        PowerVector::zeros(eff.pairs(), eff.streams()),
        observe,
    )
}

/// Runs the IDF loop from an arbitrary starting power vector.
///
/// Criterion 1 (power cap) is only a valid infeasibility proof when starting
/// from zero; callers that restart elsewhere use this for self-consistency
/// checks.
pub fn idf_from<F>(
    eff: &EffectiveChannels,
    set: &PairSet,
    params: &SimParams,
    start: PowerVector,
    mut observe: F,
) -> Result<FeasibilityResult>
where
    F: FnMut(usize, &PowerVector),
{
    check_inputs(eff, set, &start)?;
    let threshold = params.sinr_threshold;
    let cap = params.max_power_mw;
    let mut powers = start.restricted_to(set);
    observe(0, &powers);
    if set.is_empty() {
        return Ok(FeasibilityResult::Feasible(OperatingPoint {
            powers,
            weights: Vec::new(),
            sinrs: Vec::new(),
            iterations: 0,
        }));
    }
    let mut states = evaluate(eff, set, &powers)?;
    for n in 1..=params.max_iterations {
        let next = update(eff, set, &powers, &states, threshold);
        observe(n, &next);
        if !within_cap(set, &next, cap) {
            return Ok(FeasibilityResult::Infeasible {
                cause: InfeasibleCause::PowerExceeded,
                iterations: n,
            });
        }
        states = evaluate(eff, set, &next)?;
        powers = next;
        if states.iter().all(|s| meets_threshold(s.sinr, threshold)) {
            return Ok(FeasibilityResult::Feasible(OperatingPoint {
                sinrs: states.iter().map(|s| s.sinr).collect(),
                weights: states.into_iter().map(|s| s.weight).collect(),
                powers,
                iterations: n,
            }));
        }
    }
    Ok(FeasibilityResult::Infeasible {
        cause: InfeasibleCause::IterationLimit,
        iterations: params.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimo::{Scheme, SchemeConfig};
    use crate::scenario::scenario_from_gains;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_pair() -> (EffectiveChannels, SimParams) {
        let p = SimParams::default();
        let s = scenario_from_gains(
            &p,
            SchemeConfig::new(Scheme::RxDiversity, 2),
            vec![10f64.powf(-7.6)],
            vec![c(1.0, 1.0), c(1.0, -1.0)],
        )
        .unwrap();
        (EffectiveChannels::new(&s).unwrap(), p)
    }

    #[test]
    fn single_pair_closed_form() {
        let (eff, p) = single_pair();
        let set = PairSet::full(1);
        let p1 = power_step(&eff, &set, &PowerVector::zeros(1, 1), p.sinr_threshold).unwrap();
        let expect = 10.0 * 1e-11 / (10f64.powf(-7.6) * 4.0);
        assert!((p1.get(0, 0) - expect).abs() / expect < 1e-12);
        assert!((p1.get(0, 0) - 9.952e-4).abs() / 9.952e-4 < 1e-3);
        let p2 = power_step(&eff, &set, &p1, p.sinr_threshold).unwrap();
        assert!((p2.get(0, 0) - p1.get(0, 0)).abs() / expect < 1e-12);

        match idf(&eff, &set, &p).unwrap() {
            FeasibilityResult::Feasible(pt) => {
                assert_eq!(pt.iterations, 1);
                assert!((pt.sinrs[0] - 10.0).abs() < 1e-9);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn support_checks() {
        let (eff, p) = single_pair();
        let zero = PowerVector::zeros(1, 1);
        assert!(is_supported(&eff, &PairSet::empty(), &zero, &p).unwrap());
        let fixed = power_step(&eff, &PairSet::full(1), &zero, p.sinr_threshold).unwrap();
        assert!(is_supported(&eff, &PairSet::full(1), &fixed, &p).unwrap());
        let mut hot = PowerVector::zeros(1, 1);
        hot.set(0, 0, p.max_power_mw * 1.5);
        assert!(!is_supported(&eff, &PairSet::full(1), &hot, &p).unwrap());
    }

    #[test]
    fn inactive_pairs_get_zero() {
        let p = SimParams::default();
        let s = scenario_from_gains(
            &p,
            SchemeConfig::new(Scheme::RxDiversity, 1),
            vec![1e-6, 1e-8, 1e-8, 1e-6],
            vec![c(1.0, 0.0), c(0.5, 0.5), c(-0.3, 0.2), c(0.9, -0.1)],
        )
        .unwrap();
        let eff = EffectiveChannels::new(&s).unwrap();
        let mut start = PowerVector::zeros(2, 1);
        start.set(0, 0, 1.0);
        start.set(1, 0, 1.0);
        let set = PairSet::new(vec![0]).unwrap();
        let next = power_step(&eff, &set, &start, p.sinr_threshold).unwrap();
        assert_eq!(next.get(1, 0), 0.0);
        // pair 2 is outside the set, so it does not interfere
        let expect = 10.0 * p.noise_power() / 1e-6;
        assert!((next.get(0, 0) - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn symmetric_colocated_pairs_infeasible() {
        let p = SimParams::default();
        let g = 1e-6;
        let s = scenario_from_gains(
            &p,
            SchemeConfig::new(Scheme::RxDiversity, 1),
            vec![g; 4],
            vec![c(1.0, 0.0); 4],
        )
        .unwrap();
        let eff = EffectiveChannels::new(&s).unwrap();
        let r = idf(&eff, &PairSet::full(2), &p).unwrap();
        assert_eq!(
            r,
            FeasibilityResult::Infeasible {
                cause: InfeasibleCause::PowerExceeded,
                iterations: r.iterations()
            }
        );
        assert!(idf(&eff, &PairSet::new(vec![1]).unwrap(), &p)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn rejects_out_of_range_set() {
        let (eff, p) = single_pair();
        let set = PairSet::new(vec![0, 3]).unwrap();
        assert!(matches!(
            idf(&eff, &set, &p),
            Err(crate::Error::Contract(_))
        ));
    }

    #[test]
    fn pair_set_basics() {
        assert!(PairSet::new(vec![2, 1]).is_err());
        assert!(PairSet::new(vec![1, 1]).is_err());
        let s = PairSet::from_labels(&[1, 3]).unwrap();
        assert_eq!(s.indices(), &[0, 2]);
        assert_eq!(s.to_string(), "{1,3}");
        assert!(s.is_subset_of(&PairSet::full(3)));
    }
}

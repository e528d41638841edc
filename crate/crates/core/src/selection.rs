//! Maximum feasible link selection.
//!
//! [`bols`] walks pair sets depth first in lexicographic order, extending a
//! candidate while it is feasible and backtracking as soon as it is not;
//! because every subset of a feasible set is feasible, no superset of an
//! infeasible candidate needs to be visited. Candidates no larger than the
//! best size found so far are skipped without calling the oracle.
//! [`brute_force`] is the exhaustive reference used to validate it.

use serde::Serialize;

use crate::error::{contract, param, Error, Result};
use crate::mimo::EffectiveChannels;
use crate::power::{self, PairSet};
use crate::scenario::{Scenario, SimParams};

/// Default pair-count cap for exhaustive search.
pub const BRUTE_FORCE_CAP: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionResult {
    /// Size of the largest feasible set.
    pub n_max: usize,
    /// First maximum-size feasible set in search order.
    pub best_set: PairSet,
    /// Number of feasibility-oracle calls.
    pub oracle_calls: usize,
}

/// Next candidate in the depth-first order over subsets of `0..k`, or `None`
/// once the search is exhausted.
///
/// With `m` the largest member: if `m < k - 1`, `Forward` appends `m + 1`
/// and `Backward` replaces `m` by `m + 1`. If `m` is the last pair and the set
/// has other members, `m` is dropped and the new maximum is incremented. The
/// singleton holding the last pair ends the search.
pub fn pairset_gen(set: &PairSet, direction: Direction, k: usize) -> Result<Option<PairSet>> {
    let Some(top) = set.max() else {
        return Err(contract("pairset_gen needs a nonempty set"));
    };
    set.check_range(k)?;
    let mut next = set.clone();
    let ids = next.indices_mut();
    if top + 1 < k {
        match direction {
            Direction::Forward => ids.push(top + 1),
            Direction::Backward => *ids.last_mut().expect("nonempty") = top + 1,
        }
        return Ok(Some(next));
    }
    if ids.len() > 1 {
        ids.pop();
        *ids.last_mut().expect("len > 1") += 1;
        return Ok(Some(next));
    }
    Ok(None)
}

/// Backtracking link selection over pairs `0..k` with the given
/// feasibility oracle.
pub fn bols<E, F>(k: usize, oracle: F) -> std::result::Result<SelectionResult, E>
where
    F: FnMut(&PairSet) -> std::result::Result<bool, E>,
    E: From<Error>,
{
    bols_with_pruning(k, true, oracle)
}

/// [`bols`] with the size-based pruning switchable. Without pruning every
/// visited candidate is tested; the result is the same, only the number of
/// oracle calls grows.
pub fn bols_with_pruning<E, F>(
    k: usize,
    pruning: bool,
    mut oracle: F,
) -> std::result::Result<SelectionResult, E>
where
    F: FnMut(&PairSet) -> std::result::Result<bool, E>,
    E: From<Error>,
{
    if k == 0 {
        return Err(param("pair count must be at least 1").into());
    }
    let mut candidate = PairSet::new(vec![0]).map_err(E::from)?;
    let mut best = PairSet::empty();
    let mut calls = 0usize;
    loop {
        let mut direction = Direction::Forward;
        if !pruning || candidate.len() > best.len() {
            calls += 1;
            if oracle(&candidate)? {
                if candidate.len() > best.len() {
                    best = candidate.clone();
                }
                direction = Direction::Forward;
            } else {
                direction = Direction::Backward;
            }
        }
        match pairset_gen(&candidate, direction, k).map_err(E::from)? {
            Some(next) => candidate = next,
            None => break,
        }
    }
    Ok(SelectionResult {
        n_max: best.len(),
        best_set: best,
        oracle_calls: calls,
    })
}

/// Exhaustive search: subsets by decreasing size, lexicographic within a
/// size, stopping at the first feasible one.
pub fn brute_force<E, F>(
    k: usize,
    cap: usize,
    mut oracle: F,
) -> std::result::Result<SelectionResult, E>
where
    F: FnMut(&PairSet) -> std::result::Result<bool, E>,
    E: From<Error>,
{
    if k > cap {
        return Err(param(format!("brute force limited to K <= {cap}, got {k}")).into());
    }
    let mut calls = 0usize;
    for size in (1..=k).rev() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let set = PairSet::new(combo.clone()).map_err(E::from)?;
            calls += 1;
            if oracle(&set)? {
                return Ok(SelectionResult {
                    n_max: size,
                    best_set: set,
                    oracle_calls: calls,
                });
            }
            if !next_combination(&mut combo, k) {
                break;
            }
        }
    }
    Ok(SelectionResult {
        n_max: 0,
        best_set: PairSet::empty(),
        oracle_calls: calls,
    })
}

/// Advances `combo` to the next `size`-combination of `0..n` in
/// lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let r = combo.len();
    let Some(i) = (0..r).rev().find(|&i| combo[i] < n - r + i) else {
        return false;
    };
    combo[i] += 1;
    for j in i + 1..r {
        combo[j] = combo[j - 1] + 1;
    }
    true
}

/// Feasibility of `set` by IDF.
pub fn idf_oracle<'a>(
    eff: &'a EffectiveChannels,
    params: &'a SimParams,
) -> impl FnMut(&PairSet) -> Result<bool> + 'a {
    move |set| Ok(power::idf(eff, set, params)?.is_feasible())
}

/// Maximum number of concurrent links of one scenario.
pub fn select_max_links(scenario: &Scenario, params: &SimParams) -> Result<SelectionResult> {
    let eff = EffectiveChannels::new(scenario)?;
    bols(scenario.pair_count(), idf_oracle(&eff, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[usize]) -> PairSet {
        PairSet::from_labels(v).unwrap()
    }

    /// Downward closure of the maximal feasible family of the 4-pair tree
    /// example.
    pub(crate) fn tree_example(set: &PairSet) -> Result<bool> {
        let maximal = [
            labels(&[1, 2, 3]),
            labels(&[1, 3]),
            labels(&[2, 3]),
            labels(&[2, 4]),
            labels(&[3, 4]),
            labels(&[4]),
        ];
        Ok(maximal.iter().any(|m| set.is_subset_of(m)))
    }

    #[test]
    fn gen_cases() {
        let fwd = pairset_gen(&labels(&[1]), Direction::Forward, 4).unwrap();
        assert_eq!(fwd, Some(labels(&[1, 2])));
        let back = pairset_gen(&labels(&[1, 2]), Direction::Backward, 4).unwrap();
        assert_eq!(back, Some(labels(&[1, 3])));
        for d in [Direction::Forward, Direction::Backward] {
            assert_eq!(
                pairset_gen(&labels(&[1, 2, 4]), d, 4).unwrap(),
                Some(labels(&[1, 3]))
            );
            assert_eq!(pairset_gen(&labels(&[4]), d, 4).unwrap(), None);
        }
        assert!(pairset_gen(&PairSet::empty(), Direction::Forward, 4).is_err());
        assert!(pairset_gen(&labels(&[5]), Direction::Forward, 4).is_err());
    }

    #[test]
    fn forward_walk_visits_every_subset_once() {
        for k in 1..=8 {
            let mut seen = std::collections::HashSet::new();
            let mut cur = Some(labels(&[1]));
            while let Some(set) = cur {
                assert!(seen.insert(set.clone()), "visited {set} twice");
                cur = pairset_gen(&set, Direction::Forward, k).unwrap();
            }
            assert_eq!(seen.len(), (1 << k) - 1);
        }
    }

    #[test]
    fn tree_example_search() {
        let r = bols::<Error, _>(4, tree_example).unwrap();
        assert_eq!(r.n_max, 3);
        assert_eq!(r.best_set, labels(&[1, 2, 3]));
        let b = brute_force::<Error, _>(4, BRUTE_FORCE_CAP, tree_example).unwrap();
        assert_eq!(b.n_max, 3);
        assert_eq!(b.best_set, labels(&[1, 2, 3]));
    }

    #[test]
    fn trivial_oracles() {
        let all = bols::<Error, _>(5, |_| Ok(true)).unwrap();
        assert_eq!(all.n_max, 5);
        assert_eq!(all.best_set, PairSet::full(5));
        let singles = bols::<Error, _>(5, |s| Ok(s.len() == 1)).unwrap();
        assert_eq!(singles.n_max, 1);
        let none = brute_force::<Error, _>(3, BRUTE_FORCE_CAP, |_| Ok(false)).unwrap();
        assert_eq!(none.n_max, 0);
        assert!(none.best_set.is_empty());
        assert_eq!(none.oracle_calls, 7);
        let none = bols::<Error, _>(3, |_| Ok(false)).unwrap();
        assert_eq!(none.n_max, 0);
    }

    #[test]
    fn brute_force_cap() {
        assert!(matches!(
            brute_force::<Error, _>(16, BRUTE_FORCE_CAP, |_| Ok(true)),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn combinations_in_order() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }
}

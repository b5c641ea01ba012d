use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Candidate, Simulation};
use crate::error::{Result, TcrError};

/// Largest pool whose permutations are enumerated (8! = 40320 runs).
pub const MAX_POOL: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingRun {
    /// Candidate ids in proposal order.
    pub order: Vec<String>,
    /// Final listed ids, sorted.
    pub composition: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionCount {
    pub entries: Vec<String>,
    pub orderings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingReport {
    /// One run per permutation, in lexicographic order of pool positions.
    pub runs: Vec<OrderingRun>,
    /// Distinct final compositions, sorted.
    pub compositions: Vec<CompositionCount>,
    /// Indices into `runs` of two orderings that end differently.
    pub witness: Option<[usize; 2]>,
}

impl OrderingReport {
    pub fn diverges(&self) -> bool {
        self.compositions.len() > 1
    }

    pub fn witness_runs(&self) -> Option<(&OrderingRun, &OrderingRun)> {
        self.witness.map(|[a, b]| (&self.runs[a], &self.runs[b]))
    }
}

/// Runs every ordering of `pool` and groups the final registries.
pub fn ordering_experiment(pool: &[Candidate], sim: &Simulation<'_>) -> Result<OrderingReport> {
    if pool.len() > MAX_POOL {
        return Err(TcrError::PoolTooLarge(pool.len()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = pool.iter().find(|c| !seen.insert(c.id.as_str())) {
        return Err(TcrError::InvalidScenario(format!("duplicate candidate id `{}`", dup.id)));
    }

    let orders: Vec<Vec<usize>> = (0..pool.len()).permutations(pool.len()).collect();
    let runs: Vec<OrderingRun> = orders
        .into_par_iter()
        .map(|order| {
            let sequence: Vec<Candidate> = order.iter().map(|&i| pool[i].clone()).collect();
            let state = sim.run_sequence(&sequence)?;
            Ok(OrderingRun {
                order: sequence.into_iter().map(|c| c.id).collect(),
                composition: state.composition(),
            })
        })
        .collect::<Result<_>>()?;

    let mut counts: BTreeMap<&[String], usize> = BTreeMap::new();
    for run in &runs {
        *counts.entry(run.composition.as_slice()).or_default() += 1;
    }
    let compositions = counts
        .into_iter()
        .map(|(entries, orderings)| CompositionCount {
            entries: entries.to_vec(),
            orderings,
        })
        .collect();
    let witness = runs
        .iter()
        .position(|r| runs.first().is_some_and(|f| f.composition != r.composition))
        .map(|i| [0, i]);

    Ok(OrderingReport {
        runs,
        compositions,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::TcrParams;
    use crate::rational::{int, ratio};
    use crate::registry::{Electorate, ReferenceModel, SelectionPolicy, StaticModel};

    fn setup() -> (TcrParams, Electorate) {
        let p = TcrParams::new(int(100), ratio(1, 2), ratio(1, 2), ratio(1, 10))
            .unwrap()
            .with_challenge_margin(ratio(1, 2))
            .unwrap();
        (p, Electorate::new(vec![int(100); 3], int(100)).unwrap())
    }

    fn pool(tenths: &[i64]) -> Vec<Candidate> {
        tenths
            .iter()
            .map(|t| Candidate::new(format!("r{t}"), ratio(*t, 10)).unwrap())
            .collect()
    }

    #[test]
    fn reject_bias_makes_order_matter() {
        let (p, e) = setup();
        let model = ReferenceModel::default();
        let sim = Simulation { model: &model, policy: SelectionPolicy::AlwaysReject, params: &p, electorate: &e };
        let report = ordering_experiment(&pool(&[5, 6]), &sim).unwrap();
        assert_eq!(report.runs.len(), 2);
        assert!(report.diverges());
        let (a, b) = report.witness_runs().unwrap();
        assert_eq!(a.composition, vec!["r5"]);
        assert_eq!(b.composition, vec!["r6"]);
    }

    #[test]
    fn state_independent_gamma_ignores_order() {
        let (p, e) = setup();
        let model = StaticModel::default();
        let sim = Simulation { model: &model, policy: SelectionPolicy::PayoffDominant, params: &p, electorate: &e };
        let report = ordering_experiment(&pool(&[-5, 0, 2, 6]), &sim).unwrap();
        assert_eq!(report.runs.len(), 24);
        assert_eq!(report.compositions.len(), 1);
        assert_eq!(report.compositions[0].entries, vec!["r2", "r6"]);
        assert!(report.witness.is_none());
    }

    #[test]
    fn high_quality_pool_is_fully_listed() {
        let (p, e) = setup();
        let model = ReferenceModel::default();
        let sim = Simulation { model: &model, policy: SelectionPolicy::AlwaysReject, params: &p, electorate: &e };
        let single = ordering_experiment(&pool(&[3]), &sim).unwrap();
        assert_eq!(single.compositions.len(), 1);
        let zero = TcrParams { challenge_margin: Some(int(0)), ..p.clone() };
        let sim = Simulation { params: &zero, ..sim };
        // equal ratings keep gamma at exactly 1 in every reachable state
        let same: Vec<_> = ["a", "b", "c"]
            .iter()
            .map(|id| Candidate::new(*id, ratio(7, 10)).unwrap())
            .collect();
        let report = ordering_experiment(&same, &sim).unwrap();
        assert_eq!(report.compositions.len(), 1);
        assert_eq!(report.compositions[0].entries.len(), 3);
    }

    #[test]
    fn pool_limits() {
        let (p, e) = setup();
        let model = StaticModel::default();
        let sim = Simulation { model: &model, policy: SelectionPolicy::AlwaysAccept, params: &p, electorate: &e };
        let big: Vec<_> = (0..9).map(|i| Candidate::new(format!("c{i}"), ratio(i, 10)).unwrap()).collect();
        assert!(matches!(ordering_experiment(&big, &sim), Err(TcrError::PoolTooLarge(9))));
        let dup = vec![big[0].clone(), big[0].clone()];
        assert!(matches!(ordering_experiment(&dup, &sim), Err(TcrError::InvalidScenario(_))));
    }
}

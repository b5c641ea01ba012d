use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{Equilibrium, EquilibriumReport};
use crate::ledger::Outcome;

/// How a vote with several equilibrium outcomes is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "seed")]
pub enum SelectionPolicy {
    /// Play a Pareto-maximal equilibrium. When those still disagree on the
    /// outcome (`gamma == 1` for equal voters) the candidate is rejected.
    PayoffDominant,
    AlwaysReject,
    AlwaysAccept,
    /// Uniform draw among the equilibria, keyed by seed and step index.
    SeededRandom(u64),
}

impl SelectionPolicy {
    /// Picks one equilibrium. `report` must hold at least one.
    pub fn select<'a>(&self, report: &'a EquilibriumReport, step: usize) -> &'a Equilibrium {
        let eqs = &report.equilibria;
        let first_with = |outcome: Outcome| eqs.iter().find(|e| e.outcome == outcome);
        match self {
            SelectionPolicy::PayoffDominant => {
                let dominant: Vec<&Equilibrium> =
                    eqs.iter().filter(|e| report.is_dominant(&e.profile)).collect();
                dominant
                    .iter()
                    .find(|e| e.outcome == Outcome::Rejected)
                    .or_else(|| dominant.first())
                    .copied()
                    .unwrap_or(&eqs[0])
            }
            SelectionPolicy::AlwaysReject => first_with(Outcome::Rejected).unwrap_or(&eqs[0]),
            SelectionPolicy::AlwaysAccept => first_with(Outcome::Accepted).unwrap_or(&eqs[0]),
            SelectionPolicy::SeededRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(step as u64);
                &eqs[rng.gen_range(0..eqs.len())]
            }
        }
    }
}

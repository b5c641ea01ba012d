//! Sequential admission: candidates arrive one at a time, token values follow
//! the current list, and each challenged vote is settled by a selection policy.

pub mod export;
mod model;
mod ordering;
mod policy;

use num::{One, Signed};

pub use model::{ModelKind, ReferenceModel, StaticModel, ValuationModel};
pub use ordering::{ordering_experiment, CompositionCount, OrderingReport, OrderingRun, MAX_POOL};
pub use policy::SelectionPolicy;

use crate::classifier::{challenge_decision, region_from_outcomes, RegionLabel, ScenarioKind};
use crate::equilibrium::{find_equilibria, ThresholdSet, VotingGame, MAX_VOTERS};
use crate::error::{Result, TcrError};
use crate::ledger::{Outcome, StrategyProfile, TcrParams};
use crate::rational::Rational;

/// A listing application, or an entry once accepted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub id: String,
    /// Quality in `(-1, 1]`.
    pub rating: Rational,
}

impl Candidate {
    pub fn new(id: impl Into<String>, rating: Rational) -> Result<Self> {
        let id = id.into();
        if rating <= -Rational::one() || rating > Rational::one() {
            return Err(TcrError::InvalidScenario(format!(
                "rating of `{id}` must lie in (-1, 1], got {rating}"
            )));
        }
        Ok(Candidate { id, rating })
    }
}

/// Voter holdings and the challenger's holding, fixed for a whole run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Electorate {
    pub voters: Vec<Rational>,
    pub challenger: Rational,
}

impl Electorate {
    pub fn new(voters: Vec<Rational>, challenger: Rational) -> Result<Self> {
        if voters.is_empty() || voters.len() > MAX_VOTERS {
            return Err(TcrError::EnumerationBound(voters.len()));
        }
        if voters.iter().any(|t| !t.is_positive()) {
            return Err(TcrError::InvalidScenario("voter holdings must be > 0".into()));
        }
        Ok(Electorate { voters, challenger })
    }

    /// Two equal voters map onto the closed-form cases, anything else is n-voter.
    pub fn scenario(&self, params: &TcrParams) -> Result<ScenarioKind> {
        match self.voters.as_slice() {
            [a, b] if a == b => {
                let t = ThresholdSet::two_voter(params, a, &self.challenger)?;
                Ok(if t.delta_prime <= t.epsilon {
                    ScenarioKind::TwoVoterCase1
                } else {
                    ScenarioKind::TwoVoterCase2
                })
            }
            _ => Ok(ScenarioKind::NVoter),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeRecord {
    pub step: usize,
    pub candidate: String,
    pub rating: Rational,
    pub v0: Rational,
    pub vr: Rational,
    pub gamma: Rational,
    pub challenged: bool,
    pub region: RegionLabel,
    /// The equilibrium played, present only when challenged.
    pub selected: Option<StrategyProfile>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegistryState {
    pub entries: Vec<Candidate>,
    pub step: usize,
    pub history: Vec<OutcomeRecord>,
}

impl RegistryState {
    /// Listed ids, sorted.
    pub fn composition(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.entries.iter().map(|e| e.id.clone()).collect();
        ids.sort();
        ids
    }
}

/// Everything that stays fixed while candidates are fed through.
#[derive(Clone, Copy)]
pub struct Simulation<'a> {
    pub model: &'a dyn ValuationModel,
    pub policy: SelectionPolicy,
    pub params: &'a TcrParams,
    pub electorate: &'a Electorate,
}

impl Simulation<'_> {
    pub fn step(&self, state: &mut RegistryState, candidate: &Candidate) -> Result<OutcomeRecord> {
        let valuation = self.model.valuation(state, &candidate.rating)?;
        let gamma = valuation.gamma();
        let challenged = challenge_decision(&gamma, self.params, &self.electorate.challenger)?;
        let game = VotingGame::new(
            self.params.clone(),
            self.electorate.voters.clone(),
            self.electorate.challenger.clone(),
            valuation.clone(),
        )?;
        let report = find_equilibria(&game)?;
        let scenario = self.electorate.scenario(self.params)?;
        let region = region_from_outcomes(scenario, challenged, &report.equilibrium_outcomes())
            .ok_or_else(|| TcrError::NoEquilibrium(candidate.id.clone()))?;

        let (selected, outcome) = if challenged {
            let eq = self.policy.select(&report, state.step);
            (Some(eq.profile.clone()), eq.outcome)
        } else {
            (None, Outcome::Accepted)
        };

        let record = OutcomeRecord {
            step: state.step,
            candidate: candidate.id.clone(),
            rating: candidate.rating.clone(),
            v0: valuation.v0,
            vr: valuation.vr,
            gamma,
            challenged,
            region,
            selected,
            outcome,
        };
        if outcome == Outcome::Accepted {
            state.entries.push(candidate.clone());
        }
        state.step += 1;
        state.history.push(record.clone());
        Ok(record)
    }

    pub fn run_sequence(&self, candidates: &[Candidate]) -> Result<RegistryState> {
        let mut state = RegistryState::default();
        for c in candidates {
            self.step(&mut state, c)?;
        }
        Ok(state)
    }
}

/// One admission decision, leaving `state` untouched.
pub fn step(
    state: &RegistryState,
    candidate: &Candidate,
    sim: &Simulation<'_>,
) -> Result<(RegistryState, OutcomeRecord)> {
    let mut next = state.clone();
    let record = sim.step(&mut next, candidate)?;
    Ok((next, record))
}

pub fn run_sequence(candidates: &[Candidate], sim: &Simulation<'_>) -> Result<RegistryState> {
    sim.run_sequence(candidates)
}

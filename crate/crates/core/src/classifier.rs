//! The challenger's participation decision, voter incentive bounds, and the
//! mapping from `gamma` to outcome regions.
//!
//! Boundary conventions: `gamma == 1 + delta'` is a no-challenge point, and
//! `gamma == 1 + epsilon` already admits unanimous acceptance as an
//! equilibrium (the Nash check uses a weak inequality).

use std::fmt;

use num::One;
use serde::{Deserialize, Serialize};

use crate::equilibrium::ThresholdSet;
use crate::error::Result;
use crate::ledger::{Outcome, TcrParams};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Two equal voters with `delta' <= epsilon`.
    TwoVoterCase1,
    /// Two equal voters with `delta' > epsilon`.
    TwoVoterCase2,
    NVoter,
}

/// Which outcomes the voting game's equilibria lead to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumSet {
    RejectOnly,
    AcceptOnly,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionOutcome {
    Accept,
    Reject,
    SelectionProblem,
}

/// Where a candidate lands. When `challenged` is false the equilibrium set is
/// the one the vote would have had.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionLabel {
    pub scenario: ScenarioKind,
    pub challenged: bool,
    pub equilibrium_set: EquilibriumSet,
    pub outcome: RegionOutcome,
}

impl RegionLabel {
    pub fn new(scenario: ScenarioKind, challenged: bool, equilibrium_set: EquilibriumSet) -> Self {
        let outcome = match (challenged, equilibrium_set) {
            (false, _) => RegionOutcome::Accept,
            (true, EquilibriumSet::RejectOnly) => RegionOutcome::Reject,
            (true, EquilibriumSet::AcceptOnly) => RegionOutcome::Accept,
            (true, EquilibriumSet::Both) => RegionOutcome::SelectionProblem,
        };
        RegionLabel {
            scenario,
            challenged,
            equilibrium_set,
            outcome,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::TwoVoterCase1 => "two_voter_case1",
            ScenarioKind::TwoVoterCase2 => "two_voter_case2",
            ScenarioKind::NVoter => "n_voter",
        })
    }
}

impl fmt::Display for EquilibriumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumSet::RejectOnly => "reject_only",
            EquilibriumSet::AcceptOnly => "accept_only",
            EquilibriumSet::Both => "both",
        })
    }
}

impl fmt::Display for RegionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionOutcome::Accept => "accept",
            RegionOutcome::Reject => "reject",
            RegionOutcome::SelectionProblem => "selection_problem",
        })
    }
}

impl EquilibriumSet {
    pub fn from_outcomes(outcomes: &[Outcome]) -> Option<Self> {
        let accept = outcomes.contains(&Outcome::Accepted);
        let reject = outcomes.contains(&Outcome::Rejected);
        match (accept, reject) {
            (true, true) => Some(EquilibriumSet::Both),
            (true, false) => Some(EquilibriumSet::AcceptOnly),
            (false, true) => Some(EquilibriumSet::RejectOnly),
            (false, false) => None,
        }
    }
}

/// `gamma < 1 + delta`. When false, every challenge payoff is at most the
/// passive payoff `t V(r)`.
pub fn challenge_necessary_condition(gamma: &Rational, delta: &Rational) -> bool {
    gamma < &(Rational::one() + delta)
}

/// The axiomatic rule: a challenge happens iff `gamma < 1 + delta'`.
pub fn challenge_decision(
    gamma: &Rational,
    params: &TcrParams,
    challenger_tokens: &Rational,
) -> Result<bool> {
    let margin = params.effective_margin(challenger_tokens)?;
    Ok(gamma < &(Rational::one() + margin))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteIncentiveReport {
    /// Losing an accept vote beats abstaining. Requires `s < 0`, so never holds.
    pub accept_losing_condition: bool,
    /// `1 / (1 - s)`
    pub reject_losing_bound: Rational,
    /// Losing a reject vote beats abstaining: `gamma > 1 / (1 - s)`.
    pub reject_losing_condition: bool,
    /// A winning vote never pays less than abstention.
    pub winning_dominates_abstention: bool,
}

pub fn vote_incentive_report(params: &TcrParams, gamma: &Rational) -> VoteIncentiveReport {
    let zero = Rational::from_integer(0.into());
    let bound = Rational::one() / (Rational::one() - &params.slash);
    VoteIncentiveReport {
        accept_losing_condition: params.slash < zero,
        reject_losing_condition: gamma > &bound,
        reject_losing_bound: bound,
        winning_dominates_abstention: params.voter_pool_base() >= zero,
    }
}

/// Two equal voters, `Q = 1/2`.
pub fn classify_region_2voter(gamma: &Rational, thresholds: &ThresholdSet) -> RegionLabel {
    let scenario = if thresholds.delta_prime <= thresholds.epsilon {
        ScenarioKind::TwoVoterCase1
    } else {
        ScenarioKind::TwoVoterCase2
    };
    let challenged = gamma < &thresholds.challenge_bound();
    let set = if gamma >= &thresholds.accept_bound() {
        EquilibriumSet::Both
    } else {
        EquilibriumSet::RejectOnly
    };
    RegionLabel::new(scenario, challenged, set)
}

/// Three or more equal voters, `Q = 1/2`: nobody is pivotal, so both
/// unanimous profiles are always equilibria.
pub fn classify_region_nvoter(gamma: &Rational, delta_prime: &Rational) -> RegionLabel {
    let challenged = gamma < &(Rational::one() + delta_prime);
    RegionLabel::new(ScenarioKind::NVoter, challenged, EquilibriumSet::Both)
}

/// Region label from an enumerated equilibrium outcome set, `None` when the
/// set is empty.
pub fn region_from_outcomes(
    scenario: ScenarioKind,
    challenged: bool,
    outcomes: &[Outcome],
) -> Option<RegionLabel> {
    EquilibriumSet::from_outcomes(outcomes).map(|set| RegionLabel::new(scenario, challenged, set))
}

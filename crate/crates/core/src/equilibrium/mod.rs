//! Pure-strategy Nash equilibria of the post-challenge voting game.
//!
//! Every profile is enumerated and every unilateral deviation is evaluated
//! with a recomputed tally, so a deviation that flips the quorum outcome is
//! priced under the flipped outcome. Closed-form results for equal holdings
//! live in [`thresholds`]; payoff dominance lives in [`dominance`].

pub mod dominance;
pub mod thresholds;

use std::collections::BTreeSet;

use num::Signed;
use rayon::prelude::*;

use crate::error::{Result, TcrError};
use crate::ledger::{Outcome, StrategyProfile, Tally, TcrParams, ValuationPair, Vote};
use crate::payoff::voter_tokens;
use crate::rational::Rational;

pub use dominance::{classify_dominance, Dominance};
pub use thresholds::{delta_threshold, epsilon_threshold, ThresholdSet};

pub const MAX_VOTERS: usize = 20;

/// A challenged application: who votes, with how much, and what tokens are worth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VotingGame {
    pub params: TcrParams,
    pub voters: Vec<Rational>,
    pub challenger: Rational,
    pub valuation: ValuationPair,
}

impl VotingGame {
    pub fn new(
        params: TcrParams,
        voters: Vec<Rational>,
        challenger: Rational,
        valuation: ValuationPair,
    ) -> Result<Self> {
        params.validate()?;
        if voters.is_empty() {
            return Err(TcrError::InvalidScenario("no voters".into()));
        }
        if voters.iter().any(|t| !t.is_positive()) {
            return Err(TcrError::InvalidScenario("voter holdings must be > 0".into()));
        }
        if challenger < params.min_deposit {
            return Err(TcrError::InvalidChallenger {
                held: challenger.to_string(),
                deposit: params.min_deposit.to_string(),
            });
        }
        Ok(VotingGame {
            params,
            voters,
            challenger,
            valuation,
        })
    }

    pub fn voter_count(&self) -> usize {
        self.voters.len()
    }

    pub fn with_valuation(&self, valuation: ValuationPair) -> Self {
        VotingGame {
            valuation,
            ..self.clone()
        }
    }

    pub fn tally(&self, profile: &StrategyProfile) -> Result<Tally> {
        if profile.len() != self.voters.len() {
            return Err(TcrError::ProfileMismatch {
                profile: profile.len(),
                voters: self.voters.len(),
            });
        }
        Ok(Tally::from_holdings(&self.voters, profile, &self.challenger))
    }

    fn outcome_of(&self, tally: &Tally) -> Outcome {
        crate::ledger::apply_quorum(tally, &self.params)
    }

    pub fn outcome(&self, profile: &StrategyProfile) -> Result<Outcome> {
        Ok(self.outcome_of(&self.tally(profile)?))
    }

    /// Value-unit payoff of voter `index` under `profile`.
    pub fn voter_payoff(&self, profile: &StrategyProfile, index: usize) -> Result<Rational> {
        let tally = self.tally(profile)?;
        self.payoff_in(&tally, profile.votes()[index], index)
    }

    pub fn payoff_vector(&self, profile: &StrategyProfile) -> Result<Vec<Rational>> {
        let tally = self.tally(profile)?;
        profile
            .votes()
            .iter()
            .enumerate()
            .map(|(i, vote)| self.payoff_in(&tally, *vote, i))
            .collect()
    }

    fn payoff_in(&self, tally: &Tally, vote: Vote, index: usize) -> Result<Rational> {
        let outcome = self.outcome_of(tally);
        let tokens = voter_tokens(&self.params, vote, &self.voters[index], outcome, tally)?;
        Ok(tokens * self.valuation.value_under(outcome))
    }

    fn deviated_tally(&self, tally: &Tally, vote: Vote, index: usize) -> Tally {
        let t = &self.voters[index];
        let (accept, voter_reject) = match vote {
            Vote::Accept => (tally.accept() - t, tally.voter_reject() + t),
            Vote::Reject => (tally.accept() + t, tally.voter_reject() - t),
        };
        Tally::from_parts(accept, voter_reject, tally.challenger().clone())
    }

    /// Whether flipping voter `index` alone changes the quorum outcome.
    pub fn is_pivotal(&self, profile: &StrategyProfile, index: usize) -> Result<bool> {
        let tally = self.tally(profile)?;
        let deviated = self.deviated_tally(&tally, profile.votes()[index], index);
        Ok(self.outcome_of(&tally) != self.outcome_of(&deviated))
    }

    /// Payoff voter `index` would get by flipping alone.
    pub fn deviation_payoff(&self, profile: &StrategyProfile, index: usize) -> Result<Rational> {
        let tally = self.tally(profile)?;
        let vote = profile.votes()[index];
        let deviated = self.deviated_tally(&tally, vote, index);
        self.payoff_in(&deviated, vote.flipped(), index)
    }
}

/// Profile `index` of `n` voters in lexicographic order, Accept before Reject.
pub fn profile_at(voters: usize, index: usize) -> StrategyProfile {
    StrategyProfile(
        (0..voters)
            .map(|k| {
                if index >> (voters - 1 - k) & 1 == 0 {
                    Vote::Accept
                } else {
                    Vote::Reject
                }
            })
            .collect(),
    )
}

/// All `2^n` profiles in lexicographic order.
pub fn enumerate_profiles(
    voters: usize,
) -> Result<impl ExactSizeIterator<Item = StrategyProfile> + DoubleEndedIterator> {
    if voters == 0 || voters > MAX_VOTERS {
        return Err(TcrError::EnumerationBound(voters));
    }
    Ok((0..1usize << voters).map(move |i| profile_at(voters, i)))
}

/// No voter can strictly gain by flipping its own vote. Ties keep the equilibrium.
pub fn is_nash(profile: &StrategyProfile, game: &VotingGame) -> Result<bool> {
    let tally = game.tally(profile)?;
    for (index, vote) in profile.votes().iter().enumerate() {
        let current = game.payoff_in(&tally, *vote, index)?;
        let deviated = game.deviated_tally(&tally, *vote, index);
        let alternative = game.payoff_in(&deviated, vote.flipped(), index)?;
        if alternative > current {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSummary {
    pub profile: StrategyProfile,
    pub outcome: Outcome,
    /// `pivotal[k]`: flipping voter `k` alone changes the outcome.
    pub pivotal: Vec<bool>,
    pub is_equilibrium: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    pub outcome: Outcome,
    pub payoffs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    /// Every profile in enumeration order.
    pub profiles: Vec<ProfileSummary>,
    /// Equilibria in enumeration order, with voter payoff vectors.
    pub equilibria: Vec<Equilibrium>,
    /// Equilibria not Pareto-dominated by another equilibrium.
    pub dominant: Vec<StrategyProfile>,
}

impl EquilibriumReport {
    pub fn contains(&self, profile: &StrategyProfile) -> bool {
        self.equilibria.iter().any(|e| &e.profile == profile)
    }

    pub fn equilibrium_profiles(&self) -> BTreeSet<StrategyProfile> {
        self.equilibria.iter().map(|e| e.profile.clone()).collect()
    }

    pub fn summary(&self, profile: &StrategyProfile) -> Option<&ProfileSummary> {
        self.profiles.iter().find(|p| &p.profile == profile)
    }

    /// Outcomes some equilibrium leads to.
    pub fn equilibrium_outcomes(&self) -> Vec<Outcome> {
        let mut outcomes = Vec::new();
        for e in &self.equilibria {
            if !outcomes.contains(&e.outcome) {
                outcomes.push(e.outcome);
            }
        }
        outcomes
    }

    pub fn is_dominant(&self, profile: &StrategyProfile) -> bool {
        self.dominant.contains(profile)
    }
}

fn summarize(game: &VotingGame, index: usize) -> Result<(ProfileSummary, Option<Vec<Rational>>)> {
    let profile = profile_at(game.voter_count(), index);
    let tally = game.tally(&profile)?;
    let outcome = game.outcome_of(&tally);
    let mut pivotal = Vec::with_capacity(profile.len());
    let mut stable = true;
    let mut payoffs = Vec::with_capacity(profile.len());
    for (k, vote) in profile.votes().iter().enumerate() {
        let deviated = game.deviated_tally(&tally, *vote, k);
        pivotal.push(game.outcome_of(&deviated) != outcome);
        if stable {
            let current = game.payoff_in(&tally, *vote, k)?;
            let alternative = game.payoff_in(&deviated, vote.flipped(), k)?;
            if alternative > current {
                stable = false;
            } else {
                payoffs.push(current);
            }
        }
    }
    let summary = ProfileSummary {
        profile,
        outcome,
        pivotal,
        is_equilibrium: stable,
    };
    Ok((summary, stable.then_some(payoffs)))
}

/// Enumerates all profiles, keeps the Nash equilibria and their Pareto-maximal subset.
pub fn find_equilibria(game: &VotingGame) -> Result<EquilibriumReport> {
    let n = game.voter_count();
    if n == 0 || n > MAX_VOTERS {
        return Err(TcrError::EnumerationBound(n));
    }
    let analysed: Vec<_> = (0..1usize << n)
        .into_par_iter()
        .map(|i| summarize(game, i))
        .collect::<Result<_>>()?;

    let mut profiles = Vec::with_capacity(analysed.len());
    let mut equilibria = Vec::new();
    for (summary, payoffs) in analysed {
        if let Some(payoffs) = payoffs {
            equilibria.push(Equilibrium {
                profile: summary.profile.clone(),
                outcome: summary.outcome,
                payoffs,
            });
        }
        profiles.push(summary);
    }

    let vectors: Vec<&[Rational]> = equilibria.iter().map(|e| e.payoffs.as_slice()).collect();
    let dominant = dominance::pareto_maximal(&vectors)
        .into_iter()
        .map(|i| equilibria[i].profile.clone())
        .collect();

    Ok(EquilibriumReport {
        profiles,
        equilibria,
        dominant,
    })
}

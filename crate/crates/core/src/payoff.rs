//! Closed-form payoffs for every participant and outcome branch.
//!
//! Payoffs are in value units (tokens times per-token value). The token
//! component is exposed separately so it can be reconciled against the
//! ledger produced by [`crate::ledger::resolve_challenge`].

use num::{Signed, Zero};

use crate::error::{Result, TcrError};
use crate::ledger::{Outcome, Tally, TcrParams, ValuationPair, Vote};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stakeholder {
    Candidate,
    Challenger,
    Voter(Vote),
    /// A token holder that neither challenges nor votes.
    Bystander,
}

#[derive(Debug, Clone, Copy)]
pub struct PayoffQuery<'a> {
    pub role: Stakeholder,
    pub holding: &'a Rational,
    pub outcome: Outcome,
    pub tally: &'a Tally,
    pub valuation: &'a ValuationPair,
    pub params: &'a TcrParams,
}

impl PayoffQuery<'_> {
    pub fn payoff(&self) -> Result<Rational> {
        match self.role {
            Stakeholder::Candidate => Ok(candidate_payoff(self.params, self.outcome, self.valuation)),
            Stakeholder::Challenger => {
                challenger_payoff(self.params, self.holding, self.outcome, self.valuation)
            }
            Stakeholder::Voter(_) => voter_payoff(self),
            Stakeholder::Bystander => Ok(no_action_payoff(self.holding, self.valuation, self.outcome)),
        }
    }
}

/// `[D + D d] V(r)` when accepted, `-D V(0)` when rejected.
pub fn candidate_payoff(params: &TcrParams, outcome: Outcome, valuation: &ValuationPair) -> Rational {
    match outcome {
        Outcome::Accepted => (&params.min_deposit + params.dispensation_amount()) * &valuation.vr,
        Outcome::Rejected => -(&params.min_deposit * &valuation.v0),
    }
}

/// `(t - D) V(r)` when accepted, `(t + D d) V(0)` when rejected.
pub fn challenger_payoff(
    params: &TcrParams,
    tokens: &Rational,
    outcome: Outcome,
    valuation: &ValuationPair,
) -> Result<Rational> {
    if tokens < &params.min_deposit {
        return Err(TcrError::InvalidChallenger {
            held: tokens.to_string(),
            deposit: params.min_deposit.to_string(),
        });
    }
    Ok(match outcome {
        Outcome::Accepted => (tokens - &params.min_deposit) * &valuation.vr,
        Outcome::Rejected => (tokens + params.dispensation_amount()) * &valuation.v0,
    })
}

/// Value of simply holding `tokens` through the given outcome.
pub fn no_action_payoff(tokens: &Rational, valuation: &ValuationPair, outcome: Outcome) -> Rational {
    tokens * valuation.value_under(outcome)
}

/// Token balance of a voter after resolution, for the four vote/outcome branches.
pub fn voter_tokens(
    params: &TcrParams,
    vote: Vote,
    tokens: &Rational,
    outcome: Outcome,
    tally: &Tally,
) -> Result<Rational> {
    if !tokens.is_positive() {
        return Err(TcrError::InconsistentQuery("voter holding must be > 0".into()));
    }
    match (vote, outcome) {
        (Vote::Accept, Outcome::Accepted) => {
            if tokens > tally.accept() {
                return Err(TcrError::InconsistentQuery(
                    "accept voter holds more than T_A".into(),
                ));
            }
            let pool = params.voter_pool_base() + tally.voter_reject() * &params.slash;
            Ok(tokens + pool * tokens / tally.accept())
        }
        (Vote::Reject, Outcome::Rejected) => {
            let weight = tally.voter_reject();
            if weight.is_zero() {
                return Err(TcrError::DivisionGuard("T_R - T_C is zero"));
            }
            if tokens > &weight {
                return Err(TcrError::InconsistentQuery(
                    "reject voter holds more than T_R - T_C".into(),
                ));
            }
            let pool = params.voter_pool_base() + tally.accept() * &params.slash;
            Ok(tokens + pool * tokens / weight)
        }
        (Vote::Accept, Outcome::Rejected) | (Vote::Reject, Outcome::Accepted) => {
            let weight = match vote {
                Vote::Accept => tally.accept().clone(),
                Vote::Reject => tally.voter_reject(),
            };
            if tokens > &weight {
                return Err(TcrError::InconsistentQuery(
                    "voter holds more than its bloc".into(),
                ));
            }
            Ok(tokens - tokens * &params.slash)
        }
    }
}

pub fn voter_payoff(query: &PayoffQuery<'_>) -> Result<Rational> {
    let Stakeholder::Voter(vote) = query.role else {
        return Err(TcrError::InconsistentQuery(format!(
            "{:?} is not a voter",
            query.role
        )));
    };
    let tokens = voter_tokens(query.params, vote, query.holding, query.outcome, query.tally)?;
    Ok(tokens * query.valuation.value_under(query.outcome))
}

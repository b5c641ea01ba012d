//! Registry parameters, vote tallying, quorum resolution and the token
//! redistribution that follows a challenge.

use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::equilibrium::thresholds::delta_threshold;
use crate::error::{Result, TcrError};
use crate::rational::Rational;

/// Registry constants plus the challenger's axiomatic margin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcrParams {
    /// Deposit `D` staked by the candidate and matched by the challenger.
    pub min_deposit: Rational,
    /// Fraction `d` of the loser's deposit paid to the winning principal.
    pub dispensation: Rational,
    /// Accept ratio `Q` at or above which the candidate is admitted.
    pub quorum: Rational,
    /// Fraction `s` confiscated from the losing voting bloc.
    pub slash: Rational,
    /// `delta'`; `None` means "as large as allowed", i.e. `delta` itself.
    pub challenge_margin: Option<Rational>,
}

impl TcrParams {
    pub fn new(
        min_deposit: Rational,
        dispensation: Rational,
        quorum: Rational,
        slash: Rational,
    ) -> Result<Self> {
        let params = TcrParams {
            min_deposit,
            dispensation,
            quorum,
            slash,
            challenge_margin: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_challenge_margin(mut self, margin: Rational) -> Result<Self> {
        self.challenge_margin = Some(margin);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |field, reason: &str| {
            Err(TcrError::InvalidParams {
                field,
                reason: reason.to_string(),
            })
        };
        if !self.min_deposit.is_positive() {
            return invalid("min_deposit", "D must be > 0");
        }
        if self.dispensation.is_negative() || self.dispensation > Rational::one() {
            return invalid("dispensation", "d must lie in [0, 1]");
        }
        if !self.quorum.is_positive() || self.quorum > Rational::one() {
            return invalid("quorum", "Q must lie in (0, 1]");
        }
        if self.slash.is_negative() || self.slash >= Rational::one() {
            return invalid("slash", "s must lie in [0, 1)");
        }
        if let Some(margin) = &self.challenge_margin {
            if margin.is_negative() {
                return invalid("challenge_margin", "delta' must be >= 0");
            }
        }
        Ok(())
    }

    /// `D * (1 - d)`, the part of the losing deposit shared by the winning voters.
    pub fn voter_pool_base(&self) -> Rational {
        &self.min_deposit * (Rational::one() - &self.dispensation)
    }

    /// `D * d`, the part of the losing deposit paid to the winning principal.
    pub fn dispensation_amount(&self) -> Rational {
        &self.min_deposit * &self.dispensation
    }

    /// Binds `delta'` to a concrete challenger and checks `delta' <= delta`.
    pub fn effective_margin(&self, challenger_tokens: &Rational) -> Result<Rational> {
        let delta = delta_threshold(self, challenger_tokens)?;
        match &self.challenge_margin {
            None => Ok(delta),
            Some(margin) if *margin <= delta => Ok(margin.clone()),
            Some(margin) => Err(TcrError::MarginExceedsDelta {
                delta_prime: margin.to_string(),
                delta: delta.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Candidate,
    Challenger,
    Voter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipantHolding {
    pub id: String,
    pub tokens: Rational,
    pub role: Role,
}

impl ParticipantHolding {
    pub fn new(id: impl Into<String>, tokens: Rational, role: Role) -> Self {
        ParticipantHolding {
            id: id.into(),
            tokens,
            role,
        }
    }

    pub fn voter(id: impl Into<String>, tokens: Rational) -> Self {
        Self::new(id, tokens, Role::Voter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vote {
    Accept,
    Reject,
}

impl Vote {
    pub fn flipped(self) -> Vote {
        match self {
            Vote::Accept => Vote::Reject,
            Vote::Reject => Vote::Accept,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Vote::Accept => 'A',
            Vote::Reject => 'R',
        }
    }

    /// The vote whose bloc wins under `outcome`.
    pub fn winning(outcome: Outcome) -> Vote {
        match outcome {
            Outcome::Accepted => Vote::Accept,
            Outcome::Rejected => Vote::Reject,
        }
    }
}

/// One vote per non-challenging voter; the challenger always counts as Reject.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile(pub Vec<Vote>);

impl StrategyProfile {
    pub fn unanimous(vote: Vote, voters: usize) -> Self {
        StrategyProfile(vec![vote; voters])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn votes(&self) -> &[Vote] {
        &self.0
    }

    pub fn is_unanimous(&self, vote: Vote) -> bool {
        self.0.iter().all(|v| *v == vote)
    }

    pub fn is_mixed(&self) -> bool {
        !self.is_unanimous(Vote::Accept) && !self.is_unanimous(Vote::Reject)
    }

    pub fn with_flip(&self, voter: usize) -> Self {
        let mut votes = self.0.clone();
        votes[voter] = votes[voter].flipped();
        StrategyProfile(votes)
    }

    pub fn parse(text: &str) -> Option<Self> {
        text.chars()
            .map(|c| match c {
                'A' | 'a' => Some(Vote::Accept),
                'R' | 'r' => Some(Vote::Reject),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(StrategyProfile)
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|v| write!(f, "{}", v.symbol()))
    }
}

/// Revealed vote weight. The challenger's holding always sits on the reject side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    total: Rational,
    accept: Rational,
    reject: Rational,
    challenger: Rational,
}

impl Tally {
    /// Builds a tally from accept weight, non-challenger reject weight and the
    /// challenger's holding.
    pub fn from_parts(accept: Rational, voter_reject: Rational, challenger: Rational) -> Self {
        let reject = voter_reject + &challenger;
        Tally {
            total: &accept + &reject,
            accept,
            reject,
            challenger,
        }
    }

    /// Tally over raw holdings, without participant bookkeeping.
    pub fn from_holdings(
        holdings: &[Rational],
        profile: &StrategyProfile,
        challenger: &Rational,
    ) -> Self {
        let mut accept = Rational::zero();
        let mut voter_reject = Rational::zero();
        for (t, vote) in holdings.iter().zip(profile.votes()) {
            match vote {
                Vote::Accept => accept += t,
                Vote::Reject => voter_reject += t,
            }
        }
        Tally::from_parts(accept, voter_reject, challenger.clone())
    }

    /// `T`
    pub fn total(&self) -> &Rational {
        &self.total
    }

    /// `T_A`
    pub fn accept(&self) -> &Rational {
        &self.accept
    }

    /// `T_R`, challenger included.
    pub fn reject(&self) -> &Rational {
        &self.reject
    }

    /// `T_C`
    pub fn challenger(&self) -> &Rational {
        &self.challenger
    }

    /// `T_R - T_C`, the reject weight that shares the reward pool.
    pub fn voter_reject(&self) -> Rational {
        &self.reject - &self.challenger
    }

    /// `W_A = T_A / T`
    pub fn accept_ratio(&self) -> Rational {
        &self.accept / &self.total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accepted,
    Rejected,
}

/// Per-token values without (`v0`) and with (`vr`) the candidate listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationPair {
    pub v0: Rational,
    pub vr: Rational,
}

impl ValuationPair {
    pub fn new(v0: Rational, vr: Rational) -> Result<Self> {
        if !v0.is_positive() || !vr.is_positive() {
            return Err(TcrError::InvalidScenario(
                "token valuations must be strictly positive".into(),
            ));
        }
        Ok(ValuationPair { v0, vr })
    }

    /// Valuation with `v0 = 1` and `vr = gamma`.
    pub fn from_gamma(gamma: Rational) -> Result<Self> {
        Self::new(Rational::one(), gamma)
    }

    /// `gamma = V(r) / V(0)`
    pub fn gamma(&self) -> Rational {
        &self.vr / &self.v0
    }

    /// Per-token value once `outcome` is realised.
    pub fn value_under(&self, outcome: Outcome) -> &Rational {
        match outcome {
            Outcome::Accepted => &self.vr,
            Outcome::Rejected => &self.v0,
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        ValuationPair {
            v0: &self.v0 * factor,
            vr: &self.vr * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub id: String,
    pub role: Role,
    pub vote: Option<Vote>,
    pub delta: Rational,
    pub balance: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedistributionResult {
    pub outcome: Outcome,
    pub tally: Tally,
    pub entries: Vec<LedgerEntry>,
}

impl RedistributionResult {
    pub fn net_delta(&self) -> Rational {
        self.entries.iter().map(|e| &e.delta).sum()
    }

    pub fn entry(&self, id: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

pub fn tally_votes(
    voters: &[ParticipantHolding],
    profile: &StrategyProfile,
    challenger: &ParticipantHolding,
) -> Result<Tally> {
    if voters.is_empty() {
        return Err(TcrError::InvalidScenario("no voters".into()));
    }
    if voters.len() != profile.len() {
        return Err(TcrError::ProfileMismatch {
            profile: profile.len(),
            voters: voters.len(),
        });
    }
    for holder in voters.iter().chain(std::iter::once(challenger)) {
        if !holder.tokens.is_positive() {
            return Err(TcrError::InvalidScenario(format!(
                "participant `{}` holds no tokens",
                holder.id
            )));
        }
    }
    if let Some(v) = voters.iter().find(|v| v.role != Role::Voter) {
        return Err(TcrError::InvalidScenario(format!(
            "participant `{}` is listed as a voter but has role {:?}",
            v.id, v.role
        )));
    }
    if challenger.role != Role::Challenger {
        return Err(TcrError::InvalidScenario(format!(
            "participant `{}` is not a challenger",
            challenger.id
        )));
    }
    let holdings: Vec<Rational> = voters.iter().map(|v| v.tokens.clone()).collect();
    Ok(Tally::from_holdings(&holdings, profile, &challenger.tokens))
}

/// Accepted iff `W_A >= Q`.
pub fn apply_quorum(tally: &Tally, params: &TcrParams) -> Outcome {
    if tally.accept_ratio() >= params.quorum {
        Outcome::Accepted
    } else {
        Outcome::Rejected
    }
}

/// Settles an active challenge: escrowed deposits move to the winning
/// principal, the loser's remaining deposit and the losing bloc's slash are
/// split pro rata among the winning voters.
pub fn resolve_challenge(
    params: &TcrParams,
    voters: &[ParticipantHolding],
    profile: &StrategyProfile,
    challenger: &ParticipantHolding,
    candidate: &ParticipantHolding,
) -> Result<RedistributionResult> {
    params.validate()?;
    let tally = tally_votes(voters, profile, challenger)?;
    if candidate.role != Role::Candidate || candidate.tokens != params.min_deposit {
        return Err(TcrError::InvalidScenario(format!(
            "candidate `{}` must hold exactly the deposit D",
            candidate.id
        )));
    }
    if challenger.tokens < params.min_deposit {
        return Err(TcrError::InvalidChallenger {
            held: challenger.tokens.to_string(),
            deposit: params.min_deposit.to_string(),
        });
    }

    let outcome = apply_quorum(&tally, params);
    let deposit = &params.min_deposit;
    let dispensation = params.dispensation_amount();
    let (winner_weight, pool) = match outcome {
        Outcome::Accepted => {
            if tally.accept().is_zero() {
                return Err(TcrError::DivisionGuard("accepted with no accept weight"));
            }
            (
                tally.accept().clone(),
                params.voter_pool_base() + tally.voter_reject() * &params.slash,
            )
        }
        Outcome::Rejected => {
            let weight = tally.voter_reject();
            if weight.is_zero() {
                return Err(TcrError::DivisionGuard(
                    "rejected with no non-challenger reject weight",
                ));
            }
            (weight, params.voter_pool_base() + tally.accept() * &params.slash)
        }
    };
    let winning_vote = Vote::winning(outcome);

    let (candidate_delta, challenger_delta) = match outcome {
        Outcome::Accepted => (dispensation.clone(), -deposit.clone()),
        Outcome::Rejected => (-deposit.clone(), dispensation.clone()),
    };

    let mut entries = Vec::with_capacity(voters.len() + 2);
    entries.push(LedgerEntry {
        id: candidate.id.clone(),
        role: Role::Candidate,
        vote: None,
        balance: &candidate.tokens + &candidate_delta,
        delta: candidate_delta,
    });
    entries.push(LedgerEntry {
        id: challenger.id.clone(),
        role: Role::Challenger,
        vote: Some(Vote::Reject),
        balance: &challenger.tokens + &challenger_delta,
        delta: challenger_delta,
    });
    for (voter, vote) in voters.iter().zip(profile.votes()) {
        let delta = if *vote == winning_vote {
            &pool * &voter.tokens / &winner_weight
        } else {
            -(&params.slash * &voter.tokens)
        };
        entries.push(LedgerEntry {
            id: voter.id.clone(),
            role: Role::Voter,
            vote: Some(*vote),
            balance: &voter.tokens + &delta,
            delta,
        });
    }

    Ok(RedistributionResult {
        outcome,
        tally,
        entries,
    })
}

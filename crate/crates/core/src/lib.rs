//! Token Curated Registry analysis: exact redistribution, payoffs, voting
//! equilibria, challenge thresholds and multi-step registry simulation.

pub mod classifier;
pub mod equilibrium;
pub mod error;
pub mod ledger;
pub mod payoff;
pub mod rational;
pub mod registry;

pub use classifier::{
    challenge_decision, challenge_necessary_condition, classify_region_2voter,
    classify_region_nvoter, vote_incentive_report, EquilibriumSet, RegionLabel, RegionOutcome,
    ScenarioKind, VoteIncentiveReport,
};
pub use equilibrium::{
    classify_dominance, delta_threshold, enumerate_profiles, epsilon_threshold, find_equilibria,
    is_nash, Dominance, Equilibrium, EquilibriumReport, ThresholdSet, VotingGame,
};
pub use error::{Result, TcrError};
pub use ledger::{
    apply_quorum, resolve_challenge, tally_votes, LedgerEntry, Outcome, ParticipantHolding,
    RedistributionResult, Role, StrategyProfile, Tally, TcrParams, ValuationPair, Vote,
};
pub use payoff::{PayoffQuery, Stakeholder};
pub use rational::{parse_rational, to_decimal, Rational};
pub use registry::{
    ordering_experiment, run_sequence, step, Candidate, Electorate, ModelKind, OrderingReport,
    OutcomeRecord, ReferenceModel, RegistryState, SelectionPolicy, Simulation, StaticModel,
    ValuationModel,
};

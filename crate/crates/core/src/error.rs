use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TcrError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("profile has {profile} votes but there are {voters} voters")]
    ProfileMismatch { profile: usize, voters: usize },

    #[error("challenger holds {held} tokens, less than the deposit {deposit}")]
    InvalidChallenger { held: String, deposit: String },

    #[error("challenge margin delta' = {delta_prime} exceeds delta = {delta}")]
    MarginExceedsDelta { delta_prime: String, delta: String },

    #[error("inconsistent payoff query: {0}")]
    InconsistentQuery(String),

    #[error("division guard: {0}")]
    DivisionGuard(&'static str),

    #[error("voter count {0} is outside the enumeration bound 1..=20")]
    EnumerationBound(usize),

    #[error("candidate pool of {0} exceeds the permutation bound of 8")]
    PoolTooLarge(usize),

    #[error("valuation model returned a non-positive {which} = {value}")]
    NonPositiveValuation { which: &'static str, value: String },

    #[error("no pure-strategy equilibrium exists for candidate `{0}`")]
    NoEquilibrium(String),
}

pub type Result<T, E = TcrError> = std::result::Result<T, E>;

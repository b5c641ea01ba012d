use num::{One, Signed};

use crate::error::{Result, TcrError};
use crate::ledger::TcrParams;
use crate::rational::Rational;

/// `delta = D d / t`: a challenge can only pay off while `gamma < 1 + delta`.
pub fn delta_threshold(params: &TcrParams, challenger_tokens: &Rational) -> Result<Rational> {
    if challenger_tokens < &params.min_deposit {
        return Err(TcrError::InvalidChallenger {
            held: challenger_tokens.to_string(),
            deposit: params.min_deposit.to_string(),
        });
    }
    Ok(params.dispensation_amount() / challenger_tokens)
}

/// `[D(1-d)/2 + t s] / [t + D(1-d)/2]` for two equal voters holding `t` each.
/// Unanimous acceptance is an equilibrium iff `gamma >= 1 + epsilon`.
pub fn epsilon_threshold(params: &TcrParams, voter_tokens: &Rational) -> Result<Rational> {
    if !voter_tokens.is_positive() {
        return Err(TcrError::InvalidScenario("voter holding must be > 0".into()));
    }
    let half_pool = params.voter_pool_base() / Rational::from_integer(2.into());
    let numerator = &half_pool + voter_tokens * &params.slash;
    let denominator = voter_tokens + &half_pool;
    Ok(numerator / denominator)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdSet {
    pub delta: Rational,
    pub delta_prime: Rational,
    pub epsilon: Rational,
}

impl ThresholdSet {
    pub fn two_voter(
        params: &TcrParams,
        voter_tokens: &Rational,
        challenger_tokens: &Rational,
    ) -> Result<Self> {
        Ok(ThresholdSet {
            delta: delta_threshold(params, challenger_tokens)?,
            delta_prime: params.effective_margin(challenger_tokens)?,
            epsilon: epsilon_threshold(params, voter_tokens)?,
        })
    }

    /// `1 + delta`
    pub fn necessary_bound(&self) -> Rational {
        Rational::one() + &self.delta
    }

    /// `1 + delta'`
    pub fn challenge_bound(&self) -> Rational {
        Rational::one() + &self.delta_prime
    }

    /// `1 + epsilon`
    pub fn accept_bound(&self) -> Rational {
        Rational::one() + &self.epsilon
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio, to_f64};

    fn params(d: Rational, s: Rational) -> TcrParams {
        TcrParams::new(int(100), d, ratio(1, 2), s).unwrap()
    }

    #[test]
    fn epsilon_examples() {
        let p = params(ratio(1, 2), ratio(1, 10));
        assert_eq!(epsilon_threshold(&p, &int(100)).unwrap(), ratio(7, 25));
        assert_eq!(epsilon_threshold(&params(int(1), int(0)), &int(100)).unwrap(), int(0));
        let large = epsilon_threshold(&p, &int(1_000_000)).unwrap();
        assert!((to_f64(&large) - 0.1).abs() < 1e-3);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_threshold(&params(ratio(1, 2), ratio(1, 10)), &int(100)).unwrap(), ratio(1, 2));
        assert_eq!(delta_threshold(&params(int(0), ratio(1, 10)), &int(100)).unwrap(), int(0));
        assert_eq!(delta_threshold(&params(int(1), ratio(1, 10)), &int(200)).unwrap(), ratio(1, 2));
        assert!(delta_threshold(&params(int(1), ratio(1, 10)), &int(99)).is_err());
    }

    #[test]
    fn threshold_set_binds_margin() {
        let p = params(ratio(1, 2), ratio(1, 10));
        let set = ThresholdSet::two_voter(&p, &int(100), &int(100)).unwrap();
        assert_eq!(set.delta_prime, set.delta);
        assert_eq!(set.accept_bound(), ratio(32, 25));
        assert_eq!(set.challenge_bound(), ratio(3, 2));

        let p = p.with_challenge_margin(ratio(1, 5)).unwrap();
        let set = ThresholdSet::two_voter(&p, &int(100), &int(100)).unwrap();
        assert_eq!(set.challenge_bound(), ratio(6, 5));
        assert_eq!(set.necessary_bound(), ratio(3, 2));
    }
}

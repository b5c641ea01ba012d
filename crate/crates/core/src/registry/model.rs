use num::{One, Signed, Zero};

use super::RegistryState;
use crate::error::{Result, TcrError};
use crate::ledger::ValuationPair;
use crate::rational::Rational;

/// Maps registry state to per-token values.
pub trait ValuationModel: Send + Sync {
    fn v0(&self, state: &RegistryState) -> Rational;

    /// Nondecreasing in `rating` at fixed state.
    fn vr(&self, state: &RegistryState, rating: &Rational) -> Rational;

    fn valuation(&self, state: &RegistryState, rating: &Rational) -> Result<ValuationPair> {
        let v0 = self.v0(state);
        let vr = self.vr(state, rating);
        for (which, value) in [("v0", &v0), ("vr", &vr)] {
            if !value.is_positive() {
                return Err(TcrError::NonPositiveValuation {
                    which,
                    value: value.to_string(),
                });
            }
        }
        ValuationPair::new(v0, vr)
    }
}

/// Token value tracks the mean rating of the listed entries:
/// `v0 = baseline + mean(entries)`, `vr = baseline + mean(entries + r)`.
/// An empty registry has mean 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceModel {
    pub baseline: Rational,
}

/// Token value depends on the candidate alone: `v0 = baseline`,
/// `vr = baseline + r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticModel {
    pub baseline: Rational,
}

impl Default for ReferenceModel {
    fn default() -> Self {
        ReferenceModel {
            baseline: Rational::one(),
        }
    }
}

impl Default for StaticModel {
    fn default() -> Self {
        StaticModel {
            baseline: Rational::one(),
        }
    }
}

fn mean<'a>(ratings: impl Iterator<Item = &'a Rational>) -> Rational {
    let (sum, count) = ratings.fold((Rational::zero(), 0i64), |(s, c), r| (s + r, c + 1));
    if count == 0 {
        sum
    } else {
        sum / Rational::from_integer(count.into())
    }
}

impl ValuationModel for ReferenceModel {
    fn v0(&self, state: &RegistryState) -> Rational {
        &self.baseline + mean(state.entries.iter().map(|e| &e.rating))
    }

    fn vr(&self, state: &RegistryState, rating: &Rational) -> Rational {
        let with = state.entries.iter().map(|e| &e.rating).chain(std::iter::once(rating));
        &self.baseline + mean(with)
    }
}

impl ValuationModel for StaticModel {
    fn v0(&self, _state: &RegistryState) -> Rational {
        self.baseline.clone()
    }

    fn vr(&self, _state: &RegistryState, rating: &Rational) -> Rational {
        &self.baseline + rating
    }
}

/// Model choice as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    Reference(ReferenceModel),
    Static(StaticModel),
}

impl ValuationModel for ModelKind {
    fn v0(&self, state: &RegistryState) -> Rational {
        match self {
            ModelKind::Reference(m) => m.v0(state),
            ModelKind::Static(m) => m.v0(state),
        }
    }

    fn vr(&self, state: &RegistryState, rating: &Rational) -> Rational {
        match self {
            ModelKind::Reference(m) => m.vr(state, rating),
            ModelKind::Static(m) => m.vr(state, rating),
        }
    }
}

use std::cmp::Ordering;

use num::One;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    AcceptDominant,
    RejectDominant,
    Tie,
}

/// Payoff-dominant choice between unanimous acceptance and unanimous
/// rejection. Both give each voter the same token count, so only `gamma`
/// decides.
pub fn classify_dominance(gamma: &Rational) -> Dominance {
    match gamma.cmp(&Rational::one()) {
        Ordering::Greater => Dominance::AcceptDominant,
        Ordering::Less => Dominance::RejectDominant,
        Ordering::Equal => Dominance::Tie,
    }
}

/// `a` Pareto-dominates `b`: nobody is worse off and somebody is strictly better off.
pub fn pareto_dominates(a: &[Rational], b: &[Rational]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Less => return false,
            Ordering::Greater => strictly = true,
            Ordering::Equal => {}
        }
    }
    strictly
}

/// Indices of the vectors not Pareto-dominated by any other vector.
pub fn pareto_maximal(vectors: &[&[Rational]]) -> Vec<usize> {
    (0..vectors.len())
        .filter(|&i| {
            !vectors
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && pareto_dominates(other, vectors[i]))
        })
        .collect()
}

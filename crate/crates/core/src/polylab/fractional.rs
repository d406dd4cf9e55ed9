//! Fractional operations and their Lipschitz constants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Caps, Result};
use crate::polylab::multiset::{compositions, max_count_difference, multisets, Multiset};
use crate::polylab::operation::{Operation, SymmetricOperation};
use crate::scalar::ExactField;

/// A probability distribution over symmetric operations of a common arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalOperation<T> {
    support: Vec<(SymmetricOperation, T)>,
}

impl<T: ExactField> FractionalOperation<T> {
    pub fn new(support: Vec<(SymmetricOperation, T)>) -> Result<Self> {
        let Some((first, _)) = support.first() else {
            return invalid("a fractional operation needs a non-empty support");
        };
        let (d, n) = (first.domain_size(), first.arity());
        if support.iter().any(|(g, _)| g.domain_size() != d || g.arity() != n) {
            return invalid("support operations must share domain and arity");
        }
        if support.iter().any(|(_, w)| !w.is_positive()) {
            return invalid("weights must be positive");
        }
        let total = support.iter().fold(T::zero(), |acc, (_, w)| acc + w.clone());
        if !total.is_one() {
            return invalid(format!("weights sum to {total}, not 1"));
        }
        Ok(FractionalOperation { support })
    }

    pub fn point_mass(op: SymmetricOperation) -> Self {
        FractionalOperation { support: vec![(op, T::one())] }
    }

    pub fn uniform(ops: Vec<SymmetricOperation>) -> Result<Self> {
        let w = T::from_ratio(1, ops.len().max(1) as i64);
        Self::new(ops.into_iter().map(|g| (g, w.clone())).collect())
    }

    pub fn support(&self) -> &[(SymmetricOperation, T)] {
        &self.support
    }

    pub fn arity(&self) -> usize {
        self.support[0].0.arity()
    }

    pub fn domain_size(&self) -> usize {
        self.support[0].0.domain_size()
    }

    /// `Pr_{g∼φ}[g(a) ≠ g(b)]`.
    pub fn disagreement(&self, a: &Multiset, b: &Multiset) -> T {
        let (ra, rb) = (a.rank(), b.rank());
        self.support
            .iter()
            .filter(|(g, _)| g.table()[ra] != g.table()[rb])
            .fold(T::zero(), |acc, (_, w)| acc + w.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzAnalysis<T> {
    /// Least `c` such that `φ` is `c`-Lipschitz.
    pub constant: T,
    /// A pair attaining the constant, if any pair disagrees at all.
    pub witness: Option<(Multiset, Multiset)>,
}

/// Exact scan over unordered pairs of distinct multisets.
pub fn lipschitz_analysis<T: ExactField>(
    phi: &FractionalOperation<T>,
    cap: u64,
) -> Result<LipschitzAnalysis<T>> {
    let (d, n) = (phi.domain_size(), phi.arity());
    let len = compositions(d, n);
    Caps::check(cap, "multiset pairs |Δ_n(A)|²", len.saturating_mul(len))?;
    let all: Vec<Multiset> = multisets(d, n).collect();

    // integer weights over a common denominator
    let scale = phi.support.iter().fold(BigInt::one(), |l, (_, w)| l.lcm(&w.denom_big()));
    let weights: Vec<i128> = phi
        .support
        .iter()
        .map(|(_, w)| (w.numer_big() * (&scale / w.denom_big())).to_i128())
        .collect::<Option<_>>()
        .unwrap_or_default();
    let fast = weights.len() == phi.support.len();

    // best ratio so far as (weight numerator · n) / max count difference
    let mut best: Option<(BigInt, u64, usize, usize)> = None;
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let diff = max_count_difference(all[i].counts(), all[j].counts()) as u64;
            let mass: BigInt = if fast {
                let m: i128 = phi
                    .support
                    .iter()
                    .zip(&weights)
                    .filter(|((g, _), _)| g.table()[i] != g.table()[j])
                    .map(|(_, w)| *w)
                    .sum();
                BigInt::from(m)
            } else {
                let p = phi.disagreement(&all[i], &all[j]) * T::from_bigints(scale.clone(), BigInt::one()).expect("scale");
                p.numer_big()
            };
            if mass.is_zero() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bm, bd, _, _)) => &mass * BigInt::from(*bd) > bm * BigInt::from(diff),
            };
            if better {
                best = Some((mass, diff, i, j));
            }
        }
    }
    Ok(match best {
        None => LipschitzAnalysis { constant: T::zero(), witness: None },
        Some((mass, diff, i, j)) => LipschitzAnalysis {
            constant: T::from_bigints(mass * BigInt::from(n), scale * BigInt::from(diff))
                .expect("constant fits the scalar type"),
            witness: Some((all[i].clone(), all[j].clone())),
        },
    })
}

/// `max Pr[g(a) ≠ g(b)] / dist(a, b)` over distinct multisets `a, b`.
pub fn lipschitz_constant<T: ExactField>(phi: &FractionalOperation<T>, cap: u64) -> Result<T> {
    lipschitz_analysis(phi, cap).map(|a| a.constant)
}

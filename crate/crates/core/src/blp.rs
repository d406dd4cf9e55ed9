//! The basic LP relaxation, the per-constraint loss LP, and the
//! valued-to-crisp translation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::csp::{all_tuples, Constraint, Instance, InstanceKind, Payload, Relation};
use crate::error::{invalid, Error, Result};
use crate::ratlp::{simplex_solve, Comparison, LPOutcome, LinearProgram};
use crate::scalar::{is_distribution, sum, ExactField};

/// An optimal solution of the basic LP relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPSolution<T> {
    /// `p_v(a)` for every variable `v` and label `a`.
    pub var_marginals: Vec<Vec<T>>,
    /// `p_C(t)` indexed by tuple code, one row per constraint.
    pub constraint_dists: Vec<Vec<T>>,
    /// BLPopt.
    pub value: T,
    /// A common denominator of every `p_v(a)`; every `p_v(a)·n` is integral.
    pub denominator: u64,
}

impl<T: ExactField> LPSolution<T> {
    /// `p_v` as a multiset of size `denominator`: `counts[a] = p_v(a)·n`.
    pub fn counts(&self, var: usize) -> Vec<u64> {
        let n = T::from_ratio(self.denominator as i64, 1);
        self.var_marginals[var]
            .iter()
            .map(|p| (p.clone() * n.clone()).to_integer_u64().expect("p_v ∈ Δ_n"))
            .collect()
    }

    pub fn num_vars(&self) -> usize {
        self.var_marginals.len()
    }
}

/// Least common multiple of the denominators of `values`, as `u64`.
pub fn common_denominator<'a, T: ExactField>(values: impl IntoIterator<Item = &'a T>) -> Result<u64> {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(&v.denom_big());
    }
    l.to_u64().ok_or_else(|| Error::Invalid(format!("denominator {l} exceeds 64 bits")))
}

fn constraint_offsets<T: ExactField>(instance: &Instance<T>) -> (Vec<usize>, usize) {
    let d = instance.domain().size();
    let mut next = instance.num_vars() * d;
    let offsets = instance
        .constraints()
        .iter()
        .map(|c| {
            let at = next;
            next += d.pow(c.scope.len() as u32);
            at
        })
        .collect();
    (offsets, next)
}

/// Builds the relaxation: variables `p_v(a)` then `p_C(t)` per constraint.
pub fn blp_program<T: ExactField>(instance: &Instance<T>) -> LinearProgram<T> {
    let d = instance.domain().size();
    let (offsets, total) = constraint_offsets(instance);
    let mut lp = LinearProgram::new(total);

    for v in 0..instance.num_vars() {
        let terms: Vec<_> = (0..d).map(|a| (v * d + a, T::one())).collect();
        lp.add_sparse_row(&terms, Comparison::Eq, T::one());
    }
    for (c, &base) in instance.constraints().iter().zip(&offsets) {
        let payload = instance.payload_of(c);
        let k = c.scope.len();
        let tuples: Vec<Vec<usize>> = all_tuples(d, k).collect();
        if !c.hard {
            for (code, _) in tuples.iter().enumerate() {
                let cost = c.weight.clone() * payload.cost_code(code);
                if !cost.is_zero() {
                    lp.set_objective_coeff(base + code, cost);
                }
            }
        } else {
            let rel = payload.as_relation().expect("hard ⇒ relation");
            let terms: Vec<_> = (0..tuples.len())
                .filter(|&code| rel.contains_code(code))
                .map(|code| (base + code, T::one()))
                .collect();
            lp.add_sparse_row(&terms, Comparison::Eq, T::one());
        }
        for (j, &var) in c.scope.iter().enumerate() {
            for a in 0..d {
                let mut terms: Vec<_> = tuples
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t[j] == a)
                    .map(|(code, _)| (base + code, T::one()))
                    .collect();
                terms.push((var * d + a, -T::one()));
                lp.add_sparse_row(&terms, Comparison::Eq, T::zero());
            }
        }
    }
    lp
}

/// Solves the basic LP relaxation of `instance` exactly.
pub fn solve_blp<T: ExactField>(instance: &Instance<T>) -> Result<LPSolution<T>> {
    let lp = blp_program(instance);
    let (point, value) = match simplex_solve(&lp) {
        LPOutcome::Optimal { point, value } => (point, value),
        LPOutcome::Infeasible => {
            return Err(Error::Infeasible("hard constraints are LP-infeasible".into()))
        }
        LPOutcome::Unbounded => unreachable!("the relaxation is bounded"),
    };
    let d = instance.domain().size();
    let var_marginals: Vec<Vec<T>> =
        (0..instance.num_vars()).map(|v| point[v * d..(v + 1) * d].to_vec()).collect();
    let (offsets, _) = constraint_offsets(instance);
    let constraint_dists = instance
        .constraints()
        .iter()
        .zip(&offsets)
        .map(|(c, &base)| point[base..base + d.pow(c.scope.len() as u32)].to_vec())
        .collect();
    let denominator = common_denominator(var_marginals.iter().flatten())?;
    Ok(LPSolution { var_marginals, constraint_dists, value, denominator })
}

/// The `j`-th marginal of a distribution over `A^k` given by tuple code.
pub fn marginal<T: ExactField>(dist: &[T], domain_size: usize, arity: usize, j: usize) -> Vec<T> {
    let mut out = vec![T::zero(); domain_size];
    for (t, p) in all_tuples(domain_size, arity).zip(dist) {
        if !p.is_zero() {
            out[t[j]] = out[t[j]].clone() + p.clone();
        }
    }
    out
}

/// Checks that every `p_v` is a distribution and every `p_C` has the
/// marginals of its scope, exactly.
pub fn check_marginals<T: ExactField>(instance: &Instance<T>, sol: &LPSolution<T>) -> bool {
    let d = instance.domain().size();
    sol.var_marginals.iter().all(|p| p.len() == d && is_distribution(p))
        && instance.constraints().iter().zip(&sol.constraint_dists).all(|(c, dist)| {
            let k = c.scope.len();
            dist.iter().all(|x| !x.is_negative())
                && c.scope
                    .iter()
                    .enumerate()
                    .all(|(j, &v)| marginal(dist, d, k, j) == sol.var_marginals[v])
        })
}

/// Objective value of an LP point recomputed from the instance.
pub fn blp_objective<T: ExactField>(instance: &Instance<T>, sol: &LPSolution<T>) -> T {
    instance
        .constraints()
        .iter()
        .zip(&sol.constraint_dists)
        .filter(|(c, _)| !c.hard)
        .fold(T::zero(), |acc, (c, dist)| {
            let p = instance.payload_of(c);
            let local = dist
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .fold(T::zero(), |a, (code, x)| a + x.clone() * p.cost_code(code));
            acc + c.weight.clone() * local
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loss<T> {
    /// `min_p (1 − p(R))` over couplings with the given marginals.
    pub value: T,
    /// A minimising coupling over `A^r`, indexed by tuple code.
    pub coupling: Vec<T>,
}

/// Minimum mass outside `relation` over all distributions on `A^r` whose
/// marginals are `marginals`, with a witnessing coupling.
pub fn loss<T: ExactField>(marginals: &[Vec<T>], relation: &Relation) -> Result<Loss<T>> {
    let r = relation.arity();
    let d = relation.domain_size();
    if marginals.len() != r {
        return Err(Error::ArityMismatch { expected: r, got: marginals.len() });
    }
    if let Some(p) = marginals.iter().find(|p| p.len() != d || !is_distribution(p)) {
        return invalid(format!("marginal {p:?} is not a distribution over {d} labels"));
    }
    let tuples: Vec<Vec<usize>> = all_tuples(d, r).collect();
    let mut lp = LinearProgram::new(tuples.len());
    for code in 0..tuples.len() {
        if !relation.contains_code(code) {
            lp.set_objective_coeff(code, T::one());
        }
    }
    for (j, p) in marginals.iter().enumerate() {
        for (a, pa) in p.iter().enumerate() {
            let terms: Vec<_> = tuples
                .iter()
                .enumerate()
                .filter(|(_, t)| t[j] == a)
                .map(|(code, _)| (code, T::one()))
                .collect();
            lp.add_sparse_row(&terms, Comparison::Eq, pa.clone());
        }
    }
    match simplex_solve(&lp) {
        LPOutcome::Optimal { point, value } => Ok(Loss { value, coupling: point }),
        // Product measures always exist, so the transportation polytope is non-empty.
        other => unreachable!("transportation LP returned {other:?}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossCheck<T> {
    pub constraint: usize,
    /// `1 − p_C(R)` read off the LP solution.
    pub mass_outside: T,
    /// `loss(p_{v_1}, …, p_{v_r}, R)` from an independent LP.
    pub loss: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossReport<T> {
    pub checks: Vec<LossCheck<T>>,
}

impl<T> LossReport<T> {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Compares `1 − p_C(R)` with the loss of the constraint's marginals for
/// every constraint of a crisp (or mixed) instance.
pub fn verify_loss_identity<T: ExactField>(
    instance: &Instance<T>,
    sol: &LPSolution<T>,
) -> Result<LossReport<T>> {
    let mut checks = Vec::with_capacity(instance.constraints().len());
    for (i, (c, dist)) in instance.constraints().iter().zip(&sol.constraint_dists).enumerate() {
        let Payload::Relation(rel) = instance.payload_of(c) else {
            return invalid(format!("constraint {i} carries a cost function"));
        };
        let inside = sum(dist.iter().enumerate().filter(|(code, _)| rel.contains_code(*code)).map(|(_, p)| p));
        let mass_outside = T::one() - inside;
        let marginals: Vec<Vec<T>> = c.scope.iter().map(|&v| sol.var_marginals[v].clone()).collect();
        let l = loss(&marginals, rel)?.value;
        checks.push(LossCheck { constraint: i, pass: mass_outside == l, mass_outside, loss: l });
    }
    Ok(LossReport { checks })
}

/// Replaces every payload `ρ` by `R_ρ = {t : ρ(t) = 0}`, keeping scopes and
/// weights, and returns the smallest positive payload value `m`. For every
/// assignment the valued value `v₁` and crisp value `v₂` satisfy
/// `v₁ ≤ v₂ ≤ v₁/m`.
pub fn vcsp_to_mincsp<T: ExactField>(instance: &Instance<T>) -> Result<(Instance<T>, T)> {
    let m = instance
        .payloads()
        .iter()
        .flat_map(|p| {
            let size = p.domain_size().pow(p.arity() as u32);
            (0..size).map(move |code| p.cost_code(code))
        })
        .filter(|v| v.is_positive())
        .min()
        .ok_or_else(|| Error::Invalid("every cost function is identically zero".into()))?;
    let payloads: Vec<Payload<T>> =
        instance.payloads().iter().map(|p| Payload::Relation(p.zero_set())).collect();
    let kind = match instance.kind() {
        InstanceKind::Mixed => InstanceKind::Mixed,
        _ => InstanceKind::Crisp,
    };
    let constraints: Vec<Constraint<T>> = instance.constraints().to_vec();
    let crisp = Instance::new(instance.num_vars(), instance.domain(), payloads, constraints, kind)?;
    Ok((crisp, m))
}

/// Multiplies the denominator by the least `t ≥ 1` with `t·n ≥ target_min`.
/// Probabilities are unchanged.
pub fn rescale_denominator<T: Clone>(sol: &LPSolution<T>, target_min: u64) -> Result<LPSolution<T>> {
    if target_min == 0 {
        return invalid("target denominator must be at least 1");
    }
    let n = sol.denominator;
    let t = target_min.div_ceil(n).max(1);
    let denominator = n
        .checked_mul(t)
        .ok_or_else(|| Error::Invalid("rescaled denominator exceeds 64 bits".into()))?;
    Ok(LPSolution { denominator, ..sol.clone() })
}

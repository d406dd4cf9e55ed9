//! Universal instances and the c-bounded fractional assignment probe.

use std::collections::BTreeSet;

use crate::blp::loss;
use crate::csp::{Constraint, Instance, Language, Payload};
use crate::error::{pow_sat, Caps, Result};
use crate::polylab::fractional::FractionalOperation;
use crate::polylab::multiset::{compositions, multisets, Multiset};
use crate::polylab::operation::SymmetricOperation;
use crate::ratlp::{simplex_solve, Comparison, LPOutcome, LinearProgram};
use crate::scalar::ExactField;

/// The `n`-th universal instance. Variable `i` is the multiset of rank `i`
/// in `Δ_n(A)`; payloads are the language's relations (zero sets for cost
/// functions) in member order. Every constraint `(p₁,…,p_r, R)` carries
/// weight `1 − loss(p₁,…,p_r, R)`, zero weights included.
pub fn universal_instance<T: ExactField>(
    language: &Language<T>,
    n: usize,
    cap: u64,
) -> Result<Instance<T>> {
    let d = language.domain().size();
    let len = compositions(d, n);
    Caps::check(cap, "multisets |Δ_n(A)|", len)?;
    let vars: Vec<Multiset> = multisets(d, n).collect();
    let relations = language.relations();
    let total: u128 = relations.iter().map(|r| pow_sat(vars.len(), r.arity())).sum();
    Caps::check(cap, "universal constraints Σ |Δ_n|^r", total)?;

    let dists: Vec<Vec<T>> = vars.iter().map(Multiset::distribution).collect();
    let mut constraints = Vec::with_capacity(total as usize);
    for (pi, r) in relations.iter().enumerate() {
        for scope in crate::csp::all_tuples(vars.len(), r.arity()) {
            let marginals: Vec<Vec<T>> = scope.iter().map(|&v| dists[v].clone()).collect();
            let l = loss(&marginals, r)?.value;
            constraints.push(Constraint { scope, payload: pi, weight: T::one() - l, hard: false });
        }
    }
    let payloads = relations.into_iter().map(Payload::Relation).collect();
    Instance::new_internal(vars.len(), language.domain(), payloads, constraints)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CBound<T> {
    /// Least `c` admitting a `c`-bounded fractional assignment, with an
    /// optimal one (assignments `Δ_n(A) → A` are symmetric operations).
    Bounded { c: T, certificate: FractionalOperation<T> },
    /// Some constraint of loss 0 is violated by every assignment.
    Infeasible,
}

impl<T> CBound<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            CBound::Bounded { c, .. } => Some(c),
            CBound::Infeasible => None,
        }
    }
}

/// Minimises `c` over distributions `x` on all assignments `g : Δ_n(A) → A`
/// subject to `Pr_x[g violates C] ≤ c · loss(C)` for every constraint of
/// the `n`-th universal instance.
pub fn min_c_bound<T: ExactField>(language: &Language<T>, n: usize, caps: &Caps) -> Result<CBound<T>> {
    let d = language.domain().size();
    let len = compositions(d, n);
    Caps::check(caps.enumeration, "multisets |Δ_n(A)|", len)?;
    let assignments = pow_sat(d, len as usize);
    Caps::check(caps.farkas, "assignments |A|^|Δ_n(A)|", assignments)?;
    let univ = universal_instance(language, n, caps.enumeration)?;
    let len = len as usize;
    let count = assignments as usize;

    let table_of = |mut code: usize| {
        let mut t = vec![0usize; len];
        for slot in t.iter_mut().rev() {
            *slot = code % d;
            code /= d;
        }
        t
    };
    let tables: Vec<Vec<usize>> = (0..count).map(table_of).collect();

    // identical (violation pattern, loss) rows are merged
    let mut rows: BTreeSet<(Vec<bool>, T)> = BTreeSet::new();
    for c in univ.constraints() {
        let rel = univ.payload_of(c).as_relation().expect("universal payloads are relations");
        let violated: Vec<bool> = tables
            .iter()
            .map(|g| {
                let image: Vec<usize> = c.scope.iter().map(|&v| g[v]).collect();
                !rel.contains(&image)
            })
            .collect();
        if violated.iter().any(|&b| b) {
            rows.insert((violated, T::one() - c.weight.clone()));
        }
    }

    let c_var = count;
    let mut lp = LinearProgram::new(count + 1);
    lp.set_objective_coeff(c_var, T::one());
    let all: Vec<(usize, T)> = (0..count).map(|g| (g, T::one())).collect();
    lp.add_sparse_row(&all, Comparison::Eq, T::one());
    for (violated, l) in rows {
        let mut terms: Vec<(usize, T)> =
            violated.iter().enumerate().filter(|(_, &b)| b).map(|(g, _)| (g, T::one())).collect();
        if !l.is_zero() {
            terms.push((c_var, -l));
        }
        lp.add_sparse_row(&terms, Comparison::Le, T::zero());
    }

    match simplex_solve(&lp) {
        LPOutcome::Optimal { point, value } => {
            let support = point[..count]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(g, x)| Ok((SymmetricOperation::new(d, n, tables[g].clone())?, x.clone())))
                .collect::<Result<Vec<_>>>()?;
            Ok(CBound::Bounded { c: value, certificate: FractionalOperation::new(support)? })
        }
        LPOutcome::Infeasible => Ok(CBound::Infeasible),
        LPOutcome::Unbounded => unreachable!("c is bounded below by 0"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Domain, Relation};
    use crate::gadgets::{preset_language, Preset};
    use crate::polylab::fractional::lipschitz_constant;
    use crate::polylab::operation::is_polymorphism;
    use crate::scalar::q;
    use num_rational::BigRational as Q;

    fn lang(d: usize, rels: Vec<Relation>) -> Language<Q> {
        Language::new(Domain::new(d).unwrap(), rels.into_iter().map(Into::into).collect()).unwrap()
    }

    fn neq2() -> Relation {
        Relation::from_predicate(2, 2, |t| t[0] != t[1]).unwrap()
    }

    #[test]
    fn universal_instance_of_equality() {
        let u = universal_instance(&lang(2, vec![Relation::equality(2)]), 1, 1 << 20).unwrap();
        assert_eq!(u.num_vars(), 2);
        let w: Vec<(Vec<usize>, Q)> =
            u.constraints().iter().map(|c| (c.scope.clone(), c.weight.clone())).collect();
        assert_eq!(
            w,
            vec![
                (vec![0, 0], q(1, 1)),
                (vec![0, 1], q(0, 1)),
                (vec![1, 0], q(0, 1)),
                (vec![1, 1], q(1, 1)),
            ]
        );
        assert!(u.is_internal());
    }

    #[test]
    fn universal_instance_of_neq() {
        let u = universal_instance(&lang(2, vec![neq2()]), 2, 1 << 20).unwrap();
        assert_eq!(u.num_vars(), 3);
        assert_eq!(u.constraints().len(), 9);
        // rank 1 is the uniform multiset {0, 1}
        let c = u.constraints().iter().find(|c| c.scope == vec![1, 1]).unwrap();
        assert_eq!(c.weight, q(1, 1));
    }

    #[test]
    fn point_masses_have_zero_one_weights() {
        let horn = preset_language::<Q>(Preset::HornSat { k: 3 }).unwrap();
        let u = universal_instance(&horn, 1, 1 << 20).unwrap();
        let label: Vec<usize> = multisets(2, 1).map(|m| m.to_tuple()[0]).collect();
        for c in u.constraints() {
            let rel = u.payload_of(c).as_relation().unwrap();
            let image: Vec<usize> = c.scope.iter().map(|&v| label[v]).collect();
            let inside = rel.contains(&image);
            assert_eq!(c.weight, if inside { q(1, 1) } else { q(0, 1) });
        }
    }

    #[test]
    fn c_bound_examples() {
        let caps = Caps::default();
        let eq01 = lang(
            2,
            vec![Relation::equality(2), Relation::singleton(2, 0).unwrap(), Relation::singleton(2, 1).unwrap()],
        );
        assert_eq!(min_c_bound(&eq01, 1, &caps).unwrap().value(), Some(&q(1, 1)));
        let eq = lang(2, vec![Relation::equality(2)]);
        assert_eq!(min_c_bound(&eq, 1, &caps).unwrap().value(), Some(&q(0, 1)));
    }

    #[test]
    fn hornsat_bound_grows() {
        let horn = preset_language::<Q>(Preset::HornSat { k: 3 }).unwrap();
        let caps = Caps::default();
        let c2 = min_c_bound(&horn, 2, &caps).unwrap().value().cloned().unwrap();
        let c3 = min_c_bound(&horn, 3, &caps).unwrap().value().cloned().unwrap();
        assert!(c2 < c3, "{c2} !< {c3}");
    }

    #[test]
    fn neq_with_equality_is_infeasible() {
        let l = lang(2, vec![neq2(), Relation::equality(2)]);
        assert_eq!(min_c_bound(&l, 2, &Caps::default()).unwrap(), CBound::Infeasible);
    }

    #[test]
    fn certificate_support_is_polymorphic_and_lipschitz() {
        let horn = preset_language::<Q>(Preset::HornSat { k: 3 }).unwrap().with_equality();
        for n in 1..=3 {
            let CBound::Bounded { c, certificate } = min_c_bound(&horn, n, &Caps::default()).unwrap() else {
                panic!("hornsat admits min");
            };
            for (g, _) in certificate.support() {
                assert!(is_polymorphism(g, &horn, 1 << 20).unwrap());
            }
            let lip = lipschitz_constant(&certificate, 1 << 20).unwrap();
            assert!(lip <= c * q::<Q>(2, 1));
        }
    }

    #[test]
    fn farkas_cap() {
        let horn = preset_language::<Q>(Preset::HornSat { k: 3 }).unwrap();
        let caps = Caps { farkas: 100, ..Caps::default() };
        assert!(min_c_bound(&horn, 6, &caps).is_err());
    }
}

//! Primitive-positive formulas and the near-unanimity gadget test.

use serde::{Deserialize, Serialize};

use crate::csp::{all_tuples, Language, Relation};
use crate::error::{invalid, pow_sat, Caps, Error, Result};
use crate::scalar::ExactField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomRelation {
    /// Index into the language's members.
    Member(usize),
    Equality,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub relation: AtomRelation,
    /// Variables `0..num_free` are free, the rest bound.
    pub vars: Vec<usize>,
}

/// `∃ y₁…y_l. ψ(x₁…x_k, y₁…y_l)` with `ψ` a conjunction of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PPFormula {
    pub num_free: usize,
    pub num_bound: usize,
    pub atoms: Vec<Atom>,
}

impl PPFormula {
    pub fn new(num_free: usize, num_bound: usize, atoms: Vec<Atom>) -> Result<Self> {
        let f = PPFormula { num_free, num_bound, atoms };
        if num_free == 0 {
            return invalid("a pp-formula needs at least one free variable");
        }
        if let Some(a) = f.atoms.iter().find(|a| a.vars.iter().any(|&v| v >= f.num_vars())) {
            return invalid(format!("atom {a:?} uses an undeclared variable"));
        }
        Ok(f)
    }

    pub fn num_vars(&self) -> usize {
        self.num_free + self.num_bound
    }

    /// Resolves every atom to a relation, checking arities.
    pub fn resolve<T: ExactField>(&self, language: &Language<T>) -> Result<Vec<(Relation, &[usize])>> {
        let d = language.domain().size();
        let members = language.relations();
        self.atoms
            .iter()
            .map(|a| {
                let rel = match a.relation {
                    AtomRelation::Equality => Relation::equality(d),
                    AtomRelation::Member(i) => members
                        .get(i)
                        .cloned()
                        .ok_or_else(|| Error::Invalid(format!("no language member {i}")))?,
                };
                if rel.arity() != a.vars.len() {
                    return Err(Error::ArityMismatch { expected: rel.arity(), got: a.vars.len() });
                }
                Ok((rel, a.vars.as_slice()))
            })
            .collect()
    }
}

/// The relation defined by `formula` over `language`, by exhaustive join
/// and projection onto the free variables.
pub fn pp_evaluate<T: ExactField>(formula: &PPFormula, language: &Language<T>, cap: u64) -> Result<Relation> {
    let d = language.domain().size();
    let atoms = formula.resolve(language)?;
    Caps::check(cap, "pp assignments |A|^(k+l)", pow_sat(d, formula.num_vars()))?;
    let k = formula.num_free;
    let mut out = Vec::new();
    let mut image = Vec::new();
    for free in all_tuples(d, k) {
        let mut full = free.clone();
        full.resize(formula.num_vars(), 0);
        let witnessed = all_tuples(d, formula.num_bound).any(|bound| {
            full[k..].copy_from_slice(&bound);
            atoms.iter().all(|(rel, vars)| {
                image.clear();
                image.extend(vars.iter().map(|&v| full[v]));
                rel.contains(&image)
            })
        });
        if witnessed {
            out.push(free);
        }
    }
    Relation::new(d, k, out)
}

/// Whether `R ∩ {a,b}^k = {a,b}^k ∖ {(a,…,a)}`.
pub fn check_nu_gadget(relation: &Relation, a: usize, b: usize) -> bool {
    let d = relation.domain_size();
    if a == b || a >= d || b >= d {
        return false;
    }
    let k = relation.arity();
    all_tuples(2, k).all(|bits| {
        let t: Vec<usize> = bits.iter().map(|&x| if x == 0 { a } else { b }).collect();
        let all_a = bits.iter().all(|&x| x == 0);
        relation.contains(&t) != all_a
    })
}

//! Preset languages, random instances and the hypergraph gadget.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, Domain, Instance, InstanceKind, Language, Payload, Relation};
use crate::error::{invalid, Error, Result};
use crate::polylab::pp::{check_nu_gadget, pp_evaluate, PPFormula};
use crate::scalar::ExactField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    HornSat { k: usize },
    Ihbs { k: usize },
    MinUncut,
    Min2Cnf,
    RPlusMinus,
    PowersetLattice { s: usize },
}

impl Preset {
    pub const NAMES: &'static [&'static str] =
        &["hornsat:K", "ihbs:K", "min-uncut", "min-2cnf", "r-plus-minus", "powerset-lattice:S"];
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::HornSat { k } => write!(f, "hornsat:{k}"),
            Preset::Ihbs { k } => write!(f, "ihbs:{k}"),
            Preset::MinUncut => write!(f, "min-uncut"),
            Preset::Min2Cnf => write!(f, "min-2cnf"),
            Preset::RPlusMinus => write!(f, "r-plus-minus"),
            Preset::PowersetLattice { s } => write!(f, "powerset-lattice:{s}"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let num = |default: Option<usize>| -> Result<usize> {
            match param {
                Some(p) => p.parse().map_err(|_| Error::Invalid(format!("bad parameter in {s:?}"))),
                None => default.ok_or_else(|| Error::Invalid(format!("{name} needs a parameter"))),
            }
        };
        let no_param = || match param {
            Some(_) => invalid(format!("{name} takes no parameter")),
            None => Ok(()),
        };
        match name {
            "hornsat" => Ok(Preset::HornSat { k: num(Some(3))? }),
            "ihbs" => Ok(Preset::Ihbs { k: num(Some(3))? }),
            "min-uncut" => no_param().map(|_| Preset::MinUncut),
            "min-2cnf" => no_param().map(|_| Preset::Min2Cnf),
            "r-plus-minus" => no_param().map(|_| Preset::RPlusMinus),
            "powerset-lattice" => Ok(Preset::PowersetLattice { s: num(Some(2))? }),
            _ => invalid(format!("unknown language {s:?}; expected one of {}", Preset::NAMES.join(", "))),
        }
    }
}

/// A clause over Boolean variables; `true` marks a positive literal.
fn clause(signs: &[bool]) -> Relation {
    Relation::from_predicate(2, signs.len(), |t| t.iter().zip(signs).any(|(&x, &pos)| (x == 1) == pos))
        .expect("clause arity ≥ 1")
}

/// The named language over its natural domain: `{0,1}` for the clause
/// languages, labels `0,1,2` for `−1,0,+1`, and bitmasks for powerset
/// lattices.
pub fn preset_language<T: ExactField>(preset: Preset) -> Result<Language<T>> {
    let (d, rels): (usize, Vec<Relation>) = match preset {
        Preset::HornSat { k } => {
            if k < 2 {
                return invalid("hornsat needs k ≥ 2");
            }
            let mut rels = Vec::new();
            for r in 1..=k {
                let mut neg = vec![false; r];
                rels.push(clause(&neg));
                neg[r - 1] = true;
                rels.push(clause(&neg));
            }
            (2, rels)
        }
        Preset::Ihbs { k } => {
            if k < 2 {
                return invalid("ihbs needs k ≥ 2");
            }
            let mut rels = vec![clause(&[false]), clause(&[true]), clause(&[false, false]), clause(&[false, true])];
            for r in 3..=k {
                rels.push(clause(&vec![false; r]));
            }
            (2, rels)
        }
        Preset::MinUncut => (2, vec![Relation::from_predicate(2, 2, |t| t[0] != t[1])?]),
        Preset::Min2Cnf => (2, vec![clause(&[true, true]), clause(&[false, true]), clause(&[false, false])]),
        Preset::RPlusMinus => {
            let sum = |t: &[usize]| t.iter().map(|&x| x as i64 - 1).sum::<i64>();
            (
                3,
                vec![
                    Relation::from_predicate(3, 3, |t| sum(t) >= 1)?,
                    Relation::from_predicate(3, 3, |t| sum(t) <= -1)?,
                ],
            )
        }
        Preset::PowersetLattice { s } => {
            if s == 0 || s > 4 {
                return invalid("powerset-lattice needs 1 ≤ s ≤ 4");
            }
            let d = 1usize << s;
            let bit = |x: usize, j: usize| x >> j & 1 == 1;
            let mut rels = vec![Relation::from_predicate(d, 2, |t| t[0] & !t[1] == 0)?];
            for j in 0..s {
                rels.push(Relation::from_predicate(d, 1, |t| bit(t[0], j))?);
                rels.push(Relation::from_predicate(d, 1, |t| !bit(t[0], j))?);
                for l in 0..s {
                    rels.push(Relation::from_predicate(d, 2, |t| !bit(t[0], j) || bit(t[1], l))?);
                    rels.push(Relation::from_predicate(d, 2, |t| !(bit(t[0], j) && bit(t[1], l)))?);
                }
            }
            (d, rels)
        }
    };
    let mut unique: Vec<Relation> = Vec::with_capacity(rels.len());
    for r in rels {
        if !unique.contains(&r) {
            unique.push(r);
        }
    }
    Language::new(Domain::new(d)?, unique.into_iter().map(Payload::Relation).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HypergraphSpec")]
pub struct Hypergraph {
    num_vertices: usize,
    arity: usize,
    edges: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct HypergraphSpec {
    num_vertices: usize,
    arity: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphSpec> for Hypergraph {
    type Error = Error;

    fn try_from(h: HypergraphSpec) -> Result<Self> {
        Hypergraph::new(h.num_vertices, h.arity, h.edges)
    }
}

impl Hypergraph {
    pub fn new(num_vertices: usize, arity: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if arity == 0 {
            return invalid("hypergraph arity must be positive");
        }
        for e in &edges {
            if e.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, got: e.len() });
            }
            if let Some(&v) = e.iter().find(|&&v| v >= num_vertices) {
                return Err(Error::VariableOutOfRange { var: v, num_vars: num_vertices });
            }
            let mut s = e.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != arity {
                return invalid(format!("edge {e:?} repeats a vertex"));
            }
        }
        Ok(Hypergraph { num_vertices, arity, edges })
    }

    /// Every `arity`-subset of the vertices.
    pub fn complete(num_vertices: usize, arity: usize) -> Result<Self> {
        let edges = (0..num_vertices).combinations_of(arity);
        Self::new(num_vertices, arity, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn is_independent(&self, set: &[bool]) -> bool {
        self.edges.iter().all(|e| !e.iter().all(|&v| set[v]))
    }
}

trait Combinations {
    fn combinations_of(self, k: usize) -> Vec<Vec<usize>>;
}

impl Combinations for std::ops::Range<usize> {
    fn combinations_of(self, k: usize) -> Vec<Vec<usize>> {
        let items: Vec<usize> = self.collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..items.len() {
                cur.push(items[i]);
                go(items, k, i + 1, cur, out);
                cur.pop();
            }
        }
        go(&items, k, 0, &mut cur, &mut out);
        out
    }
}

/// Size of a largest independent set, by exhaustion over vertex subsets.
pub fn max_independent_set(h: &Hypergraph) -> Result<usize> {
    if h.num_vertices > 24 {
        return invalid("independent-set oracle limited to 24 vertices");
    }
    let n = h.num_vertices;
    let mut best = 0;
    let mut set = vec![false; n];
    for mask in 0u32..(1 << n) {
        for (v, s) in set.iter_mut().enumerate() {
            *s = mask >> v & 1 == 1;
        }
        if h.is_independent(&set) {
            best = best.max(mask.count_ones() as usize);
        }
    }
    Ok(best)
}

/// `{v : s(v) = a}` for an assignment of the gadget's vertex variables.
pub fn induced_set(s: &Assignment, num_vertices: usize, a: usize) -> Vec<bool> {
    s.values()[..num_vertices].iter().map(|&x| x == a).collect()
}

/// The mixed instance whose optimum is `1 − m/|V|` for `m` the size of a
/// largest independent set. Vertex `v` is variable `v`; each hyperedge
/// gets a hard copy of the pp-definition (or of `R` itself) with fresh bound
/// variables, and each vertex a soft `{a}` constraint of weight `1/|V|`.
pub fn hypergraph_gadget<T: ExactField>(
    h: &Hypergraph,
    relation: &Relation,
    a: usize,
    b: usize,
    pp: Option<(&PPFormula, &Language<T>)>,
    cap: u64,
) -> Result<Instance<T>> {
    if !check_nu_gadget(relation, a, b) {
        return invalid("R ∩ {a,b}^k must be {a,b}^k minus (a,…,a)");
    }
    if h.arity != relation.arity() {
        return Err(Error::ArityMismatch { expected: relation.arity(), got: h.arity });
    }
    if h.num_vertices == 0 {
        return invalid("the hypergraph needs at least one vertex");
    }
    let d = relation.domain_size();
    let resolved = match pp {
        Some((f, lang)) => {
            if lang.domain().size() != d {
                return invalid("pp language lives on a different domain");
            }
            if f.num_free != relation.arity() || pp_evaluate(f, lang, cap)? != *relation {
                return invalid("the pp-formula does not define R");
            }
            Some((f, f.resolve(lang)?))
        }
        None => None,
    };
    let bound = resolved.as_ref().map_or(0, |(f, _)| f.num_bound);
    let num_vars = h.num_vertices + bound * h.edges.len();
    let mut builder = Instance::<T>::builder(Domain::new(d)?, num_vars);
    let single = builder.payload(Relation::singleton(d, a)?);
    match &resolved {
        None => {
            let id = builder.payload(relation.clone());
            for e in &h.edges {
                builder.hard(e.clone(), id);
            }
        }
        Some((f, atoms)) => {
            let ids: Vec<usize> = atoms.iter().map(|(rel, _)| builder.payload(rel.clone())).collect();
            for (ei, e) in h.edges.iter().enumerate() {
                let base = h.num_vertices + ei * f.num_bound;
                let var = |x: usize| if x < f.num_free { e[x] } else { base + x - f.num_free };
                for ((_, vars), &id) in atoms.iter().zip(&ids) {
                    builder.hard(vars.iter().map(|&x| var(x)).collect(), id);
                }
            }
        }
    }
    let w = T::from_ratio(1, h.num_vertices as i64);
    for v in 0..h.num_vertices {
        builder.soft(vec![v], single, w.clone());
    }
    builder.build_as(InstanceKind::Mixed)
}

/// Weights `k/denominator` with `k` uniform in `min..=max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRange {
    pub min: u64,
    pub max: u64,
    pub denominator: u64,
}

impl Default for WeightRange {
    fn default() -> Self {
        WeightRange { min: 1, max: 4, denominator: 4 }
    }
}

impl WeightRange {
    pub fn unit() -> Self {
        WeightRange { min: 1, max: 1, denominator: 1 }
    }

    fn validate(&self) -> Result<()> {
        if self.min == 0 || self.min > self.max || self.denominator == 0 {
            invalid("weight range needs 1 ≤ min ≤ max and a positive denominator")
        } else {
            Ok(())
        }
    }

    fn draw<T: ExactField>(&self, rng: &mut ChaCha8Rng) -> T {
        T::from_ratio(rng.gen_range(self.min..=self.max) as i64, self.denominator as i64)
    }
}

fn random_scope(rng: &mut ChaCha8Rng, num_vars: usize, arity: usize) -> Vec<usize> {
    let mut scope = (0..num_vars).choose_multiple(rng, arity);
    scope.shuffle(rng);
    scope
}

/// Uniform scopes of distinct variables, uniform members, weights from
/// `weights`. Equal seeds give equal instances.
pub fn random_instance<T: ExactField>(
    language: &Language<T>,
    num_vars: usize,
    num_constraints: usize,
    weights: WeightRange,
    seed: u64,
) -> Result<Instance<T>> {
    weights.validate()?;
    if num_vars < language.max_arity() {
        return invalid("fewer variables than the language's maximum arity");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Instance::builder(language.domain(), num_vars);
    for _ in 0..num_constraints {
        let member = language.members().choose(&mut rng).expect("languages are non-empty").clone();
        let scope = random_scope(&mut rng, num_vars, member.arity());
        let w = weights.draw(&mut rng);
        let id = b.payload(member);
        b.soft(scope, id, w);
    }
    let kind = if language.is_crisp() { InstanceKind::Crisp } else { InstanceKind::Valued };
    b.build_as(kind)
}

/// Like [`random_instance`] but every constraint is satisfied (cost 0) by a
/// planted assignment, which is returned alongside.
pub fn random_satisfiable_instance<T: ExactField>(
    language: &Language<T>,
    num_vars: usize,
    num_constraints: usize,
    weights: WeightRange,
    seed: u64,
) -> Result<(Instance<T>, Assignment)> {
    weights.validate()?;
    if num_vars < language.max_arity() {
        return invalid("fewer variables than the language's maximum arity");
    }
    let d = language.domain().size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = if language.is_crisp() { InstanceKind::Crisp } else { InstanceKind::Valued };
    // a planted assignment that satisfies no member on any scope is redrawn
    for _ in 0..100 {
        let planted: Vec<usize> = (0..num_vars).map(|_| rng.gen_range(0..d)).collect();
        let mut b = Instance::builder(language.domain(), num_vars);
        let mut added = 0;
        let mut attempts = 0;
        while added < num_constraints && attempts < 1000 * (num_constraints + 1) {
            attempts += 1;
            let member = language.members().choose(&mut rng).expect("languages are non-empty");
            let scope = random_scope(&mut rng, num_vars, member.arity());
            let image: Vec<usize> = scope.iter().map(|&v| planted[v]).collect();
            if !member.cost(&image).is_zero() {
                continue;
            }
            let w = weights.draw(&mut rng);
            let id = b.payload(member.clone());
            b.soft(scope, id, w);
            added += 1;
        }
        if added == num_constraints {
            return Ok((b.build_as(kind)?, Assignment(planted)));
        }
    }
    Err(Error::Infeasible("no planted assignment satisfies the language".into()))
}

/// Random `arity`-uniform hypergraph with each edge present
/// with probability `num/den`.
pub fn random_hypergraph(num_vertices: usize, arity: usize, num: u32, den: u32, seed: u64) -> Result<Hypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..num_vertices)
        .combinations_of(arity)
        .into_iter()
        .filter(|_| rng.gen_ratio(num.min(den), den))
        .collect();
    Hypergraph::new(num_vertices, arity, edges)
}

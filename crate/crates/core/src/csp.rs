//! Domains, relations, cost functions, languages, instances and exact
//! evaluation.
//!
//! Tuples over a domain of size `d` are encoded as integers in big-endian
//! base `d`, so `A^k` is enumerated lexicographically by `0..d^k`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, pow_sat, Caps, Error, Result};
use crate::scalar::ExactField;

/// Largest `|A|^k` for which a relation membership table is materialised.
const MAX_TABLE: u128 = 1 << 24;

pub fn encode_tuple(tuple: &[usize], domain_size: usize) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * domain_size + a)
}

pub fn decode_tuple(mut code: usize, domain_size: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = code % domain_size;
        code /= domain_size;
    }
    out
}

/// All tuples of `A^arity` in lexicographic order.
pub fn all_tuples(domain_size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = domain_size.pow(arity as u32);
    (0..total).map(move |c| decode_tuple(c, domain_size, arity))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return invalid("domain size must be at least 1");
        }
        Ok(Domain { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check_label(&self, label: usize) -> Result<()> {
        if label < self.size {
            Ok(())
        } else {
            Err(Error::LabelOutOfRange { label, domain_size: self.size })
        }
    }
}

/// A `k`-ary relation: a duplicate-free set of label tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    domain_size: usize,
    arity: usize,
    tuples: Vec<Vec<usize>>,
    member: Vec<bool>,
}

impl Relation {
    pub fn new(
        domain_size: usize,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        if arity == 0 {
            return invalid("relation arity must be positive");
        }
        if domain_size == 0 {
            return invalid("domain size must be at least 1");
        }
        if pow_sat(domain_size, arity) > MAX_TABLE {
            return invalid(format!("relation table {domain_size}^{arity} is too large"));
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, got: t.len() });
            }
            for &a in &t {
                if a >= domain_size {
                    return Err(Error::LabelOutOfRange { label: a, domain_size });
                }
            }
            set.insert(t);
        }
        Ok(Self::from_sorted(domain_size, arity, set.into_iter().collect()))
    }

    fn from_sorted(domain_size: usize, arity: usize, tuples: Vec<Vec<usize>>) -> Self {
        let mut member = vec![false; domain_size.pow(arity as u32)];
        for t in &tuples {
            member[encode_tuple(t, domain_size)] = true;
        }
        Relation { domain_size, arity, tuples, member }
    }

    /// The relation `{t ∈ A^arity : keep(t)}`.
    pub fn from_predicate(
        domain_size: usize,
        arity: usize,
        keep: impl Fn(&[usize]) -> bool,
    ) -> Result<Self> {
        Self::new(domain_size, arity, all_tuples(domain_size, arity).filter(|t| keep(t)))
    }

    pub fn equality(domain_size: usize) -> Self {
        Self::from_predicate(domain_size, 2, |t| t[0] == t[1]).expect("binary table is small")
    }

    pub fn singleton(domain_size: usize, label: usize) -> Result<Self> {
        Self::new(domain_size, 1, [vec![label]])
    }

    pub fn full(domain_size: usize, arity: usize) -> Result<Self> {
        Self::from_predicate(domain_size, arity, |_| true)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&a| a < self.domain_size)
            && self.member[encode_tuple(tuple, self.domain_size)]
    }

    /// Membership by tuple code; the caller guarantees the code is in range.
    pub fn contains_code(&self, code: usize) -> bool {
        self.member[code]
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        if self.arity != other.arity || self.domain_size != other.domain_size {
            return invalid("intersection of relations with different signatures");
        }
        let tuples = self.tuples.iter().filter(|t| other.contains(t)).cloned().collect();
        Ok(Self::from_sorted(self.domain_size, self.arity, tuples))
    }
}

/// A `[0,1]`-valued cost function, total on `A^arity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CostFunction<T> {
    domain_size: usize,
    arity: usize,
    table: Vec<T>,
}

impl<T: ExactField> CostFunction<T> {
    /// `table` is indexed by tuple code (lexicographic order on `A^arity`).
    pub fn new(domain_size: usize, arity: usize, table: Vec<T>) -> Result<Self> {
        if arity == 0 || domain_size == 0 {
            return invalid("cost function needs positive arity and domain size");
        }
        let expected = pow_sat(domain_size, arity);
        if expected > MAX_TABLE || table.len() as u128 != expected {
            return invalid(format!(
                "cost table has {} entries, expected {domain_size}^{arity}",
                table.len()
            ));
        }
        if let Some(v) = table.iter().find(|v| v.is_negative() || **v > T::one()) {
            return invalid(format!("cost value {v} outside [0,1]"));
        }
        Ok(CostFunction { domain_size, arity, table })
    }

    pub fn from_fn(domain_size: usize, arity: usize, f: impl Fn(&[usize]) -> T) -> Result<Self> {
        let table = all_tuples(domain_size, arity).map(|t| f(&t)).collect();
        Self::new(domain_size, arity, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn value(&self, tuple: &[usize]) -> &T {
        &self.table[encode_tuple(tuple, self.domain_size)]
    }

    /// `R_ρ = {t : ρ(t) = 0}`.
    pub fn zero_set(&self) -> Relation {
        let tuples = all_tuples(self.domain_size, self.arity)
            .zip(&self.table)
            .filter(|(_, v)| v.is_zero())
            .map(|(t, _)| t)
            .collect();
        Relation::from_sorted(self.domain_size, self.arity, tuples)
    }

    /// Smallest strictly positive value in the table.
    pub fn min_positive(&self) -> Option<&T> {
        self.table.iter().filter(|v| v.is_positive()).min()
    }
}

/// Characteristic cost function of `relation`: 0 on members, 1 elsewhere.
pub fn crisp_to_valued<T: ExactField>(relation: &Relation) -> CostFunction<T> {
    let table = relation
        .member
        .iter()
        .map(|&m| if m { T::zero() } else { T::one() })
        .collect();
    CostFunction { domain_size: relation.domain_size, arity: relation.arity, table }
}

/// A constraint payload: a crisp relation or a cost function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload<T> {
    Relation(Relation),
    Cost(CostFunction<T>),
}

impl<T: ExactField> Payload<T> {
    pub fn arity(&self) -> usize {
        match self {
            Payload::Relation(r) => r.arity(),
            Payload::Cost(c) => c.arity(),
        }
    }

    pub fn domain_size(&self) -> usize {
        match self {
            Payload::Relation(r) => r.domain_size(),
            Payload::Cost(c) => c.domain_size(),
        }
    }

    pub fn is_relation(&self) -> bool {
        matches!(self, Payload::Relation(_))
    }

    pub fn as_relation(&self) -> Option<&Relation> {
        match self {
            Payload::Relation(r) => Some(r),
            Payload::Cost(_) => None,
        }
    }

    /// Payload value of the tuple with the given code.
    pub fn cost_code(&self, code: usize) -> T {
        match self {
            Payload::Relation(r) => {
                if r.contains_code(code) {
                    T::zero()
                } else {
                    T::one()
                }
            }
            Payload::Cost(c) => c.table[code].clone(),
        }
    }

    pub fn cost(&self, tuple: &[usize]) -> T {
        self.cost_code(encode_tuple(tuple, self.domain_size()))
    }

    /// The relation itself, or the zero set of a cost function.
    pub fn zero_set(&self) -> Relation {
        match self {
            Payload::Relation(r) => r.clone(),
            Payload::Cost(c) => c.zero_set(),
        }
    }
}

impl<T> From<Relation> for Payload<T> {
    fn from(r: Relation) -> Self {
        Payload::Relation(r)
    }
}

impl<T> From<CostFunction<T>> for Payload<T> {
    fn from(c: CostFunction<T>) -> Self {
        Payload::Cost(c)
    }
}

/// A finite constraint language over a fixed domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language<T> {
    domain: Domain,
    members: Vec<Payload<T>>,
    max_arity: usize,
    has_equality: bool,
    has_singletons: bool,
}

impl<T: ExactField> Language<T> {
    pub fn new(domain: Domain, members: Vec<Payload<T>>) -> Result<Self> {
        for m in &members {
            if m.domain_size() != domain.size() {
                return invalid("language member over a different domain");
            }
        }
        let eq = Relation::equality(domain.size());
        let has_equality = members.iter().any(|m| m.as_relation() == Some(&eq));
        let has_singletons = (0..domain.size()).all(|a| {
            let s = Relation::singleton(domain.size(), a).expect("label in range");
            members.iter().any(|m| m.as_relation() == Some(&s))
        });
        let max_arity = members.iter().map(|m| m.arity()).max().unwrap_or(0);
        Ok(Language { domain, members, max_arity, has_equality, has_singletons })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn members(&self) -> &[Payload<T>] {
        &self.members
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn has_equality(&self) -> bool {
        self.has_equality
    }

    pub fn has_singletons(&self) -> bool {
        self.has_singletons
    }

    pub fn is_crisp(&self) -> bool {
        self.members.iter().all(|m| m.is_relation())
    }

    /// Members viewed as relations (cost functions through their zero sets).
    pub fn relations(&self) -> Vec<Relation> {
        self.members.iter().map(|m| m.zero_set()).collect()
    }

    /// Adds the equality relation unless already present.
    pub fn with_equality(mut self) -> Self {
        if !self.has_equality {
            self.members.push(Relation::equality(self.domain.size()).into());
        }
        Self::new(self.domain, self.members).expect("same domain")
    }

    /// Adds every unary singleton `{a}` not already present.
    pub fn with_singletons(mut self) -> Self {
        for a in 0..self.domain.size() {
            let s = Relation::singleton(self.domain.size(), a).expect("label in range");
            if !self.members.iter().any(|m| m.as_relation() == Some(&s)) {
                self.members.push(s.into());
            }
        }
        Self::new(self.domain, self.members).expect("same domain")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Crisp,
    Valued,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint<T> {
    pub scope: Vec<usize>,
    /// Index into the owning instance's payload table.
    pub payload: usize,
    pub weight: T,
    pub hard: bool,
}

/// A (possibly valued, possibly mixed) Min CSP instance. Constraints refer
/// to payloads by index so that languages are shared, as in the JSON format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<T> {
    num_vars: usize,
    domain: Domain,
    payloads: Vec<Payload<T>>,
    constraints: Vec<Constraint<T>>,
    kind: InstanceKind,
    internal: bool,
}

impl<T: ExactField> Instance<T> {
    pub fn new(
        num_vars: usize,
        domain: Domain,
        payloads: Vec<Payload<T>>,
        constraints: Vec<Constraint<T>>,
        kind: InstanceKind,
    ) -> Result<Self> {
        Self::build(num_vars, domain, payloads, constraints, kind, false)
    }

    /// Instances produced by the polymorphism lab may carry weight-0
    /// constraints (universal instances).
    pub(crate) fn new_internal(
        num_vars: usize,
        domain: Domain,
        payloads: Vec<Payload<T>>,
        constraints: Vec<Constraint<T>>,
    ) -> Result<Self> {
        Self::build(num_vars, domain, payloads, constraints, InstanceKind::Crisp, true)
    }

    fn build(
        num_vars: usize,
        domain: Domain,
        payloads: Vec<Payload<T>>,
        constraints: Vec<Constraint<T>>,
        kind: InstanceKind,
        internal: bool,
    ) -> Result<Self> {
        for p in &payloads {
            if p.domain_size() != domain.size() {
                return invalid("payload over a different domain");
            }
        }
        for (i, c) in constraints.iter().enumerate() {
            let payload = payloads
                .get(c.payload)
                .ok_or_else(|| Error::Invalid(format!("constraint {i}: unknown payload {}", c.payload)))?;
            if payload.arity() != c.scope.len() {
                return Err(Error::ArityMismatch { expected: payload.arity(), got: c.scope.len() });
            }
            if let Some(&var) = c.scope.iter().find(|&&v| v >= num_vars) {
                return Err(Error::VariableOutOfRange { var, num_vars });
            }
            if c.weight.is_negative() || (!internal && c.weight.is_zero()) {
                return invalid(format!("constraint {i}: weight {} must be positive", c.weight));
            }
            if c.hard && !payload.is_relation() {
                return invalid(format!("constraint {i}: hard constraints need a relation"));
            }
            match kind {
                InstanceKind::Crisp if c.hard || !payload.is_relation() => {
                    return invalid(format!("constraint {i}: not allowed in a crisp instance"));
                }
                InstanceKind::Valued if c.hard => {
                    return invalid(format!("constraint {i}: hard constraint in a valued instance"));
                }
                _ => {}
            }
        }
        Ok(Instance { num_vars, domain, payloads, constraints, kind, internal })
    }

    pub fn builder(domain: Domain, num_vars: usize) -> InstanceBuilder<T> {
        InstanceBuilder { domain, num_vars, payloads: Vec::new(), constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn payloads(&self) -> &[Payload<T>] {
        &self.payloads
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn is_internal(&self) -> bool {
        self.internal
    }

    pub fn payload_of(&self, c: &Constraint<T>) -> &Payload<T> {
        &self.payloads[c.payload]
    }

    /// Maximum arity over the payloads actually used by constraints.
    pub fn max_arity(&self) -> usize {
        self.constraints.iter().map(|c| c.scope.len()).max().unwrap_or(0)
    }

    /// The payload table viewed as a language.
    pub fn language(&self) -> Language<T> {
        Language::new(self.domain, self.payloads.clone()).expect("validated at construction")
    }

    pub fn check_assignment(&self, s: &Assignment) -> Result<()> {
        if s.0.len() != self.num_vars {
            return Err(Error::AssignmentLength { got: s.0.len(), expected: self.num_vars });
        }
        s.0.iter().try_for_each(|&a| self.domain.check_label(a))
    }

    fn scope_code(&self, c: &Constraint<T>, values: &[usize]) -> usize {
        c.scope.iter().fold(0, |acc, &v| acc * self.domain.size() + values[v])
    }

    /// Soft value of `s`, ignoring hard constraints.
    pub fn value(&self, s: &Assignment) -> Result<T> {
        Ok(evaluate(self, s, false)?.value)
    }
}

pub struct InstanceBuilder<T> {
    domain: Domain,
    num_vars: usize,
    payloads: Vec<Payload<T>>,
    constraints: Vec<Constraint<T>>,
}

impl<T: ExactField> InstanceBuilder<T> {
    /// Registers a payload and returns its id; identical payloads are shared.
    pub fn payload(&mut self, p: impl Into<Payload<T>>) -> usize {
        let p = p.into();
        if let Some(i) = self.payloads.iter().position(|q| *q == p) {
            return i;
        }
        self.payloads.push(p);
        self.payloads.len() - 1
    }

    pub fn soft(&mut self, scope: Vec<usize>, payload: usize, weight: T) -> &mut Self {
        self.constraints.push(Constraint { scope, payload, weight, hard: false });
        self
    }

    pub fn hard(&mut self, scope: Vec<usize>, payload: usize) -> &mut Self {
        self.constraints.push(Constraint { scope, payload, weight: T::one(), hard: true });
        self
    }

    /// Builds with the narrowest kind the constraints allow.
    pub fn build(&self) -> Result<Instance<T>> {
        let kind = if self.constraints.iter().any(|c| c.hard) {
            InstanceKind::Mixed
        } else if self.payloads.iter().all(|p| p.is_relation()) {
            InstanceKind::Crisp
        } else {
            InstanceKind::Valued
        };
        self.build_as(kind)
    }

    pub fn build_as(&self, kind: InstanceKind) -> Result<Instance<T>> {
        Instance::new(
            self.num_vars,
            self.domain,
            self.payloads.clone(),
            self.constraints.clone(),
            kind,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn values(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation<T> {
    /// Σ over soft constraints of weight × payload value.
    pub value: T,
    /// Indices of violated hard constraints.
    pub hard_violations: Vec<usize>,
}

impl<T> Evaluation<T> {
    pub fn is_feasible(&self) -> bool {
        self.hard_violations.is_empty()
    }
}

/// Exact objective of `s`. In strict mode a violated hard constraint is an
/// error; otherwise violations are reported next to the soft value.
pub fn evaluate<T: ExactField>(
    instance: &Instance<T>,
    s: &Assignment,
    strict: bool,
) -> Result<Evaluation<T>> {
    instance.check_assignment(s)?;
    let mut value = T::zero();
    let mut hard_violations = Vec::new();
    for (i, c) in instance.constraints.iter().enumerate() {
        let code = instance.scope_code(c, &s.0);
        let cost = instance.payload_of(c).cost_code(code);
        if c.hard {
            if !cost.is_zero() {
                if strict {
                    return Err(Error::HardViolation { constraint: i });
                }
                hard_violations.push(i);
            }
        } else if !cost.is_zero() {
            value = value + c.weight.clone() * cost;
        }
    }
    Ok(Evaluation { value, hard_violations })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum<T> {
    pub value: T,
    pub witness: Assignment,
}

/// Per-constraint costs scaled to integers over a common denominator, so
/// the exhaustive scan runs on machine integers.
struct ScaledCosts {
    scale: BigInt,
    tables: Vec<Vec<i128>>,
}

impl ScaledCosts {
    fn new<T: ExactField>(instance: &Instance<T>) -> Option<Self> {
        let weighted: Vec<Vec<T>> = instance
            .constraints
            .iter()
            .map(|c| {
                let p = instance.payload_of(c);
                let size = instance.domain.size().pow(c.scope.len() as u32);
                (0..size)
                    .map(|code| if c.hard { T::zero() } else { c.weight.clone() * p.cost_code(code) })
                    .collect()
            })
            .collect();
        let mut scale = BigInt::one();
        for v in weighted.iter().flatten() {
            scale = scale.lcm(&v.denom_big());
        }
        let mut total: i128 = 0;
        let mut tables = Vec::with_capacity(weighted.len());
        for row in &weighted {
            let mut ints = Vec::with_capacity(row.len());
            let mut row_max: i128 = 0;
            for v in row {
                let x = (v.numer_big() * (&scale / v.denom_big())).to_i128()?;
                row_max = row_max.max(x);
                ints.push(x);
            }
            total = total.checked_add(row_max)?;
            tables.push(ints);
        }
        Some(ScaledCosts { scale, tables })
    }
}

/// Exhaustive minimisation of the soft value over hard-feasible
/// assignments. Returns the first minimiser in odometer order.
pub fn brute_force_opt<T: ExactField>(instance: &Instance<T>, cap: u64) -> Result<Optimum<T>> {
    let d = instance.domain.size();
    let n = instance.num_vars;
    Caps::check(cap, "brute-force assignments |A|^|V|", pow_sat(d, n))?;

    let hard: Vec<(usize, &Relation)> = instance
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| c.hard)
        .map(|(i, c)| (i, instance.payload_of(c).as_relation().expect("hard ⇒ relation")))
        .collect();

    let scaled = ScaledCosts::new(instance);
    let mut values = vec![0usize; n];
    let mut best: Option<(Option<i128>, T, Vec<usize>)> = None;
    loop {
        let feasible = hard
            .iter()
            .all(|(i, r)| r.contains_code(instance.scope_code(&instance.constraints[*i], &values)));
        if feasible {
            match &scaled {
                Some(sc) => {
                    let total: i128 = instance
                        .constraints
                        .iter()
                        .zip(&sc.tables)
                        .map(|(c, t)| t[instance.scope_code(c, &values)])
                        .sum();
                    if best.as_ref().is_none_or(|(b, _, _)| total < b.expect("integer path")) {
                        best = Some((Some(total), T::zero(), values.clone()));
                    }
                }
                None => {
                    let v = evaluate(instance, &Assignment(values.clone()), false)?.value;
                    if best.as_ref().is_none_or(|(_, b, _)| v < *b) {
                        best = Some((None, v, values.clone()));
                    }
                }
            }
        }
        // odometer, last variable fastest
        let mut i = n;
        loop {
            if i == 0 {
                return finish(best, scaled.as_ref());
            }
            i -= 1;
            values[i] += 1;
            if values[i] < d {
                break;
            }
            values[i] = 0;
        }
    }
}

fn finish<T: ExactField>(
    best: Option<(Option<i128>, T, Vec<usize>)>,
    scaled: Option<&ScaledCosts>,
) -> Result<Optimum<T>> {
    let (int_value, value, witness) =
        best.ok_or_else(|| Error::Infeasible("no assignment satisfies the hard constraints".into()))?;
    let value = match (int_value, scaled) {
        (Some(v), Some(sc)) => T::from_bigints(BigInt::from(v), sc.scale.clone())
            .ok_or_else(|| Error::Invalid("optimum does not fit the scalar type".into()))?,
        _ => value,
    };
    Ok(Optimum { value, witness: Assignment(witness) })
}

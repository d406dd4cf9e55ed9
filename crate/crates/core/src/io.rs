//! JSON formats. Rationals are always written as `"num/den"` strings.
//!
//! Instance files look like
//!
//! ```json
//! {
//!   "domain_size": 2,
//!   "num_vars": 3,
//!   "kind": "crisp",
//!   "payloads": [{ "type": "relation", "arity": 2, "tuples": [[0, 1], [1, 0]] }],
//!   "constraints": [{ "scope": [0, 1], "payload_id": 0, "weight": "1/1", "hard": false }]
//! }
//! ```
//!
//! Cost payloads are `{ "type": "cost", "arity": r, "table": [{ "tuple": [...], "value": "1/2" }] }`
//! with omitted tuples costing 0.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::blp::LPSolution;
use crate::csp::{all_tuples, Constraint, CostFunction, Domain, Instance, InstanceKind, Language, Payload, Relation};
use crate::error::{invalid, Result};
use crate::polylab::fractional::FractionalOperation;
use crate::polylab::operation::SymmetricOperation;
use crate::rounding::RoundingReport;
use crate::scalar::ExactField;

/// `serde(with = "rat")` for a single rational.
pub mod rat {
    use super::*;

    pub fn serialize<T: ExactField, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_ratio_string())
    }

    pub fn deserialize<'de, T: ExactField, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let s = String::deserialize(d)?;
        T::parse_ratio(&s).map_err(serde::de::Error::custom)
    }
}

/// `serde(with = "rat_vec")` for a vector of rationals.
pub mod rat_vec {
    use super::*;

    pub fn serialize<T: ExactField, S: Serializer>(xs: &[T], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(T::to_ratio_string))
    }

    pub fn deserialize<'de, T: ExactField, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| T::parse_ratio(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `serde(with = "rat_matrix")` for nested vectors of rationals.
pub mod rat_matrix {
    use super::*;

    pub fn serialize<T: ExactField, S: Serializer>(xs: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|row| row.iter().map(T::to_ratio_string).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, T: ExactField, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<T>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|row| row.iter().map(|s| T::parse_ratio(s).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostEntry {
    pub tuple: Vec<usize>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PayloadJson {
    Relation { arity: usize, tuples: Vec<Vec<usize>> },
    Cost { arity: usize, table: Vec<CostEntry> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub scope: Vec<usize>,
    pub payload_id: usize,
    pub weight: String,
    #[serde(default)]
    pub hard: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub domain_size: usize,
    pub num_vars: usize,
    pub kind: InstanceKind,
    pub payloads: Vec<PayloadJson>,
    pub constraints: Vec<ConstraintJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LanguageJson {
    pub domain_size: usize,
    pub members: Vec<PayloadJson>,
}

fn payload_to_json<T: ExactField>(p: &Payload<T>) -> PayloadJson {
    match p {
        Payload::Relation(r) => PayloadJson::Relation { arity: r.arity(), tuples: r.tuples().to_vec() },
        Payload::Cost(c) => PayloadJson::Cost {
            arity: c.arity(),
            table: all_tuples(c.domain_size(), c.arity())
                .zip(c.table())
                .filter(|(_, v)| !v.is_zero())
                .map(|(tuple, v)| CostEntry { tuple, value: v.to_ratio_string() })
                .collect(),
        },
    }
}

fn payload_from_json<T: ExactField>(p: &PayloadJson, d: usize) -> Result<Payload<T>> {
    Ok(match p {
        PayloadJson::Relation { arity, tuples } => Payload::Relation(Relation::new(d, *arity, tuples.clone())?),
        PayloadJson::Cost { arity, table } => {
            let size = d.checked_pow(*arity as u32).filter(|&s| s <= 1 << 24);
            let Some(size) = size else {
                return invalid("cost table too large");
            };
            let mut values = vec![T::zero(); size];
            for e in table {
                if e.tuple.len() != *arity {
                    return invalid(format!("cost tuple {:?} has the wrong arity", e.tuple));
                }
                if let Some(&a) = e.tuple.iter().find(|&&a| a >= d) {
                    return Err(crate::Error::LabelOutOfRange { label: a, domain_size: d });
                }
                values[crate::csp::encode_tuple(&e.tuple, d)] = T::parse_ratio(&e.value)?;
            }
            Payload::Cost(CostFunction::new(d, *arity, values)?)
        }
    })
}

impl<T: ExactField> From<&Instance<T>> for InstanceJson {
    fn from(inst: &Instance<T>) -> Self {
        InstanceJson {
            domain_size: inst.domain().size(),
            num_vars: inst.num_vars(),
            kind: inst.kind(),
            payloads: inst.payloads().iter().map(payload_to_json).collect(),
            constraints: inst
                .constraints()
                .iter()
                .map(|c| ConstraintJson {
                    scope: c.scope.clone(),
                    payload_id: c.payload,
                    weight: c.weight.to_ratio_string(),
                    hard: c.hard,
                })
                .collect(),
        }
    }
}

impl InstanceJson {
    pub fn to_instance<T: ExactField>(&self) -> Result<Instance<T>> {
        let domain = Domain::new(self.domain_size)?;
        let payloads = self
            .payloads
            .iter()
            .map(|p| payload_from_json(p, self.domain_size))
            .collect::<Result<Vec<_>>>()?;
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                Ok(Constraint {
                    scope: c.scope.clone(),
                    payload: c.payload_id,
                    weight: T::parse_ratio(&c.weight)?,
                    hard: c.hard,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.num_vars, domain, payloads, constraints, self.kind)
    }
}

fn to_pretty<S: Serialize>(x: &S) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serialisable");
    s.push('\n');
    s
}

pub fn instance_to_json<T: ExactField>(inst: &Instance<T>) -> String {
    to_pretty(&InstanceJson::from(inst))
}

pub fn instance_from_json<T: ExactField>(text: &str) -> Result<Instance<T>> {
    serde_json::from_str::<InstanceJson>(text)?.to_instance()
}

pub fn language_to_json<T: ExactField>(lang: &Language<T>) -> String {
    to_pretty(&LanguageJson {
        domain_size: lang.domain().size(),
        members: lang.members().iter().map(payload_to_json).collect(),
    })
}

pub fn language_from_json<T: ExactField>(text: &str) -> Result<Language<T>> {
    let l: LanguageJson = serde_json::from_str(text)?;
    let members = l.members.iter().map(|p| payload_from_json(p, l.domain_size)).collect::<Result<Vec<_>>>()?;
    Language::new(Domain::new(l.domain_size)?, members)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SymmetricOperationJson {
    domain_size: usize,
    arity: usize,
    /// One value per multiset, in rank order.
    table: Vec<usize>,
}

pub fn symmetric_op_to_json(op: &SymmetricOperation) -> String {
    to_pretty(op)
}

pub fn symmetric_op_from_json(text: &str) -> Result<SymmetricOperation> {
    let o: SymmetricOperationJson = serde_json::from_str(text)?;
    SymmetricOperation::new(o.domain_size, o.arity, o.table)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LPSolutionJson<T: ExactField> {
    #[serde(with = "rat")]
    pub value: T,
    pub denominator: u64,
    #[serde(with = "rat_matrix")]
    pub var_marginals: Vec<Vec<T>>,
    #[serde(with = "rat_matrix")]
    pub constraint_dists: Vec<Vec<T>>,
}

impl<T: ExactField> From<&LPSolution<T>> for LPSolutionJson<T> {
    fn from(s: &LPSolution<T>) -> Self {
        LPSolutionJson {
            value: s.value.clone(),
            denominator: s.denominator,
            var_marginals: s.var_marginals.clone(),
            constraint_dists: s.constraint_dists.clone(),
        }
    }
}

impl<T: ExactField> From<LPSolutionJson<T>> for LPSolution<T> {
    fn from(s: LPSolutionJson<T>) -> Self {
        LPSolution {
            value: s.value,
            denominator: s.denominator,
            var_marginals: s.var_marginals,
            constraint_dists: s.constraint_dists,
        }
    }
}

pub fn lp_solution_to_json<T: ExactField>(s: &LPSolution<T>) -> String {
    to_pretty(&LPSolutionJson::from(s))
}

pub fn lp_solution_from_json<T: ExactField>(text: &str) -> Result<LPSolution<T>> {
    Ok(serde_json::from_str::<LPSolutionJson<T>>(text)?.into())
}

#[derive(Debug, Clone, Serialize)]
struct HValue {
    h: u64,
    value: String,
}

#[derive(Debug, Clone, Serialize)]
struct RoundingReportJson {
    scheme: String,
    assignment: Vec<usize>,
    value: String,
    blp_value: String,
    n: u64,
    h: u64,
    h_values: Vec<HValue>,
    mean_value: String,
    seed: Option<u64>,
    feasible: bool,
}

pub fn rounding_report_to_value<T: ExactField>(r: &RoundingReport<T>) -> serde_json::Value {
    serde_json::to_value(RoundingReportJson {
        scheme: r.scheme.clone(),
        assignment: r.assignment.0.clone(),
        value: r.value.to_ratio_string(),
        blp_value: r.blp_value.to_ratio_string(),
        n: r.n,
        h: r.h,
        h_values: r.h_values.iter().map(|(h, v)| HValue { h: *h, value: v.to_ratio_string() }).collect(),
        mean_value: r.mean_value.to_ratio_string(),
        seed: r.seed,
        feasible: r.feasible,
    })
    .expect("serialisable")
}

#[derive(Debug, Clone, Serialize)]
struct WeightedOp<'a> {
    weight: String,
    op: &'a SymmetricOperation,
}

pub fn fractional_op_to_value<T: ExactField>(phi: &FractionalOperation<T>) -> serde_json::Value {
    let support: Vec<WeightedOp> =
        phi.support().iter().map(|(op, w)| WeightedOp { weight: w.to_ratio_string(), op }).collect();
    serde_json::to_value(support).expect("serialisable")
}

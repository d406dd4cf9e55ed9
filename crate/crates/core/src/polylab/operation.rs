//! Finite operations, identity classification and preservation checks.

use serde::{Deserialize, Serialize};

use crate::csp::{decode_tuple, encode_tuple, Language, Relation};
use crate::error::{invalid, pow_sat, Caps, Error, Result};
use crate::polylab::multiset::{compositions, multisets, rank, CompositionIter, Multiset};
use crate::scalar::ExactField;

pub trait Operation {
    fn domain_size(&self) -> usize;
    fn arity(&self) -> usize;
    fn apply(&self, args: &[usize]) -> usize;

    /// Whether `self` preserves `relation`; exhaustive over argument rows.
    fn preserves(&self, relation: &Relation, cap: u64) -> Result<bool>;
}

/// An `n`-ary operation given by its full table over `A^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralOperation {
    domain_size: usize,
    arity: usize,
    table: Vec<usize>,
}

impl GeneralOperation {
    pub fn new(domain_size: usize, arity: usize, table: Vec<usize>) -> Result<Self> {
        if arity == 0 {
            return invalid("operation arity must be positive");
        }
        if table.len() as u128 != pow_sat(domain_size, arity) {
            return invalid(format!("table has {} entries, expected {domain_size}^{arity}", table.len()));
        }
        if let Some(&a) = table.iter().find(|&&a| a >= domain_size) {
            return Err(Error::LabelOutOfRange { label: a, domain_size });
        }
        Ok(GeneralOperation { domain_size, arity, table })
    }

    pub fn from_fn(domain_size: usize, arity: usize, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let size = pow_sat(domain_size, arity);
        if size > 1 << 26 {
            return invalid(format!("operation table {domain_size}^{arity} is too large"));
        }
        let table = (0..size as usize).map(|c| f(&decode_tuple(c, domain_size, arity))).collect();
        Self::new(domain_size, arity, table)
    }

    pub fn projection(domain_size: usize, arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return invalid("projection index out of range");
        }
        Self::from_fn(domain_size, arity, |t| t[index])
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

impl Operation for GeneralOperation {
    fn domain_size(&self) -> usize {
        self.domain_size
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, args: &[usize]) -> usize {
        self.table[encode_tuple(args, self.domain_size)]
    }

    fn preserves(&self, relation: &Relation, cap: u64) -> Result<bool> {
        check_signature(self, relation)?;
        let rows = relation.tuples();
        if rows.is_empty() {
            return Ok(true);
        }
        Caps::check(cap, "argument rows |R|^n", pow_sat(rows.len(), self.arity))?;
        let k = relation.arity();
        let mut pick = vec![0usize; self.arity];
        let mut column = vec![0usize; self.arity];
        let mut image = vec![0usize; k];
        loop {
            for (j, out) in image.iter_mut().enumerate() {
                for (i, &r) in pick.iter().enumerate() {
                    column[i] = rows[r][j];
                }
                *out = self.apply(&column);
            }
            if !relation.contains(&image) {
                return Ok(false);
            }
            let mut i = self.arity;
            loop {
                if i == 0 {
                    return Ok(true);
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < rows.len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }
}

/// An `n`-ary symmetric operation, i.e. a map `Δ_n(A) → A`. The table is
/// indexed by multiset rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SymmetricOperation {
    domain_size: usize,
    arity: usize,
    table: Vec<usize>,
}

impl SymmetricOperation {
    pub fn new(domain_size: usize, arity: usize, table: Vec<usize>) -> Result<Self> {
        if arity == 0 || domain_size == 0 {
            return invalid("symmetric operation needs positive arity and domain");
        }
        if table.len() as u128 != compositions(domain_size, arity) {
            return invalid(format!(
                "symmetric table has {} entries, expected |Δ_{arity}| = {}",
                table.len(),
                compositions(domain_size, arity)
            ));
        }
        if let Some(&a) = table.iter().find(|&&a| a >= domain_size) {
            return Err(Error::LabelOutOfRange { label: a, domain_size });
        }
        Ok(SymmetricOperation { domain_size, arity, table })
    }

    /// Tabulates `f` over all multisets of size `arity`.
    pub fn from_fn(
        domain_size: usize,
        arity: usize,
        cap: u64,
        mut f: impl FnMut(&Multiset) -> usize,
    ) -> Result<Self> {
        Caps::check(cap, "multisets |Δ_n(A)|", compositions(domain_size, arity))?;
        let table = multisets(domain_size, arity).map(|m| f(&m)).collect();
        Self::new(domain_size, arity, table)
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply_counts(&self, counts: &[usize]) -> usize {
        self.table[rank(counts)]
    }

    pub fn apply_multiset(&self, m: &Multiset) -> usize {
        self.apply_counts(m.counts())
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.domain_size).all(|a| {
            let mut counts = vec![0; self.domain_size];
            counts[a] = self.arity;
            self.apply_counts(&counts) == a
        })
    }

    /// Whether the value depends only on the set of arguments.
    pub fn is_totally_symmetric(&self) -> bool {
        let mut by_support: std::collections::HashMap<Vec<bool>, usize> = Default::default();
        multisets(self.domain_size, self.arity).zip(&self.table).all(|(m, &v)| {
            let support = m.counts().iter().map(|&c| c > 0).collect();
            *by_support.entry(support).or_insert(v) == v
        })
    }

    /// Expands to the full `A^n` table.
    pub fn to_general(&self, cap: u64) -> Result<GeneralOperation> {
        Caps::check(cap, "operation table |A|^n", pow_sat(self.domain_size, self.arity))?;
        GeneralOperation::from_fn(self.domain_size, self.arity, |t| self.apply(t))
    }
}

impl Operation for SymmetricOperation {
    fn domain_size(&self) -> usize {
        self.domain_size
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, args: &[usize]) -> usize {
        let mut counts = vec![0; self.domain_size];
        for &a in args {
            counts[a] += 1;
        }
        self.apply_counts(&counts)
    }

    /// Symmetric operations only see the multiset of argument rows, so it
    /// suffices to range over multisets of `n` rows of the relation.
    fn preserves(&self, relation: &Relation, cap: u64) -> Result<bool> {
        check_signature(self, relation)?;
        let rows = relation.tuples();
        if rows.is_empty() {
            return Ok(true);
        }
        Caps::check(cap, "row multisets C(|R|+n-1, n)", compositions(rows.len(), self.arity))?;
        let k = relation.arity();
        let mut image = vec![0usize; k];
        for mult in CompositionIter::new(rows.len(), self.arity) {
            for (j, out) in image.iter_mut().enumerate() {
                let counts = column_counts(rows, &mult, j, self.domain_size);
                *out = self.apply_counts(&counts);
            }
            if !relation.contains(&image) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Label counts of column `j` for the row multiset with multiplicities `mult`.
pub(crate) fn column_counts(rows: &[Vec<usize>], mult: &[usize], j: usize, d: usize) -> Vec<usize> {
    let mut counts = vec![0; d];
    for (row, &m) in rows.iter().zip(mult) {
        counts[row[j]] += m;
    }
    counts
}

fn check_signature(op: &impl Operation, relation: &Relation) -> Result<()> {
    if op.domain_size() != relation.domain_size() {
        invalid("operation and relation live on different domains")
    } else {
        Ok(())
    }
}

/// True iff `op` preserves every member of `language` (cost functions are
/// checked through their zero sets).
pub fn is_polymorphism<T: ExactField>(
    op: &impl Operation,
    language: &Language<T>,
    cap: u64,
) -> Result<bool> {
    if op.domain_size() != language.domain().size() {
        return invalid("operation and language live on different domains");
    }
    for r in language.relations() {
        if !op.preserves(&r, cap)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Classification {
    pub idempotent: bool,
    pub symmetric: bool,
    pub totally_symmetric: bool,
    pub nu: bool,
    pub wnu: bool,
}

/// Decides each identity class by exhaustive checks over the table.
pub fn classify_operation(op: &GeneralOperation) -> Classification {
    let d = op.domain_size;
    let n = op.arity;
    let idempotent = (0..d).all(|x| op.apply(&vec![x; n]) == x);

    let mut symmetric = true;
    let mut by_set: std::collections::HashMap<Vec<bool>, usize> = Default::default();
    let mut totally_symmetric = true;
    for code in 0..op.table.len() {
        let t = decode_tuple(code, d, n);
        let v = op.table[code];
        let mut sorted = t.clone();
        sorted.sort_unstable();
        if op.apply(&sorted) != v {
            symmetric = false;
        }
        let mut support = vec![false; d];
        for &a in &t {
            support[a] = true;
        }
        if *by_set.entry(support).or_insert(v) != v {
            totally_symmetric = false;
        }
    }

    // f(x,…,y,…,x) with y at position i
    let lone = |x: usize, y: usize, i: usize| {
        let mut t = vec![x; n];
        t[i] = y;
        op.apply(&t)
    };
    let nu = n >= 3 && (0..d).all(|x| (0..d).all(|y| (0..n).all(|i| lone(x, y, i) == x)));
    let wnu = n >= 2
        && idempotent
        && (0..d).all(|x| (0..d).all(|y| (1..n).all(|i| lone(x, y, i) == lone(x, y, 0))));

    Classification { idempotent, symmetric, totally_symmetric, nu, wnu }
}

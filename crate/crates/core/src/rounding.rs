//! Rounding schemes from BLP solutions to assignments.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blp::LPSolution;
use crate::csp::{evaluate, Assignment, Instance};
use crate::error::{invalid, Caps, Error, Result};
use crate::polylab::fractional::FractionalOperation;
use crate::polylab::multiset::{binomial, compositions, Multiset};
use crate::polylab::operation::{Operation, SymmetricOperation};
use crate::scalar::ExactField;

/// A family of subsets of `{0,…,s−1}` closed under `∩` and `∪`, one subset
/// (bitmask) per domain label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec")]
pub struct Lattice {
    ground_size: usize,
    subsets: Vec<u64>,
    #[serde(skip)]
    index: HashMap<u64, usize>,
}

#[derive(Deserialize)]
struct LatticeSpec {
    ground_size: usize,
    subsets: Vec<u64>,
}

impl TryFrom<LatticeSpec> for Lattice {
    type Error = Error;

    fn try_from(s: LatticeSpec) -> Result<Self> {
        Lattice::new(s.ground_size, s.subsets)
    }
}

impl Lattice {
    pub fn new(ground_size: usize, subsets: Vec<u64>) -> Result<Self> {
        if ground_size > 63 {
            return invalid("ground set too large");
        }
        let universe = (1u64 << ground_size) - 1;
        let mut index = HashMap::new();
        for (label, &m) in subsets.iter().enumerate() {
            if m & !universe != 0 {
                return invalid(format!("subset {m:#b} leaves the ground set"));
            }
            if index.insert(m, label).is_some() {
                return invalid(format!("subset {m:#b} labels two elements"));
            }
        }
        for &x in &subsets {
            for &y in &subsets {
                for z in [x & y, x | y] {
                    if !index.contains_key(&z) {
                        return Err(Error::NotInLattice { mask: z });
                    }
                }
            }
        }
        Ok(Lattice { ground_size, subsets, index })
    }

    /// All subsets of an `s`-set; label `i` is the subset with bitmask `i`.
    pub fn powerset(s: usize) -> Result<Self> {
        if s > 16 {
            return invalid("powerset lattice limited to 16 ground elements");
        }
        Self::new(s, (0..1u64 << s).collect())
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn domain_size(&self) -> usize {
        self.subsets.len()
    }

    pub fn subset(&self, label: usize) -> u64 {
        self.subsets[label]
    }

    pub fn label_of(&self, mask: u64) -> Result<usize> {
        self.index.get(&mask).copied().ok_or(Error::NotInLattice { mask })
    }

    /// `g_{h,n}` on a count vector: `j` is in the output iff at least `h`
    /// arguments contain `j`.
    pub fn threshold(&self, h: usize, counts: &[usize]) -> Result<usize> {
        let mut mask = 0u64;
        for j in 0..self.ground_size {
            let c: usize = counts
                .iter()
                .enumerate()
                .filter(|(a, _)| self.subsets[*a] >> j & 1 == 1)
                .map(|(_, &c)| c)
                .sum();
            if c >= h {
                mask |= 1 << j;
            }
        }
        self.label_of(mask)
    }
}

fn counts_of<T: ExactField>(p: &[T], n: u64) -> Result<Vec<usize>> {
    Ok(Multiset::from_distribution(p, n)?.counts().to_vec())
}

/// `g_{h,n}(p_v)` via the threshold characterisation.
pub fn g_hn_apply<T: ExactField>(lattice: &Lattice, h: usize, p_v: &[T], n: u64) -> Result<usize> {
    if h == 0 || h as u64 > n {
        return invalid(format!("h = {h} outside 1..={n}"));
    }
    if p_v.len() != lattice.domain_size() {
        return invalid("distribution length differs from the lattice size");
    }
    lattice.threshold(h, &counts_of(p_v, n)?)
}

/// `g_{h,n}` tabulated from its definition as the union over all `h`-sets
/// of argument positions of the intersection of those arguments.
pub fn g_hn_table(lattice: &Lattice, h: usize, n: usize, cap: u64) -> Result<SymmetricOperation> {
    if h == 0 || h > n {
        return invalid(format!("h = {h} outside 1..={n}"));
    }
    let d = lattice.domain_size();
    let per_entry = binomial(n as u128, h as u128);
    Caps::check(cap, "table work |Δ_n(A)|·C(n,h)", compositions(d, n).saturating_mul(per_entry))?;
    let mut failure = None;
    let op = SymmetricOperation::from_fn(d, n, cap, |m| {
        let args: Vec<u64> = m.to_tuple().iter().map(|&a| lattice.subset(a)).collect();
        let mut union = 0u64;
        for_each_combination(n, h, |idx| {
            union |= idx.iter().fold(u64::MAX, |acc, &i| acc & args[i]);
        });
        lattice.label_of(union).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            0
        })
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(op),
    }
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Integers `h` with `(1 − 1/big_n)·n < h ≤ n`, ascending.
pub fn h_range(big_n: u64, n: u64) -> Vec<u64> {
    if big_n == 0 || n == 0 {
        return Vec::new();
    }
    // h·N > n·(N − 1)
    let lo = (n as u128 * (big_n as u128 - 1)) / big_n as u128 + 1;
    (lo as u64..=n).collect()
}

/// `s_{h,n}` on labels `0, 1, 2` standing for `−1, 0, +1`.
pub fn s_hn_apply<T: ExactField>(h: usize, p_v: &[T], n: u64) -> Result<usize> {
    if h as u64 >= n / 3 {
        return invalid(format!("h = {h} must be below ⌊{n}/3⌋"));
    }
    if p_v.len() != 3 {
        return invalid("s_{h,n} needs a distribution over three labels");
    }
    Ok(s_hn_counts(h, &counts_of(p_v, n)?))
}

fn s_hn_counts(h: usize, counts: &[usize]) -> usize {
    let sum = counts[2] as i64 - counts[0] as i64;
    let h = h as i64;
    if sum > h {
        2
    } else if sum < -h {
        0
    } else {
        1
    }
}

/// `s(v) = g(p_v)` for every variable.
pub fn round_symmetric<T: ExactField>(solution: &LPSolution<T>, g: &SymmetricOperation) -> Result<Assignment> {
    if g.arity() as u64 != solution.denominator {
        return Err(Error::ArityMismatch { expected: solution.denominator as usize, got: g.arity() });
    }
    if g.domain_size() != solution.var_marginals.first().map_or(g.domain_size(), |p| p.len()) {
        return invalid("operation and solution live on different domains");
    }
    let values = (0..solution.num_vars())
        .map(|v| {
            let counts: Vec<usize> = solution.counts(v).into_iter().map(|c| c as usize).collect();
            g.apply_counts(&counts)
        })
        .collect();
    Ok(Assignment(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    Sample { seed: u64 },
    Derandomized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingReport<T> {
    pub scheme: String,
    pub assignment: Assignment,
    pub value: T,
    pub blp_value: T,
    /// Denominator the scheme ran at.
    pub n: u64,
    /// The `h` that produced `assignment`.
    pub h: u64,
    /// Every `h` in the support, with the value of its assignment.
    pub h_values: Vec<(u64, T)>,
    /// Exact expectation over the uniform choice of `h`.
    pub mean_value: T,
    pub seed: Option<u64>,
    pub feasible: bool,
}

struct Candidate<T> {
    h: u64,
    assignment: Assignment,
    value: T,
    feasible: bool,
}

fn run_scheme<T: ExactField>(
    scheme: &str,
    instance: &Instance<T>,
    solution: &LPSolution<T>,
    hs: Vec<u64>,
    mode: Mode,
    apply: impl Fn(usize, &[usize]) -> Result<usize>,
) -> Result<RoundingReport<T>> {
    let n = solution.denominator;
    if hs.is_empty() {
        return Err(Error::EmptyRange { n, reason: format!("no admissible h for {scheme}") });
    }
    let eval = |h: u64| -> Result<Candidate<T>> {
        let values = (0..solution.num_vars())
            .map(|v| {
                let counts: Vec<usize> = solution.counts(v).into_iter().map(|c| c as usize).collect();
                apply(h as usize, &counts)
            })
            .collect::<Result<Vec<_>>>()?;
        let assignment = Assignment(values);
        let e = evaluate(instance, &assignment, false)?;
        Ok(Candidate { h, assignment, feasible: e.is_feasible(), value: e.value })
    };
    let candidates = hs.iter().map(|&h| eval(h)).collect::<Result<Vec<_>>>()?;
    let mean_value = candidates.iter().fold(T::zero(), |acc, c| acc + c.value.clone())
        / T::from_usize(candidates.len());
    let h_values = candidates.iter().map(|c| (c.h, c.value.clone())).collect();
    let (chosen, seed) = match mode {
        Mode::Sample { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let i = rng.gen_range(0..candidates.len());
            (&candidates[i], Some(seed))
        }
        Mode::Derandomized => {
            let best = candidates
                .iter()
                .min_by(|a, b| (!a.feasible, &a.value).cmp(&(!b.feasible, &b.value)))
                .expect("non-empty");
            (best, None)
        }
    };
    Ok(RoundingReport {
        scheme: scheme.to_string(),
        assignment: chosen.assignment.clone(),
        value: chosen.value.clone(),
        blp_value: solution.value.clone(),
        n,
        h: chosen.h,
        h_values,
        mean_value,
        seed,
        feasible: chosen.feasible,
    })
}

/// Rounds with `g_{h,n}`, `h` uniform over `((1 − 1/|A|^K)·n, n]`.
/// Requires `n ≥ |A|^K`; see [`crate::blp::rescale_denominator`].
pub fn lattice_round<T: ExactField>(
    instance: &Instance<T>,
    solution: &LPSolution<T>,
    lattice: &Lattice,
    mode: Mode,
) -> Result<RoundingReport<T>> {
    if lattice.domain_size() != instance.domain().size() {
        return invalid("lattice and instance have different domains");
    }
    let big_n = lattice_modulus(lattice, instance.max_arity().max(1))?;
    let n = solution.denominator;
    if n < big_n {
        return Err(Error::EmptyRange { n, reason: format!("lattice rounding needs n ≥ |A|^K = {big_n}") });
    }
    run_scheme("lattice", instance, solution, h_range(big_n, n), mode, |h, counts| lattice.threshold(h, counts))
}

/// `|A|^K`, checked against `u64`.
pub fn lattice_modulus(lattice: &Lattice, k: usize) -> Result<u64> {
    (lattice.domain_size() as u64)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::Invalid("|A|^K exceeds 64 bits".into()))
}

/// Rounds with `s_{h,n}`, `h` uniform over `{0,…,⌊n/3⌋−1}`.
pub fn three_element_round<T: ExactField>(
    instance: &Instance<T>,
    solution: &LPSolution<T>,
    mode: Mode,
) -> Result<RoundingReport<T>> {
    if instance.domain().size() != 3 {
        return invalid("the three-element scheme needs a three-element domain");
    }
    let n = solution.denominator;
    run_scheme("three-element", instance, solution, (0..n / 3).collect(), mode, |h, counts| Ok(s_hn_counts(h, counts)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Lattice { lattice: Lattice, k: usize },
    ThreeElement,
}

/// The uniform fractional operation over the family's admissible members at
/// arity `n`.
pub fn make_phi<T: ExactField>(family: &Family, n: usize, cap: u64) -> Result<FractionalOperation<T>> {
    let ops = match family {
        Family::Lattice { lattice, k } => {
            let big_n = lattice_modulus(lattice, *k)?;
            h_range(big_n, n as u64)
                .into_iter()
                .map(|h| SymmetricOperation::from_fn(lattice.domain_size(), n, cap, |m| {
                    lattice.threshold(h as usize, m.counts()).expect("lattice labels are closed")
                }))
                .collect::<Result<Vec<_>>>()?
        }
        Family::ThreeElement => (0..n / 3)
            .map(|h| SymmetricOperation::from_fn(3, n, cap, |m| s_hn_counts(h, m.counts())))
            .collect::<Result<Vec<_>>>()?,
    };
    if ops.is_empty() {
        return Err(Error::EmptyRange { n: n as u64, reason: "family has no admissible h".into() });
    }
    FractionalOperation::uniform(ops)
}

//! Multisets of size `n` over a finite domain, identified with `Δ_n(A)`.
//!
//! Multisets are enumerated in lexicographic order of their count vectors,
//! and [`rank`] is the position in that order.

use crate::error::{invalid, Result};
use crate::scalar::ExactField;

/// `C(n, k)`, saturating.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact: acc * (n - i) is divisible by (i + 1) after the multiply
        acc = match acc.checked_mul(n - i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of count vectors with `parts` entries summing to `total`.
pub fn compositions(parts: usize, total: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial((total + parts - 1) as u128, (parts - 1) as u128)
}

/// `|Δ_n(A)|` for `|A| = domain_size`.
pub fn num_multisets(domain_size: usize, n: usize) -> u128 {
    compositions(domain_size, n)
}

/// Position of `counts` among all count vectors of the same length and sum,
/// in lexicographic order.
pub fn rank(counts: &[usize]) -> usize {
    let parts = counts.len();
    let mut remaining: usize = counts.iter().sum();
    let mut r: u128 = 0;
    for (i, &c) in counts.iter().enumerate() {
        let rest = parts - 1 - i;
        for x in 0..c {
            r += compositions(rest, remaining - x);
        }
        remaining -= c;
    }
    r as usize
}

/// Iterates count vectors with `parts` entries summing to `total`, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct CompositionIter {
    current: Option<Vec<usize>>,
}

impl CompositionIter {
    pub fn new(parts: usize, total: usize) -> Self {
        let current = if parts == 0 {
            (total == 0).then(Vec::new)
        } else {
            let mut v = vec![0; parts];
            v[parts - 1] = total;
            Some(v)
        };
        CompositionIter { current }
    }
}

impl Iterator for CompositionIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let parts = out.len();
        if parts >= 2 {
            // rightmost position before the last one that can still grow
            let mut next = out.clone();
            let mut i = parts - 1;
            while i > 0 {
                i -= 1;
                let tail: usize = next[i + 1..].iter().sum();
                if tail > 0 {
                    next[i] += 1;
                    let rest = tail - 1;
                    for x in next[i + 1..].iter_mut() {
                        *x = 0;
                    }
                    next[parts - 1] = rest;
                    self.current = Some(next);
                    break;
                }
            }
        }
        Some(out)
    }
}

/// A multiset of labels, stored as counts per label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset {
    counts: Vec<usize>,
}

impl Multiset {
    pub fn from_counts(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() || counts.iter().sum::<usize>() == 0 {
            return invalid("a multiset needs at least one element");
        }
        Ok(Multiset { counts })
    }

    pub fn from_tuple(tuple: &[usize], domain_size: usize) -> Result<Self> {
        let mut counts = vec![0; domain_size];
        for &a in tuple {
            if a >= domain_size {
                return Err(crate::Error::LabelOutOfRange { label: a, domain_size });
            }
            counts[a] += 1;
        }
        Self::from_counts(counts)
    }

    /// `p ∈ Δ_n`: `counts[a] = p(a)·n`.
    pub fn from_distribution<T: ExactField>(p: &[T], n: u64) -> Result<Self> {
        let scale = T::from_ratio(n as i64, 1);
        let counts = p
            .iter()
            .map(|x| {
                (x.clone() * scale.clone())
                    .to_integer_u64()
                    .map(|c| c as usize)
                    .ok_or_else(|| crate::Error::Invalid(format!("{x} is not a multiple of 1/{n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if counts.iter().sum::<usize>() as u64 != n {
            return invalid("distribution does not sum to 1");
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn size(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn domain_size(&self) -> usize {
        self.counts.len()
    }

    pub fn rank(&self) -> usize {
        rank(&self.counts)
    }

    /// The associated distribution `d_a`.
    pub fn distribution<T: ExactField>(&self) -> Vec<T> {
        let n = self.size() as i64;
        self.counts.iter().map(|&c| T::from_ratio(c as i64, n)).collect()
    }

    /// Sorted tuple listing the elements.
    pub fn to_tuple(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(a, &c)| std::iter::repeat_n(a, c))
            .collect()
    }
}

/// All multisets of size `n` over `domain_size` labels, in rank order.
pub fn multisets(domain_size: usize, n: usize) -> impl Iterator<Item = Multiset> {
    CompositionIter::new(domain_size, n).map(|counts| Multiset { counts })
}

/// `max_a |d_a(x) − d_b(x)|`.
pub fn dist<T: ExactField>(a: &Multiset, b: &Multiset) -> Result<T> {
    if a.size() != b.size() || a.domain_size() != b.domain_size() {
        return invalid(format!(
            "dist needs multisets of equal size (got {} and {})",
            a.size(),
            b.size()
        ));
    }
    let diff = max_count_difference(a.counts(), b.counts());
    if diff == 0 {
        return Ok(T::zero());
    }
    Ok(T::from_ratio(diff as i64, a.size() as i64))
}

pub(crate) fn max_count_difference(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}

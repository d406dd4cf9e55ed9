//! Backtracking enumeration of symmetric polymorphisms.

use std::collections::HashSet;

use crate::csp::{Language, Relation};
use crate::error::{Caps, Error, Result};
use crate::polylab::multiset::{compositions, rank, CompositionIter};
use crate::polylab::operation::{column_counts, SymmetricOperation};
use crate::scalar::ExactField;

/// One preservation condition: the image of a multiset of relation rows,
/// given as the ranks of its column multisets, must lie in the relation.
struct Check {
    relation: usize,
    columns: Vec<usize>,
}

fn build_checks(relations: &[Relation], n: usize, cap: u64) -> Result<Vec<Vec<Check>>> {
    let d = relations.first().map_or(1, Relation::domain_size);
    let table_len = compositions(d, n) as usize;
    let mut total: u128 = 0;
    for r in relations {
        total = total.saturating_add(compositions(r.len(), n));
    }
    Caps::check(cap, "row multisets Σ C(|R|+n-1, n)", total)?;

    let mut by_max: Vec<Vec<Check>> = (0..table_len).map(|_| Vec::new()).collect();
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    for (ri, r) in relations.iter().enumerate() {
        let rows = r.tuples();
        if rows.is_empty() {
            continue;
        }
        for mult in CompositionIter::new(rows.len(), n) {
            let columns: Vec<usize> =
                (0..r.arity()).map(|j| rank(&column_counts(rows, &mult, j, d))).collect();
            if seen.insert((ri, columns.clone())) {
                let top = *columns.iter().max().expect("arity ≥ 1");
                by_max[top].push(Check { relation: ri, columns });
            }
        }
    }
    Ok(by_max)
}

/// All `n`-ary symmetric operations preserving every member of `language`
/// (cost functions via their zero sets), in lexicographic order of their
/// tables. The search visits at most `caps.enumeration` nodes.
pub fn enumerate_symmetric_polymorphisms<T: ExactField>(
    language: &Language<T>,
    n: usize,
    caps: &Caps,
) -> Result<Vec<SymmetricOperation>> {
    if n == 0 {
        return Err(Error::Invalid("arity must be positive".into()));
    }
    let d = language.domain().size();
    let table_len = compositions(d, n);
    Caps::check(caps.enumeration, "multisets |Δ_n(A)|", table_len)?;
    let table_len = table_len as usize;
    let relations = language.relations();
    let checks = build_checks(&relations, n, caps.enumeration)?;

    let consistent = |table: &[usize], pos: usize| {
        checks[pos].iter().all(|c| {
            let image: Vec<usize> = c.columns.iter().map(|&r| table[r]).collect();
            relations[c.relation].contains(&image)
        })
    };

    let mut results = Vec::new();
    let mut table = vec![0usize; table_len];
    let mut nodes: u64 = 0;
    // `pos` is the next entry to try; table[pos] holds the candidate value.
    let mut pos = 0usize;
    loop {
        nodes += 1;
        if nodes > caps.enumeration {
            return Err(Error::CapExceeded {
                what: "symmetric polymorphism search nodes",
                size: nodes as u128,
                cap: caps.enumeration,
            });
        }
        let ok = consistent(&table, pos);
        if ok && pos + 1 == table_len {
            results.push(SymmetricOperation::new(d, n, table.clone())?);
        }
        if ok && pos + 1 < table_len {
            pos += 1;
            table[pos] = 0;
            continue;
        }
        // advance to the next candidate, backtracking as needed
        loop {
            table[pos] += 1;
            if table[pos] < d {
                break;
            }
            if pos == 0 {
                return Ok(results);
            }
            table[pos] = 0;
            pos -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Domain;
    use crate::gadgets::{preset_language, Preset};
    use crate::polylab::operation::{is_polymorphism, Operation};
    use num_rational::BigRational as Q;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn hornsat_has_only_min() {
        let horn = preset_language::<Q>(Preset::HornSat { k: 3 }).unwrap();
        for n in 2..=4 {
            let ops = enumerate_symmetric_polymorphisms(&horn, n, &caps()).unwrap();
            assert_eq!(ops.len(), 1, "n = {n}");
            assert!((0..2).all(|a| (0..2).all(|b| {
                let mut args = vec![a; n];
                args[0] = b;
                ops[0].apply(&args) == a.min(b)
            })));
        }
    }

    #[test]
    fn equality_alone_admits_every_unary_map() {
        let lang = Language::<Q>::new(Domain::new(2).unwrap(), vec![Relation::equality(2).into()]).unwrap();
        let ops = enumerate_symmetric_polymorphisms(&lang, 1, &caps()).unwrap();
        assert_eq!(ops.len(), 4);
    }

    #[test]
    fn r_plus_minus_has_no_totally_symmetric_ternary_polymorphism() {
        let lang = preset_language::<Q>(Preset::RPlusMinus).unwrap();
        let ops = enumerate_symmetric_polymorphisms(&lang, 3, &caps()).unwrap();
        assert!(!ops.is_empty());
        assert!(ops.iter().all(|f| !f.is_totally_symmetric()));
    }

    #[test]
    fn results_match_exhaustive_filter() {
        let lang = preset_language::<Q>(Preset::Min2Cnf).unwrap();
        for n in 1..=3 {
            let found = enumerate_symmetric_polymorphisms(&lang, n, &caps()).unwrap();
            let len = compositions(2, n) as usize;
            let mut expected = Vec::new();
            for code in 0..(1usize << len) {
                let table: Vec<usize> = (0..len).map(|i| (code >> (len - 1 - i)) & 1).collect();
                let f = SymmetricOperation::new(2, n, table).unwrap();
                if is_polymorphism(&f, &lang, 1 << 20).unwrap() {
                    expected.push(f);
                }
            }
            assert_eq!(found, expected, "n = {n}");
        }
    }

    #[test]
    fn node_cap_is_reported() {
        let lang = Language::<Q>::new(Domain::new(3).unwrap(), vec![Relation::equality(3).into()]).unwrap();
        let tight = Caps { enumeration: 50, ..Caps::default() };
        assert!(matches!(
            enumerate_symmetric_polymorphisms(&lang, 2, &tight),
            Err(Error::CapExceeded { .. })
        ));
    }
}

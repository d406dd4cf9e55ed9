//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use csp_blp::csp::{Domain, Relation};
use csp_blp::ratlp::{Comparison, LinearProgram};
use csp_blp::{CostFunction, Instance, Payload, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn neq2() -> Relation {
    Relation::from_predicate(2, 2, |t| t[0] != t[1]).unwrap()
}

pub fn triangle() -> Instance {
    let mut b = Instance::builder(Domain::new(2).unwrap(), 3);
    let r = b.payload(neq2());
    b.soft(vec![0, 1], r, q(1, 1)).soft(vec![1, 2], r, q(1, 1)).soft(vec![0, 2], r, q(1, 1));
    b.build().unwrap()
}

/// Solves the square system `a x = b` exactly; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= p * &f;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Minimum of the objective over all basic feasible solutions of a
/// bounded LP, by enumerating every choice of `num_vars` tight
/// constraints among the rows and the lower bounds. `None` when no vertex
/// is feasible.
pub fn lp_vertex_oracle(lp: &LinearProgram<Rational>) -> Option<Rational> {
    let n = lp.num_vars();
    let mut planes: Vec<(Vec<Rational>, Rational)> =
        lp.rows().iter().map(|r| (r.coeffs.clone(), r.rhs.clone())).collect();
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        planes.push((e, lp.lower_bounds()[j].clone()));
    }
    let mut best: Option<Rational> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    let m = planes.len();
    if m < n {
        return None;
    }
    loop {
        let a = pick.iter().map(|&i| planes[i].0.clone()).collect();
        let b = pick.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.is_feasible(&x) {
                let v = lp.objective_value(&x);
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < m - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A random LP with at most 6 variables and 8 rows, bounded by an explicit
/// row `Σx ≤ B` (counted among the 8).
pub fn random_lp(seed: u64) -> LinearProgram<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let rows = rng.gen_range(1..=7);
    let mut lp = LinearProgram::new(n);
    lp.set_objective((0..n).map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect());
    for _ in 0..rows {
        let coeffs = (0..n).map(|_| q(rng.gen_range(-4..=4), 1)).collect();
        let cmp = match rng.gen_range(0..5) {
            0 => Comparison::Eq,
            1 | 2 => Comparison::Le,
            _ => Comparison::Ge,
        };
        lp.add_row(coeffs, cmp, q(rng.gen_range(-6..=10), rng.gen_range(1..=2)));
    }
    lp.add_row(vec![q(1, 1); n], Comparison::Le, q(rng.gen_range(1..=12), 1));
    lp
}

/// A random cost function with values in `{0, 1/4, …, 1}`, never
/// identically zero.
pub fn random_cost(rng: &mut ChaCha8Rng, d: usize, arity: usize) -> CostFunction {
    loop {
        let size = d.pow(arity as u32);
        let table: Vec<Rational> = (0..size)
            .map(|_| if rng.gen_bool(0.4) { q(0, 1) } else { q(rng.gen_range(1..=4), 4) })
            .collect();
        if table.iter().any(|v| !v.is_zero()) {
            return CostFunction::new(d, arity, table).unwrap();
        }
    }
}

/// A random valued instance with its language drawn alongside.
pub fn random_valued_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(2..=3);
    let num_vars = rng.gen_range(2..=5);
    let members: Vec<Payload> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let arity = rng.gen_range(1..=2);
            Payload::Cost(random_cost(&mut rng, d, arity))
        })
        .collect();
    let mut b = Instance::builder(Domain::new(d).unwrap(), num_vars);
    for _ in 0..rng.gen_range(1..=6) {
        let p = members[rng.gen_range(0..members.len())].clone();
        let mut scope: Vec<usize> = (0..num_vars).collect();
        for i in (1..scope.len()).rev() {
            scope.swap(i, rng.gen_range(0..=i));
        }
        scope.truncate(p.arity());
        let w = q(rng.gen_range(1..=3), rng.gen_range(1..=2));
        let id = b.payload(p);
        b.soft(scope, id, w);
    }
    b.build().unwrap()
}

/// Largest independent set by exhaustion over vertex subsets.
pub fn max_independent_set(num_vertices: usize, edges: &[Vec<usize>]) -> usize {
    (0u32..1 << num_vertices)
        .filter(|mask| edges.iter().all(|e| !e.iter().all(|&v| mask >> v & 1 == 1)))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

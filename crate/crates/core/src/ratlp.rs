//! Exact two-phase simplex over an [`ExactField`].
//!
//! Dense tableau, Bland's rule for both entering and leaving variables, so
//! the pivot sequence (and therefore the returned vertex) is a deterministic
//! function of the input. Pivots skip zero entries, which keeps the cost
//! proportional to the fill of the pivot row and column.

use serde::{Deserialize, Serialize};

use crate::scalar::ExactField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparison {
    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Comparison::Le => lhs <= rhs,
            Comparison::Eq => lhs == rhs,
            Comparison::Ge => lhs >= rhs,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Comparison::Le => Comparison::Ge,
            Comparison::Eq => Comparison::Eq,
            Comparison::Ge => Comparison::Le,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row<T> {
    pub coeffs: Vec<T>,
    pub cmp: Comparison,
    pub rhs: T,
}

/// `minimize objective · x` subject to the rows and `x ≥ lower_bounds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram<T> {
    num_vars: usize,
    objective: Vec<T>,
    rows: Vec<Row<T>>,
    lower_bounds: Vec<T>,
}

impl<T: ExactField> LinearProgram<T> {
    /// Zero objective, no rows, all lower bounds 0.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![T::zero(); num_vars],
            rows: Vec::new(),
            lower_bounds: vec![T::zero(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn lower_bounds(&self) -> &[T] {
        &self.lower_bounds
    }

    pub fn set_objective(&mut self, objective: Vec<T>) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars, "objective length");
        self.objective = objective;
        self
    }

    pub fn set_objective_coeff(&mut self, var: usize, c: T) -> &mut Self {
        self.objective[var] = c;
        self
    }

    pub fn set_lower_bound(&mut self, var: usize, bound: T) -> &mut Self {
        self.lower_bounds[var] = bound;
        self
    }

    pub fn add_row(&mut self, coeffs: Vec<T>, cmp: Comparison, rhs: T) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "row length");
        self.rows.push(Row { coeffs, cmp, rhs });
        self
    }

    /// Adds a row given as `(variable, coefficient)` pairs; repeated
    /// variables accumulate.
    pub fn add_sparse_row(&mut self, terms: &[(usize, T)], cmp: Comparison, rhs: T) -> &mut Self {
        let mut coeffs = vec![T::zero(); self.num_vars];
        for (j, c) in terms {
            coeffs[*j] = coeffs[*j].clone() + c.clone();
        }
        self.add_row(coeffs, cmp, rhs)
    }

    pub fn objective_value(&self, point: &[T]) -> T {
        dot(&self.objective, point)
    }

    /// Row feasibility and bounds, checked exactly.
    pub fn is_feasible(&self, point: &[T]) -> bool {
        point.len() == self.num_vars
            && point.iter().zip(&self.lower_bounds).all(|(x, l)| x >= l)
            && self.rows.iter().all(|r| r.cmp.holds(&dot(&r.coeffs, point), &r.rhs))
    }
}

fn dot<T: ExactField>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LPOutcome<T> {
    Optimal { point: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T> LPOutcome<T> {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LPOutcome::Optimal { .. })
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            LPOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[T]> {
        match self {
            LPOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

struct Tableau<T> {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the current objective value.
    obj: Vec<T>,
    /// Columns allowed to enter the basis.
    enterable: Vec<bool>,
}

impl<T: ExactField> Tableau<T> {
    fn width(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.rows[r][q].clone();
        if !piv.is_one() {
            let inv = T::one() / piv;
            for x in self.rows[r].iter_mut().filter(|x| !x.is_zero()) {
                *x = x.clone() * inv.clone();
            }
        }
        let nz: Vec<usize> = (0..=self.width()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<T>| {
            let f = row[q].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = q;
    }

    /// Runs Bland's rule to optimality. Returns `false` when unbounded.
    fn optimize(&mut self) -> bool {
        let rhs = self.width();
        loop {
            let Some(q) =
                (0..rhs).find(|&j| self.enterable[j] && self.obj[j].is_negative())
            else {
                return true;
            };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = row[rhs].clone() / row[q].clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, q),
                None => return false,
            }
        }
    }
}

/// Solves `lp` exactly. Deterministic for a given input.
pub fn simplex_solve<T: ExactField>(lp: &LinearProgram<T>) -> LPOutcome<T> {
    let n = lp.num_vars;

    // Shift x = y + l so that y ≥ 0, then normalise rows to rhs ≥ 0.
    let mut rows: Vec<(Vec<T>, Comparison, T)> = lp
        .rows
        .iter()
        .map(|r| {
            let rhs = r.rhs.clone() - dot(&r.coeffs, &lp.lower_bounds);
            if rhs.is_negative() {
                (r.coeffs.iter().map(|c| -c.clone()).collect(), r.cmp.flipped(), -rhs)
            } else {
                (r.coeffs.clone(), r.cmp, rhs)
            }
        })
        .collect();
    // Rows with no coefficients are checked directly.
    let mut infeasible = false;
    rows.retain(|(c, cmp, rhs)| {
        if c.iter().all(|x| x.is_zero()) {
            infeasible |= !cmp.holds(&T::zero(), rhs);
            false
        } else {
            true
        }
    });
    if infeasible {
        return LPOutcome::Infeasible;
    }

    let m = rows.len();
    let num_slack = rows.iter().filter(|(_, c, _)| *c != Comparison::Eq).count();
    let num_art = rows.iter().filter(|(_, c, _)| *c != Comparison::Le).count();
    let width = n + num_slack + num_art;
    let art_start = n + num_slack;

    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        obj: vec![T::zero(); width + 1],
        enterable: vec![true; width],
    };
    let (mut next_slack, mut next_art) = (n, art_start);
    for (coeffs, cmp, rhs) in rows {
        let mut row = coeffs;
        row.resize(width + 1, T::zero());
        row[width] = rhs;
        match cmp {
            Comparison::Le => {
                row[next_slack] = T::one();
                t.basis.push(next_slack);
                next_slack += 1;
            }
            Comparison::Ge => {
                row[next_slack] = -T::one();
                next_slack += 1;
                row[next_art] = T::one();
                t.basis.push(next_art);
                next_art += 1;
            }
            Comparison::Eq => {
                row[next_art] = T::one();
                t.basis.push(next_art);
                next_art += 1;
            }
        }
        t.rows.push(row);
    }

    // Phase 1: minimise the sum of artificials.
    if num_art > 0 {
        for (row, &b) in t.rows.iter().zip(&t.basis) {
            if b >= art_start {
                for j in (0..art_start).chain([width]) {
                    if !row[j].is_zero() {
                        t.obj[j] = t.obj[j].clone() - row[j].clone();
                    }
                }
            }
        }
        t.optimize();
        if !t.obj[width].is_zero() {
            return LPOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(q) => {
                        t.pivot(i, q);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for j in art_start..width {
            t.enterable[j] = false;
        }
    }

    // Phase 2.
    t.obj = vec![T::zero(); width + 1];
    t.obj[..n].clone_from_slice(&lp.objective);
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        let f = t.obj[b].clone();
        if f.is_zero() {
            continue;
        }
        for (o, x) in t.obj.iter_mut().zip(row) {
            if !x.is_zero() {
                *o = o.clone() - f.clone() * x.clone();
            }
        }
    }
    if !t.optimize() {
        return LPOutcome::Unbounded;
    }

    let mut point = lp.lower_bounds.clone();
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            point[b] = point[b].clone() + row[width].clone();
        }
    }
    let value = lp.objective_value(&point);
    debug_assert!(lp.is_feasible(&point));
    LPOutcome::Optimal { point, value }
}

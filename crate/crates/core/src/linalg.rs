//! Exact rational linear algebra: dense reduction for small matrices and a
//! sparse eliminator for coefficient-matching systems.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::diffalg::{DiffPoly, Monomial, Q};

pub type Matrix = Vec<Vec<Q>>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.clone();
    let piv = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !piv.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// Some solution of `m x = b` (free variables set to zero).
pub fn solve(m: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut a: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &pc) in piv.iter().enumerate() {
        x[pc] = a[r][cols].clone();
    }
    Some(x)
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Matrix, v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

/// Sparse Gaussian elimination. Rows are `(coefficients, rhs)`.
#[derive(Default)]
pub struct SparseSolver {
    rows: Vec<(usize, BTreeMap<usize, Q>, Q)>,
    pivot_of: HashMap<usize, usize>,
    inconsistent: bool,
}

impl SparseSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, mut row: BTreeMap<usize, Q>, mut rhs: Q) {
        row.retain(|_, v| !v.is_zero());
        for idx in 0..self.rows.len() {
            let pc = self.rows[idx].0;
            let Some(f) = row.get(&pc).cloned() else { continue };
            let (_, prow, prhs) = &self.rows[idx];
            for (c, v) in prow {
                let e = row.entry(*c).or_insert_with(Q::zero);
                *e -= v * &f;
                if e.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= prhs * &f;
        }
        let Some((&pc, pv)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let inv = Q::one() / pv;
        for v in row.values_mut() {
            *v *= &inv;
        }
        rhs *= &inv;
        self.pivot_of.insert(pc, self.rows.len());
        self.rows.push((pc, row, rhs));
    }

    pub fn solution(&self, ncols: usize) -> Option<Vec<Q>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Q::zero(); ncols];
        for (pc, row, rhs) in self.rows.iter().rev() {
            let mut v = rhs.clone();
            for (c, a) in row {
                if c != pc {
                    v -= a * &x[*c];
                }
            }
            x[*pc] = v;
        }
        Some(x)
    }
}

/// Rational coefficients `c` with `Σ c_i cands_i = target`, if any.
pub fn solve_combination(cands: &[DiffPoly], target: &DiffPoly) -> Option<Vec<Q>> {
    let mut rows: BTreeMap<&Monomial, BTreeMap<usize, Q>> = BTreeMap::new();
    for (i, c) in cands.iter().enumerate() {
        for (m, v) in c.terms() {
            rows.entry(m).or_default().insert(i, v.clone());
        }
    }
    for m in target.terms().keys() {
        rows.entry(m).or_default();
    }
    let mut s = SparseSolver::new();
    for (m, row) in rows {
        let rhs = target.terms().get(m).cloned().unwrap_or_else(Q::zero);
        s.push(row, rhs);
    }
    s.solution(cands.len())
}

//! sl_n with a distinguished sl₂-triple, its ad(x)-grading (x = h/2), the
//! normalized trace form, dual bases and the truncated loop algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::diffalg::{q, qf, Q};
use crate::linalg::{self, Matrix};
use crate::Error;

/// Coordinates in the basis of the algebra.
pub type Vector = Vec<Q>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nilpotent {
    Principal,
    Minimal,
}

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub n: usize,
    pub nilpotent: Nilpotent,
    pub labels: Vec<String>,
    pub matrices: Vec<Matrix>,
    /// `structure[i][j]` = coordinates of `[b_i, b_j]`.
    pub structure: Vec<Vec<Vector>>,
    pub form: Matrix,
    pub e: Vector,
    pub h: Vector,
    pub f: Vector,
    pub x: Vector,
    /// Twice the ad(x)-eigenvalue of each basis element.
    pub grade2: Vec<i32>,
    /// `dual[i]` pairs to one with basis element `i` and to zero with the rest.
    pub dual: Vec<Vector>,
    scale: Q,
}

fn zero_mat(n: usize) -> Matrix {
    vec![vec![Q::zero(); n]; n]
}

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = zero_mat(n);
    m[i][j] = Q::one();
    m
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = zero_mat(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    let t = &a[i][k] * &b[k][j];
                    c[i][j] += t;
                }
            }
        }
    }
    c
}

fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

fn trace(a: &Matrix) -> Q {
    (0..a.len()).fold(Q::zero(), |acc, i| acc + &a[i][i])
}

pub fn vzero(dim: usize) -> Vector {
    vec![Q::zero(); dim]
}

pub fn vbasis(dim: usize, i: usize) -> Vector {
    let mut v = vzero(dim);
    v[i] = Q::one();
    v
}

pub fn vadd(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vscale(a: &[Q], s: &Q) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn vis_zero(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

impl LieAlgebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Coordinates of a traceless matrix.
    pub fn coords(&self, m: &Matrix) -> Vector {
        let n = self.n;
        let mut v = vzero(self.dim());
        for (idx, b) in self.matrices.iter().enumerate() {
            // off-diagonal basis elements are matrix units; Cartan ones are e_ll − I/n
            let (i, j) = unit_position(b);
            if i != j {
                v[idx] = m[i][j].clone();
            } else {
                v[idx] = &m[i][i] - &m[n - 1][n - 1];
            }
        }
        v
    }

    pub fn matrix(&self, v: &[Q]) -> Matrix {
        let mut m = zero_mat(self.n);
        for (c, b) in v.iter().zip(&self.matrices) {
            if c.is_zero() {
                continue;
            }
            for i in 0..self.n {
                for j in 0..self.n {
                    if !b[i][j].is_zero() {
                        let t = c * &b[i][j];
                        m[i][j] += t;
                    }
                }
            }
        }
        m
    }

    pub fn bracket(&self, a: &[Q], b: &[Q]) -> Vector {
        let mut out = vzero(self.dim());
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let s = ai * bj;
                for (k, c) in self.structure[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += c * &s;
                    }
                }
            }
        }
        out
    }

    pub fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        let mut s = Q::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() && !self.form[i][j].is_zero() {
                    s += ai * bj * &self.form[i][j];
                }
            }
        }
        s
    }

    /// Twice the largest ad(x)-eigenvalue.
    pub fn d2(&self) -> i32 {
        *self.grade2.iter().max().unwrap_or(&0)
    }

    pub fn basis(&self, i: usize) -> Vector {
        vbasis(self.dim(), i)
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Indices of basis elements with the given doubled grade.
    pub fn graded(&self, g2: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.grade2[i] == g2).collect()
    }

    /// Doubled grade of a homogeneous vector, `None` for zero or mixed vectors.
    pub fn grade_of(&self, v: &[Q]) -> Option<i32> {
        let mut g = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match g {
                None => g = Some(self.grade2[i]),
                Some(x) if x != self.grade2[i] => return None,
                _ => {}
            }
        }
        g
    }

    /// Matrix of `ad v` acting on coordinates (columns are images of basis vectors).
    pub fn ad(&self, v: &[Q]) -> Matrix {
        let d = self.dim();
        let cols: Vec<Vector> = (0..d).map(|j| self.bracket(v, &self.basis(j))).collect();
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Basis of the centralizer of `v`.
    pub fn centralizer(&self, v: &[Q]) -> Vec<Vector> {
        linalg::nullspace(&self.ad(v), self.dim())
    }

    /// Default `p` in `Λ = −f z^{-m} − p z^{-m-1}`: the highest root vector `e_{1n}`,
    /// which commutes with g(>0) and is proportional to `e` for minimal nilpotents.
    pub fn default_p(&self) -> Vector {
        if self.nilpotent == Nilpotent::Minimal || self.n == 2 {
            return self.e.clone();
        }
        self.coords(&unit(self.n, 0, self.n - 1))
    }

    /// Human-readable form of a vector.
    pub fn show(&self, v: &[Q]) -> String {
        let mut parts = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(self.labels[i].clone());
            } else {
                parts.push(format!("{}*{}", show_q(c), self.labels[i]));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    pub fn form_scale(&self) -> &Q {
        &self.scale
    }
}

pub(crate) fn show_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("({}/{})", c.numer(), c.denom())
    }
}

fn unit_position(b: &Matrix) -> (usize, usize) {
    for (i, row) in b.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j && !x.is_zero() {
                return (i, j);
            }
        }
    }
    // Cartan element e_ll − I/n: the entry above the common value
    let n = b.len();
    for i in 0..n {
        if b[i][i] > b[n - 1][n - 1] {
            return (i, i);
        }
    }
    (0, 0)
}

/// sl_n with the chosen nilpotent triple.
pub fn make_sl(n: usize, nilpotent: Nilpotent) -> Result<LieAlgebra, Error> {
    if n < 2 {
        return Err(Error::Config(format!("sl_n needs n >= 2, got {n}")));
    }
    // triple
    let (e_m, f_m, h_m) = match nilpotent {
        Nilpotent::Principal => {
            let mut e = zero_mat(n);
            let mut f = zero_mat(n);
            let mut h = zero_mat(n);
            for i in 0..n - 1 {
                let a = ((i + 1) * (n - i - 1)) as i64;
                e[i][i + 1] = q(a);
                f[i + 1][i] = Q::one();
            }
            for i in 0..n {
                h[i][i] = q(n as i64 - 1 - 2 * i as i64);
            }
            (e, f, h)
        }
        Nilpotent::Minimal => {
            let mut h = zero_mat(n);
            h[0][0] = Q::one();
            h[n - 1][n - 1] = -Q::one();
            (unit(n, 0, n - 1), unit(n, n - 1, 0), h)
        }
    };
    let hd: Vec<Q> = (0..n).map(|i| h_m[i][i].clone()).collect();
    // basis elements with doubled grades
    let mut items: Vec<(i32, String, Matrix)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let g = &hd[i] - &hd[j];
            let g2 = g.to_integer().try_into().expect("small grade");
            let label = if n == 2 {
                if i == 0 { "e".to_string() } else { "f".to_string() }
            } else {
                format!("e{}{}", i + 1, j + 1)
            };
            items.push((g2, label, unit(n, i, j)));
        }
    }
    for l in 0..n - 1 {
        let mut m = zero_mat(n);
        for i in 0..n {
            m[i][i] = -qf(1, n as i64);
        }
        m[l][l] += Q::one();
        let label = if n == 2 { "x".to_string() } else { format!("E{}", l + 1) };
        items.push((0, label, m));
    }
    items.sort_by_key(|a| a.0);
    let grade2: Vec<i32> = items.iter().map(|t| t.0).collect();
    let labels: Vec<String> = items.iter().map(|t| t.1.clone()).collect();
    let matrices: Vec<Matrix> = items.into_iter().map(|t| t.2).collect();
    let scale = q(2) / trace(&mat_mul(&h_m, &h_m));
    let dim = labels.len();
    let mut alg = LieAlgebra {
        n,
        nilpotent,
        labels,
        matrices,
        structure: Vec::new(),
        form: Vec::new(),
        e: Vec::new(),
        h: Vec::new(),
        f: Vec::new(),
        x: Vec::new(),
        grade2,
        dual: Vec::new(),
        scale: scale.clone(),
    };
    let mut structure = vec![vec![Vec::new(); dim]; dim];
    let mut form = zero_mat(dim);
    for i in 0..dim {
        for j in 0..dim {
            let a = &alg.matrices[i];
            let b = &alg.matrices[j];
            structure[i][j] = alg.coords(&mat_sub(&mat_mul(a, b), &mat_mul(b, a)));
            form[i][j] = &scale * trace(&mat_mul(a, b));
        }
    }
    alg.structure = structure;
    alg.form = form;
    alg.e = alg.coords(&e_m);
    alg.f = alg.coords(&f_m);
    alg.h = alg.coords(&h_m);
    alg.x = vscale(&alg.h, &qf(1, 2));
    alg.dual = dual_bases(&alg)?;
    grading_decomposition(&alg)?;
    Ok(alg)
}

/// Grade → basis indices, after checking that ad(x) is diagonal in the basis.
pub fn grading_decomposition(l: &LieAlgebra) -> Result<BTreeMap<i32, Vec<usize>>, Error> {
    let mut out: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for i in 0..l.dim() {
        let b = l.basis(i);
        let img = l.bracket(&l.x, &b);
        let expect = vscale(&b, &qf(l.grade2[i] as i64, 2));
        if img != expect {
            return Err(Error::Config(format!("ad(h/2) not diagonal on {}", l.labels[i])));
        }
        out.entry(l.grade2[i]).or_default().push(i);
    }
    Ok(out)
}

/// Dual basis with respect to the form.
pub fn dual_bases(l: &LieAlgebra) -> Result<Vec<Vector>, Error> {
    let inv = linalg::inverse(&l.form).ok_or_else(|| Error::Config("degenerate form".into()))?;
    Ok((0..l.dim()).map(|i| (0..l.dim()).map(|j| inv[j][i].clone()).collect()).collect())
}

/// Symplectic frame of g(1/2): `[z_i, z_j*] = δ_ij e`.
#[derive(Clone, Debug)]
pub struct MinimalFrame {
    pub z: Vec<Vector>,
    pub zstar: Vec<Vector>,
}

impl MinimalFrame {
    pub fn s(&self) -> usize {
        self.z.len()
    }

    /// Full dual bases of g(1/2) (`z_{s+k} = z_k*`, `z*_{s+k} = −z_k`) extended by
    /// `z_{2s+1} = x`, `z*_{2s+1} = e`.
    pub fn extended(&self, l: &LieAlgebra) -> (Vec<Vector>, Vec<Vector>) {
        let mut z: Vec<Vector> = self.z.iter().chain(&self.zstar).cloned().collect();
        let mut zs: Vec<Vector> = self.zstar.clone();
        zs.extend(self.z.iter().map(|v| vscale(v, &-Q::one())));
        z.push(l.x.clone());
        zs.push(l.e.clone());
        (z, zs)
    }
}

pub fn minimal_frame(l: &LieAlgebra) -> Result<MinimalFrame, Error> {
    if l.graded(l.d2()).len() != 1 || l.d2() != 2 {
        return Err(Error::Config("f is not a minimal nilpotent".into()));
    }
    let omega = |a: &[Q], b: &[Q]| l.pair(&l.f, &l.bracket(a, b));
    let mut rest: Vec<Vector> = l.graded(1).into_iter().map(|i| l.basis(i)).collect();
    let mut z = Vec::new();
    let mut zs = Vec::new();
    while let Some(v) = rest.first().cloned() {
        rest.remove(0);
        let pos = rest.iter().position(|w| !omega(&v, w).is_zero());
        let Some(pos) = pos else {
            return Err(Error::Config("degenerate symplectic form on g(1/2)".into()));
        };
        let w = rest.remove(pos);
        let w = vscale(&w, &(Q::one() / omega(&v, &w)));
        rest = rest
            .into_iter()
            .map(|u| {
                let a = vscale(&v, &-omega(&u, &w));
                let b = vscale(&w, &omega(&u, &v));
                vadd(&vadd(&u, &a), &b)
            })
            .filter(|u| !vis_zero(u))
            .collect();
        z.push(v);
        zs.push(w);
    }
    for (i, zi) in z.iter().enumerate() {
        for (j, wj) in zs.iter().enumerate() {
            let br = l.bracket(zi, wj);
            let expect = if i == j { l.e.clone() } else { vzero(l.dim()) };
            if br != expect {
                return Err(Error::Check("frame relation [z_i, z_j*] = δ_ij e".into()));
            }
        }
    }
    Ok(MinimalFrame { z, zstar: zs })
}

/// Finite sum of `a ⊗ z^j` with rational coefficients, keyed by `(j, basis index)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LoopElement {
    pub terms: BTreeMap<(i32, usize), Q>,
}

impl LoopElement {
    pub fn zero() -> Self {
        LoopElement::default()
    }

    pub fn from_vector(v: &[Q], j: i32) -> Self {
        let mut out = LoopElement::zero();
        for (i, c) in v.iter().enumerate() {
            out.add(j, i, c);
        }
        out
    }

    pub fn add(&mut self, j: i32, i: usize, c: &Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((j, i)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(j, i));
        }
    }

    pub fn plus(&self, other: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        for ((j, i), c) in &other.terms {
            out.add(*j, *i, c);
        }
        out
    }

    pub fn scale(&self, s: &Q) -> LoopElement {
        let mut out = LoopElement::zero();
        for ((j, i), c) in &self.terms {
            out.add(*j, *i, &(c * s));
        }
        out
    }

    /// Multiplication by z^k.
    pub fn shift(&self, k: i32) -> LoopElement {
        LoopElement { terms: self.terms.iter().map(|((j, i), c)| ((j + k, *i), c.clone())).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn bracket(&self, l: &LieAlgebra, other: &LoopElement) -> LoopElement {
        let mut out = LoopElement::zero();
        for ((j1, i1), c1) in &self.terms {
            for ((j2, i2), c2) in &other.terms {
                let s = c1 * c2;
                for (k, c) in l.structure[*i1][*i2].iter().enumerate() {
                    if !c.is_zero() {
                        out.add(j1 + j2, k, &(c * &s));
                    }
                }
            }
        }
        out
    }

    /// `(a z^i, b z^j) = (a, b) δ_{i+j,0}`.
    pub fn pair(&self, l: &LieAlgebra, other: &LoopElement) -> Q {
        let mut s = Q::zero();
        for ((j1, i1), c1) in &self.terms {
            for ((j2, i2), c2) in &other.terms {
                if j1 + j2 == 0 && !l.form[*i1][*i2].is_zero() {
                    s += c1 * c2 * &l.form[*i1][*i2];
                }
            }
        }
        s
    }

    /// Doubled gr₂ when homogeneous.
    pub fn gr2(&self, l: &LieAlgebra) -> Option<i32> {
        let mut g = None;
        for (j, i) in self.terms.keys() {
            let v = gr2(l, *j, *i);
            match g {
                None => g = Some(v),
                Some(x) if x != v => return None,
                _ => {}
            }
        }
        g
    }

    pub fn show(&self, l: &LieAlgebra) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((j, i), c)| {
                let z = loop_label(l, *j, *i);
                if c.is_one() { z } else { format!("{}*{}", show_q(c), z) }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Doubled gr₂ of `b_i z^j`: `2(d+1)j + 2·grade`.
pub fn gr2(l: &LieAlgebra, j: i32, i: usize) -> i32 {
    (l.d2() + 2) * j + l.grade2[i]
}

/// Generator name for `b_i z^j` (j ≥ 0).
pub fn loop_label(l: &LieAlgebra, j: i32, i: usize) -> String {
    match j {
        0 => l.labels[i].clone(),
        1 => format!("{}z", l.labels[i]),
        j if j > 0 => format!("{}z{}", l.labels[i], j),
        j => format!("{}z_{}", l.labels[i], -j),
    }
}

/// `Λ_m = −f z^{-m} − p z^{-m-1}`.
pub fn lambda_m(l: &LieAlgebra, m: u32, p: &[Q]) -> LoopElement {
    let m = m as i32;
    let a = LoopElement::from_vector(&l.f, -m).scale(&-Q::one());
    let b = LoopElement::from_vector(p, -m - 1).scale(&-Q::one());
    a.plus(&b)
}

/// Loop basis window for level m.
#[derive(Clone, Debug)]
pub struct Window {
    pub m: u32,
    /// Doubled gr₂ of the first excluded layer, `2((d+1)m+1)`.
    pub top2: i32,
    /// 𝓑: `(j, i)` with `j ≥ 0` and `gr₂ < (d+1)m+1`.
    pub b: Vec<(i32, usize)>,
    /// 𝓑_m: the layer `gr₂ = (d+1)m+1`.
    pub b_m: Vec<(i32, usize)>,
}

impl Window {
    /// Dual of a window element, `ũ_i z^{-j}`.
    pub fn dual(&self, l: &LieAlgebra, j: i32, i: usize) -> LoopElement {
        LoopElement::from_vector(&l.dual[i], -j)
    }
}

pub fn loop_basis_window(l: &LieAlgebra, m: i64) -> Result<Window, Error> {
    if m < 0 {
        return Err(Error::Config("m must be non-negative".into()));
    }
    let m = m as u32;
    let top2 = (l.d2() + 2) * m as i32 + 2;
    let mut b = Vec::new();
    let mut b_m = Vec::new();
    let min_g = *l.grade2.iter().min().unwrap_or(&0);
    let jmax = (top2 - min_g) / (l.d2() + 2) + 1;
    for j in 0..=jmax {
        for i in 0..l.dim() {
            let g = gr2(l, j, i);
            if g < top2 {
                b.push((j, i));
            } else if g == top2 {
                b_m.push((j, i));
            }
        }
    }
    b.sort();
    b_m.sort();
    Ok(Window { m, top2, b, b_m })
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sl{} ({:?})", self.n, self.nilpotent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(l: &LieAlgebra, s: &str) -> usize {
        l.index(s).unwrap()
    }

    #[test]
    fn sl2_relations() {
        let l = make_sl(2, Nilpotent::Principal).unwrap();
        assert_eq!(l.dim(), 3);
        assert_eq!(l.bracket(&l.e, &l.f), l.h);
        assert_eq!(l.bracket(&l.h, &l.e), vscale(&l.e, &q(2)));
        assert_eq!(l.pair(&l.e, &l.f), Q::one());
        assert_eq!(l.pair(&l.h, &l.h), q(2));
        assert_eq!(l.d2(), 2);
        let g = grading_decomposition(&l).unwrap();
        assert_eq!(g[&-2], vec![idx(&l, "f")]);
        assert_eq!(g[&0], vec![idx(&l, "x")]);
        assert_eq!(g[&2], vec![idx(&l, "e")]);
    }

    #[test]
    fn sl2_duals() {
        let l = make_sl(2, Nilpotent::Principal).unwrap();
        assert_eq!(l.dual[idx(&l, "e")], l.f);
        assert_eq!(l.dual[idx(&l, "x")], l.h);
        assert_eq!(l.dual[idx(&l, "f")], l.e);
    }

    #[test]
    fn structure_constants_jacobi_and_invariance() {
        for (n, nil) in [(2, Nilpotent::Principal), (3, Nilpotent::Minimal), (3, Nilpotent::Principal), (4, Nilpotent::Minimal)] {
            let l = make_sl(n, nil).unwrap();
            let d = l.dim();
            for i in 0..d {
                for j in 0..d {
                    let (a, b) = (l.basis(i), l.basis(j));
                    assert_eq!(l.bracket(&a, &b), vscale(&l.bracket(&b, &a), &-Q::one()));
                    for k in 0..d {
                        let c = l.basis(k);
                        let j1 = l.bracket(&a, &l.bracket(&b, &c));
                        let j2 = l.bracket(&b, &l.bracket(&c, &a));
                        let j3 = l.bracket(&c, &l.bracket(&a, &b));
                        assert!(vis_zero(&vadd(&vadd(&j1, &j2), &j3)));
                        assert_eq!(l.pair(&l.bracket(&a, &b), &c), l.pair(&a, &l.bracket(&b, &c)));
                    }
                    let p = l.pair(&l.basis(i), &l.dual[j]);
                    assert_eq!(p, if i == j { Q::one() } else { Q::zero() });
                }
            }
            assert_eq!(l.pair(&l.e, &l.f), Q::one());
            assert_eq!(l.pair(&l.h, &l.h), q(2));
            assert_eq!(l.bracket(&l.e, &l.f), l.h);
        }
    }

    #[test]
    fn sl3_minimal_grading() {
        let l = make_sl(3, Nilpotent::Minimal).unwrap();
        let g = grading_decomposition(&l).unwrap();
        let dims: Vec<(i32, usize)> = g.iter().map(|(k, v)| (*k, v.len())).collect();
        assert_eq!(dims, vec![(-2, 1), (-1, 2), (0, 2), (1, 2), (2, 1)]);
        let fr = minimal_frame(&l).unwrap();
        assert_eq!(fr.s(), 1);
        assert_eq!(fr.z[0], l.basis(idx(&l, "e12")));
        assert_eq!(fr.zstar[0], l.basis(idx(&l, "e23")));
        // g_f has dimension 4 for the minimal nilpotent of sl3
        assert_eq!(l.centralizer(&l.f).len(), 4);
    }

    #[test]
    fn sl2_frame_is_empty() {
        let l = make_sl(2, Nilpotent::Principal).unwrap();
        assert_eq!(minimal_frame(&l).unwrap().s(), 0);
        assert!(make_sl(1, Nilpotent::Principal).is_err());
    }

    #[test]
    fn windows() {
        let l = make_sl(2, Nilpotent::Principal).unwrap();
        let w = loop_basis_window(&l, 1).unwrap();
        let names: Vec<String> = w.b.iter().map(|(j, i)| loop_label(&l, *j, *i)).collect();
        assert_eq!(names, vec!["f", "x", "e", "fz", "xz"]);
        let top: Vec<String> = w.b_m.iter().map(|(j, i)| loop_label(&l, *j, *i)).collect();
        assert_eq!(top, vec!["ez", "fz2"]);
        let w0 = loop_basis_window(&l, 0).unwrap();
        let names: Vec<String> = w0.b.iter().map(|(j, i)| loop_label(&l, *j, *i)).collect();
        assert_eq!(names, vec!["f", "x"]);
        for &(j, i) in &w.b {
            for &(j2, i2) in &w.b {
                let p = LoopElement::from_vector(&l.basis(i), j).pair(&l, &w.dual(&l, j2, i2));
                assert_eq!(p, if (j, i) == (j2, i2) { Q::one() } else { Q::zero() });
            }
        }
        let lam = lambda_m(&l, 1, &l.e);
        assert_eq!(lam.gr2(&l), Some(-w.top2));
    }
}

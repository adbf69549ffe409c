//! Lax operators over the truncated loop algebra, gauge transformations by
//! `exp(ad S)`, the canonical form, free generators of the fractional
//! W-algebra and its two λ-brackets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::diffalg::{Alg, DiffAlgebra, DiffPoly, GenId, Q};
use crate::liealg::{gr2, loop_basis_window, loop_label, LieAlgebra, LoopElement, Vector, Window};
use crate::linalg::{self, Matrix};
use crate::pva::{LambdaPoly, Presentation};
use crate::Error;

/// The level `k`: a rational number or the central parameter `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KValue {
    Value(Q),
    Symbol,
}

impl FromStr for KValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "k" {
            return Ok(KValue::Symbol);
        }
        Q::from_str(s).map(KValue::Value).map_err(|_| Error::Config(format!("bad level `{s}`")))
    }
}

impl fmt::Display for KValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KValue::Value(v) => write!(f, "{v}"),
            KValue::Symbol => write!(f, "k"),
        }
    }
}

/// Loop-algebra element with differential-polynomial coefficients,
/// keyed by `(z-degree, basis index)`.
#[derive(Clone, PartialEq, Eq)]
pub struct LoopPoly {
    alg: Alg,
    terms: BTreeMap<(i32, usize), DiffPoly>,
}

impl LoopPoly {
    pub fn zero(alg: &Alg) -> Self {
        LoopPoly { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn from_element(alg: &Alg, v: &LoopElement, c: &DiffPoly) -> Self {
        let mut out = LoopPoly::zero(alg);
        for ((j, i), x) in &v.terms {
            out.add_term(*j, *i, &c.scale(x));
        }
        out
    }

    pub fn constant(alg: &Alg, v: &LoopElement) -> Self {
        LoopPoly::from_element(alg, v, &DiffPoly::one(alg))
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<(i32, usize), DiffPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, j: i32, i: usize) -> DiffPoly {
        self.terms.get(&(j, i)).cloned().unwrap_or_else(|| DiffPoly::zero(&self.alg))
    }

    pub fn add_term(&mut self, j: i32, i: usize, c: &DiffPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((j, i)).or_insert_with(|| DiffPoly::zero(&self.alg));
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(j, i));
        }
    }

    pub fn add_scaled(&mut self, other: &LoopPoly, s: &Q) {
        for ((j, i), c) in &other.terms {
            self.add_term(*j, *i, &c.scale(s));
        }
    }

    pub fn scale(&self, s: &Q) -> LoopPoly {
        let mut out = LoopPoly::zero(&self.alg);
        out.add_scaled(self, s);
        out
    }

    pub fn mul_poly(&self, p: &DiffPoly) -> LoopPoly {
        let mut out = LoopPoly::zero(&self.alg);
        for ((j, i), c) in &self.terms {
            out.add_term(*j, *i, &(c * p));
        }
        out
    }

    /// Pointwise Lie bracket; coefficients multiply.
    pub fn bracket(&self, lie: &LieAlgebra, other: &LoopPoly) -> LoopPoly {
        let mut out = LoopPoly::zero(&self.alg);
        for ((j1, i1), c1) in &self.terms {
            for ((j2, i2), c2) in &other.terms {
                let br = &lie.structure[*i1][*i2];
                if br.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let prod = c1 * c2;
                for (kk, s) in br.iter().enumerate() {
                    if !s.is_zero() {
                        out.add_term(j1 + j2, kk, &prod.scale(s));
                    }
                }
            }
        }
        out
    }

    pub fn derivative(&self) -> LoopPoly {
        let mut out = LoopPoly::zero(&self.alg);
        for ((j, i), c) in &self.terms {
            out.add_term(*j, *i, &c.derivative());
        }
        out
    }

    /// Loop form against a constant element.
    pub fn pair(&self, lie: &LieAlgebra, v: &LoopElement) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for ((j1, i1), c) in &self.terms {
            for ((j2, i2), x) in &v.terms {
                if j1 + j2 == 0 && !lie.form[*i1][*i2].is_zero() {
                    out.add_scaled(c, &(x * &lie.form[*i1][*i2]));
                }
            }
        }
        out
    }

    pub fn pair_poly(&self, lie: &LieAlgebra, other: &LoopPoly) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for ((j1, i1), c1) in &self.terms {
            for ((j2, i2), c2) in &other.terms {
                if j1 + j2 == 0 && !lie.form[*i1][*i2].is_zero() {
                    out.add_scaled(&(c1 * c2), &lie.form[*i1][*i2]);
                }
            }
        }
        out
    }

    /// Terms of doubled gr₂ equal to `g2`.
    pub fn level(&self, lie: &LieAlgebra, g2: i32) -> LoopPoly {
        self.filter(|j, i| gr2(lie, j, i) == g2)
    }

    /// Drops terms of doubled gr₂ above `max2`.
    pub fn truncate(&self, lie: &LieAlgebra, max2: i32) -> LoopPoly {
        self.filter(|j, i| gr2(lie, j, i) <= max2)
    }

    pub fn z_part(&self, j0: i32) -> LoopPoly {
        self.filter(|j, _| j == j0)
    }

    pub fn filter<F: Fn(i32, usize) -> bool>(&self, keep: F) -> LoopPoly {
        LoopPoly {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|((j, i), _)| keep(*j, *i)).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Smallest and largest doubled gr₂ present.
    pub fn gr2_range(&self, lie: &LieAlgebra) -> Option<(i32, i32)> {
        let it = self.terms.keys().map(|(j, i)| gr2(lie, *j, *i));
        let v: Vec<i32> = it.collect();
        Some((*v.iter().min()?, *v.iter().max()?))
    }

    /// Applies `f` to every coefficient, landing in `target`.
    pub fn map<F: Fn(&DiffPoly) -> DiffPoly>(&self, target: &Alg, f: F) -> LoopPoly {
        let mut out = LoopPoly::zero(target);
        for ((j, i), c) in &self.terms {
            out.add_term(*j, *i, &f(c));
        }
        out
    }

    pub fn show(&self, lie: &LieAlgebra) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|((j, i), c)| format!("{} (x) ({})", loop_label(lie, *j, *i), c))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl std::ops::AddAssign<&LoopPoly> for LoopPoly {
    fn add_assign(&mut self, rhs: &LoopPoly) {
        self.add_scaled(rhs, &Q::one());
    }
}

impl std::ops::SubAssign<&LoopPoly> for LoopPoly {
    fn sub_assign(&mut self, rhs: &LoopPoly) {
        self.add_scaled(rhs, &-Q::one());
    }
}

impl fmt::Debug for LoopPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|((j, i), c)| format!("[{j},{i}]({c})")).collect();
        write!(f, "LoopPoly({})", parts.join(" + "))
    }
}

/// `e^{ad S}(k∂ + q) − k∂`, dropping terms above doubled gr₂ `max2` when given.
///
/// Uses `ad S (k∂) = −k ∂S`. The number of nested brackets is bounded a priori
/// by the smallest gr₂ of `S`; a nonzero term past that bound is an error.
pub fn exp_ad(
    lie: &LieAlgebra,
    k: &DiffPoly,
    q: &LoopPoly,
    s: &LoopPoly,
    max2: Option<i32>,
) -> Result<LoopPoly, Error> {
    if s.is_zero() {
        return Ok(match max2 {
            Some(b) => q.truncate(lie, b),
            None => q.clone(),
        });
    }
    let (smin, _) = s.gr2_range(lie).expect("nonzero");
    if smin <= 0 {
        return Err(Error::Shape("gauge element must have positive gr2".into()));
    }
    let (qlo, qhi) = q.gr2_range(lie).unwrap_or((smin, smin));
    let lo = qlo.min(smin);
    let steps = match max2 {
        Some(b) => ((b - lo).max(0) / smin + 2) as usize,
        None => {
            if s.terms.keys().any(|(j, _)| *j != 0) {
                return Err(Error::Divergence("untruncated series needs S in degree z^0".into()));
            }
            // ad S raises the Lie grade inside each z-degree
            let span = 2 * lie.d2() + (qhi - qlo).max(0);
            (span / smin + 2) as usize
        }
    };
    let cut = |p: LoopPoly| match max2 {
        Some(b) => p.truncate(lie, b),
        None => p,
    };
    let mut out = cut(q.clone());
    let mut x = s.bracket(lie, q);
    x -= &s.derivative().mul_poly(k);
    x = cut(x);
    let mut fact = Q::one();
    let mut r = 1usize;
    while !x.is_zero() {
        if r > steps {
            return Err(Error::Divergence(format!("exp(ad S) did not terminate after {steps} terms")));
        }
        fact *= Q::from_integer((r as i64).into());
        out.add_scaled(&x, &(Q::one() / &fact));
        x = cut(s.bracket(lie, &x));
        r += 1;
    }
    Ok(out)
}

/// `k∂ + q + Λ⊗1`; `Λ` is kept separately by the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaxOperator {
    pub k: DiffPoly,
    pub q: LoopPoly,
}

impl LaxOperator {
    /// `e^{ad S}` applied to the operator with the given `Λ`.
    pub fn gauge_transform(
        &self,
        lie: &LieAlgebra,
        lambda: &LoopElement,
        s: &LoopPoly,
        max2: Option<i32>,
    ) -> Result<LaxOperator, Error> {
        let lam = LoopPoly::constant(self.q.algebra(), lambda);
        let mut full = self.q.clone();
        full += &lam;
        let mut out = exp_ad(lie, &self.k, &full, s, max2)?;
        out -= &lam;
        if let Some(b) = max2 {
            out = out.truncate(lie, b);
        }
        Ok(LaxOperator { k: self.k.clone(), q: out })
    }
}

/// Data for a reduction at level m: the window, `Λ_m` and the coefficient
/// algebra with one generator per window element.
#[derive(Clone)]
pub struct Reduction {
    pub lie: LieAlgebra,
    pub m: u32,
    pub window: Window,
    pub p: Vector,
    pub lambda: LoopElement,
    alg: Alg,
    vars: BTreeMap<(i32, usize), GenId>,
    elements: BTreeMap<GenId, (i32, usize)>,
    k: DiffPoly,
    kval: KValue,
}

impl Reduction {
    pub fn new(lie: &LieAlgebra, m: u32, k: KValue) -> Result<Self, Error> {
        Reduction::with_p(lie, m, k, lie.default_p())
    }

    pub fn with_p(lie: &LieAlgebra, m: u32, k: KValue, p: Vector) -> Result<Self, Error> {
        if p.len() != lie.dim() {
            return Err(Error::Config("p has the wrong dimension".into()));
        }
        if !p.iter().all(|x| x.is_zero()) && lie.grade_of(&p) != Some(lie.d2()) {
            return Err(Error::Config("p must lie in the top grade".into()));
        }
        for i in 0..lie.dim() {
            if lie.grade2[i] > 0 && lie.bracket(&p, &lie.basis(i)).iter().any(|x| !x.is_zero()) {
                return Err(Error::Config(format!("p does not commute with {}", lie.labels[i])));
            }
        }
        let window = loop_basis_window(lie, m as i64)?;
        let mut b = DiffAlgebra::builder();
        for &(j, i) in &window.b {
            b = b.even(&loop_label(lie, j, i));
        }
        if k == KValue::Symbol {
            b = b.param("k");
        }
        let alg = b.build()?;
        let mut vars = BTreeMap::new();
        let mut elements = BTreeMap::new();
        for &(j, i) in &window.b {
            let g = alg.gen(&loop_label(lie, j, i)).expect("registered");
            vars.insert((j, i), g);
            elements.insert(g, (j, i));
        }
        let kpoly = match &k {
            KValue::Value(v) => DiffPoly::constant(&alg, v.clone()),
            KValue::Symbol => DiffPoly::named(&alg, "k"),
        };
        let lambda = crate::liealg::lambda_m(lie, m, &p);
        Ok(Reduction { lie: lie.clone(), m, window, p, lambda, alg, vars, elements, k: kpoly, kval: k })
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    pub fn k(&self) -> &DiffPoly {
        &self.k
    }

    pub fn k_value(&self) -> &KValue {
        &self.kval
    }

    pub fn generator(&self, j: i32, i: usize) -> Option<GenId> {
        self.vars.get(&(j, i)).copied()
    }

    pub fn element_of(&self, g: GenId) -> Option<(i32, usize)> {
        self.elements.get(&g).copied()
    }

    /// Window generators in window order.
    pub fn gens(&self) -> Vec<GenId> {
        self.window.b.iter().map(|k| self.vars[k]).collect()
    }

    pub fn label(&self, j: i32, i: usize) -> String {
        loop_label(&self.lie, j, i)
    }

    /// `χ(b_i z^j) = (Λ_m, b_i z^j)`.
    pub fn chi(&self, j: i32, i: usize) -> Q {
        LoopElement::from_vector(&self.lie.basis(i), j).pair(&self.lie, &self.lambda)
    }

    /// Image of a loop element of non-negative degree in the coefficient algebra:
    /// window elements are variables, the top layer is replaced by χ, the rest vanishes.
    pub fn var(&self, v: &LoopElement) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for ((j, i), c) in &v.terms {
            let g = gr2(&self.lie, *j, *i);
            if g > self.window.top2 {
                continue;
            }
            if g == self.window.top2 {
                out += DiffPoly::constant(&self.alg, c * self.chi(*j, *i));
                continue;
            }
            let id = self.vars.get(&(*j, *i)).unwrap_or_else(|| panic!("loop degree {j} outside the window"));
            out.add_scaled(&DiffPoly::var(&self.alg, *id), c);
        }
        out
    }

    pub fn var_basis(&self, j: i32, i: usize) -> DiffPoly {
        self.var(&LoopElement::from_vector(&self.lie.basis(i), j))
    }

    /// The universal Lax operator `k∂ + Σ ũ_i z^{-j} ⊗ (b_i z^j)`.
    pub fn universal_lax(&self) -> LaxOperator {
        let mut q = LoopPoly::zero(&self.alg);
        for &(j, i) in &self.window.b {
            let dual = self.window.dual(&self.lie, j, i);
            q += &LoopPoly::from_element(&self.alg, &dual, &DiffPoly::var(&self.alg, self.vars[&(j, i)]));
        }
        LaxOperator { k: self.k.clone(), q }
    }

    pub fn gauge_transform(&self, lax: &LaxOperator, s: &LoopPoly) -> Result<LaxOperator, Error> {
        lax.gauge_transform(&self.lie, &self.lambda, s, None)
    }

    /// `{a z^i λ b z^j}₁ = −[a,b] z^{i+j+1}` and the three-case second bracket.
    pub fn fractional_presentations(&self) -> (Presentation, Presentation) {
        let lie = &self.lie;
        let mut p1 = Presentation::new(&self.alg);
        let mut p2 = Presentation::new(&self.alg);
        let b = &self.window.b;
        for (x, &(i, a)) in b.iter().enumerate() {
            for &(j, c) in &b[x..] {
                let br = LoopElement::from_vector(&lie.structure[a][c], 0);
                let (ga, gc) = (self.vars[&(i, a)], self.vars[&(j, c)]);
                let v1 = -self.var(&br.shift(i + j + 1));
                if !v1.is_zero() {
                    p1.set(ga, gc, LambdaPoly::constant(v1));
                }
                let v2 = if i == 0 && j == 0 {
                    let mut l = LambdaPoly::constant(self.var(&br));
                    let form = &lie.form[a][c];
                    if !form.is_zero() {
                        l.add_at(1, &self.k.scale(form));
                    }
                    l
                } else if i != 0 && j != 0 {
                    LambdaPoly::constant(-self.var(&br.shift(i + j)))
                } else {
                    LambdaPoly::zero(&self.alg)
                };
                if !v2.is_zero() {
                    p2.set(ga, gc, v2);
                }
            }
        }
        (p1, p2)
    }

    /// `{n λ b_i z^j} = [n, b_i] z^j + δ_{j,0} kλ (n, b_i)`.
    fn ad_n_generator(&self, n: &Vector, j: i32, i: usize) -> LambdaPoly {
        let lie = &self.lie;
        let br = lie.bracket(n, &lie.basis(i));
        let mut out = LambdaPoly::constant(self.var(&LoopElement::from_vector(&br, j)));
        if j == 0 {
            let f = lie.pair(n, &lie.basis(i));
            if !f.is_zero() {
                out.add_at(1, &self.k.scale(&f));
            }
        }
        out
    }

    /// The λ-adjoint action of `n ∈ 𝔫` on `φ`, extended by sesquilinearity and Leibniz.
    pub fn ad_lambda(&self, n: &Vector, phi: &DiffPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero(&self.alg);
        for jet in phi.jets() {
            let Some((j, i)) = self.element_of(jet.gen) else { continue };
            let d = phi.partial(jet);
            if d.is_zero() {
                continue;
            }
            let base = self.ad_n_generator(n, j, i);
            out = &out + &base.lambda_plus_d(jet.order).mul_right(&d);
        }
        out
    }

    /// Basis of 𝔫 = g(>0).
    pub fn n_basis(&self) -> Vec<Vector> {
        (0..self.lie.dim()).filter(|&i| self.lie.grade2[i] > 0).map(|i| self.lie.basis(i)).collect()
    }

    /// `φ` is annihilated by `ad_λ n` for every `n ∈ 𝔫`.
    pub fn is_gauge_invariant(&self, phi: &DiffPoly) -> bool {
        self.invariance_residuals(phi).is_empty()
    }

    /// Nonzero `{n λ φ}` keyed by the label of `n`.
    pub fn invariance_residuals(&self, phi: &DiffPoly) -> Vec<(String, LambdaPoly)> {
        let mut out = Vec::new();
        for i in 0..self.lie.dim() {
            if self.lie.grade2[i] <= 0 {
                continue;
            }
            let r = self.ad_lambda(&self.lie.basis(i), phi);
            if !r.is_zero() {
                out.push((self.lie.labels[i].clone(), r));
            }
        }
        out
    }
}

/// An ad h-invariant complement `V` to `[f, 𝔫]` in `𝔟 = g(≥ −1/2)`, by grade.
#[derive(Clone, Debug)]
pub struct Complement {
    pub parts: BTreeMap<i32, Vec<Vector>>,
}

impl Complement {
    /// The centralizer of `e`, split by grade.
    pub fn centralizer_of_e(lie: &LieAlgebra) -> Complement {
        let mut parts = BTreeMap::new();
        for t in -1..=lie.d2() {
            let idx = lie.graded(t);
            if idx.is_empty() {
                continue;
            }
            let up = lie.graded(t + 2);
            // ad e : g(t) → g(t+2) in the two coordinate blocks
            let mat: Matrix = up
                .iter()
                .map(|&r| idx.iter().map(|&c| lie.bracket(&lie.e, &lie.basis(c))[r].clone()).collect())
                .collect();
            let ns = if up.is_empty() {
                (0..idx.len()).map(|c| crate::liealg::vbasis(idx.len(), c)).collect()
            } else {
                linalg::nullspace(&mat, idx.len())
            };
            let vs: Vec<Vector> = ns
                .into_iter()
                .map(|v| {
                    let mut full = vec![Q::zero(); lie.dim()];
                    for (c, x) in idx.iter().zip(v) {
                        full[*c] = x;
                    }
                    full
                })
                .collect();
            if !vs.is_empty() {
                parts.insert(t, vs);
            }
        }
        Complement { parts }
    }

    pub fn dim(&self) -> usize {
        self.parts.values().map(|v| v.len()).sum()
    }
}

fn restrict(v: &[Q], idx: &[usize]) -> Vec<Q> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

fn apply_matrix(alg: &Alg, m: &Matrix, v: &[DiffPoly]) -> Vec<DiffPoly> {
    m.iter()
        .map(|row| {
            let mut acc = DiffPoly::zero(alg);
            for (a, p) in row.iter().zip(v) {
                if !a.is_zero() {
                    acc.add_scaled(p, a);
                }
            }
            acc
        })
        .collect()
}

/// Solves `C = v + [f, y]` at one grade: returns the `V`-coordinates and `y`
/// coordinates (in the basis of g(t+2)).
fn split_grade(
    lie: &LieAlgebra,
    comp: &Complement,
    t: i32,
    c: &[DiffPoly],
    alg: &Alg,
) -> Result<(Vec<DiffPoly>, Vec<DiffPoly>), Error> {
    let idx = lie.graded(t);
    let up = lie.graded(t + 2);
    let vb = comp.parts.get(&t).cloned().unwrap_or_default();
    let mut cols: Vec<Vec<Q>> = vb.iter().map(|v| restrict(v, &idx)).collect();
    for &u in &up {
        cols.push(restrict(&lie.bracket(&lie.f, &lie.basis(u)), &idx));
    }
    if cols.len() != idx.len() {
        return Err(Error::Solve(format!("complement not transverse at grade {t}/2")));
    }
    let mat: Matrix = (0..idx.len()).map(|r| cols.iter().map(|col| col[r].clone()).collect()).collect();
    let inv = linalg::inverse(&mat).ok_or_else(|| Error::Solve(format!("complement not transverse at grade {t}/2")))?;
    let sol = apply_matrix(alg, &inv, c);
    let (v, y) = sol.split_at(vb.len());
    Ok((v.to_vec(), y.to_vec()))
}

/// The unique `S ∈ 𝔫 ⊗ 𝒱` with `e^{ad S}L` canonical, by induction on the grade
/// of the `z^{-m}` component.
pub fn canonical_form(red: &Reduction, lax: &LaxOperator, comp: &Complement) -> Result<(LoopPoly, LaxOperator), Error> {
    let lie = &red.lie;
    let alg = lax.q.algebra();
    let m = red.m as i32;
    let mut s = LoopPoly::zero(alg);
    for t in -1..=lie.d2() {
        let idx = lie.graded(t);
        if idx.is_empty() || lie.graded(t + 2).is_empty() {
            continue;
        }
        let cur = red.gauge_transform(lax, &s)?;
        let c: Vec<DiffPoly> = idx.iter().map(|&i| cur.q.coeff(-m, i)).collect();
        if c.iter().all(|p| p.is_zero()) {
            continue;
        }
        let (_, y) = split_grade(lie, comp, t, &c, alg)?;
        for (u, coef) in lie.graded(t + 2).into_iter().zip(y) {
            s.add_term(0, u, &-coef);
        }
    }
    let can = red.gauge_transform(lax, &s)?;
    check_canonical(red, &can, comp)?;
    Ok((s, can))
}

fn check_canonical(red: &Reduction, can: &LaxOperator, comp: &Complement) -> Result<(), Error> {
    let lie = &red.lie;
    let m = red.m as i32;
    for (j, i) in can.q.terms.keys() {
        if *j > 0 || *j < -m {
            return Err(Error::Shape(format!("canonical form has a term in {}", loop_label(lie, *j, *i))));
        }
    }
    let alg = can.q.algebra();
    for t in -1..=lie.d2() {
        let idx = lie.graded(t);
        let c: Vec<DiffPoly> = idx.iter().map(|&i| can.q.coeff(-m, i)).collect();
        if c.iter().all(|p| p.is_zero()) {
            continue;
        }
        let (_, y) = split_grade(lie, comp, t, &c, alg)?;
        if y.iter().any(|p| !p.is_zero()) {
            return Err(Error::Shape(format!("z^-m component at grade {t}/2 leaves V")));
        }
    }
    Ok(())
}

/// One free generator `γ_v` with its label and leading element `v`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    pub element: LoopElement,
    pub gr2: i32,
    pub gamma: DiffPoly,
}

/// Free generators read off the canonical form.
#[derive(Clone, Debug)]
pub struct GeneratorTable {
    pub gens: Vec<Generator>,
    pub qcan: LoopPoly,
    /// `(v_l, w_l)`: basis of V paired with its dual in g_f.
    pub v_pairs: Vec<(Vector, Vector)>,
}

fn suffix(m: i32) -> String {
    match m {
        0 => String::new(),
        1 => "z".into(),
        m => format!("z{m}"),
    }
}

/// Reads `γ_v = (v, Q^can)` for the window elements below `z^m` and for the
/// dual basis of `V` inside `g_f z^m`, and asserts the triangular shape.
pub fn extract_generators(red: &Reduction, can: &LaxOperator, comp: &Complement) -> Result<GeneratorTable, Error> {
    let lie = &red.lie;
    let m = red.m as i32;
    let mut gens = Vec::new();
    for &(j, i) in &red.window.b {
        if j >= m {
            continue;
        }
        let el = LoopElement::from_vector(&lie.basis(i), j);
        gens.push(Generator {
            label: loop_label(lie, j, i),
            gamma: can.q.pair(lie, &el),
            element: el,
            gr2: gr2(lie, j, i),
        });
    }
    let mut v_pairs = Vec::new();
    let mut wcount = 0;
    for (&t, vb) in comp.parts.iter().rev() {
        let idx = lie.graded(-t);
        // ad f : g(-t) → g(-t-2)
        let mat: Matrix = lie
            .graded(-t - 2)
            .iter()
            .map(|&r| idx.iter().map(|&c| lie.bracket(&lie.f, &lie.basis(c))[r].clone()).collect())
            .collect();
        let ns: Vec<Vec<Q>> = if lie.graded(-t - 2).is_empty() {
            (0..idx.len()).map(|c| crate::liealg::vbasis(idx.len(), c)).collect()
        } else {
            linalg::nullspace(&mat, idx.len())
        };
        let wraw: Vec<Vector> = ns
            .into_iter()
            .map(|v| {
                let mut full = vec![Q::zero(); lie.dim()];
                for (c, x) in idx.iter().zip(v) {
                    full[*c] = x;
                }
                full
            })
            .collect();
        if wraw.len() != vb.len() {
            return Err(Error::Shape(format!("g_f and V differ in dimension at grade {t}/2")));
        }
        // V basis re-chosen dual to the g_f basis
        let gram: Matrix = vb.iter().map(|v| wraw.iter().map(|w| lie.pair(v, w)).collect()).collect();
        let inv = linalg::inverse(&gram).ok_or_else(|| Error::Shape("V and g_f not paired".into()))?;
        for (a, w) in wraw.iter().enumerate() {
            let mut v = vec![Q::zero(); lie.dim()];
            for (b, vv) in vb.iter().enumerate() {
                let c = &inv[b][a];
                if !c.is_zero() {
                    v = crate::liealg::vadd(&v, &crate::liealg::vscale(vv, c));
                }
            }
            let single = w.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect::<Vec<_>>();
            let label = if single.len() == 1 && single[0].1.is_one() {
                loop_label(lie, m, single[0].0)
            } else {
                wcount += 1;
                format!("w{wcount}{}", suffix(m))
            };
            let el = LoopElement::from_vector(w, m);
            let g = el.gr2(lie).expect("homogeneous");
            gens.push(Generator { label, gamma: can.q.pair(lie, &el), element: el, gr2: g });
            v_pairs.push((v, w.clone()));
        }
    }
    let table = GeneratorTable { gens, qcan: can.q.clone(), v_pairs };
    table.check_triangular(red)?;
    Ok(table)
}

impl GeneratorTable {
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Generator> {
        self.gens.iter().find(|g| g.label == label)
    }

    /// `γ_v − v` involves only variables of strictly larger gr₂.
    pub fn check_triangular(&self, red: &Reduction) -> Result<(), Error> {
        for g in &self.gens {
            let tail = &g.gamma - &red.var(&g.element);
            for jet in tail.jets() {
                let (j, i) = red.element_of(jet.gen).expect("window variable");
                if gr2(&red.lie, j, i) <= g.gr2 {
                    return Err(Error::Shape(format!(
                        "γ_{} depends on {} of no larger gr2",
                        g.label,
                        red.label(j, i)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `γ` on an arbitrary loop element of non-negative degree: `(v, Q^can + Λ)`.
    pub fn gamma_of(&self, red: &Reduction, v: &LoopElement) -> DiffPoly {
        let mut out = self.qcan.pair(&red.lie, v);
        out += DiffPoly::constant(red.algebra(), v.pair(&red.lie, &red.lambda));
        out
    }
}

/// The algebra freely generated by the γ's, with maps to and from the window algebra.
#[derive(Clone)]
pub struct GammaAlgebra {
    pub alg: Alg,
    pub ids: Vec<GenId>,
    /// `Q^can` with Γ coefficients.
    pub qcan: LoopPoly,
    images: Vec<DiffPoly>,
    coords: BTreeMap<GenId, DiffPoly>,
    k_target: Option<GenId>,
    k_source: Option<GenId>,
}

impl GammaAlgebra {
    /// Generators are named `g_<label>`.
    pub fn new(red: &Reduction, table: &GeneratorTable) -> Result<GammaAlgebra, Error> {
        let lie = &red.lie;
        let m = red.m as i32;
        let mut b = DiffAlgebra::builder();
        for g in &table.gens {
            b = b.even(&format!("g_{}", g.label));
        }
        if *red.k_value() == KValue::Symbol {
            b = b.param("k");
        }
        let alg = b.build()?;
        let ids: Vec<GenId> = table.gens.iter().map(|g| alg.gen(&format!("g_{}", g.label)).unwrap()).collect();
        // Q^can written with Γ coefficients
        let mut qg = LoopPoly::zero(&alg);
        let nlow = table.gens.iter().filter(|g| g.element.terms.keys().all(|(j, _)| *j < m)).count();
        for (x, g) in table.gens.iter().enumerate().take(nlow) {
            let (&(j, i), _) = g.element.terms.iter().next().unwrap();
            qg += &LoopPoly::from_element(&alg, &red.window.dual(lie, j, i), &DiffPoly::var(&alg, ids[x]));
        }
        for (l, (v, _)) in table.v_pairs.iter().enumerate() {
            qg += &LoopPoly::from_element(&alg, &LoopElement::from_vector(v, -m), &DiffPoly::var(&alg, ids[nlow + l]));
        }
        let mut coords = BTreeMap::new();
        for &(j, i) in &red.window.b {
            let el = LoopElement::from_vector(&lie.basis(i), j);
            coords.insert(red.generator(j, i).unwrap(), qg.pair(lie, &el));
        }
        Ok(GammaAlgebra {
            images: table.gens.iter().map(|g| g.gamma.clone()).collect(),
            k_target: alg.gen("k"),
            k_source: red.algebra().gen("k"),
            alg,
            ids,
            qcan: qg,
            coords,
        })
    }

    pub fn id(&self, label: &str) -> Option<GenId> {
        self.alg.gen(&format!("g_{label}"))
    }

    pub fn var(&self, label: &str) -> DiffPoly {
        DiffPoly::var(&self.alg, self.id(label).unwrap_or_else(|| panic!("no generator γ_{label}")))
    }

    /// Γ-polynomial ↦ window polynomial.
    pub fn to_window(&self, red: &Reduction, p: &DiffPoly) -> DiffPoly {
        p.substitute(red.algebra(), |g| {
            if Some(g) == self.k_target {
                return red.k().clone();
            }
            let x = self.ids.iter().position(|&i| i == g).expect("Γ generator");
            self.images[x].clone()
        })
    }

    /// Rewrites a gauge-invariant window polynomial in the γ's, verifying the round trip.
    pub fn rewrite(&self, red: &Reduction, p: &DiffPoly) -> Result<DiffPoly, Error> {
        let out = p.substitute(&self.alg, |g| {
            if Some(g) == self.k_source {
                return DiffPoly::var(&self.alg, self.k_target.expect("k"));
            }
            self.coords[&g].clone()
        });
        if self.to_window(red, &out) != *p {
            return Err(Error::Check(format!("{p} is not in the W-algebra")));
        }
        Ok(out)
    }

    pub fn rewrite_lambda(&self, red: &Reduction, l: &LambdaPoly) -> Result<LambdaPoly, Error> {
        let mut out = LambdaPoly::zero(&self.alg);
        for (n, c) in l.coeffs() {
            out.add_at(*n, &self.rewrite(red, c)?);
        }
        Ok(out)
    }

    /// Both brackets among the γ's, as presentations on the Γ algebra.
    pub fn presentations(
        &self,
        red: &Reduction,
        p1: &Presentation,
        p2: &Presentation,
    ) -> Result<(Presentation, Presentation), Error> {
        use rayon::prelude::*;
        let n = self.ids.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        let vals: Vec<Result<(usize, usize, LambdaPoly, LambdaPoly), Error>> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let (x, y) = (&self.images[a], &self.images[b]);
                let v1 = self.rewrite_lambda(red, &p1.bracket(x, y))?;
                let v2 = self.rewrite_lambda(red, &p2.bracket(x, y))?;
                Ok((a, b, v1, v2))
            })
            .collect();
        let mut g1 = Presentation::new(&self.alg);
        let mut g2 = Presentation::new(&self.alg);
        for v in vals {
            let (a, b, v1, v2) = v?;
            if !v1.is_zero() {
                g1.set(self.ids[a], self.ids[b], v1);
            }
            if !v2.is_zero() {
                g2.set(self.ids[a], self.ids[b], v2);
            }
        }
        Ok((g1, g2))
    }
}

/// Full pipeline: universal Lax operator, canonical form with `V = g^e`, generators.
pub fn reduce(red: &Reduction) -> Result<(LoopPoly, GeneratorTable), Error> {
    let comp = Complement::centralizer_of_e(&red.lie);
    let lax = red.universal_lax();
    let (s, can) = canonical_form(red, &lax, &comp)?;
    let table = extract_generators(red, &can, &comp)?;
    Ok((s, table))
}

/// Renders `label = expression` lines.
pub fn show_table(table: &GeneratorTable) -> String {
    table.gens.iter().map(|g| format!("{} = {}\n", g.label, g.gamma)).collect()
}

//! The classical BRST complex: currents, charged fermions `φ_n`, `φ^{n*}`,
//! neutral fields `Φ` for g(1/2), the odd element `d` and its zero mode.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::diffalg::{qf, Alg, DiffAlgebra, DiffPoly, GenId, Jet, Monomial, Parity, Q};
use crate::dsred::{KValue, Reduction};
use crate::liealg::{vis_zero, vscale, LieAlgebra, Vector};
use crate::linalg::solve_combination;
use crate::pva::{CheckReport, LambdaPoly, Presentation};
use crate::Error;

#[derive(Clone)]
pub struct BrstAlgebra {
    pub lie: LieAlgebra,
    pub k: KValue,
    pub c: Q,
    pub p: Vector,
    /// Parity of the neutral fields. Even is the consistent choice; odd is kept
    /// only to show what breaks.
    pub neutral: Parity,
    alg: Alg,
    pres: Presentation,
    /// Basis indices spanning 𝔫 (the `u_α`).
    n_idx: Vec<usize>,
    /// Basis indices spanning g(1/2).
    half_idx: Vec<usize>,
    cur: Vec<GenId>,
    phi: Vec<GenId>,
    phis: Vec<GenId>,
    big: Vec<GenId>,
    kpoly: DiffPoly,
}

impl BrstAlgebra {
    /// The complex with `c = 0`, `p = 0` and even neutral fields.
    pub fn new(lie: &LieAlgebra, k: KValue) -> Result<Self, Error> {
        Self::build(lie, k, Q::zero(), vec![Q::zero(); lie.dim()], Parity::Even)
    }

    pub fn build(lie: &LieAlgebra, k: KValue, c: Q, p: Vector, neutral: Parity) -> Result<Self, Error> {
        if p.len() != lie.dim() {
            return Err(Error::Config("p has the wrong dimension".into()));
        }
        let n_idx: Vec<usize> = (0..lie.dim()).filter(|&i| lie.grade2[i] > 0).collect();
        if !c.is_zero() {
            for &i in &n_idx {
                if !vis_zero(&lie.bracket(&p, &lie.basis(i))) {
                    return Err(Error::Config(format!("p does not commute with {}", lie.labels[i])));
                }
            }
        }
        let half_idx: Vec<usize> = (0..lie.dim()).filter(|&i| lie.grade2[i] == 1).collect();
        let mut b = DiffAlgebra::builder();
        for l in &lie.labels {
            b = b.even(l);
        }
        for &i in &n_idx {
            b = b.odd(&format!("phi_{}", lie.labels[i]));
        }
        for &i in &n_idx {
            b = b.odd(&format!("phis_{}", lie.labels[i]));
        }
        for &i in &half_idx {
            let name = format!("Phi_{}", lie.labels[i]);
            b = if neutral.is_odd() { b.odd(&name) } else { b.even(&name) };
        }
        if k == KValue::Symbol {
            b = b.param("k");
        }
        let alg = b.build()?;
        let id = |s: String| alg.gen(&s).expect("registered");
        let cur: Vec<GenId> = lie.labels.iter().map(|l| id(l.clone())).collect();
        let phi: Vec<GenId> = n_idx.iter().map(|&i| id(format!("phi_{}", lie.labels[i]))).collect();
        let phis: Vec<GenId> = n_idx.iter().map(|&i| id(format!("phis_{}", lie.labels[i]))).collect();
        let big: Vec<GenId> = half_idx.iter().map(|&i| id(format!("Phi_{}", lie.labels[i]))).collect();
        let kpoly = match &k {
            KValue::Value(v) => DiffPoly::constant(&alg, v.clone()),
            KValue::Symbol => DiffPoly::named(&alg, "k"),
        };
        let mut out = BrstAlgebra {
            lie: lie.clone(),
            k,
            c,
            p,
            neutral,
            pres: Presentation::new(&alg),
            alg,
            n_idx,
            half_idx,
            cur,
            phi,
            phis,
            big,
            kpoly,
        };
        out.register();
        Ok(out)
    }

    fn register(&mut self) {
        let lie = &self.lie;
        let alg = self.alg.clone();
        let dim = lie.dim();
        let mut pres = Presentation::new(&alg);
        for i in 0..dim {
            for j in i..dim {
                let br = &lie.structure[i][j];
                let mut v = LambdaPoly::constant(self.current(br));
                v.add_at(0, &DiffPoly::constant(&alg, &self.c * lie.pair(&self.p, br)));
                v.add_at(1, &self.kpoly.scale(&lie.form[i][j]));
                pres.set(self.cur[i], self.cur[j], v);
            }
        }
        for a in 0..self.n_idx.len() {
            pres.set(self.phi[a], self.phis[a], LambdaPoly::constant(DiffPoly::one(&alg)));
        }
        for (a, &i) in self.half_idx.iter().enumerate() {
            for (b, &j) in self.half_idx.iter().enumerate() {
                let v = lie.pair(&lie.f, &lie.structure[i][j]);
                if !v.is_zero() {
                    pres.set(self.big[a], self.big[b], LambdaPoly::constant(DiffPoly::constant(&alg, v)));
                }
            }
        }
        self.pres = pres;
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn k_poly(&self) -> &DiffPoly {
        &self.kpoly
    }

    /// Number of neutral fields, `dim g(1/2)`.
    pub fn neutral_dim(&self) -> usize {
        self.big.len()
    }

    /// All field generators.
    pub fn fields(&self) -> Vec<GenId> {
        self.alg.fields().collect()
    }

    /// The current `Σ v_i b_i`.
    pub fn current(&self, v: &[Q]) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(&DiffPoly::var(&self.alg, self.cur[i]), c);
            }
        }
        out
    }

    fn on(&self, gens: &[GenId], idx: &[usize], v: &[Q]) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for (g, &i) in gens.iter().zip(idx) {
            if !v[i].is_zero() {
                out.add_scaled(&DiffPoly::var(&self.alg, *g), &v[i]);
            }
        }
        out
    }

    /// `φ_{π_n v}`.
    pub fn phi(&self, v: &[Q]) -> DiffPoly {
        self.on(&self.phi, &self.n_idx, v)
    }

    /// `φ^θ` for `θ = Σ θ_α v^α`, indexed like the 𝔫 basis.
    pub fn phi_star(&self, theta: &[Q]) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for (g, c) in self.phis.iter().zip(theta) {
            if !c.is_zero() {
                out.add_scaled(&DiffPoly::var(&self.alg, *g), c);
            }
        }
        out
    }

    /// `Φ_{[v]}`, the class of `v` in 𝔫/𝔪 ≅ g(1/2).
    pub fn neutral_field(&self, v: &[Q]) -> DiffPoly {
        self.on(&self.big, &self.half_idx, v)
    }

    fn phis_alpha(&self, a: usize) -> DiffPoly {
        DiffPoly::var(&self.alg, self.phis[a])
    }

    fn u(&self, a: usize) -> Vector {
        self.lie.basis(self.n_idx[a])
    }

    fn constant(&self, c: Q) -> DiffPoly {
        DiffPoly::constant(&self.alg, c)
    }

    /// `X_a = a + (f,a) + Φ_{[a]}`.
    pub fn x_elem(&self, a: &[Q]) -> DiffPoly {
        &(&self.current(a) + &self.constant(self.lie.pair(&self.lie.f, a))) + &self.neutral_field(a)
    }

    /// The odd element `d`.
    pub fn d(&self) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        let n = self.n_idx.len();
        for a in 0..n {
            out += &self.phis_alpha(a) * &self.x_elem(&self.u(a));
        }
        let half = qf(1, 2);
        for a in 0..n {
            for b in 0..n {
                let br = self.lie.bracket(&self.u(b), &self.u(a));
                if vis_zero(&br) {
                    continue;
                }
                let t = &(&self.phis_alpha(a) * &self.phis_alpha(b)) * &self.phi(&br);
                out.add_scaled(&t, &half);
            }
        }
        out
    }

    /// `d₍₀₎(A) = {d λ A}|_{λ=0}`.
    pub fn d0(&self, a: &DiffPoly) -> DiffPoly {
        self.pres.bracket(&self.d(), a).at_lambda_zero()
    }

    fn d0_with(&self, d: &DiffPoly, a: &DiffPoly) -> DiffPoly {
        self.pres.bracket(d, a).at_lambda_zero()
    }

    /// `J_a = a + Σ φ^{v^α} φ_{[u_α, a]}`.
    pub fn current_j(&self, a: &[Q]) -> DiffPoly {
        let mut out = self.current(a);
        for al in 0..self.n_idx.len() {
            let br = self.lie.bracket(&self.u(al), a);
            let ph = self.phi(&br);
            if !ph.is_zero() {
                out += &self.phis_alpha(al) * &ph;
            }
        }
        out
    }

    /// Projection onto g(≤0).
    pub fn pi_le(&self, v: &[Q]) -> Vector {
        v.iter().enumerate().map(|(i, c)| if self.lie.grade2[i] <= 0 { c.clone() } else { Q::zero() }).collect()
    }

    /// Right-hand side of the displayed formula for `{d λ J_a}`.
    pub fn d_j_prediction(&self, a: &[Q]) -> LambdaPoly {
        let lie = &self.lie;
        let mut c0 = DiffPoly::zero(&self.alg);
        let mut c1 = DiffPoly::zero(&self.alg);
        for al in 0..self.n_idx.len() {
            let u = self.u(al);
            let br = lie.bracket(&u, a);
            let inner = &(&self.current_j(&self.pi_le(&br)) - &self.neutral_field(&br))
                - &self.constant(lie.pair(&u, &lie.bracket(a, &lie.f)));
            let phs = self.phis_alpha(al);
            c0 += &phs * &inner;
            let ua = lie.pair(&u, a);
            if !ua.is_zero() {
                c0.add_scaled(&(&self.kpoly * &phs.derivative()), &ua);
                c1.add_scaled(&(&self.kpoly * &phs), &ua);
            }
        }
        let mut out = LambdaPoly::constant(c0);
        out.add_at(1, &c1);
        out
    }

    /// The energy-momentum element; needs a nonzero numeric level.
    pub fn energy_momentum(&self) -> Result<DiffPoly, Error> {
        let k = match &self.k {
            KValue::Value(v) if !v.is_zero() => v.clone(),
            KValue::Value(_) => return Err(Error::Config("energy-momentum needs k != 0".into())),
            KValue::Symbol => return Err(Error::Config("energy-momentum needs a numeric k".into())),
        };
        let lie = &self.lie;
        let mut out = DiffPoly::zero(&self.alg);
        let s = Q::one() / (q2() * k);
        for i in 0..lie.dim() {
            out.add_scaled(&(&self.current(&lie.basis(i)) * &self.current(&lie.dual[i])), &s);
        }
        out += self.current(&lie.x).derivative();
        for al in 0..self.n_idx.len() {
            let j = qf(lie.grade2[self.n_idx[al]] as i64, 2);
            let ph = DiffPoly::var(&self.alg, self.phi[al]);
            let phs = self.phis_alpha(al);
            out.add_scaled(&(&phs * &ph.derivative()), &-j.clone());
            out.add_scaled(&(&phs.derivative() * &ph), &(Q::one() - j));
        }
        // dual bases of g(1/2) under (f,[·,·])
        let (z, zs) = self.half_frame()?;
        for (zi, zsi) in z.iter().zip(&zs) {
            let t = &self.neutral_field(zsi).derivative() * &self.neutral_field(zi);
            out.add_scaled(&t, &qf(1, 2));
        }
        Ok(out)
    }

    /// Bases `z_i`, `z_i*` of g(1/2) with `(f, [z_i, z_j*]) = δ_ij`.
    pub fn half_frame(&self) -> Result<(Vec<Vector>, Vec<Vector>), Error> {
        let lie = &self.lie;
        let n = self.half_idx.len();
        if n == 0 {
            return Ok((Vec::new(), Vec::new()));
        }
        let gram: Vec<Vec<Q>> = self
            .half_idx
            .iter()
            .map(|&i| self.half_idx.iter().map(|&j| lie.pair(&lie.f, &lie.structure[i][j])).collect())
            .collect();
        let inv = crate::linalg::inverse(&gram).ok_or_else(|| Error::Config("degenerate form on g(1/2)".into()))?;
        let z: Vec<Vector> = self.half_idx.iter().map(|&i| lie.basis(i)).collect();
        let zs = (0..n)
            .map(|a| {
                let mut v = vec![Q::zero(); lie.dim()];
                for (b, &j) in self.half_idx.iter().enumerate() {
                    v[j] = inv[b][a].clone();
                }
                v
            })
            .collect();
        Ok((z, zs))
    }

    /// Doubled conformal weight of a generator: `a ∈ g(j)` has `1 − j`,
    /// `φ_{u_α}` has `1 − j_α`, `φ^{v^α}` has `j_α`, `Φ` has ½.
    pub fn weight2(&self, g: GenId) -> i32 {
        if let Some(i) = self.cur.iter().position(|&x| x == g) {
            return 2 - self.lie.grade2[i];
        }
        if let Some(a) = self.phi.iter().position(|&x| x == g) {
            return 2 - self.lie.grade2[self.n_idx[a]];
        }
        if let Some(a) = self.phis.iter().position(|&x| x == g) {
            return self.lie.grade2[self.n_idx[a]];
        }
        if self.big.contains(&g) {
            return 1;
        }
        0
    }

    /// Charge: `φ^θ` has +1, `φ_n` has −1.
    pub fn charge(&self, g: GenId) -> i32 {
        if self.phis.contains(&g) {
            1
        } else if self.phi.contains(&g) {
            -1
        } else {
            0
        }
    }

    /// Monomials in the field generators of doubled weight `w2`, given charge
    /// and polynomial degree at most `max_degree`.
    pub fn graded_monomials(&self, w2: i32, charge: i32, max_degree: u32) -> Vec<Monomial> {
        let fields = self.fields();
        graded_monomials(&self.alg, &fields, &|g| self.weight2(g), &|g| self.charge(g), w2, charge, max_degree)
    }

    /// Whether `target` lies in `d₍₀₎` of the span of monomials of its weight
    /// with charge one less and degree at most `max_degree`. `None` if not.
    pub fn exact_preimage(&self, target: &DiffPoly, w2: i32, charge: i32, max_degree: u32) -> Option<DiffPoly> {
        if target.is_zero() {
            return Some(DiffPoly::zero(&self.alg));
        }
        let mons = self.graded_monomials(w2, charge - 1, max_degree);
        let d = self.d();
        let images: Vec<DiffPoly> = mons
            .iter()
            .map(|m| self.d0_with(&d, &DiffPoly::from_monomial(&self.alg, m.clone(), Q::one())))
            .collect();
        let x = solve_combination(&images, target)?;
        let mut out = DiffPoly::zero(&self.alg);
        for (m, c) in mons.iter().zip(x) {
            if !c.is_zero() {
                out += DiffPoly::from_monomial(&self.alg, m.clone(), c);
            }
        }
        Some(out)
    }

    /// Indices of the basis of g(≤0).
    pub fn nonpositive(&self) -> Vec<usize> {
        (0..self.lie.dim()).filter(|&i| self.lie.grade2[i] <= 0).collect()
    }

    /// Random monomial of doubled weight at most `w2` (the constant excluded).
    pub fn random_monomial<R: Rng>(&self, rng: &mut R, w2: i32) -> DiffPoly {
        let fields = self.fields();
        loop {
            let mut jets = Vec::new();
            let mut left = w2;
            let n = rng.gen_range(1..=3);
            for _ in 0..n {
                let g = *fields.choose(rng).expect("fields");
                let w = self.weight2(g);
                if w > left {
                    continue;
                }
                let order = rng.gen_range(0..=((left - w) / 2) as u32);
                left -= w + 2 * order as i32;
                jets.push(self.alg.jet(g, order));
            }
            if let Some((m, _)) = Monomial::from_jets(&jets) {
                if !m.is_one() {
                    return DiffPoly::from_monomial(&self.alg, m, Q::one());
                }
            }
        }
    }
}

fn q2() -> Q {
    Q::from_integer(2.into())
}

/// Enumerates monomials by weight, charge and degree.
pub fn graded_monomials(
    alg: &Alg,
    fields: &[GenId],
    weight: &dyn Fn(GenId) -> i32,
    charge: &dyn Fn(GenId) -> i32,
    w2: i32,
    target_charge: i32,
    max_degree: u32,
) -> Vec<Monomial> {
    let mut jets: Vec<(Jet, i32, i32)> = Vec::new();
    for &g in fields {
        let w = weight(g);
        let mut o = 0u32;
        while w + 2 * o as i32 <= w2 {
            jets.push((alg.jet(g, o), w + 2 * o as i32, charge(g)));
            o += 1;
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::new();
    fn go(
        jets: &[(Jet, i32, i32)],
        start: usize,
        w: i32,
        ch: i32,
        deg: u32,
        acc: &mut Vec<Jet>,
        out: &mut Vec<Monomial>,
    ) {
        if w == 0 && ch == 0 && !acc.is_empty() {
            if let Some((m, _)) = Monomial::from_jets(acc) {
                out.push(m);
            }
        }
        if deg == 0 {
            return;
        }
        for i in start..jets.len() {
            let (j, jw, jc) = jets[i];
            if jw > w {
                continue;
            }
            // odd jets appear at most once
            if j.odd && acc.last() == Some(&j) {
                continue;
            }
            acc.push(j);
            go(jets, i, w - jw, ch - jc, deg - 1, acc, out);
            acc.pop();
        }
    }
    go(&jets, 0, w2, target_charge, max_degree, &mut acc, &mut out);
    out.sort();
    out.dedup();
    out
}

/// The subcomplex generated by `J_a` (`a ∈ g(≤0)`), `φ^{n*}` and `Φ`, as an
/// abstract algebra with names `J_<label>`, `phis_<label>`, `Phi_<label>`.
#[derive(Clone, Debug)]
pub struct Subcomplex {
    alg: Alg,
    /// `(generator, image in the full complex)`.
    images: BTreeMap<GenId, DiffPoly>,
    weights: BTreeMap<GenId, i32>,
    charges: BTreeMap<GenId, i32>,
    kind: BTreeMap<GenId, (char, usize)>,
}

impl Subcomplex {
    pub fn new(b: &BrstAlgebra) -> Result<Self, Error> {
        let lie = &b.lie;
        let mut builder = DiffAlgebra::builder();
        let neg = b.nonpositive();
        for &i in &neg {
            builder = builder.even(&format!("J_{}", lie.labels[i]));
        }
        for &i in &b.n_idx {
            builder = builder.odd(&format!("phis_{}", lie.labels[i]));
        }
        for &i in &b.half_idx {
            let name = format!("Phi_{}", lie.labels[i]);
            builder = if b.neutral.is_odd() { builder.odd(&name) } else { builder.even(&name) };
        }
        if b.k == KValue::Symbol {
            builder = builder.param("k");
        }
        let alg = builder.build()?;
        let mut images = BTreeMap::new();
        let mut weights = BTreeMap::new();
        let mut charges = BTreeMap::new();
        let mut kind = BTreeMap::new();
        for &i in &neg {
            let g = alg.gen(&format!("J_{}", lie.labels[i])).expect("registered");
            images.insert(g, b.current_j(&lie.basis(i)));
            weights.insert(g, 2 - lie.grade2[i]);
            charges.insert(g, 0);
            kind.insert(g, ('J', i));
        }
        for (a, &i) in b.n_idx.iter().enumerate() {
            let g = alg.gen(&format!("phis_{}", lie.labels[i])).expect("registered");
            images.insert(g, DiffPoly::var(&b.alg, b.phis[a]));
            weights.insert(g, lie.grade2[i]);
            charges.insert(g, 1);
            kind.insert(g, ('p', i));
        }
        for (a, &i) in b.half_idx.iter().enumerate() {
            let g = alg.gen(&format!("Phi_{}", lie.labels[i])).expect("registered");
            images.insert(g, DiffPoly::var(&b.alg, b.big[a]));
            weights.insert(g, 1);
            charges.insert(g, 0);
            kind.insert(g, ('P', i));
        }
        if let Some(kg) = alg.gen("k") {
            images.insert(kg, b.kpoly.clone());
        }
        Ok(Subcomplex { alg, images, weights, charges, kind })
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    /// `J_a` for a basis label.
    pub fn j(&self, label: &str) -> Result<DiffPoly, Error> {
        let g = self
            .alg
            .gen(&format!("J_{label}"))
            .ok_or_else(|| Error::Config(format!("no J_{label} in the subcomplex")))?;
        Ok(DiffPoly::var(&self.alg, g))
    }

    /// Image in the full complex.
    pub fn embed(&self, b: &BrstAlgebra, a: &DiffPoly) -> DiffPoly {
        a.substitute(&b.alg, |g| self.images[&g].clone())
    }

    pub fn weight2(&self, a: &DiffPoly) -> Option<i32> {
        let mut w = None;
        for m in a.terms().keys() {
            let t: i32 = m
                .factors()
                .iter()
                .filter(|(j, _)| !self.alg.is_parameter(j.gen))
                .map(|(j, e)| (self.weights[&j.gen] + 2 * j.order as i32) * *e as i32)
                .sum();
            if w.is_some_and(|x| x != t) {
                return None;
            }
            w = Some(t);
        }
        w
    }

    /// A `d₍₀₎`-closed element `J_a + A` with `A` of the same weight, charge
    /// zero and free of `J_a` itself.
    pub fn closed_lift(&self, b: &BrstAlgebra, label: &str, max_degree: u32) -> Result<DiffPoly, Error> {
        let ja = self.j(label)?;
        let w2 = self.weight2(&ja).expect("homogeneous");
        let fields: Vec<GenId> = self.alg.fields().collect();
        let mons: Vec<Monomial> = graded_monomials(
            &self.alg,
            &fields,
            &|g| self.weights[&g],
            &|g| self.charges[&g],
            w2,
            0,
            max_degree,
        );
        let ja_mon = ja.terms().keys().next().expect("monomial").clone();
        let mut cands = Vec::new();
        let kpow = if self.alg.gen("k").is_some() { 2 } else { 0 };
        for m in mons.into_iter().filter(|m| *m != ja_mon) {
            let base = DiffPoly::from_monomial(&self.alg, m, Q::one());
            let mut t = base.clone();
            for _ in 0..=kpow {
                cands.push(t.clone());
                t = &t * &DiffPoly::named(&self.alg, "k");
            }
        }
        let d = b.d();
        let images: Vec<DiffPoly> = cands.iter().map(|c| b.d0_with(&d, &self.embed(b, c))).collect();
        let target = -b.d0_with(&d, &self.embed(b, &ja));
        let x = solve_combination(&images, &target)
            .ok_or_else(|| Error::Solve(format!("no closed lift of J_{label} at degree {max_degree}")))?;
        let mut out = ja;
        for (c, v) in cands.iter().zip(x) {
            if !v.is_zero() {
                out.add_scaled(c, &v);
            }
        }
        Ok(out)
    }

    /// The generator map into the reduction at `m = 0`:
    /// `J_a ↦ a`, `Φ_b ↦ −b`, `φ^θ ↦ 0`, the top layer replaced by its character.
    pub fn generator_map(&self, red: &Reduction, a: &DiffPoly) -> Result<DiffPoly, Error> {
        if red.m != 0 {
            return Err(Error::Config("the generator map targets the m = 0 reduction".into()));
        }
        let target = red.algebra();
        Ok(a.substitute(target, |g| {
            if self.alg.is_parameter(g) {
                return red.k().clone();
            }
            let (t, i) = self.kind[&g];
            let v = red.var_basis(0, i);
            match t {
                'J' => v,
                'P' => -v,
                _ => DiffPoly::zero(target),
            }
        }))
    }
}

/// `{a λ b}` for `a, b` given as basis-index pairs, in one complex.
fn pair_bracket(b: &BrstAlgebra, x: &DiffPoly, y: &DiffPoly) -> LambdaPoly {
    b.pres.bracket(x, y)
}

fn report(name: &str, args: Vec<String>, r: &LambdaPoly) -> CheckReport {
    CheckReport::from_lambda(name, args, r)
}

/// `{X_a λ X_b} = X_{[a,b]}` on basis pairs of 𝔫.
pub fn check_x_brackets(b: &BrstAlgebra) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for al in 0..b.n_idx.len() {
        for be in 0..b.n_idx.len() {
            let (u, v) = (b.u(al), b.u(be));
            let lhs = pair_bracket(b, &b.x_elem(&u), &b.x_elem(&v));
            let rhs = LambdaPoly::constant(b.x_elem(&b.lie.bracket(&u, &v)));
            out.push(report("x-bracket", labels(b, &[b.n_idx[al], b.n_idx[be]]), &(&lhs - &rhs)));
        }
    }
    out
}

fn labels(b: &BrstAlgebra, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| b.lie.labels[i].clone()).collect()
}

/// `{d λ d} = 0`.
pub fn check_d_squared(b: &BrstAlgebra) -> CheckReport {
    let d = b.d();
    report("d-bracket-d", vec!["d".into(), "d".into()], &pair_bracket(b, &d, &d))
}

/// The bracket relations of `J_a` with fermions, neutral fields and other
/// currents on the same side of the grading.
pub fn check_j_brackets(b: &BrstAlgebra) -> Vec<CheckReport> {
    let lie = &b.lie;
    let mut out = Vec::new();
    for i in 0..lie.dim() {
        let a = lie.basis(i);
        let ja = b.current_j(&a);
        for (al, &ni) in b.n_idx.iter().enumerate() {
            let ph = DiffPoly::var(&b.alg, b.phi[al]);
            let r = &pair_bracket(b, &ja, &ph) - &LambdaPoly::constant(b.phi(&lie.bracket(&a, &lie.basis(ni))));
            out.push(report("j-phi", labels(b, &[i, ni]), &r));
        }
        for (bi, &hi) in b.half_idx.iter().enumerate() {
            let r = pair_bracket(b, &ja, &DiffPoly::var(&b.alg, b.big[bi]));
            out.push(report("j-neutral", labels(b, &[i, hi]), &r));
        }
        for j in 0..lie.dim() {
            let (gi, gj) = (lie.grade2[i], lie.grade2[j]);
            if !((gi >= 0 && gj >= 0) || (gi <= 0 && gj <= 0)) {
                continue;
            }
            let bv = lie.basis(j);
            let mut rhs = LambdaPoly::constant(b.current_j(&lie.bracket(&a, &bv)));
            rhs.add_at(1, &b.kpoly.scale(&lie.pair(&a, &bv)));
            let r = &pair_bracket(b, &ja, &b.current_j(&bv)) - &rhs;
            out.push(report("j-j", labels(b, &[i, j]), &r));
        }
    }
    out
}

/// `{d λ J_a}` against the displayed formula for `a ∈ g(≤0)`.
pub fn check_d_j(b: &BrstAlgebra) -> Vec<CheckReport> {
    let d = b.d();
    b.nonpositive()
        .into_iter()
        .map(|i| {
            let a = b.lie.basis(i);
            let r = &pair_bracket(b, &d, &b.current_j(&a)) - &b.d_j_prediction(&a);
            report("d-j", labels(b, &[i]), &r)
        })
        .collect()
}

/// `d₍₀₎(φ_a) = J_a + (a,f) + Φ_{[a]}`.
pub fn check_d0_phi(b: &BrstAlgebra) -> Vec<CheckReport> {
    let lie = &b.lie;
    (0..b.n_idx.len())
        .map(|al| {
            let a = b.u(al);
            let lhs = b.d0(&DiffPoly::var(&b.alg, b.phi[al]));
            let rhs = &(&b.current_j(&a) + &b.constant(lie.pair(&a, &lie.f))) + &b.neutral_field(&a);
            report("d0-phi", labels(b, &[b.n_idx[al]]), &LambdaPoly::constant(&lhs - &rhs))
        })
        .collect()
}

/// `d₍₀₎² = 0` on `samples` random monomials of weight at most `w2 / 2`.
pub fn check_d0_squared<R: Rng>(b: &BrstAlgebra, rng: &mut R, w2: i32, samples: usize) -> Vec<CheckReport> {
    let d = b.d();
    (0..samples)
        .map(|_| {
            let a = b.random_monomial(rng, w2);
            let r = b.d0_with(&d, &b.d0_with(&d, &a));
            report("d0-squared", vec![a.to_string()], &LambdaPoly::constant(r))
        })
        .collect()
}

/// `{L λ L} − (∂+2λ)L + ½kλ³`, coefficient by coefficient, tested for
/// membership in the image of `d₍₀₎` at degree at most `max_degree`.
pub fn check_energy_momentum(b: &BrstAlgebra, max_degree: u32) -> Result<Vec<CheckReport>, Error> {
    let l = b.energy_momentum()?;
    let mut out = Vec::new();
    let closed = b.d0(&l);
    out.push(report("energy-momentum-closed", vec!["L".into()], &LambdaPoly::constant(closed)));
    let mut expected = LambdaPoly::constant(l.derivative());
    expected.add_at(1, &l.scale(&q2()));
    expected.add_at(3, &(-&b.kpoly.scale(&qf(1, 2))));
    let diff = &b.pres.bracket(&l, &l) - &expected;
    for (n, c) in diff.coeffs() {
        let w2 = 2 * (3 - *n as i32);
        let res = match b.exact_preimage(c, w2, 0, max_degree) {
            Some(_) => None,
            None => Some(format!("λ^{n}: {c}")),
        };
        out.push(CheckReport::new("energy-momentum-virasoro", vec![format!("λ^{n}")], res));
    }
    if diff.is_zero() {
        out.push(CheckReport::new("energy-momentum-virasoro", vec!["all".into()], None));
    }
    Ok(out)
}

/// The twist `a ↦ a + [cp, a]` (`literal`) or `a ↦ a + c(p, a)` on currents,
/// compared on bracket tables of the complexes with and without `(c, p)`.
pub fn check_twist(untwisted: &BrstAlgebra, twisted: &BrstAlgebra, literal: bool) -> Result<Vec<CheckReport>, Error> {
    let lie = &untwisted.lie;
    let alg = twisted.algebra();
    let psi = |g: GenId| -> DiffPoly {
        let name = untwisted.alg.name(g);
        let tg = alg.gen(name).expect("same generators");
        let x = DiffPoly::var(alg, tg);
        let Some(i) = untwisted.cur.iter().position(|&c| c == g) else { return x };
        let a = lie.basis(i);
        if literal {
            &x + &twisted.current(&vscale(&lie.bracket(&twisted.p, &a), &twisted.c))
        } else {
            &x + &DiffPoly::constant(alg, &twisted.c * lie.pair(&twisted.p, &a))
        }
    };
    let mut out = Vec::new();
    for i in 0..lie.dim() {
        for j in 0..lie.dim() {
            let (a, bb) = (untwisted.cur[i], untwisted.cur[j]);
            let lhs = twisted.pres.bracket(&psi(a), &psi(bb));
            let base = untwisted.pres.get(a, bb);
            let mut rhs = LambdaPoly::zero(alg);
            for (n, c) in base.coeffs() {
                rhs.add_at(*n, &c.substitute(alg, psi));
            }
            out.push(report("twist", labels(untwisted, &[i, j]), &(&lhs - &rhs)));
        }
    }
    Ok(out)
}

/// Every identity of the complex at desk scale.
pub fn run_checks<R: Rng>(b: &BrstAlgebra, rng: &mut R, weight_bound: u32) -> Vec<CheckReport> {
    let mut out = vec![check_d_squared(b)];
    out.extend(check_x_brackets(b));
    out.extend(check_j_brackets(b));
    out.extend(check_d0_phi(b));
    out.extend(check_d_j(b));
    out.extend(check_d0_squared(b, rng, 2 * weight_bound as i32, 20));
    out.push(report(
        "d0-one",
        vec!["1".into()],
        &LambdaPoly::constant(b.d0(&DiffPoly::one(&b.alg))),
    ));
    out
}

//! Integrable hierarchies: diagonalization of Lax operators, Hamiltonian
//! densities, evolution equations, and the Lenard scheme.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::diffalg::{monomials_up_to, qf, Alg, DiffAlgebra, DiffPoly, GenId, Q};
use crate::dsred::{exp_ad, reduce, GammaAlgebra, GeneratorTable, KValue, LaxOperator, LoopPoly, Reduction};
use crate::liealg::{gr2, LieAlgebra, LoopElement};
use crate::linalg::{inverse, nullspace, rref, Matrix, SparseSolver};
use crate::pva::{CheckReport, Presentation};
use crate::Error;

/// A density modulo total derivatives.
#[derive(Clone, Debug)]
pub struct LocalFunctional {
    pub density: DiffPoly,
}

impl LocalFunctional {
    pub fn new(density: DiffPoly) -> Self {
        LocalFunctional { density }
    }

    /// Equality in `A/∂A`.
    pub fn equivalent(&self, other: &LocalFunctional) -> bool {
        (&self.density - &other.density).is_total_derivative()
    }

    pub fn gradient(&self, fields: &[GenId]) -> Vec<DiffPoly> {
        fields.iter().map(|&g| self.density.variational(g)).collect()
    }
}

/// Basis elements `b_i z^j` of doubled gr₂ `t`.
pub fn level_basis(lie: &LieAlgebra, t: i32) -> Vec<(i32, usize)> {
    let p = lie.d2() + 2;
    (0..lie.dim())
        .filter_map(|i| {
            let r = t - lie.grade2[i];
            (r.rem_euclid(p) == 0).then_some((r.div_euclid(p), i))
        })
        .collect()
}

fn coords_on(basis: &[(i32, usize)], v: &LoopElement) -> Result<Vec<Q>, Error> {
    let mut out = vec![Q::zero(); basis.len()];
    for (k, c) in &v.terms {
        let x = basis.iter().position(|b| b == k).ok_or_else(|| Error::Shape("element off its level".into()))?;
        out[x] = c.clone();
    }
    Ok(out)
}

fn element_at(basis: &[(i32, usize)], coeffs: &[Q]) -> LoopElement {
    let mut out = LoopElement::zero();
    for (&(j, i), c) in basis.iter().zip(coeffs) {
        out.add(j, i, c);
    }
    out
}

fn columns(rows: usize, cols: &[Vec<Q>]) -> Matrix {
    (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

/// Splitting of one gr₂ level as `ker ad Λ ⊕ [Λ, im ad Λ]`.
struct Level {
    basis: Vec<(i32, usize)>,
    kernel: Vec<LoopElement>,
    /// Elements of `im ad Λ` one level up, whose brackets with `Λ` span the image here.
    preimage: Vec<LoopElement>,
    /// Inverse of `[kernel | ad Λ(preimage)]`.
    inv: Matrix,
}

/// `ad Λ` on level `t`, as a matrix from level `t` to level `t − l2`.
fn ad_matrix(lie: &LieAlgebra, lambda: &LoopElement, l2: i32, t: i32) -> Result<(Vec<(i32, usize)>, Matrix), Error> {
    let src = level_basis(lie, t);
    let dst = level_basis(lie, t - l2);
    let mut cols = Vec::new();
    for &(j, i) in &src {
        let img = lambda.bracket(lie, &LoopElement::from_vector(&lie.basis(i), j));
        cols.push(coords_on(&dst, &img)?);
    }
    Ok((src, columns(dst.len(), &cols)))
}

/// Basis of `im ad Λ` on level `t`.
fn image_basis(lie: &LieAlgebra, lambda: &LoopElement, l2: i32, t: i32) -> Result<Vec<LoopElement>, Error> {
    let (_, m) = ad_matrix(lie, lambda, l2, t + l2)?;
    let basis = level_basis(lie, t);
    if m.is_empty() || m[0].is_empty() {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    let piv = rref(&mut a);
    Ok(piv.iter().map(|&c| element_at(&basis, &m.iter().map(|r| r[c].clone()).collect::<Vec<_>>())).collect())
}

fn split_level(lie: &LieAlgebra, lambda: &LoopElement, l2: i32, t: i32) -> Result<Level, Error> {
    let (basis, m) = ad_matrix(lie, lambda, l2, t)?;
    let kernel: Vec<LoopElement> = if m.is_empty() {
        (0..basis.len()).map(|x| element_at(&basis, &crate::liealg::vbasis(basis.len(), x))).collect()
    } else {
        nullspace(&m, basis.len()).iter().map(|v| element_at(&basis, v)).collect()
    };
    let preimage = image_basis(lie, lambda, l2, t + l2)?;
    let mut cols = Vec::new();
    for k in &kernel {
        cols.push(coords_on(&basis, k)?);
    }
    for p in &preimage {
        cols.push(coords_on(&basis, &lambda.bracket(lie, p))?);
    }
    if cols.len() != basis.len() {
        return Err(Error::Shape(format!("Λ is not semisimple: ker ⊕ im fails on level {t}")));
    }
    let inv = if basis.is_empty() {
        Vec::new()
    } else {
        inverse(&columns(basis.len(), &cols))
            .ok_or_else(|| Error::Shape(format!("Λ is not semisimple: ker ∩ im ≠ 0 on level {t}")))?
    };
    Ok(Level { basis, kernel, preimage, inv })
}

/// Doubled gr₂ of `−Λ`, which must be homogeneous and of negative degree.
pub fn lambda_level(lie: &LieAlgebra, lambda: &LoopElement) -> Result<i32, Error> {
    match lambda.gr2(lie) {
        Some(g) if g < 0 => Ok(-g),
        _ => Err(Error::Shape("Λ must be homogeneous of negative degree".into())),
    }
}

/// `e^{ad S}(k∂ + q + Λ) = k∂ + Λ + h` with `h ∈ ker ad Λ`, through doubled gr₂ `max2`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub s: LoopPoly,
    pub h: LoopPoly,
    pub max2: i32,
}

impl Diagonalization {
    pub fn h_level(&self, lie: &LieAlgebra, t: i32) -> LoopPoly {
        self.h.level(lie, t)
    }

    pub fn s_level(&self, lie: &LieAlgebra, t: i32) -> LoopPoly {
        self.s.level(lie, t)
    }
}

/// Solves the diagonalization level by level, with `S` taken in `im ad Λ`.
pub fn diagonalize(lie: &LieAlgebra, lambda: &LoopElement, lax: &LaxOperator, max2: i32) -> Result<Diagonalization, Error> {
    let alg = lax.q.algebra().clone();
    let l2 = lambda_level(lie, lambda)?;
    if let Some((lo, _)) = lax.q.gr2_range(lie) {
        if lo <= -l2 {
            return Err(Error::Shape("q must lie strictly above the degree of Λ".into()));
        }
    }
    let mut full = lax.q.clone();
    full += &LoopPoly::constant(&alg, lambda);
    let mut s = LoopPoly::zero(&alg);
    let mut h = LoopPoly::zero(&alg);
    for t in (1 - l2)..=max2 {
        let lev = split_level(lie, lambda, l2, t)?;
        if lev.basis.is_empty() {
            continue;
        }
        let x = exp_ad(lie, &lax.k, &full, &s, Some(t))?.level(lie, t);
        if x.is_zero() {
            continue;
        }
        let xs: Vec<DiffPoly> = lev.basis.iter().map(|&(j, i)| x.coeff(j, i)).collect();
        let nk = lev.kernel.len();
        for (c, row) in lev.inv.iter().enumerate() {
            let mut v = DiffPoly::zero(&alg);
            for (a, xr) in row.iter().zip(&xs) {
                if !a.is_zero() {
                    v.add_scaled(xr, a);
                }
            }
            if v.is_zero() {
                continue;
            }
            if c < nk {
                h += &LoopPoly::from_element(&alg, &lev.kernel[c], &v);
            } else {
                s += &LoopPoly::from_element(&alg, &lev.preimage[c - nk], &v);
            }
        }
    }
    Ok(Diagonalization { s, h, max2 })
}

/// `e^{ad S}(k∂ + q + Λ) − k∂ − Λ − h` through `max2`; zero for a correct result.
pub fn diagonal_residual(lie: &LieAlgebra, lambda: &LoopElement, lax: &LaxOperator, d: &Diagonalization) -> Result<LoopPoly, Error> {
    let alg = lax.q.algebra();
    let lam = LoopPoly::constant(alg, lambda);
    let mut full = lax.q.clone();
    full += &lam;
    let mut out = exp_ad(lie, &lax.k, &full, &d.s, Some(d.max2))?;
    out -= &lam;
    out -= &d.h.truncate(lie, d.max2);
    Ok(out)
}

/// `H_b = (b, h)`; `b` must commute with `Λ` and be covered by the diagonalization.
pub fn hamiltonian_density(lie: &LieAlgebra, lambda: &LoopElement, d: &Diagonalization, b: &LoopElement) -> Result<DiffPoly, Error> {
    if !b.bracket(lie, lambda).is_zero() {
        return Err(Error::Config("b does not commute with Λ".into()));
    }
    for &(j, i) in b.terms.keys() {
        if -gr2(lie, j, i) > d.max2 {
            return Err(Error::Config(format!("diagonalization bound {} too small for b", d.max2)));
        }
    }
    Ok(d.h.pair(lie, b))
}

/// `½ Λ_m z^{m−n}`: the n-th element of the kernel family used for the hierarchy.
pub fn hamiltonian_element(red: &Reduction, n: u32) -> LoopElement {
    red.lambda.shift(red.m as i32 - n as i32).scale(&qf(1, 2))
}

/// Level through which `h` is needed for the first `depth` Hamiltonians.
pub fn required_level(red: &Reduction, depth: u32) -> i32 {
    (0..depth)
        .map(|n| -hamiltonian_element(red, n).gr2(&red.lie).expect("homogeneous"))
        .max()
        .unwrap_or(0)
}

/// Checks `δH/δu_i^j = (e^{−ad S} b, ũ_i z^{−j})` for every window variable.
pub fn variational_identity_check(red: &Reduction, s: &LoopPoly, b: &LoopElement, hb: &DiffPoly) -> Result<Vec<CheckReport>, Error> {
    let lie = &red.lie;
    let alg = red.algebra();
    let bp = LoopPoly::constant(alg, b);
    let rot = exp_ad(lie, &DiffPoly::zero(alg), &bp, &s.scale(&-Q::one()), Some(red.window.top2 - 1))?;
    let mut out = Vec::new();
    for &(j, i) in &red.window.b {
        let g = red.generator(j, i).expect("window variable");
        let lhs = hb.variational(g);
        let rhs = rot.pair(lie, &red.window.dual(lie, j, i));
        let diff = &lhs - &rhs;
        let res = (!diff.is_zero()).then(|| diff.to_string());
        out.push(CheckReport::new("variational identity", vec![red.label(j, i)], res));
    }
    Ok(out)
}

/// `dφ/dt = {H λ φ}|_{λ=0}`.
pub fn evolution(p: &Presentation, h: &DiffPoly, phi: &DiffPoly) -> DiffPoly {
    p.bracket(h, phi).at_lambda_zero()
}

/// `{H_{z^{-1}b} λ φ}₁ = {H_b λ φ}₂` at `λ = 0`, for every generator `φ`.
pub fn double_hamiltonian_check(
    p1: &Presentation,
    p2: &Presentation,
    h_next: &DiffPoly,
    h_b: &DiffPoly,
    gens: &[GenId],
) -> Vec<CheckReport> {
    let alg = p1.algebra();
    gens.par_iter()
        .map(|&g| {
            let phi = DiffPoly::var(alg, g);
            let diff = &evolution(p1, h_next, &phi) - &evolution(p2, h_b, &phi);
            let res = (!diff.is_zero()).then(|| diff.to_string());
            CheckReport::new("double Hamiltonian", vec![alg.name(g).to_string()], res)
        })
        .collect()
}

/// `∫{h₁ λ h₂}|_{λ=0} = 0`.
pub fn involution_check(p: &Presentation, h1: &LocalFunctional, h2: &LocalFunctional) -> bool {
    evolution(p, &h1.density, &h2.density).is_total_derivative()
}

/// `{u_i ∂ u_j}_→ G_i` summed over `i`: the Hamiltonian operator applied to a gradient.
pub fn apply_operator(p: &Presentation, fields: &[GenId], grad: &[DiffPoly]) -> Vec<DiffPoly> {
    let alg = p.algebra();
    fields
        .iter()
        .map(|&uj| {
            let mut out = DiffPoly::zero(alg);
            for (&ui, g) in fields.iter().zip(grad) {
                for (n, c) in p.get(ui, uj).coeffs() {
                    out += c * &g.derivative_n(*n);
                }
            }
            out
        })
        .collect()
}

/// `∫_0^1 Σ u_i G_i(tu) dt`, which recovers a density from its gradient.
pub fn homotopy_density(fields: &[GenId], grad: &[DiffPoly]) -> DiffPoly {
    let alg = grad[0].algebra().clone();
    let mut out = DiffPoly::zero(&alg);
    for (&u, g) in fields.iter().zip(grad) {
        let mut scaled = DiffPoly::zero(&alg);
        for (m, c) in g.terms() {
            let deg = m.factors().iter().filter(|f| !alg.is_parameter(f.0.gen)).map(|f| f.1).sum::<u32>();
            scaled += DiffPoly::from_monomial(&alg, m.clone(), c / Q::from_integer((deg as i64 + 1).into()));
        }
        out += &DiffPoly::var(&alg, u) * &scaled;
    }
    out
}

/// Next Lenard density: solves `K δh'/δu = H δh/δu` for a closed gradient.
///
/// The ansatz starts at degree `deg h + 1` and jet-order sum `ord h + 2` and grows twice.
pub fn lenard_step(h: &LocalFunctional, ph: &Presentation, pk: &Presentation) -> Result<Option<LocalFunctional>, Error> {
    let alg = ph.algebra().clone();
    let fields: Vec<GenId> = alg.fields().collect();
    let rhs = apply_operator(ph, &fields, &h.gradient(&fields));
    if rhs.iter().all(|r| r.is_zero()) {
        return Ok(Some(LocalFunctional::new(DiffPoly::zero(&alg))));
    }
    let (_, deg) = h.density.field_degree_range().unwrap_or((0, 0));
    let ord: u32 = h.density.terms().keys().map(|m| m.order_sum()).max().unwrap_or(0);
    for grow in 0..3u32 {
        if let Some(g) = lenard_solve(&alg, &fields, &rhs, pk, deg + 1 + grow, ord + 2 + 2 * grow)? {
            let density = homotopy_density(&fields, &g);
            let back: Vec<DiffPoly> = fields.iter().map(|&u| density.variational(u)).collect();
            if back != g {
                return Err(Error::Check("reconstructed density does not reproduce the gradient".into()));
            }
            return Ok(Some(LocalFunctional::new(density)));
        }
    }
    Ok(None)
}

fn lenard_solve(
    alg: &Alg,
    fields: &[GenId],
    rhs: &[DiffPoly],
    pk: &Presentation,
    deg: u32,
    ord: u32,
) -> Result<Option<Vec<DiffPoly>>, Error> {
    let monos = monomials_up_to(alg, fields, deg, ord);
    let nf = fields.len();
    // unknown (i, m): coefficient of monomial m in G_i
    let unknowns: Vec<(usize, DiffPoly)> = (0..nf)
        .flat_map(|i| monos.iter().map(move |m| (i, DiffPoly::from_monomial(alg, m.clone(), Q::one()))))
        .collect();
    // each unknown's image in (K G, δ(hom G) − G), as polynomials indexed by equation
    let images: Vec<Vec<DiffPoly>> = unknowns
        .par_iter()
        .map(|(i, m)| {
            let mut g = vec![DiffPoly::zero(alg); nf];
            g[*i] = m.clone();
            let mut eqs = apply_operator(pk, fields, &g);
            let dens = homotopy_density(fields, &g);
            for (x, &u) in fields.iter().enumerate() {
                eqs.push(&dens.variational(u) - &g[x]);
            }
            eqs
        })
        .collect();
    let mut rows: BTreeMap<(usize, crate::diffalg::Monomial), BTreeMap<usize, Q>> = BTreeMap::new();
    for (col, eqs) in images.iter().enumerate() {
        for (e, p) in eqs.iter().enumerate() {
            for (m, c) in p.terms() {
                rows.entry((e, m.clone())).or_default().insert(col, c.clone());
            }
        }
    }
    for (e, r) in rhs.iter().enumerate() {
        for m in r.terms().keys() {
            rows.entry((e, m.clone())).or_default();
        }
    }
    let mut solver = SparseSolver::new();
    for ((e, m), row) in rows {
        let b = if e < nf { rhs[e].terms().get(&m).cloned().unwrap_or_else(Q::zero) } else { Q::zero() };
        solver.push(row, b);
    }
    let Some(x) = solver.solution(unknowns.len()) else { return Ok(None) };
    let mut g = vec![DiffPoly::zero(alg); nf];
    for ((i, m), c) in unknowns.iter().zip(&x) {
        if !c.is_zero() {
            g[*i].add_scaled(m, c);
        }
    }
    Ok(Some(g))
}

/// The KdV pair `{u λ u}_H = (∂ + 2λ)u + cλ³`, `{u λ u}_K = λ` on `ℂ[u]`.
pub fn kdv_pair(c: &Q) -> Result<(Presentation, Presentation), Error> {
    let alg = DiffAlgebra::builder().even("u").build()?;
    let mut ph = Presentation::new(&alg);
    let cs = if c.is_zero() { String::new() } else { format!(" + ({c})*L^3") };
    ph.set_named("u", "u", &format!("u' + 2*L*u{cs}"))?;
    let mut pk = Presentation::new(&alg);
    pk.set_named("u", "u", "L")?;
    Ok((ph, pk))
}

/// `h₀ = u, h₁, …, h_n` by the Lenard scheme.
pub fn kdv_hierarchy(c: &Q, n: usize) -> Result<Vec<LocalFunctional>, Error> {
    let (ph, pk) = kdv_pair(c)?;
    let u = DiffPoly::named(ph.algebra(), "u");
    let mut out = vec![LocalFunctional::new(u)];
    for t in 0..n {
        let next = lenard_step(&out[t], &ph, &pk)?
            .ok_or_else(|| Error::Solve(format!("no Lenard density at step {}", t + 1)))?;
        out.push(next);
    }
    Ok(out)
}

/// The γ-side data of a reduction together with the diagonalization of `Q^can`.
pub struct HamiltonianSystem {
    pub red: Reduction,
    pub table: GeneratorTable,
    pub gamma: GammaAlgebra,
    pub p1: Presentation,
    pub p2: Presentation,
    pub diag: Diagonalization,
    /// `H_n = (½Λ_m z^{m−n}, h)`, in the γ's.
    pub hams: Vec<DiffPoly>,
}

impl HamiltonianSystem {
    pub fn new(lie: &LieAlgebra, m: u32, k: KValue, depth: u32) -> Result<Self, Error> {
        let red = Reduction::new(lie, m, k)?;
        let (_, table) = reduce(&red)?;
        let gamma = GammaAlgebra::new(&red, &table)?;
        let (w1, w2) = red.fractional_presentations();
        let (p1, p2) = gamma.presentations(&red, &w1, &w2)?;
        let lax = LaxOperator { k: gamma.rewrite(&red, red.k())?, q: gamma.qcan.clone() };
        let diag = diagonalize(&red.lie, &red.lambda, &lax, required_level(&red, depth))?;
        let hams = (0..depth)
            .map(|n| hamiltonian_density(&red.lie, &red.lambda, &diag, &hamiltonian_element(&red, n)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HamiltonianSystem { red, table, gamma, p1, p2, diag, hams })
    }

    pub fn gens(&self) -> Vec<GenId> {
        self.gamma.ids.clone()
    }

    pub fn gamma(&self, label: &str) -> DiffPoly {
        self.gamma.var(label)
    }

    /// Flow of the n-th Hamiltonian under the second bracket.
    pub fn flow(&self, n: usize) -> Vec<(String, DiffPoly)> {
        self.gens()
            .iter()
            .map(|&g| {
                let phi = DiffPoly::var(&self.gamma.alg, g);
                (self.gamma.alg.name(g).to_string(), evolution(&self.p2, &self.hams[n], &phi))
            })
            .collect()
    }

    /// `H_{n+1}` under the first bracket against `H_n` under the second.
    pub fn double_hamiltonian(&self) -> Vec<CheckReport> {
        let gens = self.gens();
        (0..self.hams.len().saturating_sub(1))
            .flat_map(|n| double_hamiltonian_check(&self.p1, &self.p2, &self.hams[n + 1], &self.hams[n], &gens))
            .collect()
    }

    /// Pairwise involution of the Hamiltonians under both brackets.
    pub fn involution_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.hams.len();
        let f: Vec<LocalFunctional> = self.hams.iter().cloned().map(LocalFunctional::new).collect();
        (0..n)
            .map(|a| {
                (0..n)
                    .into_par_iter()
                    .map(|b| involution_check(&self.p1, &f[a], &f[b]) && involution_check(&self.p2, &f[a], &f[b]))
                    .collect()
            })
            .collect()
    }

    /// Elements `c` with `{c λ γ}₁ = {c λ γ}₂ = 0` for every generator, among the given candidates.
    pub fn is_central(&self, c: &DiffPoly) -> bool {
        self.gens().iter().all(|&g| {
            let phi = DiffPoly::var(&self.gamma.alg, g);
            self.p1.bracket(c, &phi).is_zero() && self.p2.bracket(c, &phi).is_zero()
        })
    }
}

/// A scalar evolution equation `e_{ttt} = Σ c · term`.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarEquation {
    pub lhs: String,
    pub terms: Vec<(String, String)>,
}

impl std::fmt::Display for ScalarEquation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rhs: Vec<String> = self.terms.iter().map(|(c, t)| format!("{c}*{t}")).collect();
        write!(f, "{} = {}", self.lhs, if rhs.is_empty() { "0".into() } else { rhs.join(" + ") })
    }
}

/// Result of the sl₂, m = 1 elimination.
#[derive(Clone, Debug)]
pub struct KdvReduction {
    /// `(name, dφ/dt)` before the quotient.
    pub flow: Vec<(String, DiffPoly)>,
    /// The same after `γ_fz ↦ −γ_e`.
    pub quotient: Vec<(String, DiffPoly)>,
    /// Coefficients of `γ_e γ_{e,t}`, `k γ_e'`, and the remaining candidates.
    pub coefficients: Vec<(String, Q)>,
    pub equation: ScalarEquation,
}

/// Quotients the first flow by the centre `γ_e + γ_fz` and eliminates `γ_f`, `γ_x`.
pub fn reduce_to_kdv(sys: &HamiltonianSystem) -> Result<KdvReduction, Error> {
    let alg = sys.gamma.alg.clone();
    let (ge, gfz) = (sys.gamma("e"), sys.gamma("fz"));
    if !sys.is_central(&(&ge + &gfz)) {
        return Err(Error::Check("γ_e + γ_fz is not central".into()));
    }
    let flow = sys.flow(0);
    let fz_id = sys.gamma.id("fz").expect("γ_fz");
    let quot = |p: &DiffPoly| p.substitute(&alg, |g| if g == fz_id { -ge.clone() } else { DiffPoly::var(&alg, g) });
    let quotient: Vec<(String, DiffPoly)> = flow.iter().filter(|(n, _)| n != "g_fz").map(|(n, p)| (n.clone(), quot(p))).collect();
    let rates: BTreeMap<GenId, DiffPoly> =
        quotient.iter().map(|(n, p)| (alg.gen(n).expect("generator"), p.clone())).collect();
    // D_t on the quotient: a derivation commuting with ∂
    let dt = |p: &DiffPoly| -> DiffPoly {
        let mut out = DiffPoly::zero(&alg);
        for jet in p.jets() {
            if let Some(r) = rates.get(&jet.gen) {
                out += &p.partial(jet) * &r.derivative_n(jet.order);
            }
        }
        out
    };
    let e1 = dt(&ge);
    let e2 = dt(&e1);
    let e3 = dt(&e2);
    let k = sys.gamma.rewrite(&sys.red, sys.red.k())?;
    let cands: Vec<(String, DiffPoly)> = vec![
        ("g_e*g_e_t".into(), &ge * &e1),
        ("k*g_e_x".into(), &k * &ge.derivative()),
        ("g_e_x".into(), ge.derivative()),
        ("g_e_tt".into(), e2.clone()),
        ("g_e_t".into(), e1.clone()),
        ("g_e^2".into(), &ge * &ge),
        ("g_e".into(), ge.clone()),
    ];
    let polys: Vec<DiffPoly> = cands.iter().map(|c| c.1.clone()).collect();
    let x = crate::linalg::solve_combination(&polys, &e3).ok_or_else(|| Error::Check("elimination is inconsistent".into()))?;
    let coefficients: Vec<(String, Q)> = cands.iter().map(|c| c.0.clone()).zip(x).collect();
    let terms = coefficients
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(t, c)| (c.to_string(), t.clone()))
        .collect();
    Ok(KdvReduction {
        flow,
        quotient,
        coefficients,
        equation: ScalarEquation { lhs: "g_e_ttt".into(), terms },
    })
}

/// Linear independence in `A/∂A`, tested on the variational gradients
/// (the kernel of `δ/δu` is `∂A ⊕ ℂ`).
pub fn linearly_independent(fs: &[LocalFunctional], fields: &[GenId]) -> bool {
    let grads: Vec<Vec<DiffPoly>> = fs.iter().map(|f| f.gradient(fields)).collect();
    if fs.iter().any(|f| f.density.as_constant().is_some_and(|c| !c.is_zero())) {
        return false;
    }
    let mut rows: BTreeMap<(usize, crate::diffalg::Monomial), Vec<Q>> = BTreeMap::new();
    for (col, g) in grads.iter().enumerate() {
        for (x, p) in g.iter().enumerate() {
            for (m, c) in p.terms() {
                rows.entry((x, m.clone())).or_insert_with(|| vec![Q::zero(); fs.len()])[col] = c.clone();
            }
        }
    }
    let m: Matrix = rows.into_values().collect();
    crate::linalg::rank(&m) == fs.len()
}

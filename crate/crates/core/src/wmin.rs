//! Closed-form generators: the η map for minimal nilpotents and the
//! matrix gauge for minimal nilpotents of sl_n.

use num_traits::{One, Zero};

use crate::diffalg::{DiffPoly, Q};
use crate::dsred::{GeneratorTable, LoopPoly, Reduction};
use crate::liealg::{gr2, minimal_frame, LoopElement, Nilpotent, Vector};
use crate::pva::{LambdaPoly, Presentation};
use crate::Error;

/// `η̃_m` and `η_m` for a minimal nilpotent, in window variables.
pub struct EtaMap<'a> {
    red: &'a Reduction,
    /// `z_1 … z_{2s}, x`
    z: Vec<Vector>,
    /// `z*_1 … z*_{2s}, e`
    zstar: Vec<Vector>,
}

/// Depth of the nested-bracket sum; one more level is computed and must vanish.
const DEPTH: usize = 4;

impl<'a> EtaMap<'a> {
    pub fn new(red: &'a Reduction) -> Result<Self, Error> {
        let frame = minimal_frame(&red.lie)?;
        let (z, zstar) = frame.extended(&red.lie);
        Ok(EtaMap { red, z, zstar })
    }

    /// `(z_1 … z_{2s}, x)` and `(z*_1 … z*_{2s}, e)`.
    pub fn frame(&self) -> (&[Vector], &[Vector]) {
        (&self.z, &self.zstar)
    }

    pub fn s(&self) -> usize {
        (self.z.len() - 1) / 2
    }

    fn zm(&self, i: usize) -> DiffPoly {
        self.red.var(&LoopElement::from_vector(&self.z[i], self.red.m as i32))
    }

    /// Drops terms past the window; they never return under brackets with g(>0).
    fn clip(&self, v: LoopElement) -> LoopElement {
        let top = self.red.window.top2;
        let lie = &self.red.lie;
        LoopElement { terms: v.terms.into_iter().filter(|((j, i), _)| gr2(lie, *j, *i) <= top).collect() }
    }

    /// `Σ_l (1/l!) Σ (z_{i1}z^m)⋯(z_{il}z^m) {a, z*_{i1}, …, z*_{il}}`.
    pub fn tilde(&self, a: &LoopElement) -> Result<DiffPoly, Error> {
        let lie = &self.red.lie;
        let alg = self.red.algebra();
        let stars: Vec<LoopElement> = self.zstar.iter().map(|v| LoopElement::from_vector(v, 0)).collect();
        let zm: Vec<DiffPoly> = (0..self.z.len()).map(|i| self.zm(i)).collect();
        let mut out = self.red.var(a);
        let mut level = vec![(DiffPoly::one(alg), self.clip(a.clone()))];
        let mut fact = Q::one();
        for l in 1..=DEPTH + 1 {
            fact *= Q::from_integer((l as i64).into());
            let mut next = Vec::new();
            for (c, v) in &level {
                for (i, st) in stars.iter().enumerate() {
                    let w = self.clip(v.bracket(lie, st));
                    if w.is_zero() || zm[i].is_zero() {
                        continue;
                    }
                    next.push((c * &zm[i], w));
                }
            }
            if l > DEPTH {
                if !next.is_empty() {
                    return Err(Error::Shape("nested brackets of depth 5 do not vanish".into()));
                }
                break;
            }
            let inv = Q::one() / &fact;
            for (c, w) in &next {
                out.add_scaled(&(c * &self.red.var(w)), &inv);
            }
            level = next;
        }
        Ok(out)
    }

    /// `η_m`: `η̃_m` plus the `k∂` corrections on the z⁰ components of grade −1/2 and −1.
    pub fn eta(&self, a: &LoopElement) -> Result<DiffPoly, Error> {
        let red = self.red;
        let lie = &red.lie;
        let mut out = self.tilde(a)?;
        let s2 = 2 * self.s();
        let k = red.k().clone();
        for ((j, i), c) in &a.terms {
            if *j != 0 {
                continue;
            }
            match lie.grade2[*i] {
                -1 => {
                    let b = lie.basis(*i);
                    for t in 0..s2 {
                        let pf = lie.pair(&self.zstar[t], &b);
                        if !pf.is_zero() {
                            out.add_scaled(&(&k * &self.zm(t).derivative()), &-(pf * c));
                        }
                    }
                }
                -2 => {
                    // multiple of f
                    let mult = c * lie.pair(&lie.basis(*i), &lie.e);
                    let xm = red.var(&LoopElement::from_vector(&lie.x, red.m as i32));
                    out.add_scaled(&(&k * &xm.derivative()), &-mult.clone());
                    for t in 0..s2 {
                        let zs = red.var(&LoopElement::from_vector(&self.zstar[t], red.m as i32));
                        let term = &k * &(&zs.derivative() * &self.zm(t));
                        out.add_scaled(&term, &-(&mult / Q::from_integer(2.into())));
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// `η` on the generating domain `⊕_{t<m} g z^t ⊕ g_f z^m`, labelled as in `table`.
    pub fn generators(&self, table: &GeneratorTable) -> Result<Vec<(String, LoopElement, DiffPoly)>, Error> {
        table.gens.iter().map(|g| Ok((g.label.clone(), g.element.clone(), self.eta(&g.element)?))).collect()
    }
}

/// The predicted value of `{η(a) λ η(b)}` for generators `a = a₀z^i`, `b = b₀z^j`,
/// or `None` when no closed form is stated for the pair.
pub fn eta_bracket_prediction(
    eta: &EtaMap,
    a: &LoopElement,
    b: &LoopElement,
    second: bool,
) -> Result<Option<LambdaPoly>, Error> {
    let red = eta.red;
    let lie = &red.lie;
    let alg = red.algebra();
    let k = red.k();
    let deg = |v: &LoopElement| -> Option<i32> {
        let mut js = v.terms.keys().map(|(j, _)| *j);
        let j0 = js.next()?;
        js.all(|j| j == j0).then_some(j0)
    };
    let (Some(i), Some(j)) = (deg(a), deg(b)) else { return Ok(None) };
    let f0 = LoopElement::from_vector(&lie.f, 0);
    let fz = LoopElement::from_vector(&lie.f, 1);
    let e0 = LoopElement::from_vector(&lie.e, 0);
    let c = |p: DiffPoly| LambdaPoly::constant(p);
    let br = |x: &LoopElement, y: &LoopElement| x.bracket(lie, y);
    if !second {
        if *a == f0 && *b == f0 {
            return Ok(Some(LambdaPoly::monomial(alg, 1, k.scale(&Q::from_integer((-2).into())))));
        }
        if *a == f0 {
            let v = &eta.eta(&br(b, &e0))? - &eta.eta(&br(&f0, b).shift(1))?;
            return Ok(Some(c(v)));
        }
        if *b == f0 {
            return Ok(None);
        }
        return Ok(Some(c(-eta.eta(&br(a, b).shift(1))?)));
    }
    if i == 0 && j == 0 {
        let form = a.pair(lie, b);
        let mut out = c(eta.eta(&br(a, b))?);
        if !form.is_zero() {
            out.add_at(1, &k.scale(&form));
        }
        return Ok(Some(out));
    }
    if *a == fz {
        if *b == f0 {
            let mut out = c(eta.eta(&LoopElement::from_vector(&lie.x, 0))?.scale(&Q::from_integer((-2).into())));
            out.add_at(1, &-k.clone());
            return Ok(Some(out));
        }
        if j == 0 {
            if lie.grade_of(&flatten(b, lie.dim())).is_some_and(|g| g >= -1) {
                return Ok(Some(c(eta.eta(&br(b, &e0))?)));
            }
            return Ok(None);
        }
        if *b != fz {
            let v = &eta.eta(&br(b, &e0))? - &eta.eta(&br(&fz, b))?;
            return Ok(Some(c(v)));
        }
    }
    if i > 0 && j > 0 && *b != fz {
        return Ok(Some(c(-eta.eta(&br(a, b))?)));
    }
    Ok(None)
}

/// Coefficients of a single-degree loop element as a vector of g.
fn flatten(v: &LoopElement, dim: usize) -> Vector {
    let mut out = vec![Q::zero(); dim];
    for ((_, i), c) in &v.terms {
        out[*i] += c;
    }
    out
}

/// Entries of a z-graded matrix with polynomial coefficients.
pub type PolyMatrix = Vec<Vec<DiffPoly>>;

/// Matrix coefficients of `z^j`, keyed by `j`.
pub fn matrix_form(red: &Reduction, p: &LoopPoly) -> std::collections::BTreeMap<i32, PolyMatrix> {
    let lie = &red.lie;
    let n = lie.n;
    let alg = p.algebra();
    let mut out = std::collections::BTreeMap::new();
    for ((j, i), c) in p.terms() {
        let m = out.entry(*j).or_insert_with(|| vec![vec![DiffPoly::zero(alg); n]; n]);
        for r in 0..n {
            for s in 0..n {
                let a = &lie.matrices[*i][r][s];
                if !a.is_zero() {
                    m[r][s].add_scaled(c, a);
                }
            }
        }
    }
    out
}

fn from_matrices(red: &Reduction, ms: &std::collections::BTreeMap<i32, PolyMatrix>) -> LoopPoly {
    let lie = &red.lie;
    let n = lie.n;
    let alg = red.algebra();
    let mut out = LoopPoly::zero(alg);
    for (j, m) in ms {
        for b in 0..lie.dim() {
            // coordinate b = (dual_b, X) = scale · tr(dual_b X)
            let dm = lie.matrix(&lie.dual[b]);
            let mut acc = DiffPoly::zero(alg);
            for r in 0..n {
                for s in 0..n {
                    if !dm[s][r].is_zero() {
                        acc.add_scaled(&m[r][s], &(&dm[s][r] * lie.form_scale()));
                    }
                }
            }
            out.add_term(*j, b, &acc);
        }
    }
    out
}

fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    let alg = a[0][0].algebra().clone();
    let mut c = vec![vec![DiffPoly::zero(&alg); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    c[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    c
}

/// Output of the matrix gauge for minimal nilpotents of sl_n.
pub struct FastPath {
    /// Gauge matrix `S = 1 + N` with `N` in the first row and last column.
    pub s: PolyMatrix,
    /// `q̄` with `S(q + Λ)S⁻¹ − k(∂S)S⁻¹ = q̄ + Λ`.
    pub qbar: LoopPoly,
}

/// Conjugates the universal Lax operator by `S = 1 + N`, with
/// `s_{in} = E^m_{i1}`, `s_{1j} = −E^m_{nj}` for `1 < i, j < n` and the corner
/// fixed by removing the `h` direction from the `z^{-m}` component.
pub fn sln_fast_path(red: &Reduction) -> Result<FastPath, Error> {
    let lie = &red.lie;
    if lie.nilpotent != Nilpotent::Minimal && lie.n != 2 {
        return Err(Error::Config("the matrix gauge needs a minimal nilpotent".into()));
    }
    let n = lie.n;
    let m = red.m as i32;
    let alg = red.algebra();
    let lax = red.universal_lax();
    let mut full = lax.q.clone();
    full += &LoopPoly::constant(alg, &red.lambda);
    let ms = matrix_form(red, &full);
    let zero = || vec![vec![DiffPoly::zero(alg); n]; n];
    let em = ms.get(&-m).cloned().unwrap_or_else(zero);
    if em[n - 1][0] != DiffPoly::constant(alg, -Q::one()) {
        return Err(Error::Check("entry (n,1) at z^-m is not −1".into()));
    }
    let mut nmat = zero();
    for i in 1..n - 1 {
        nmat[i][n - 1] = em[i][0].clone();
        nmat[0][i] = -&em[n - 1][i];
    }
    let build = |nm: &PolyMatrix| -> (PolyMatrix, PolyMatrix) {
        let mut s = nm.clone();
        let mut sinv = mat_mul(nm, nm);
        for i in 0..n {
            for j in 0..n {
                sinv[i][j] -= &nm[i][j];
            }
            s[i][i] += DiffPoly::one(alg);
            sinv[i][i] += DiffPoly::one(alg);
        }
        (s, sinv)
    };
    let conj = |nm: &PolyMatrix| -> std::collections::BTreeMap<i32, PolyMatrix> {
        let (s, sinv) = build(nm);
        let mut out = std::collections::BTreeMap::new();
        for (j, mj) in &ms {
            out.insert(*j, mat_mul(&mat_mul(&s, mj), &sinv));
        }
        let ds: PolyMatrix = s.iter().map(|r| r.iter().map(|x| x.derivative()).collect()).collect();
        let corr = mat_mul(&ds, &sinv);
        let e0 = out.entry(0).or_insert_with(zero);
        for i in 0..n {
            for j in 0..n {
                e0[i][j] -= &(red.k() * &corr[i][j]);
            }
        }
        out
    };
    // corner: shift the (1,1)−(n,n) difference at z^{-m} to zero
    let trial = conj(&nmat);
    let t = &trial[&-m];
    nmat[0][n - 1] = (&t[0][0] - &t[n - 1][n - 1]).scale(&Q::new(1.into(), 2.into()));
    let (s, _) = build(&nmat);
    let mut qbar = from_matrices(red, &conj(&nmat));
    qbar -= &LoopPoly::constant(alg, &red.lambda);
    Ok(FastPath { s, qbar })
}

/// `{γ_a λ γ_b}` for all ordered pairs of labelled polynomials.
pub fn bracket_table(
    p: &Presentation,
    gens: &[(String, LoopElement, DiffPoly)],
) -> Vec<(String, String, LambdaPoly)> {
    use rayon::prelude::*;
    let pairs: Vec<(usize, usize)> = (0..gens.len()).flat_map(|a| (0..gens.len()).map(move |b| (a, b))).collect();
    pairs
        .par_iter()
        .map(|&(a, b)| (gens[a].0.clone(), gens[b].0.clone(), p.bracket(&gens[a].2, &gens[b].2)))
        .collect()
}

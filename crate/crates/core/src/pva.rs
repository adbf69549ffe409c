//! λ-brackets: the master formula over a presentation, axiom checkers and a
//! small text format for presentations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::diffalg::{q, Alg, DiffAlgebra, DiffPoly, GenId, GenKind, Parity, Q};
use crate::Error;

/// Polynomial in λ with differential-polynomial coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct LambdaPoly {
    alg: Alg,
    coeffs: BTreeMap<u32, DiffPoly>,
}

fn binom(n: u32, k: u32) -> Q {
    let mut r = Q::one();
    for i in 0..k {
        r = r * q((n - i) as i64) / q((i + 1) as i64);
    }
    r
}

impl LambdaPoly {
    pub fn zero(alg: &Alg) -> Self {
        LambdaPoly { alg: alg.clone(), coeffs: BTreeMap::new() }
    }

    pub fn constant(p: DiffPoly) -> Self {
        let alg = p.algebra().clone();
        LambdaPoly::monomial(&alg, 0, p)
    }

    pub fn monomial(alg: &Alg, n: u32, p: DiffPoly) -> Self {
        let mut l = LambdaPoly::zero(alg);
        l.add_at(n, &p);
        l
    }

    pub fn from_map(alg: &Alg, coeffs: BTreeMap<u32, DiffPoly>) -> Self {
        let mut l = LambdaPoly::zero(alg);
        for (n, p) in coeffs {
            l.add_at(n, &p);
        }
        l
    }

    pub fn parse(alg: &Alg, s: &str) -> Result<Self, Error> {
        Ok(LambdaPoly::from_map(alg, crate::parse::parse_lambda(alg, s, true)?))
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, DiffPoly> {
        &self.coeffs
    }

    pub fn coeff(&self, n: u32) -> DiffPoly {
        self.coeffs.get(&n).cloned().unwrap_or_else(|| DiffPoly::zero(&self.alg))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_at(&mut self, n: u32, p: &DiffPoly) {
        if p.is_zero() {
            return;
        }
        let e = self.coeffs.entry(n).or_insert_with(|| DiffPoly::zero(&self.alg));
        *e += p;
        if e.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn add_scaled(&mut self, other: &LambdaPoly, s: &Q) {
        for (n, p) in &other.coeffs {
            self.add_at(*n, &p.scale(s));
        }
    }

    pub fn scale(&self, s: &Q) -> LambdaPoly {
        let mut out = LambdaPoly::zero(&self.alg);
        out.add_scaled(self, s);
        out
    }

    pub fn mul_right(&self, p: &DiffPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero(&self.alg);
        for (n, c) in &self.coeffs {
            out.add_at(*n, &(c * p));
        }
        out
    }

    pub fn mul_left(&self, p: &DiffPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero(&self.alg);
        for (n, c) in &self.coeffs {
            out.add_at(*n, &(p * c));
        }
        out
    }

    /// Multiplication by λ^k.
    pub fn shift_degree(&self, k: u32) -> LambdaPoly {
        LambdaPoly { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|(n, c)| (n + k, c.clone())).collect() }
    }

    /// The total derivative applied to every coefficient.
    pub fn derivative(&self) -> LambdaPoly {
        let mut out = LambdaPoly::zero(&self.alg);
        for (n, c) in &self.coeffs {
            out.add_at(*n, &c.derivative());
        }
        out
    }

    /// `(λ+∂)^k` applied to the whole polynomial.
    pub fn lambda_plus_d(&self, k: u32) -> LambdaPoly {
        let mut cur = self.clone();
        for _ in 0..k {
            let mut next = cur.shift_degree(1);
            let d = cur.derivative();
            for (n, c) in &d.coeffs {
                next.add_at(*n, c);
            }
            cur = next;
        }
        cur
    }

    /// Substitutes λ ↦ −λ−∂ with ∂ acting on the coefficients.
    pub fn skew_substitute(&self) -> LambdaPoly {
        let mut out = LambdaPoly::zero(&self.alg);
        for (k, c) in &self.coeffs {
            // (−λ−∂)^k c = Σ_r C(k,r) (−λ)^{k−r} (−∂)^r c
            let mut dc = c.clone();
            for r in 0..=*k {
                let sign = if k % 2 == 1 { -1 } else { 1 };
                out.add_at(k - r, &dc.scale(&(binom(*k, r) * q(sign))));
                dc = dc.derivative();
            }
        }
        out
    }

    /// The λ⁰ coefficient.
    pub fn at_lambda_zero(&self) -> DiffPoly {
        self.coeff(0)
    }

    pub fn transport(&self, target: &Alg) -> Result<LambdaPoly, Error> {
        let mut out = LambdaPoly::zero(target);
        for (n, c) in &self.coeffs {
            out.add_at(*n, &c.transport(target)?);
        }
        Ok(out)
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let lam = match n {
                0 => String::new(),
                1 => "L".to_string(),
                n => format!("L^{n}"),
            };
            if lam.is_empty() {
                write!(f, "{}", paren(c))?;
            } else if c.as_constant().is_some_and(|x| x.is_one()) {
                write!(f, "{lam}")?;
            } else {
                write!(f, "{lam}*{}", paren(c))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn paren(c: &DiffPoly) -> String {
    if c.len() > 1 || c.to_string().starts_with('-') {
        format!("({c})")
    } else {
        c.to_string()
    }
}

impl std::ops::Add<&LambdaPoly> for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl std::ops::Sub<&LambdaPoly> for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

/// Polynomial in two formal variables λ, μ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BiLambdaPoly {
    pub coeffs: BTreeMap<(u32, u32), DiffPoly>,
}

impl BiLambdaPoly {
    fn new() -> Self {
        BiLambdaPoly { coeffs: BTreeMap::new() }
    }

    fn add_at(&mut self, i: u32, j: u32, p: &DiffPoly, s: &Q) {
        if p.is_zero() {
            return;
        }
        let alg = p.algebra().clone();
        let e = self.coeffs.entry((i, j)).or_insert_with(|| DiffPoly::zero(&alg));
        e.add_scaled(p, s);
        if e.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for BiLambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.coeffs.iter().map(|((i, j), c)| format!("L^{i}*M^{j}*({c})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Generators plus λ-brackets among them.
#[derive(Clone)]
pub struct Presentation {
    alg: Alg,
    stored: BTreeMap<(GenId, GenId), LambdaPoly>,
    full: HashMap<(GenId, GenId), LambdaPoly>,
}

impl Presentation {
    pub fn new(alg: &Alg) -> Self {
        Presentation { alg: alg.clone(), stored: BTreeMap::new(), full: HashMap::new() }
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    /// Stores `{a λ b}`; the mirror pair is completed by skewsymmetry unless stored too.
    pub fn set(&mut self, a: GenId, b: GenId, value: LambdaPoly) {
        let mirror = mirror_value(&self.alg, a, b, &value);
        self.full.insert((a, b), value.clone());
        if a != b && !self.stored.contains_key(&(b, a)) {
            self.full.insert((b, a), mirror);
        }
        self.stored.insert((a, b), value);
    }

    pub fn set_named(&mut self, a: &str, b: &str, value: &str) -> Result<(), Error> {
        let ga = self.alg.gen(a).ok_or_else(|| Error::Parse(format!("unknown generator `{a}`")))?;
        let gb = self.alg.gen(b).ok_or_else(|| Error::Parse(format!("unknown generator `{b}`")))?;
        let v = LambdaPoly::parse(&self.alg, value)?;
        self.set(ga, gb, v);
        Ok(())
    }

    pub fn stored(&self) -> &BTreeMap<(GenId, GenId), LambdaPoly> {
        &self.stored
    }

    /// `{a λ b}` on generators.
    pub fn get(&self, a: GenId, b: GenId) -> LambdaPoly {
        self.full.get(&(a, b)).cloned().unwrap_or_else(|| LambdaPoly::zero(&self.alg))
    }

    fn get_ref(&self, a: GenId, b: GenId) -> Option<&LambdaPoly> {
        self.full.get(&(a, b))
    }

    /// `Σ c_i P_i` over presentations sharing an algebra.
    pub fn linear_combination(alg: &Alg, parts: &[(DiffPoly, &Presentation)]) -> Result<Presentation, Error> {
        let mut out = Presentation::new(alg);
        let mut keys: Vec<(GenId, GenId)> = Vec::new();
        for (_, p) in parts {
            for k in p.stored.keys() {
                if !keys.contains(k) {
                    keys.push(*k);
                }
            }
        }
        keys.sort();
        for (a, b) in keys {
            if out.stored.contains_key(&(b, a)) {
                continue;
            }
            let mut v = LambdaPoly::zero(alg);
            let na = p_name(parts[0].1, a);
            let nb = p_name(parts[0].1, b);
            let ga = alg.gen(&na).ok_or(Error::AlgebraMismatch)?;
            let gb = alg.gen(&nb).ok_or(Error::AlgebraMismatch)?;
            for (c, p) in parts {
                let t = p.get(a, b).transport(alg)?;
                v = &v + &t.mul_left(c);
            }
            out.set(ga, gb, v);
        }
        Ok(out)
    }

    /// The master formula `{f λ g}`.
    pub fn bracket(&self, f: &DiffPoly, g: &DiffPoly) -> LambdaPoly {
        let alg = &self.alg;
        let mut out = LambdaPoly::zero(alg);
        if f.is_zero() || g.is_zero() {
            return out;
        }
        let (f_even, f_odd) = split_parity(f);
        let mut cache: HashMap<GenId, LambdaPoly> = HashMap::new();
        for jet in g.jets() {
            let dg = g.partial(jet);
            if dg.is_zero() {
                continue;
            }
            let base = cache.entry(jet.gen).or_insert_with(|| {
                let mut b = self.left_generic(&f_even, jet.gen, Parity::Even);
                let o = self.left_generic(&f_odd, jet.gen, Parity::Odd);
                b = &b + &o;
                b
            });
            out = &out + &base.lambda_plus_d(jet.order).mul_right(&dg);
        }
        out
    }

    /// `{f λ a}` for a generator `a` and homogeneous `f`:
    /// `Σ_x p(F_x, a) {x_{λ+∂} a}_→ F_x` with `F_x = ∂f/∂x`.
    fn left_generic(&self, f: &DiffPoly, a: GenId, pf: Parity) -> LambdaPoly {
        let alg = &self.alg;
        let mut out = LambdaPoly::zero(alg);
        if f.is_zero() || alg.is_parameter(a) {
            return out;
        }
        let a_odd = alg.parity(a).is_odd();
        for jet in f.jets() {
            let Some(h) = self.get_ref(jet.gen, a) else { continue };
            let df = f.partial(jet);
            if df.is_zero() {
                continue;
            }
            let f_odd = pf.is_odd() != jet.odd;
            let mut sign = if jet.order % 2 == 1 { -Q::one() } else { Q::one() };
            if f_odd && a_odd {
                sign = -sign;
            }
            // h_k (λ+∂)^{k+m} F
            let base = LambdaPoly::constant(df);
            for (k, hk) in h.coeffs() {
                out.add_scaled(&base.lambda_plus_d(k + jet.order).mul_left(hk), &sign);
            }
        }
        out
    }

    pub fn at_lambda_zero(&self, f: &DiffPoly, g: &DiffPoly) -> DiffPoly {
        self.bracket(f, g).at_lambda_zero()
    }

    /// `H_{ji}(λ) = {u_i λ u_j}` for the listed generators.
    pub fn structure_matrix(&self, gens: &[GenId]) -> Vec<Vec<LambdaPoly>> {
        gens.iter().map(|&j| gens.iter().map(|&i| self.get(i, j)).collect()).collect()
    }

    /// Serializes to the declarative text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in self.alg.ids() {
            let info = self.alg.info(g);
            let kw = match (info.kind, info.parity) {
                (GenKind::Parameter, _) => "param",
                (_, Parity::Even) => "even",
                (_, Parity::Odd) => "odd",
            };
            s.push_str(&format!("{kw} {}\n", info.name));
        }
        for ((a, b), v) in &self.stored {
            s.push_str(&format!("{{{}, {}}} = {}\n", self.alg.name(*a), self.alg.name(*b), v));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Presentation, Error> {
        let mut builder = DiffAlgebra::builder();
        let mut rules = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('{') {
                let (pair, value) =
                    rest.split_once('}').ok_or_else(|| Error::Parse(format!("line {}: missing `}}`", ln + 1)))?;
                let (a, b) =
                    pair.split_once(',').ok_or_else(|| Error::Parse(format!("line {}: expected `a, b`", ln + 1)))?;
                let value = value
                    .trim()
                    .strip_prefix('=')
                    .ok_or_else(|| Error::Parse(format!("line {}: expected `=`", ln + 1)))?;
                rules.push((a.trim().to_string(), b.trim().to_string(), value.trim().to_string()));
                continue;
            }
            let mut it = line.split_whitespace();
            let kw = it.next().unwrap_or("");
            for name in it {
                builder = match kw {
                    "even" => builder.even(name),
                    "odd" => builder.odd(name),
                    "param" => builder.param(name),
                    _ => return Err(Error::Parse(format!("line {}: unknown keyword `{kw}`", ln + 1))),
                };
            }
        }
        let alg = builder.build()?;
        let mut p = Presentation::new(&alg);
        for (a, b, v) in rules {
            p.set_named(&a, &b, &v)?;
        }
        Ok(p)
    }
}

fn p_name(p: &Presentation, g: GenId) -> String {
    p.alg.name(g).to_string()
}

fn mirror_value(alg: &Alg, a: GenId, b: GenId, v: &LambdaPoly) -> LambdaPoly {
    let s = if alg.parity(a).is_odd() && alg.parity(b).is_odd() { Q::one() } else { -Q::one() };
    v.skew_substitute().scale(&s)
}

/// Splits into even and odd parts.
pub fn split_parity(f: &DiffPoly) -> (DiffPoly, DiffPoly) {
    let alg = f.algebra();
    let mut even = DiffPoly::zero(alg);
    let mut odd = DiffPoly::zero(alg);
    for (m, c) in f.terms() {
        let t = DiffPoly::from_monomial(alg, m.clone(), c.clone());
        if m.is_odd() {
            odd += t;
        } else {
            even += t;
        }
    }
    (even, odd)
}

fn sign_pp(a: &DiffPoly, b: &DiffPoly) -> Q {
    let pa = a.parity().unwrap_or(Parity::Even);
    let pb = b.parity().unwrap_or(Parity::Even);
    if pa.is_odd() && pb.is_odd() {
        -Q::one()
    } else {
        Q::one()
    }
}

/// One line of a check ledger.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckReport {
    pub check: String,
    pub arguments: Vec<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl CheckReport {
    pub fn new(check: &str, arguments: Vec<String>, residual: Option<String>) -> Self {
        CheckReport { check: check.to_string(), arguments, pass: residual.is_none(), residual }
    }

    pub fn from_lambda(check: &str, arguments: Vec<String>, r: &LambdaPoly) -> Self {
        Self::new(check, arguments, (!r.is_zero()).then(|| r.to_string()))
    }
}

/// Residuals of `{∂a λ b} = −λ{a λ b}` and `{a λ ∂b} = (λ+∂){a λ b}`.
pub fn sesquilinearity_residuals(p: &Presentation, a: &DiffPoly, b: &DiffPoly) -> (LambdaPoly, LambdaPoly) {
    let ab = p.bracket(a, b);
    let r1 = &p.bracket(&a.derivative(), b) + &ab.shift_degree(1);
    let r2 = &p.bracket(a, &b.derivative()) - &ab.lambda_plus_d(1);
    (r1, r2)
}

pub fn check_sesquilinearity(p: &Presentation, a: &DiffPoly, b: &DiffPoly) -> CheckReport {
    let (r1, r2) = sesquilinearity_residuals(p, a, b);
    let args = vec![a.to_string(), b.to_string()];
    let res = match (r1.is_zero(), r2.is_zero()) {
        (true, true) => None,
        (false, true) => Some(format!("left: {r1}")),
        (true, false) => Some(format!("right: {r2}")),
        (false, false) => Some(format!("left: {r1}; right: {r2}")),
    };
    CheckReport::new("sesquilinearity", args, res)
}

pub fn skewsymmetry_residual(p: &Presentation, a: &DiffPoly, b: &DiffPoly) -> LambdaPoly {
    let (a0, a1) = split_parity(a);
    let (b0, b1) = split_parity(b);
    let mut r = LambdaPoly::zero(p.algebra());
    for x in [&a0, &a1] {
        for y in [&b0, &b1] {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let t = &p.bracket(y, x) + &p.bracket(x, y).skew_substitute().scale(&sign_pp(x, y));
            r = &r + &t;
        }
    }
    r
}

pub fn check_skewsymmetry(p: &Presentation, a: &DiffPoly, b: &DiffPoly) -> CheckReport {
    let r = skewsymmetry_residual(p, a, b);
    CheckReport::from_lambda("skewsymmetry", vec![a.to_string(), b.to_string()], &r)
}

/// `Σ λ^i X_i` with each `X_i` replaced by `{a μ X_i}`, placed at λ^i μ^j.
fn nest(p: &Presentation, a: &DiffPoly, inner: &LambdaPoly, outer_is_lambda: bool) -> BiLambdaPoly {
    let mut out = BiLambdaPoly::new();
    for (i, x) in inner.coeffs() {
        let br = p.bracket(a, x);
        for (j, c) in br.coeffs() {
            let (l, m) = if outer_is_lambda { (*j, *i) } else { (*i, *j) };
            out.add_at(l, m, c, &Q::one());
        }
    }
    out
}

/// `{a λ {b μ c}} − p(a,b){b μ {a λ c}} − {{a λ b} λ+μ c}` for homogeneous a, b.
fn jacobi_homogeneous(p: &Presentation, a: &DiffPoly, b: &DiffPoly, c: &DiffPoly) -> BiLambdaPoly {
    let mut r = BiLambdaPoly::new();
    // {a λ {b μ c}}: inner in μ, outer in λ
    let t1 = nest(p, a, &p.bracket(b, c), true);
    for ((l, m), v) in &t1.coeffs {
        r.add_at(*l, *m, v, &Q::one());
    }
    let t2 = nest(p, b, &p.bracket(a, c), false);
    let s = -sign_pp(a, b);
    for ((l, m), v) in &t2.coeffs {
        r.add_at(*l, *m, v, &s);
    }
    let ab = p.bracket(a, b);
    for (n, x) in ab.coeffs() {
        let br = p.bracket(x, c);
        for (k, v) in br.coeffs() {
            // λ^n (λ+μ)^k
            for r_ in 0..=*k {
                r.add_at(n + r_, k - r_, v, &-binom(*k, r_));
            }
        }
    }
    r
}

pub fn jacobi_residual(p: &Presentation, a: &DiffPoly, b: &DiffPoly, c: &DiffPoly) -> BiLambdaPoly {
    let (a0, a1) = split_parity(a);
    let (b0, b1) = split_parity(b);
    let mut r = BiLambdaPoly::new();
    for x in [&a0, &a1] {
        for y in [&b0, &b1] {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            for (k, v) in jacobi_homogeneous(p, x, y, c).coeffs {
                r.add_at(k.0, k.1, &v, &Q::one());
            }
        }
    }
    r
}

pub fn check_jacobi(p: &Presentation, a: &DiffPoly, b: &DiffPoly, c: &DiffPoly) -> CheckReport {
    let r = jacobi_residual(p, a, b, c);
    CheckReport::new(
        "jacobi",
        vec![a.to_string(), b.to_string(), c.to_string()],
        (!r.is_zero()).then(|| r.to_string()),
    )
}

/// Runs `check` on all ordered pairs / triples of generators in parallel.
pub fn check_all_pairs(p: &Presentation, gens: &[GenId]) -> Vec<CheckReport> {
    let alg = p.algebra();
    let pairs: Vec<(GenId, GenId)> = gens.iter().flat_map(|&a| gens.iter().map(move |&b| (a, b))).collect();
    pairs
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let (x, y) = (DiffPoly::var(alg, a), DiffPoly::var(alg, b));
            [check_sesquilinearity(p, &x, &y), check_skewsymmetry(p, &x, &y)]
        })
        .collect()
}

pub fn check_all_triples(p: &Presentation, gens: &[GenId]) -> Vec<CheckReport> {
    let alg = p.algebra();
    let mut triples = Vec::new();
    for &a in gens {
        for &b in gens {
            for &c in gens {
                triples.push((a, b, c));
            }
        }
    }
    triples
        .par_iter()
        .map(|&(a, b, c)| check_jacobi(p, &DiffPoly::var(alg, a), &DiffPoly::var(alg, b), &DiffPoly::var(alg, c)))
        .collect()
}

/// Algebra extended by a fresh central parameter; returns it with the parameter's id.
pub fn with_parameter(alg: &Alg, base: &str) -> (Alg, GenId) {
    let mut name = base.to_string();
    while alg.gen(&name).is_some() {
        name.push('_');
    }
    let mut b = DiffAlgebra::builder();
    for g in alg.ids() {
        let info = alg.info(g);
        b.push(&info.name, info.parity, info.kind);
    }
    b.push(&name, Parity::Even, GenKind::Parameter);
    let ext = b.build().expect("extension of a valid algebra");
    let id = ext.gen(&name).expect("just added");
    (ext, id)
}

/// `α P1 + P2` with α a fresh parameter.
pub fn pencil(p1: &Presentation, p2: &Presentation) -> Result<(Presentation, GenId), Error> {
    let (ext, alpha) = with_parameter(p1.algebra(), "alpha");
    let a = DiffPoly::var(&ext, alpha);
    let one = DiffPoly::one(&ext);
    let p = Presentation::linear_combination(&ext, &[(a, p1), (one, p2)])?;
    Ok((p, alpha))
}

/// Jacobi of `α P1 + P2` over all ordered triples of the named generators.
pub fn check_compatibility(p1: &Presentation, p2: &Presentation, gens: &[GenId]) -> Result<Vec<CheckReport>, Error> {
    let (pen, _) = pencil(p1, p2)?;
    let ext = pen.algebra().clone();
    let mapped: Vec<GenId> = gens
        .iter()
        .map(|g| ext.gen(p1.algebra().name(*g)).ok_or(Error::AlgebraMismatch))
        .collect::<Result<_, _>>()?;
    let mut reps = check_all_triples(&pen, &mapped);
    for r in &mut reps {
        r.check = "compatibility".to_string();
    }
    Ok(reps)
}

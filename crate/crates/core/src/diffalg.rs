//! Differential superpolynomials with exact rational coefficients.
//!
//! An algebra is a list of generators. Field generators carry jets
//! `u, u', u'', ...`; parameter generators are central constants that the
//! derivation kills (used for symbolic `k`, `c`, `alpha`).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::Error;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
    pub fn sum(self, other: Parity) -> Parity {
        if self.is_odd() != other.is_odd() {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenKind {
    Field,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenInfo {
    pub name: String,
    pub parity: Parity,
    pub kind: GenKind,
}

/// Generator handle; the index doubles as the sort key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffAlgebra {
    gens: Vec<GenInfo>,
    index: HashMap<String, GenId>,
}

pub type Alg = Arc<DiffAlgebra>;

impl DiffAlgebra {
    pub fn builder() -> AlgebraBuilder {
        AlgebraBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gen(&self, name: &str) -> Option<GenId> {
        self.index.get(name).copied()
    }

    pub fn info(&self, g: GenId) -> &GenInfo {
        &self.gens[g.0 as usize]
    }

    pub fn name(&self, g: GenId) -> &str {
        &self.gens[g.0 as usize].name
    }

    pub fn parity(&self, g: GenId) -> Parity {
        self.gens[g.0 as usize].parity
    }

    pub fn is_parameter(&self, g: GenId) -> bool {
        self.gens[g.0 as usize].kind == GenKind::Parameter
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.gens.len() as u32).map(GenId)
    }

    pub fn fields(&self) -> impl Iterator<Item = GenId> + '_ {
        self.ids().filter(move |&g| !self.is_parameter(g))
    }

    pub fn jet(&self, g: GenId, order: u32) -> Jet {
        Jet { gen: g, order, odd: self.parity(g).is_odd() }
    }
}

#[derive(Default)]
pub struct AlgebraBuilder {
    gens: Vec<GenInfo>,
}

impl AlgebraBuilder {
    pub fn even(mut self, name: &str) -> Self {
        self.push(name, Parity::Even, GenKind::Field);
        self
    }
    pub fn odd(mut self, name: &str) -> Self {
        self.push(name, Parity::Odd, GenKind::Field);
        self
    }
    pub fn param(mut self, name: &str) -> Self {
        self.push(name, Parity::Even, GenKind::Parameter);
        self
    }
    pub fn push(&mut self, name: &str, parity: Parity, kind: GenKind) {
        self.gens.push(GenInfo { name: name.to_string(), parity, kind });
    }
    pub fn build(self) -> Result<Alg, Error> {
        let mut index = HashMap::new();
        for (i, g) in self.gens.iter().enumerate() {
            let ok = !g.name.is_empty()
                && g.name != "L"
                && g.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::Config(format!("invalid generator name `{}`", g.name)));
            }
            if index.insert(g.name.clone(), GenId(i as u32)).is_some() {
                return Err(Error::Config(format!("duplicate generator `{}`", g.name)));
            }
        }
        Ok(Arc::new(DiffAlgebra { gens: self.gens, index }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Jet {
    pub gen: GenId,
    pub order: u32,
    pub odd: bool,
}

/// Sorted product of jets; odd jets have exponent one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Jet, u32)>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn factors(&self) -> &[(Jet, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.1).sum()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.factors.iter().filter(|f| f.0.odd).count() % 2 == 1
    }

    pub fn exponent(&self, j: Jet) -> u32 {
        self.factors.iter().find(|f| f.0 == j).map_or(0, |f| f.1)
    }

    /// Orders a sequence of jets, returning the monomial and its Koszul sign,
    /// or `None` if an odd jet repeats.
    pub fn from_jets(seq: &[Jet]) -> Option<(Monomial, bool)> {
        let mut v: Vec<Jet> = seq.to_vec();
        let mut negative = false;
        // insertion sort, counting odd transpositions
        for i in 1..v.len() {
            let mut k = i;
            while k > 0 && v[k - 1] > v[k] {
                if v[k - 1].odd && v[k].odd {
                    negative = !negative;
                }
                v.swap(k - 1, k);
                k -= 1;
            }
        }
        let mut factors: Vec<(Jet, u32)> = Vec::new();
        for j in v {
            match factors.last_mut() {
                Some(last) if last.0 == j => {
                    if j.odd {
                        return None;
                    }
                    last.1 += 1;
                }
                _ => factors.push((j, 1)),
            }
        }
        Some((Monomial { factors }, negative))
    }

    fn jets(&self) -> Vec<Jet> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for &(j, e) in &self.factors {
            for _ in 0..e {
                out.push(j);
            }
        }
        out
    }

    /// Product with sign; `None` when an odd jet would square.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let mut negative = false;
        // sign: pairs (odd a in self, odd b in other) with a > b
        let odd_right: Vec<Jet> = other.factors.iter().filter(|f| f.0.odd).map(|f| f.0).collect();
        if !odd_right.is_empty() {
            for &(a, _) in self.factors.iter().filter(|f| f.0.odd) {
                for &b in &odd_right {
                    match a.cmp(&b) {
                        Ordering::Equal => return None,
                        Ordering::Greater => negative = !negative,
                        Ordering::Less => {}
                    }
                }
            }
        }
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut k) = (0, 0);
        while i < self.factors.len() || k < other.factors.len() {
            if k == other.factors.len()
                || (i < self.factors.len() && self.factors[i].0 < other.factors[k].0)
            {
                factors.push(self.factors[i]);
                i += 1;
            } else if i == self.factors.len() || other.factors[k].0 < self.factors[i].0 {
                factors.push(other.factors[k]);
                k += 1;
            } else {
                factors.push((self.factors[i].0, self.factors[i].1 + other.factors[k].1));
                i += 1;
                k += 1;
            }
        }
        Some((Monomial { factors }, negative))
    }

    /// Left partial derivative: coefficient and remaining monomial.
    pub fn partial(&self, j: Jet) -> Option<(i64, Monomial)> {
        let pos = self.factors.iter().position(|f| f.0 == j)?;
        let e = self.factors[pos].1;
        let mut factors = self.factors.clone();
        if j.odd {
            let before = self.factors[..pos].iter().filter(|f| f.0.odd).count();
            factors.remove(pos);
            let sign = if before % 2 == 1 { -1 } else { 1 };
            Some((sign, Monomial { factors }))
        } else {
            if e == 1 {
                factors.remove(pos);
            } else {
                factors[pos].1 -= 1;
            }
            Some((e as i64, Monomial { factors }))
        }
    }

    /// Sum of jet orders over field factors, counted with multiplicity.
    pub fn order_sum(&self) -> u32 {
        self.factors.iter().map(|f| f.0.order * f.1).sum()
    }
}

/// A differential polynomial. Equal polynomials have identical term maps.
#[derive(Clone)]
pub struct DiffPoly {
    alg: Alg,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for DiffPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for DiffPoly {}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn same_alg(a: &Alg, b: &Alg) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl DiffPoly {
    pub fn zero(alg: &Alg) -> Self {
        DiffPoly { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(alg: &Alg, c: Q) -> Self {
        let mut p = DiffPoly::zero(alg);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one(alg: &Alg) -> Self {
        DiffPoly::constant(alg, Q::one())
    }

    pub fn var(alg: &Alg, g: GenId) -> Self {
        DiffPoly::jet(alg, g, 0)
    }

    pub fn jet(alg: &Alg, g: GenId, order: u32) -> Self {
        if alg.is_parameter(g) && order > 0 {
            return DiffPoly::zero(alg);
        }
        DiffPoly::from_monomial(alg, Monomial { factors: vec![(alg.jet(g, order), 1)] }, Q::one())
    }

    /// Generator by name; panics on unknown names (programming error).
    pub fn named(alg: &Alg, name: &str) -> Self {
        let g = alg.gen(name).unwrap_or_else(|| panic!("unknown generator `{name}`"));
        DiffPoly::var(alg, g)
    }

    pub fn from_monomial(alg: &Alg, m: Monomial, c: Q) -> Self {
        let mut p = DiffPoly::zero(alg);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term.
    pub fn constant_term(&self) -> Q {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Parity when homogeneous, `None` otherwise (zero counts as even).
    pub fn parity(&self) -> Option<Parity> {
        let mut par = None;
        for m in self.terms.keys() {
            let p = if m.is_odd() { Parity::Odd } else { Parity::Even };
            match par {
                None => par = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(par.unwrap_or(Parity::Even))
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &DiffPoly) -> Result<DiffPoly, Error> {
        if !same_alg(&self.alg, &other.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &DiffPoly) -> Result<DiffPoly, Error> {
        if !same_alg(&self.alg, &other.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = DiffPoly::zero(&self.alg);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, neg)) = m1.mul(m2) {
                    let c = c1 * c2;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn add_assign_ref(&mut self, other: &DiffPoly) {
        assert!(same_alg(&self.alg, &other.alg), "algebra mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &DiffPoly, s: &Q) {
        assert!(same_alg(&self.alg, &other.alg), "algebra mismatch");
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Q) -> DiffPoly {
        if s.is_zero() {
            return DiffPoly::zero(&self.alg);
        }
        DiffPoly {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> DiffPoly {
        let mut out = DiffPoly::one(&self.alg);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// The total derivative.
    pub fn derivative(&self) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for (m, c) in &self.terms {
            let jets = m.jets();
            for i in 0..jets.len() {
                if self.alg.is_parameter(jets[i].gen) {
                    continue;
                }
                // identical even jets give identical terms; only first of a run
                if i > 0 && jets[i - 1] == jets[i] {
                    continue;
                }
                let mult = jets[i..].iter().take_while(|j| **j == jets[i]).count() as i64;
                let mut seq = jets.clone();
                seq[i].order += 1;
                if let Some((mm, neg)) = Monomial::from_jets(&seq) {
                    let v = c * q(mult);
                    out.add_term(mm, if neg { -v } else { v });
                }
            }
        }
        out
    }

    pub fn derivative_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    /// Left partial derivative with respect to a jet.
    pub fn partial(&self, j: Jet) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        for (m, c) in &self.terms {
            if let Some((s, mm)) = m.partial(j) {
                out.add_term(mm, c * q(s));
            }
        }
        out
    }

    /// All jets occurring in the polynomial (parameters excluded).
    pub fn jets(&self) -> BTreeSet<Jet> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for &(j, _) in &m.factors {
                if !self.alg.is_parameter(j.gen) {
                    s.insert(j);
                }
            }
        }
        s
    }

    /// Variational derivative δ/δg = Σ (−∂)^n ∂/∂g^(n).
    pub fn variational(&self, g: GenId) -> DiffPoly {
        let mut out = DiffPoly::zero(&self.alg);
        if self.alg.is_parameter(g) {
            return out;
        }
        let max = self.jets().iter().filter(|j| j.gen == g).map(|j| j.order).max();
        let Some(max) = max else { return out };
        for n in 0..=max {
            let mut t = self.partial(self.alg.jet(g, n));
            for _ in 0..n {
                t = -t.derivative();
            }
            out.add_assign_ref(&t);
        }
        out
    }

    /// Maximal jet order present; `None` for constants.
    pub fn total_derivative_order(&self) -> Option<u32> {
        self.jets().iter().map(|j| j.order).max()
    }

    /// Witness `q` with `∂q = self`, or `None` if `self` is not a total derivative.
    pub fn integrate(&self) -> Option<DiffPoly> {
        // ∂ preserves the multidegree and raises the order sum by one, so each
        // such component is integrated separately by a finite linear solve.
        let mut comps: BTreeMap<(Vec<(GenId, u32)>, u32), DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = (multidegree(m), m.order_sum());
            comps
                .entry(key)
                .or_insert_with(|| DiffPoly::zero(&self.alg))
                .add_term(m.clone(), c.clone());
        }
        let mut witness = DiffPoly::zero(&self.alg);
        for ((md, s), part) in comps {
            if s == 0 {
                return None;
            }
            let cands: Vec<DiffPoly> = monomials_with(&self.alg, &md, s - 1)
                .into_iter()
                .map(|m| DiffPoly::from_monomial(&self.alg, m, Q::one()))
                .collect();
            let images: Vec<DiffPoly> = cands.iter().map(|c| c.derivative()).collect();
            let coeffs = linalg::solve_combination(&images, &part)?;
            for (c, k) in cands.iter().zip(coeffs) {
                witness.add_scaled(c, &k);
            }
        }
        Some(witness)
    }

    pub fn is_total_derivative(&self) -> bool {
        self.integrate().is_some()
    }

    /// Ring homomorphism into `target`, sending each generator to its image
    /// and `g^(n)` to `∂^n` of the image. Images of parameters must be
    /// ∂-constants for the result to be meaningful.
    pub fn substitute<F>(&self, target: &Alg, image: F) -> DiffPoly
    where
        F: Fn(GenId) -> DiffPoly,
    {
        let mut cache: HashMap<Jet, DiffPoly> = HashMap::new();
        let mut out = DiffPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = DiffPoly::constant(target, c.clone());
            for &(j, e) in &m.factors {
                let img = cache
                    .entry(j)
                    .or_insert_with(|| image(j.gen).derivative_n(j.order))
                    .clone();
                for _ in 0..e {
                    t = &t * &img;
                }
                if t.is_zero() {
                    break;
                }
            }
            out.add_assign_ref(&t);
        }
        out
    }

    /// Re-embeds the polynomial into an algebra containing generators of the same names.
    pub fn transport(&self, target: &Alg) -> Result<DiffPoly, Error> {
        let mut out = DiffPoly::zero(target);
        for (m, c) in &self.terms {
            let mut seq = Vec::new();
            for &(j, e) in &m.factors {
                let name = self.alg.name(j.gen);
                let g = target
                    .gen(name)
                    .ok_or_else(|| Error::Config(format!("generator `{name}` missing in target algebra")))?;
                if target.parity(g) != self.alg.parity(j.gen) {
                    return Err(Error::Config(format!("parity of `{name}` differs")));
                }
                for _ in 0..e {
                    seq.push(target.jet(g, j.order));
                }
            }
            if let Some((mm, neg)) = Monomial::from_jets(&seq) {
                out.add_term(mm, if neg { -c.clone() } else { c.clone() });
            }
        }
        Ok(out)
    }

    /// Degree in field generators of each term: (min, max).
    pub fn field_degree_range(&self) -> Option<(u32, u32)> {
        let degs = self.terms.keys().map(|m| {
            m.factors.iter().filter(|f| !self.alg.is_parameter(f.0.gen)).map(|f| f.1).sum::<u32>()
        });
        let v: Vec<u32> = degs.collect();
        Some((*v.iter().min()?, *v.iter().max()?))
    }

    pub fn parse(alg: &Alg, s: &str) -> Result<DiffPoly, Error> {
        let map = crate::parse::parse_lambda(alg, s, false)?;
        Ok(map.get(&0).cloned().unwrap_or_else(|| DiffPoly::zero(alg)))
    }
}

fn multidegree(m: &Monomial) -> Vec<(GenId, u32)> {
    let mut v: Vec<(GenId, u32)> = Vec::new();
    for &(j, e) in &m.factors {
        match v.last_mut() {
            Some(last) if last.0 == j.gen => last.1 += e,
            _ => v.push((j.gen, e)),
        }
    }
    v
}

/// All monomials with the given multidegree and total order sum.
fn monomials_with(alg: &Alg, md: &[(GenId, u32)], sum: u32) -> Vec<Monomial> {
    fn parts(count: u32, max_part: u32, total: u32, distinct: bool, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        // non-increasing sequences of length `count` with sum `total`
        if count == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let hi = max_part.min(total);
        for p in (0..=hi).rev() {
            if distinct && acc.last().is_some_and(|&l| l == p) {
                continue;
            }
            acc.push(p);
            parts(count - 1, p, total - p, distinct, acc, out);
            acc.pop();
        }
    }
    let mut result: Vec<Vec<Jet>> = vec![vec![]];
    let mut remaining_cap: Vec<u32> = vec![sum];
    for &(g, cnt) in md {
        let param = alg.is_parameter(g);
        let odd = alg.parity(g).is_odd();
        let mut next = Vec::new();
        let mut next_cap = Vec::new();
        for (seq, cap) in result.iter().zip(&remaining_cap) {
            for used in 0..=*cap {
                if param && used > 0 {
                    break;
                }
                let mut ps = Vec::new();
                parts(cnt, used, used, odd, &mut Vec::new(), &mut ps);
                for p in ps {
                    let mut s = seq.clone();
                    s.extend(p.iter().map(|&o| alg.jet(g, o)));
                    next.push(s);
                    next_cap.push(cap - used);
                }
            }
        }
        result = next;
        remaining_cap = next_cap;
    }
    result
        .into_iter()
        .zip(remaining_cap)
        .filter(|(_, c)| *c == 0)
        .filter_map(|(s, _)| Monomial::from_jets(&s).map(|x| x.0))
        .collect()
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr<&DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: &DiffPoly) -> DiffPoly {
                let f: fn(&DiffPoly, &DiffPoly) -> DiffPoly = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: DiffPoly) -> DiffPoly {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
        impl std::ops::$tr<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: &DiffPoly) -> DiffPoly {
                std::ops::$tr::$m(&self, rhs)
            }
        }
        impl std::ops::$tr<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: DiffPoly) -> DiffPoly {
                std::ops::$tr::$m(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.try_add(b).expect("algebra mismatch"));
binop!(Sub, sub, |a, b| {
    let mut out = a.clone();
    out.add_scaled(b, &-Q::one());
    out
});
binop!(Mul, mul, |a, b| a.try_mul(b).expect("algebra mismatch"));

impl std::ops::Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        self.scale(&-Q::one())
    }
}

impl std::ops::Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        self.scale(&-Q::one())
    }
}

impl std::ops::AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        self.add_assign_ref(rhs);
    }
}

impl std::ops::AddAssign<DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        self.add_assign_ref(&rhs);
    }
}

impl std::ops::SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        self.add_scaled(rhs, &-Q::one());
    }
}

pub(crate) fn fmt_jet(alg: &DiffAlgebra, j: Jet) -> String {
    let name = alg.name(j.gen);
    match j.order {
        0 => name.to_string(),
        n @ 1..=3 => format!("{name}{}", "'".repeat(n as usize)),
        n => format!("{name}^({n})"),
    }
}

pub(crate) fn fmt_monomial(alg: &DiffAlgebra, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for &(j, e) in &m.factors {
        let s = fmt_jet(alg, j);
        parts.push(if e > 1 { format!("{s}^{e}") } else { s });
    }
    parts.join("*")
}

fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{}", fmt_monomial(&self.alg, m))?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), fmt_monomial(&self.alg, m))?;
            }
        }
        Ok(())
    }
}

/// All monomials in `fields` of degree ≤ `max_degree` and jet-order sum ≤ `max_order`,
/// including the constant monomial.
pub fn monomials_up_to(alg: &Alg, fields: &[GenId], max_degree: u32, max_order: u32) -> Vec<Monomial> {
    fn degrees(fields: &[GenId], left: u32, acc: &mut Vec<(GenId, u32)>, out: &mut Vec<Vec<(GenId, u32)>>) {
        let Some((&g, rest)) = fields.split_first() else {
            out.push(acc.clone());
            return;
        };
        for c in 0..=left {
            if c > 0 {
                acc.push((g, c));
            }
            degrees(rest, left - c, acc, out);
            if c > 0 {
                acc.pop();
            }
        }
    }
    let mut fields = fields.to_vec();
    fields.sort();
    let mut mds = Vec::new();
    degrees(&fields, max_degree, &mut Vec::new(), &mut mds);
    let mut out = Vec::new();
    for md in mds {
        let top = if md.is_empty() { 0 } else { max_order };
        for s in 0..=top {
            out.extend(monomials_with(alg, &md, s));
        }
    }
    out
}

//! Expression grammar shared by polynomials and λ-polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := rational | ident '\''* ('^(' int ')')? | 'L' | '(' expr ')'
//! ```
//! `L` stands for λ when allowed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::diffalg::{Alg, DiffPoly, Q};
use crate::Error;

type LMap = BTreeMap<u32, DiffPoly>;

struct Parser<'a> {
    alg: &'a Alg,
    chars: Vec<char>,
    pos: usize,
    allow_lambda: bool,
}

fn lmul(alg: &Alg, a: &LMap, b: &LMap) -> LMap {
    let mut out: LMap = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            let e = out.entry(i + j).or_insert_with(|| DiffPoly::zero(alg));
            *e += x * y;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn ladd(a: &mut LMap, b: &LMap, sign: i64) {
    for (i, y) in b {
        let alg = y.algebra().clone();
        let e = a.entry(*i).or_insert_with(|| DiffPoly::zero(&alg));
        e.add_scaled(y, &Q::from_integer(BigInt::from(sign)));
    }
    a.retain(|_, v| !v.is_zero());
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("bad integer"))
    }

    fn small(&mut self) -> Result<u32, Error> {
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| self.err("exponent too large"))
    }

    fn expr(&mut self) -> Result<LMap, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                ladd(&mut acc, &t, 1);
            } else if self.eat('-') {
                let t = self.term()?;
                ladd(&mut acc, &t, -1);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LMap, Error> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let f = self.factor()?;
            acc = lmul(self.alg, &acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LMap, Error> {
        if self.eat('-') {
            let mut f = self.factor()?;
            for v in f.values_mut() {
                *v = -&*v;
            }
            return Ok(f);
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let n = self.small()?;
            let mut out: LMap = BTreeMap::from([(0, DiffPoly::one(self.alg))]);
            for _ in 0..n {
                out = lmul(self.alg, &out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<LMap, Error> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(e);
        }
        if c.is_ascii_digit() {
            let n = self.integer()?;
            let mut v = Q::from_integer(n);
            if self.peek() == Some('/') {
                self.pos += 1;
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                v /= Q::from_integer(d);
            }
            return Ok(BTreeMap::from([(0, DiffPoly::constant(self.alg, v))])
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .collect());
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = self.pos;
            while self.pos < self.chars.len()
                && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
            {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos].iter().collect();
            if name == "L" {
                if !self.allow_lambda {
                    return Err(self.err("λ not allowed here"));
                }
                return Ok(BTreeMap::from([(1, DiffPoly::one(self.alg))]));
            }
            let g = self
                .alg
                .gen(&name)
                .ok_or_else(|| Error::Parse(format!("unknown generator `{name}`")))?;
            let mut order = 0u32;
            while self.pos < self.chars.len() && self.chars[self.pos] == '\'' {
                order += 1;
                self.pos += 1;
            }
            if self.pos + 1 < self.chars.len() && self.chars[self.pos] == '^' && self.chars[self.pos + 1] == '(' {
                self.pos += 2;
                order += self.small()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
            }
            let p = DiffPoly::jet(self.alg, g, order);
            return Ok(if p.is_zero() { BTreeMap::new() } else { BTreeMap::from([(0, p)]) });
        }
        Err(self.err(&format!("unexpected `{c}`")))
    }
}

/// Parses an expression into λ-degree → coefficient.
pub fn parse_lambda(alg: &Alg, s: &str, allow_lambda: bool) -> Result<BTreeMap<u32, DiffPoly>, Error> {
    let mut p = Parser { alg, chars: s.chars().collect(), pos: 0, allow_lambda };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

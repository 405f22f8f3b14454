//! Sparse homogeneous polynomials over ℚ and their text syntax.
//!
//! ```text
//! poly     ::= term (("+" | "-") term)*
//! term     ::= [sign] [rational ["*"]] factor ("*" factor)*
//! factor   ::= var ["^" uint]
//! var      ::= "x" uint
//! rational ::= int ["/" uint]
//! ```
//!
//! Whitespace is ignored. Duplicate monomials are merged and zero terms
//! dropped.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::rat::{fmt_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyExpr {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl PolyExpr {
    pub fn zero(nvars: usize) -> Self {
        PolyExpr { nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        let e = self.terms.entry(m).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn support(&self) -> Vec<Monomial> {
        self.terms.keys().rev().cloned().collect()
    }

    /// Common degree of all terms, `None` when inhomogeneous or zero.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        PolyExpr { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }

    /// Linear change of variables x_i ↦ Σ_j a[i][j]·x_j.
    pub fn transform(&self, a: &[Vec<Rat>]) -> Self {
        let n = self.nvars;
        let images: Vec<PolyExpr> = (0..n)
            .map(|i| PolyExpr::from_terms(n, (0..n).map(|j| (Monomial::var(j, n), a[i][j].clone()))))
            .collect();
        let one = PolyExpr::from_terms(n, [(Monomial::new(vec![0; n]), Rat::one())]);
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let mut term = one.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[i]);
                }
            }
            out = out.add(&term.scale(c));
        }
        out
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{}", fmt_rat(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rat(&abs))?;
            }
        }
        Ok(())
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected a number"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn small(&mut self) -> Result<(usize, u32)> {
        let at = self.pos;
        let v = self.uint()?;
        let v: u32 = v.try_into().map_err(|_| Error::parse(at, "number too large"))?;
        Ok((at, v))
    }
}

/// Parses and validates a homogeneous polynomial in x0..xn.
pub fn parse_poly(text: &str, n: usize, expected_degree: u32) -> Result<PolyExpr> {
    let p = parse_any(text, n)?;
    match p.degree() {
        Some(d) if d == expected_degree => Ok(p),
        Some(d) => Err(Error::parse(0, format!("expected degree {expected_degree}, found {d}"))),
        None if p.is_zero() => Err(Error::parse(0, "polynomial is zero")),
        None => Err(Error::parse(0, "polynomial is not homogeneous")),
    }
}

/// Parses without a degree check.
pub fn parse_any(text: &str, n: usize) -> Result<PolyExpr> {
    let nvars = n + 1;
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    if lx.peek().is_none() {
        return Err(Error::parse(0, "empty polynomial"));
    }
    let mut out = PolyExpr::zero(nvars);
    loop {
        let mut neg = false;
        loop {
            if lx.eat(b'-') {
                neg = !neg;
            } else if lx.eat(b'+') {
            } else {
                break;
            }
        }
        let mut coeff = Rat::one();
        let mut have_coeff = false;
        if lx.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = lx.uint()?;
            let den = if lx.eat(b'/') {
                let at = lx.pos;
                let d = lx.uint()?;
                if d.is_zero() {
                    return Err(Error::parse(at, "zero denominator"));
                }
                d
            } else {
                BigInt::one()
            };
            coeff = Rat::new(num, den);
            have_coeff = true;
            lx.eat(b'*');
        }
        let mut exps = vec![0u32; nvars];
        let mut have_factor = false;
        while lx.peek() == Some(b'x') {
            lx.pos += 1;
            let (at, idx) = lx.small()?;
            let idx = idx as usize;
            if idx >= nvars {
                return Err(Error::parse(at, format!("variable x{idx} outside x0..x{n}")));
            }
            let e = if lx.eat(b'^') { lx.small()?.1 } else { 1 };
            exps[idx] += e;
            have_factor = true;
            if !lx.eat(b'*') {
                break;
            }
            if lx.peek() != Some(b'x') {
                return Err(Error::parse(lx.pos, "expected a variable after '*'"));
            }
        }
        if !have_coeff && !have_factor {
            return Err(Error::parse(lx.pos, "expected a term"));
        }
        if neg {
            coeff = -coeff;
        }
        out.add_term(Monomial::new(exps), coeff);
        match lx.peek() {
            None => break,
            Some(b'+') | Some(b'-') => continue,
            Some(c) => return Err(Error::parse(lx.pos, format!("unexpected character {:?}", c as char))),
        }
    }
    Ok(out)
}

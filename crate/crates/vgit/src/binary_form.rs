//! Homogeneous forms in two variables (λ, μ) over ℚ.
//!
//! A form of degree `d` stores `d + 1` coefficients, index `j` holding the
//! coefficient of λ^(d−j) μ^j. The zero form stores no coefficients at all,
//! so its degree is meaningless and [`BinaryForm::degree`] returns `None`.
//!
//! Gcds and divisions work by splitting off the power of μ and
//! dehomogenizing the rest at μ = 1.

use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, int, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<Rat>,
}

impl BinaryForm {
    pub fn zero() -> Self {
        BinaryForm { coeffs: Vec::new() }
    }

    /// Builds a form from coefficients of λ^(d−j) μ^j; an all-zero input
    /// gives the zero form.
    pub fn new(coeffs: Vec<Rat>) -> Self {
        if coeffs.iter().all(Zero::is_zero) {
            Self::zero()
        } else {
            BinaryForm { coeffs }
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The linear form aλ + bμ.
    pub fn linear(a: Rat, b: Rat) -> Self {
        Self::new(vec![a, b])
    }

    pub fn lambda() -> Self {
        Self::from_ints(&[1, 0])
    }

    pub fn mu() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == Some(0)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Sum of two forms of equal degree (either may be zero).
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "adding forms of different degree");
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Value at a point (λ, μ).
    pub fn eval(&self, l: &Rat, m: &Rat) -> Rat {
        let Some(d) = self.degree() else { return Rat::zero() };
        let mut acc = Rat::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            acc += c * pow_rat(l, d - j) * pow_rat(m, j);
        }
        acc
    }

    /// The form f(aλ + bμ, cλ + dμ).
    pub fn substitute(&self, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Self {
        let Some(deg) = self.degree() else { return Self::zero() };
        let l = Self::linear(a.clone(), b.clone());
        let m = Self::linear(c.clone(), d.clone());
        let mut acc: Option<Self> = None;
        for (j, coef) in self.coeffs.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let term = l.pow((deg - j) as u32).mul(&m.pow(j as u32)).scale(coef);
            let term = pad(term, deg);
            acc = Some(match acc {
                None => term,
                Some(s) => s.add(&term),
            });
        }
        acc.unwrap_or_else(Self::zero)
    }

    /// Scales so the first nonzero coefficient (lowest power of μ) is 1.
    pub fn monic(&self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            None => Self::zero(),
            Some(lead) => {
                let inv = lead.recip();
                self.scale(&inv)
            }
        }
    }

    fn mu_valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// (power of μ, f(λ, 1) / (leading scalar kept) as ascending coefficients in λ).
    fn split(&self) -> (usize, Vec<Rat>) {
        let d = self.coeffs.len() - 1;
        let a = self.mu_valuation();
        let u: Vec<Rat> = (0..=d - a).map(|e| self.coeffs[d - e].clone()).collect();
        (a, u)
    }

    fn join(a: usize, u: &[Rat]) -> Self {
        let du = u.len() - 1;
        let total = a + du;
        let mut c = vec![Rat::zero(); total + 1];
        for (e, x) in u.iter().enumerate() {
            c[total - e] = x.clone();
        }
        Self::new(c)
    }

    /// Exact quotient `self / q`, or `None` if `q` does not divide `self`.
    pub fn div_exact(&self, q: &Self) -> Option<Self> {
        assert!(!q.is_zero(), "division by the zero form");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (af, uf) = self.split();
        let (aq, uq) = q.split();
        if af < aq || uf.len() < uq.len() {
            return None;
        }
        let (quo, rem) = poly_divrem(&uf, &uq);
        if !rem.is_empty() {
            return None;
        }
        Some(Self::join(af - aq, &quo))
    }

    pub fn divides(&self, f: &Self) -> bool {
        f.div_exact(self).is_some()
    }
}

fn pow_rat(x: &Rat, e: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Pads a possibly-zero result back to the expected degree.
fn pad(f: BinaryForm, deg: usize) -> BinaryForm {
    if f.is_zero() {
        return f;
    }
    let mut c = f.coeffs;
    c.resize(deg + 1, Rat::zero());
    BinaryForm { coeffs: c }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else { return write!(out, "0") };
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut vars = Vec::new();
            match d - j {
                0 => {}
                1 => vars.push("l".to_string()),
                e => vars.push(format!("l^{e}")),
            }
            match j {
                0 => {}
                1 => vars.push("m".to_string()),
                e => vars.push(format!("m^{e}")),
            }
            let neg = c < &Rat::zero();
            let abs = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(out, "-")?;
                }
            } else {
                write!(out, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if vars.is_empty() {
                write!(out, "{}", fmt_rat(&abs))?;
            } else if abs.is_one() {
                write!(out, "{}", vars.join("*"))?;
            } else {
                write!(out, "{}*{}", fmt_rat(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

// Univariate helpers over ℚ, ascending coefficient order, trimmed so the
// last entry is nonzero (empty = zero polynomial).

fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![Rat::zero()], r);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![Rat::zero(); r.len() - b.len() + 1];
    while !r.is_empty() && r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &c * bc;
        }
        q[shift] = c;
        r = trim(r);
    }
    (q, r)
}

fn poly_monic(p: Vec<Rat>) -> Vec<Rat> {
    let p = trim(p);
    match p.last() {
        None => p,
        Some(l) => {
            let inv = l.recip();
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    poly_monic(x)
}

fn poly_deriv(p: &[Rat]) -> Vec<Rat> {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
}

fn poly_div(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    poly_divrem(a, b).0
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut v = a.to_vec();
    if v.len() < b.len() {
        v.resize(b.len(), Rat::zero());
    }
    for (i, x) in b.iter().enumerate() {
        v[i] -= x;
    }
    trim(v)
}

/// Yun's square-free decomposition: monic `(s_i, i)` with p = c·Π s_i^i.
fn poly_yun(p: &[Rat]) -> Vec<(Vec<Rat>, usize)> {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return Vec::new();
    }
    let dp = poly_deriv(&p);
    let a0 = poly_gcd(&p, &dp);
    let mut b = poly_div(&p, &a0);
    let mut c = poly_div(&dp, &a0);
    let mut out = Vec::new();
    let mut i = 1;
    while trim(b.clone()).len() > 1 {
        let d = poly_sub(&c, &poly_deriv(&b));
        let a = poly_gcd(&b, &d);
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = poly_div(&b, &a);
        c = poly_div(&d, &a);
        i += 1;
    }
    out
}

/// Monic greatest common divisor of two forms.
pub fn form_gcd(a: &BinaryForm, b: &BinaryForm) -> Result<BinaryForm> {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => Err(Error::degenerate("gcd of two zero forms")),
        (true, false) => Ok(b.monic()),
        (false, true) => Ok(a.monic()),
        (false, false) => {
            let (aa, ua) = a.split();
            let (ab, ub) = b.split();
            let g = poly_gcd(&ua, &ub);
            Ok(BinaryForm::join(aa.min(ab), &g))
        }
    }
}

/// Gcd of a list of forms; zero forms are skipped, and the gcd of an
/// all-zero (or empty) list is the zero form.
pub fn gcd_all<'a>(forms: impl IntoIterator<Item = &'a BinaryForm>) -> BinaryForm {
    let mut acc = BinaryForm::zero();
    for f in forms {
        if f.is_zero() {
            continue;
        }
        acc = form_gcd(&acc, f).expect("one side nonzero");
        if acc.is_constant() {
            break;
        }
    }
    acc
}

/// Largest `r` with `q^r` dividing `f`.
pub fn multiplicity(f: &BinaryForm, q: &BinaryForm) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::pre("multiplicity of a root in the zero form"));
    }
    if q.is_zero() || q.degree() == Some(0) {
        return Err(Error::pre("multiplicity needs a non-constant divisor"));
    }
    let mut r = 0;
    let mut cur = f.clone();
    while let Some(next) = cur.div_exact(q) {
        r += 1;
        cur = next;
    }
    Ok(r)
}

/// Square-free decomposition of a nonzero form into monic parts with
/// multiplicities; the unit factor is dropped.
pub fn squarefree_decomposition(f: &BinaryForm) -> Vec<(BinaryForm, usize)> {
    if f.is_zero() {
        return Vec::new();
    }
    let (a, u) = f.split();
    let mut out: Vec<(BinaryForm, usize)> = poly_yun(&u)
        .into_iter()
        .map(|(s, i)| (BinaryForm::join(0, &s), i))
        .collect();
    if a > 0 {
        out.push((BinaryForm::mu(), a));
    }
    out
}

/// Pairwise-coprime square-free monic basis such that every input is a
/// scalar times a product of powers of basis elements, and each basis
/// element has a single multiplicity in each input.
pub fn coprime_refinement(forms: &[BinaryForm]) -> Result<Vec<BinaryForm>> {
    let mut pool: Vec<BinaryForm> = Vec::new();
    for f in forms {
        if f.is_zero() {
            return Err(Error::pre("coprime refinement of the zero form"));
        }
        for (s, _) in squarefree_decomposition(f) {
            pool.push(s);
        }
    }
    loop {
        let mut split = None;
        'outer: for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let g = form_gcd(&pool[i], &pool[j])?;
                if !g.is_constant() {
                    split = Some((i, j, g));
                    break 'outer;
                }
            }
        }
        let Some((i, j, g)) = split else { break };
        let a = pool[i].div_exact(&g).expect("gcd divides");
        let b = pool[j].div_exact(&g).expect("gcd divides");
        pool.remove(j);
        pool.remove(i);
        for x in [g, a, b] {
            if !x.is_constant() && !pool.contains(&x.monic()) {
                pool.push(x.monic());
            }
        }
    }
    pool.sort_by(|x, y| {
        x.degree()
            .cmp(&y.degree())
            .then_with(|| x.coeffs.cmp(&y.coeffs))
    });
    pool.dedup();
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn f(c: &[i64]) -> BinaryForm {
        BinaryForm::from_ints(c)
    }

    #[test]
    fn gcd_monomials() {
        // λ²μ² and λμ³ share λμ²
        let g = form_gcd(&f(&[0, 0, 1, 0, 0]), &f(&[0, 0, 0, 1, 0])).unwrap();
        assert_eq!(g, f(&[0, 1, 0]).mul(&BinaryForm::mu()));
    }

    #[test]
    fn gcd_with_zero() {
        let a = f(&[2, 4]);
        assert_eq!(form_gcd(&a, &BinaryForm::zero()).unwrap(), f(&[1, 2]));
        assert!(form_gcd(&BinaryForm::zero(), &BinaryForm::zero()).is_err());
    }

    #[test]
    fn gcd_difference_of_squares() {
        let a = f(&[1, 0, -1]);
        let b = f(&[1, -1]);
        let g = form_gcd(&a, &b).unwrap();
        assert_eq!(g, f(&[1, -1]));
        assert!(g.divides(&a) && g.divides(&b));
    }

    #[test]
    fn multiplicities() {
        let l2m2 = f(&[0, 0, 1, 0, 0]);
        assert_eq!(multiplicity(&l2m2, &BinaryForm::lambda()).unwrap(), 2);
        assert_eq!(multiplicity(&l2m2, &f(&[1, -1])).unwrap(), 0);
        let p = f(&[1, -2]).pow(3).mul(&f(&[1, 1]));
        assert_eq!(multiplicity(&p, &f(&[1, -2])).unwrap(), 3);
        assert!(multiplicity(&p, &f(&[3])).is_err());
    }

    #[test]
    fn refinement_examples() {
        let lm = BinaryForm::lambda().mul(&BinaryForm::mu());
        let l2 = BinaryForm::lambda().pow(2);
        let basis = coprime_refinement(&[lm, l2]).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(basis.contains(&BinaryForm::lambda()));
        assert!(basis.contains(&BinaryForm::mu()));

        let p = f(&[1, -1]).pow(2).mul(&f(&[1, 1]));
        let basis = coprime_refinement(&[p]).unwrap();
        assert_eq!(basis, vec![f(&[1, -1]), f(&[1, 1])]);
    }

    #[test]
    fn refinement_separates_multiplicities() {
        // (λ−μ)²(λ+μ) and (λ−μ)(λ+μ): λ−μ and λ+μ must end up apart.
        let a = f(&[1, -1]).pow(2).mul(&f(&[1, 1]));
        let b = f(&[1, -1]).mul(&f(&[1, 1]));
        let basis = coprime_refinement(&[a, b]).unwrap();
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn substitute_swaps() {
        let p = f(&[1, 2, 3]);
        let swapped = p.substitute(&rat(0, 1), &rat(1, 1), &rat(1, 1), &rat(0, 1));
        assert_eq!(swapped, f(&[3, 2, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(f(&[1, 0, -1]).to_string(), "l^2 - m^2");
        assert_eq!(BinaryForm::zero().to_string(), "0");
    }
}

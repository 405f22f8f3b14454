//! Monomials of fixed degree, the weight pairing with one-parameter
//! subgroups, and the λ-order.
//!
//! Lex order compares exponent vectors left to right and the larger
//! exponent wins, so x₀² > x₀x₁ > x₁². This is exactly the derived `Ord`
//! on the exponent vector.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    /// The variable x_i among `nvars` variables.
    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial { exps: e }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }

    /// Σ dᵢ·wᵢ for an arbitrary torus weight vector.
    pub fn pair(&self, w: &[i64]) -> i64 {
        self.exps.iter().zip(w).map(|(&d, &x)| d as i64 * x).sum()
    }

    /// Variables permuted: exponent of variable `perm[i]` moves to slot `i`.
    pub fn permuted(&self, perm: &[usize]) -> Monomial {
        Monomial { exps: perm.iter().map(|&p| self.exps[p]).collect() }
    }

    /// Index of the variable when this is a degree-one monomial.
    pub fn as_var(&self) -> Option<usize> {
        (self.degree() == 1).then(|| self.exps.iter().position(|&e| e == 1).unwrap())
    }

    /// Parses the canonical rendering, e.g. `x0^2*x3`.
    pub fn parse(s: &str, nvars: usize) -> Result<Monomial> {
        let mut exps = vec![0u32; nvars];
        if s.trim() == "1" {
            return Ok(Monomial { exps });
        }
        for factor in s.split('*') {
            let f = factor.trim();
            let (v, e) = match f.split_once('^') {
                Some((v, e)) => (v, e.parse::<u32>().map_err(|_| Error::parse(0, format!("bad exponent in {f:?}")))?),
                None => (f, 1),
            };
            let idx: usize = v
                .strip_prefix('x')
                .and_then(|i| i.parse().ok())
                .ok_or_else(|| Error::parse(0, format!("bad variable {v:?}")))?;
            if idx >= nvars {
                return Err(Error::pre(format!("variable x{idx} outside x0..x{}", nvars - 1)));
            }
            exps[idx] += e;
        }
        Ok(Monomial { exps })
    }
}

/// Serialize-only adaptors writing monomials in their text form.
pub mod as_text {
    use super::Monomial;
    use serde::Serializer;

    pub fn list<S: Serializer>(v: &[Monomial], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ToString::to_string))
    }

    pub fn nested<S: Serializer>(v: &[Vec<Monomial>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.iter().map(ToString::to_string).collect::<Vec<_>>()))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// All degree-`d` monomials in `n + 1` variables, lex-descending
/// (index 0 is x₀^d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialLattice {
    pub n: usize,
    pub d: u32,
    members: Vec<Monomial>,
}

impl MonomialLattice {
    pub fn enumerate(n: usize, d: u32) -> Result<Self> {
        if n < 1 || d < 1 {
            return Err(Error::pre("monomial lattice needs n ≥ 1 and d ≥ 1"));
        }
        let mut members = Vec::new();
        let mut cur = vec![0u32; n + 1];
        fill(&mut cur, 0, d, &mut members);
        Ok(MonomialLattice { n, d, members })
    }

    pub fn members(&self) -> &[Monomial] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.members.binary_search_by(|x| m.cmp(x)).ok()
    }
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Monomial>) {
    if i == cur.len() - 1 {
        cur[i] = left;
        out.push(Monomial::new(cur.clone()));
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(cur, i + 1, left - e, out);
    }
    cur[i] = 0;
}

/// ⟨I, λ⟩ = Σ dᵢμᵢ with a dimension check.
pub fn pairing(m: &Monomial, weights: &[i64]) -> Result<i64> {
    if m.nvars() != weights.len() {
        return Err(Error::Dimension { expected: m.nvars(), got: weights.len() });
    }
    Ok(m.pair(weights))
}

/// λ-order: pairing first, lex as tiebreak.
pub fn lambda_compare(a: &Monomial, b: &Monomial, weights: &[i64]) -> Ordering {
    a.pair(weights).cmp(&b.pair(weights)).then_with(|| a.cmp(b))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn enumerate_small() {
        let l = MonomialLattice::enumerate(1, 2).unwrap();
        assert_eq!(l.members(), &[m(&[2, 0]), m(&[1, 1]), m(&[0, 2])]);
        assert_eq!(MonomialLattice::enumerate(4, 2).unwrap().len(), 15);
        let lin = MonomialLattice::enumerate(3, 1).unwrap();
        assert_eq!(lin.len(), 4);
        assert_eq!(lin.members()[0], Monomial::var(0, 4));
        assert!(MonomialLattice::enumerate(0, 2).is_err());
    }

    #[test]
    fn sizes_match_binomials() {
        for n in 1..5 {
            for d in 1..4 {
                let l = MonomialLattice::enumerate(n, d).unwrap();
                assert_eq!(l.len() as u64, binomial((n as u64) + d as u64, d as u64));
                for (i, x) in l.members().iter().enumerate() {
                    assert_eq!(l.index_of(x), Some(i));
                }
            }
        }
    }

    #[test]
    fn pairings() {
        let w = [1, 1, -1, -1];
        assert_eq!(pairing(&m(&[1, 1, 0, 0]), &w).unwrap(), 2);
        assert_eq!(pairing(&m(&[0, 0, 1, 1]), &w).unwrap(), -2);
        assert_eq!(pairing(&m(&[2, 0, 0, 0, 0]), &[12, 2, -3, -3, -8]).unwrap(), 24);
        assert!(pairing(&m(&[2, 0]), &w).is_err());
    }

    #[test]
    fn lambda_order_examples() {
        let w = [1, 0, 0, -1];
        assert_eq!(lambda_compare(&m(&[1, 1, 0, 0]), &m(&[2, 0, 0, 0]), &w), Ordering::Less);
        let w = [1, 1, -1, -1];
        // x0x3 and x1x2 both pair to 0, and x0x3 is lex-larger
        assert_eq!(lambda_compare(&m(&[1, 0, 0, 1]), &m(&[0, 1, 1, 0]), &w), Ordering::Greater);
        assert_eq!(lambda_compare(&m(&[1, 0, 0, 1]), &m(&[1, 0, 0, 1]), &w), Ordering::Equal);
    }

    #[test]
    fn rendering_round_trip() {
        let x = m(&[2, 1, 0, 0]);
        assert_eq!(x.to_string(), "x0^2*x1");
        assert_eq!(Monomial::parse("x0^2*x1", 4).unwrap(), x);
        assert!(Monomial::parse("x7", 4).is_err());
    }
}

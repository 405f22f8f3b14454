//! Normalized one-parameter subgroups of the diagonal torus and the finite
//! fundamental set that suffices for every Hilbert–Mumford check.
//!
//! A candidate γ is fixed by γ₀ = 1, Σγᵢ = 0 and n − 1 further hyperplane
//! equations drawn from [`equation_normals`]. Eliminating γ₀ and γ_n leaves
//! an (n−1)×(n−1) integer system solved by Cramer's rule, so everything
//! stays in machine integers.

use std::collections::BTreeSet;
use std::fmt;

use num::integer::gcd;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::monomial::MonomialLattice;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OneParamSubgroup {
    weights: Vec<i64>,
}

impl OneParamSubgroup {
    /// Checks Σ = 0, non-increasing, primitive and nonzero.
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::pre("a one-parameter subgroup needs at least two weights"));
        }
        if weights.iter().sum::<i64>() != 0 {
            return Err(Error::pre(format!("weights {weights:?} do not sum to zero")));
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::pre(format!("weights {weights:?} are not non-increasing")));
        }
        if weights.iter().all(|&w| w == 0) {
            return Err(Error::pre("the trivial subgroup is not allowed"));
        }
        if content(&weights) != 1 {
            return Err(Error::pre(format!("weights {weights:?} are not primitive")));
        }
        Ok(OneParamSubgroup { weights })
    }

    /// Sorts, divides by the content; `None` for the zero vector or when
    /// the entries do not sum to zero.
    pub fn normalize(w: &[i64]) -> Option<Self> {
        if w.iter().sum::<i64>() != 0 || w.iter().all(|&x| x == 0) {
            return None;
        }
        let g = content(w);
        let mut v: Vec<i64> = w.iter().map(|x| x / g).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Some(OneParamSubgroup { weights: v })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// μ ↦ (−μ_n, …, −μ₀); stays normalized.
    pub fn reversal(&self) -> Self {
        OneParamSubgroup { weights: self.weights.iter().rev().map(|x| -x).collect() }
    }

    /// All distinct coordinate permutations of the weight vector.
    pub fn orbit(&self) -> Vec<Vec<i64>> {
        let mut v = self.weights.clone();
        v.sort_unstable();
        let mut out = vec![v.clone()];
        while next_permutation(&mut v) {
            out.push(v.clone());
        }
        out
    }
}

impl fmt::Display for OneParamSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn content(w: &[i64]) -> i64 {
    w.iter().fold(0i64, |g, &x| gcd(g, x)).max(1)
}

/// Lexicographic successor; false when `v` was the last permutation.
pub fn next_permutation(v: &mut [i64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Primitive representative with positive first nonzero entry.
fn primitive_up_to_sign(v: &[i64]) -> Option<Vec<i64>> {
    let first = *v.iter().find(|&&x| x != 0)?;
    let g = content(v) * first.signum();
    Some(v.iter().map(|x| x / g).collect())
}

/// Hyperplane normals: eᵢ − eᵢ₊₁ and all differences of k-fold sums of
/// degree-d exponent vectors, primitive and deduplicated up to sign.
pub fn equation_normals(n: usize, k: usize, d: u32) -> Result<Vec<Vec<i64>>> {
    if k < 1 {
        return Err(Error::pre("k must be at least 1"));
    }
    let lat = MonomialLattice::enumerate(n, d)?;
    let mut sums: BTreeSet<Vec<i64>> = BTreeSet::new();
    sums.insert(vec![0; n + 1]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for s in &sums {
            for m in lat.members() {
                next.insert(s.iter().zip(m.exps()).map(|(a, &b)| a + b as i64).collect::<Vec<_>>());
            }
        }
        sums = next;
    }
    let sums: Vec<Vec<i64>> = sums.into_iter().collect();
    let mut normals: BTreeSet<Vec<i64>> = BTreeSet::new();
    for i in 0..n {
        let mut e = vec![0; n + 1];
        e[i] = 1;
        e[i + 1] = -1;
        normals.insert(e);
    }
    for (i, a) in sums.iter().enumerate() {
        for b in &sums[i + 1..] {
            let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            if let Some(p) = primitive_up_to_sign(&diff) {
                normals.insert(p);
            }
        }
    }
    Ok(normals.into_iter().collect())
}

/// Extreme rays of the cone of non-increasing zero-sum vectors.
fn cone_rays(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|j| {
            let hi = (n - j) as i64;
            let lo = -((j + 1) as i64);
            (0..=n).map(|i| if i <= j { hi } else { lo }).collect()
        })
        .collect()
}

/// A hyperplane that is strictly one-signed on every ray meets the cone only
/// at the origin, so it can never produce a normalized solution.
fn meets_cone(v: &[i64], rays: &[Vec<i64>]) -> bool {
    let signs: Vec<i64> = rays
        .iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum::<i64>().signum())
        .collect();
    !(signs.iter().all(|&s| s > 0) || signs.iter().all(|&s| s < 0))
}

/// Largest n handled by the fixed-size elimination buffers.
const MAX_N: usize = 9;

type Row = [i128; MAX_N];

fn det(m: &mut [Row], s: usize) -> i128 {
    // Bareiss elimination; exact for integer matrices.
    if s == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..s - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..s).find(|&r| m[r][k] != 0) else { return 0 };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..s {
            for j in k + 1..s {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[s - 1][s - 1]
}

/// Solves the reduced system for one choice of rows and returns the
/// primitive integer γ when it is normalized.
fn solve_choice(pool: &[(Row, i128)], idx: &[usize], n: usize) -> Option<Vec<i64>> {
    let s = n - 1;
    let mut a = [[0i128; MAX_N]; MAX_N];
    for (r, &i) in idx.iter().enumerate() {
        a[r] = pool[i].0;
    }
    let d = det(&mut a, s);
    if d == 0 {
        return None;
    }
    let mut gam = [0i128; MAX_N + 1];
    gam[0] = d;
    let mut total = d;
    for c in 0..s {
        let mut m = [[0i128; MAX_N]; MAX_N];
        for (r, &i) in idx.iter().enumerate() {
            m[r] = pool[i].0;
            m[r][c] = pool[i].1;
        }
        let dc = det(&mut m, s);
        gam[c + 1] = dc;
        total += dc;
    }
    gam[n] = -total;
    let gam = &mut gam[..=n];
    if d < 0 {
        for g in gam.iter_mut() {
            *g = -*g;
        }
    }
    if gam.windows(2).any(|w| w[0] < w[1]) {
        return None;
    }
    let g = gam.iter().fold(0i128, |g, &x| num::integer::gcd(g, x));
    Some(gam.iter().map(|x| (x / g) as i64).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalSet {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    pub m: usize,
    pub members: Vec<OneParamSubgroup>,
}

impl FundamentalSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &[i64]) -> bool {
        self.members.binary_search_by(|m| m.weights().cmp(w)).is_ok()
    }

    /// SHA-256 over the canonical member list (independent of m).
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{},{},{}|", self.n, self.k, self.d).as_bytes());
        for m in &self.members {
            h.update(m.to_string().as_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// The fundamental set of normalized one-parameter subgroups.
pub fn fundamental_set(n: usize, k: usize, d: u32, m: usize) -> Result<FundamentalSet> {
    if n < 1 || d < 1 || k < 1 {
        return Err(Error::pre("fundamental set needs n, k, d ≥ 1"));
    }
    if n == 1 {
        let only = OneParamSubgroup::new(vec![1, -1])?;
        return Ok(FundamentalSet { n, k, d, m, members: vec![only] });
    }
    let rays = cone_rays(n);
    if n > MAX_N {
        return Err(Error::pre(format!("fundamental sets are limited to n ≤ {MAX_N}")));
    }
    let pool: Vec<(Row, i128)> = equation_normals(n, k, d)?
        .into_iter()
        .filter(|v| meets_cone(v, &rays))
        .map(|v| {
            let vn = v[n] as i128;
            let mut row = [0i128; MAX_N];
            for i in 1..n {
                row[i - 1] = v[i] as i128 - vn;
            }
            (row, vn - v[0] as i128)
        })
        .collect();
    let s = n - 1;
    let found: BTreeSet<Vec<i64>> = (0..pool.len())
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, first| {
            let mut idx = vec![first];
            extend_choices(&pool, s, &mut idx, n, &mut acc);
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let mut all: BTreeSet<OneParamSubgroup> = BTreeSet::new();
    for g in found {
        let p = OneParamSubgroup::new(g)?;
        all.insert(p.reversal());
        all.insert(p);
    }
    Ok(FundamentalSet { n, k, d, m, members: all.into_iter().collect() })
}

fn extend_choices(pool: &[(Row, i128)], s: usize, idx: &mut Vec<usize>, n: usize, acc: &mut BTreeSet<Vec<i64>>) {
    if idx.len() == s {
        if let Some(g) = solve_choice(pool, idx, n) {
            acc.insert(g);
        }
        return;
    }
    // Skip prefixes whose coefficient rows are already dependent.
    if idx.len() >= 2 && rank(pool, idx, s) < idx.len() {
        return;
    }
    let start = idx.last().unwrap() + 1;
    for j in start..pool.len() {
        idx.push(j);
        extend_choices(pool, s, idx, n, acc);
        idx.pop();
    }
}

fn rank(pool: &[(Row, i128)], idx: &[usize], cols: usize) -> usize {
    let mut m = [[0i128; MAX_N]; MAX_N];
    for (r, &i) in idx.iter().enumerate() {
        m[r] = pool[i].0;
    }
    let rows = idx.len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            let f = m[i][c];
            let pv = m[r][c];
            for j in c..cols {
                m[i][j] = m[i][j] * pv - m[r][j] * f;
            }
            let g = m[i][..cols].iter().fold(0i128, |g, &x| num::integer::gcd(g, x));
            if g > 1 {
                for x in m[i][..cols].iter_mut() {
                    *x /= g;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

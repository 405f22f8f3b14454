//! Segre symbols of pencils of quadrics λF + μG.
//!
//! D_j is the gcd of the (n+1−j)-minors of λF + μG. Multiplicities are
//! read per factor of a coprime basis of the D_j, so Galois-conjugate
//! roots are handled together without factoring over ℚ. A second path
//! reads Jordan block sizes of F'⁻¹G' for a nonsingular member F'.

use std::fmt;

use num::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::binary_form::{coprime_refinement, multiplicity, BinaryForm};
use crate::error::{Error, Result};
use crate::form_matrix::FormMatrix;
use crate::lp::rank;
use crate::monomial::Monomial;
use crate::poly::PolyExpr;
use crate::rat::{int, Rat};

pub type Matrix = Vec<Vec<Rat>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadricPencil {
    pub n: usize,
    pub f: Matrix,
    pub g: Matrix,
}

fn is_symmetric(m: &Matrix, size: usize) -> bool {
    m.len() == size && m.iter().all(|r| r.len() == size) && (0..size).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Rat::zero();
                    for (k, bk) in b.iter().enumerate() {
                        if !a[i][k].is_zero() && !bk[j].is_zero() {
                            s += &a[i][k] * &bk[j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn transpose(a: &Matrix) -> Matrix {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn combine(a: &Rat, f: &Matrix, b: &Rat, g: &Matrix) -> Matrix {
    f.iter().zip(g).map(|(rf, rg)| rf.iter().zip(rg).map(|(x, y)| a * x + b * y).collect()).collect()
}

impl QuadricPencil {
    pub fn new(n: usize, f: Matrix, g: Matrix) -> Result<Self> {
        if !is_symmetric(&f, n + 1) || !is_symmetric(&g, n + 1) {
            return Err(Error::pre(format!("pencil needs two symmetric {0}×{0} matrices", n + 1)));
        }
        Ok(QuadricPencil { n, f, g })
    }

    pub fn matrix(&self) -> FormMatrix {
        FormMatrix::pencil(&self.f, &self.g).expect("validated shape")
    }

    /// (F, G) ↦ (AᵀFA, AᵀGA).
    pub fn congruence(&self, a: &Matrix) -> Self {
        let at = transpose(a);
        QuadricPencil { n: self.n, f: mat_mul(&mat_mul(&at, &self.f), a), g: mat_mul(&mat_mul(&at, &self.g), a) }
    }

    /// The pencil in the basis λ' = aλ + bμ, μ' = cλ + dμ, i.e.
    /// (aF + cG, bF + dG).
    pub fn rebase(&self, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Self {
        QuadricPencil { n: self.n, f: combine(a, &self.f, c, &self.g), g: combine(b, &self.f, d, &self.g) }
    }

    pub fn swapped(&self) -> Self {
        QuadricPencil { n: self.n, f: self.g.clone(), g: self.f.clone() }
    }
}

/// Symmetric matrix of a quadratic form with q(x) = x Q xᵀ.
pub fn quadric_matrix(q: &PolyExpr, n: usize) -> Result<Matrix> {
    if q.nvars() != n + 1 {
        return Err(Error::Dimension { expected: n + 1, got: q.nvars() });
    }
    if !q.is_zero() && q.degree() != Some(2) {
        return Err(Error::pre("pencil members must be quadratic forms"));
    }
    let mut m = vec![vec![Rat::zero(); n + 1]; n + 1];
    let half = Rat::new(1.into(), 2.into());
    for (mono, c) in q.terms() {
        let vars: Vec<usize> = mono.exps().iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect();
        let (i, j) = (vars[0], vars[1]);
        if i == j {
            m[i][i] += c;
        } else {
            m[i][j] += c * &half;
            m[j][i] += c * &half;
        }
    }
    Ok(m)
}

pub fn pencil_from_forms(f: &PolyExpr, g: &PolyExpr, n: usize) -> Result<QuadricPencil> {
    QuadricPencil::new(n, quadric_matrix(f, n)?, quadric_matrix(g, n)?)
}

/// Entries sorted by tuple length, then lexicographically, both descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SegreSymbol {
    pub entries: Vec<Vec<usize>>,
}

impl SegreSymbol {
    pub fn new(mut entries: Vec<Vec<usize>>) -> Self {
        entries.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| b.cmp(a)));
        SegreSymbol { entries }
    }

    pub fn total(&self) -> usize {
        self.entries.iter().flatten().sum()
    }

    pub fn is_all_singletons(&self) -> bool {
        self.entries.iter().all(|e| e == &[1])
    }

    /// Parses the rendered form, e.g. `[(2,1),1]`.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = s
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::parse(0, "Segre symbol must be bracketed"))?;
        let mut entries = Vec::new();
        let mut rest = inner;
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('(') {
                let end = r.find(')').ok_or_else(|| Error::parse(0, "unclosed parenthesis"))?;
                let tuple = r[..end]
                    .split(',')
                    .map(|x| x.parse::<usize>().map_err(|_| Error::parse(0, format!("bad entry {x:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                entries.push(tuple);
                rest = &r[end + 1..];
            } else {
                let end = rest.find(',').unwrap_or(rest.len());
                let x = &rest[..end];
                entries.push(vec![x.parse::<usize>().map_err(|_| Error::parse(0, format!("bad entry {x:?}")))?]);
                rest = &rest[end..];
            }
            rest = rest.strip_prefix(',').unwrap_or(rest);
        }
        Ok(SegreSymbol::new(entries))
    }
}

impl fmt::Display for SegreSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| match e.as_slice() {
                [x] => x.to_string(),
                _ => format!("({})", e.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
            })
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn render_symbol(s: &SegreSymbol) -> String {
    s.to_string()
}

/// Multiplicities of one basis factor in D₀, D₁, ….
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegreRow {
    pub factor: String,
    pub degree: usize,
    pub l: Vec<usize>,
    pub e: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegreAnalysis {
    pub determinant: String,
    pub symbol: SegreSymbol,
    pub rows: Vec<SegreRow>,
}

/// Segre symbol with the per-factor multiplicity table.
pub fn segre_analysis(p: &QuadricPencil) -> Result<SegreAnalysis> {
    let m = p.matrix();
    let size = p.n + 1;
    let det = m.det_form();
    if det.is_zero() {
        return Err(Error::degenerate("Segre symbol undefined (degenerate pencil)"));
    }
    // d[j] = gcd of (size − j)-minors; all nonzero since det is
    let mut d: Vec<BinaryForm> = vec![det.clone()];
    for j in 1..size {
        d.push(m.minors_gcd(size - j)?);
    }
    let basis = coprime_refinement(&d)?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for q in basis {
        let mut l = d.iter().map(|dj| multiplicity(dj, &q)).collect::<Result<Vec<_>>>()?;
        l.push(0);
        let h = l.iter().position(|&x| x == 0).expect("l ends with 0");
        let e: Vec<usize> = (0..h).map(|j| l[j] - l[j + 1]).collect();
        let deg = q.degree().expect("nonzero factor");
        for _ in 0..deg {
            entries.push(e.clone());
        }
        l.truncate(h + 1);
        rows.push(SegreRow { factor: q.to_string(), degree: deg, l, e });
    }
    Ok(SegreAnalysis { determinant: det.to_string(), symbol: SegreSymbol::new(entries), rows })
}

pub fn segre_symbol(p: &QuadricPencil) -> Result<SegreSymbol> {
    Ok(segre_analysis(p)?.symbol)
}

fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { int(1) } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x /= &piv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let delta = &f * &m[c][j];
                    m[i][j] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Second path: Jordan block sizes of A = F'⁻¹G' for a nonsingular member
/// F', one factor of the coprime basis at a time.
pub fn segre_by_jordan(p: &QuadricPencil) -> Result<SegreSymbol> {
    let det = p.matrix().det_form();
    if det.is_zero() {
        return Err(Error::degenerate("Segre symbol undefined (degenerate pencil)"));
    }
    let size = p.n + 1;
    // (a, b) with det(aF + bG) ≠ 0
    let (a, b) = (0i64..)
        .flat_map(|s| (0..=s).map(move |i| (int(s - i), int(i + 1))))
        .map(|(x, y)| (y.clone(), x))
        .find(|(x, y)| !det.eval(x, y).is_zero())
        .expect("a nonzero form has a non-root");
    let (c, d) = if a.is_zero() { (int(1), int(0)) } else { (int(0), int(1)) };
    let f1 = combine(&a, &p.f, &b, &p.g);
    let g1 = combine(&c, &p.f, &d, &p.g);
    let mat = mat_mul(&inverse(&f1).expect("chosen member is nonsingular"), &g1);
    let mut entries = Vec::new();
    for (q, _) in crate::binary_form::squarefree_decomposition(&det) {
        for q in coprime_refinement(&[q])? {
            // member sF + uG with s = aλ' + cμ', u = bλ' + dμ'
            let qq = q.substitute(&a, &c, &b, &d);
            let deg = qq.degree().expect("nonzero");
            // p(α) = q'(−α, 1) as ascending coefficients in α
            let mut poly = vec![Rat::zero(); deg + 1];
            for (j, coef) in qq.coeffs().iter().enumerate() {
                let e = deg - j;
                poly[e] = if e % 2 == 1 { -coef } else { coef.clone() };
            }
            let pa = matrix_poly(&mat, &poly);
            let r = q.degree().expect("nonzero");
            let mut nullities = vec![0usize];
            let mut power = identity(size);
            loop {
                power = mat_mul(&power, &pa);
                let nul = size - rank(&power);
                if nul == *nullities.last().unwrap() {
                    break;
                }
                nullities.push(nul);
            }
            // blocks of size ≥ k: (nullity_k − nullity_{k−1}) / r
            let ge: Vec<usize> = nullities.windows(2).map(|w| (w[1] - w[0]) / r).collect();
            let mut sizes = Vec::new();
            for s in (1..=ge.len()).rev() {
                let exact = ge[s - 1] - ge.get(s).copied().unwrap_or(0);
                sizes.extend(std::iter::repeat_n(s, exact));
            }
            for _ in 0..r {
                entries.push(sizes.clone());
            }
        }
    }
    Ok(SegreSymbol::new(entries))
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { int(1) } else { Rat::zero() }).collect()).collect()
}

fn matrix_poly(m: &Matrix, poly: &[Rat]) -> Matrix {
    let n = m.len();
    let mut acc = vec![vec![Rat::zero(); n]; n];
    for c in poly.iter().rev() {
        acc = mat_mul(&acc, m);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    acc
}

/// Quadratic form x Q xᵀ as a polynomial.
pub fn matrix_to_form(q: &Matrix) -> PolyExpr {
    let n = q.len();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i..n {
            let c = if i == j { q[i][i].clone() } else { &q[i][j] * int(2) };
            if !c.is_zero() {
                let mut e = vec![0u32; n];
                e[i] += 1;
                e[j] += 1;
                terms.push((Monomial::new(e), c));
            }
        }
    }
    PolyExpr::from_terms(n, terms)
}

/// Whether every member of the pencil is singular (det ≡ 0).
pub fn is_degenerate(p: &QuadricPencil) -> bool {
    p.matrix().det_form().is_zero()
}

/// Pencil whose two members have the given supports and seeded nonzero
/// integer coefficients in [−50, 50].
pub fn generic_pencil(n: usize, f_support: &[Monomial], g_support: &[Monomial], seed: u64) -> Result<QuadricPencil> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut form = |support: &[Monomial]| {
        PolyExpr::from_terms(
            n + 1,
            support.iter().map(|m| {
                let c = rng.gen_range(1..=50) * if rng.gen_bool(0.5) { 1 } else { -1 };
                (m.clone(), int(c))
            }),
        )
    };
    let f = form(f_support);
    let g = form(g_support);
    pencil_from_forms(&f, &g, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::rat::rat;

    fn pencil(f: &str, g: &str, n: usize) -> QuadricPencil {
        pencil_from_forms(&parse_poly(f, n, 2).unwrap(), &parse_poly(g, n, 2).unwrap(), n).unwrap()
    }

    #[test]
    fn matrix_convention() {
        let m = quadric_matrix(&parse_poly("x0*x1", 3, 2).unwrap(), 3).unwrap();
        assert_eq!(m[0][1], rat(1, 2));
        assert_eq!(m[1][0], rat(1, 2));
        let m = quadric_matrix(&parse_poly("3x2^2 + x0*x4", 4, 2).unwrap(), 4).unwrap();
        assert_eq!(m[2][2], int(3));
        assert_eq!(m[0][4], rat(1, 2));
        let m = quadric_matrix(&parse_poly("x0^2+x1^2+x2^2", 2, 2).unwrap(), 2).unwrap();
        assert_eq!(m, identity(3));
        assert_eq!(matrix_to_form(&m), parse_poly("x0^2+x1^2+x2^2", 2, 2).unwrap());
    }

    #[test]
    fn quadrangle_and_diagonal() {
        let p = pencil("x0*x1", "x2*x3", 3);
        assert_eq!(segre_symbol(&p).unwrap().to_string(), "[(1,1),(1,1)]");
        assert_eq!(segre_by_jordan(&p).unwrap().to_string(), "[(1,1),(1,1)]");
        let p = pencil("x0^2+x1^2+x2^2+x3^2", "x0^2+2x1^2+3x2^2+4x3^2", 3);
        assert_eq!(segre_symbol(&p).unwrap().to_string(), "[1,1,1,1]");
    }

    #[test]
    fn degenerate_pencil() {
        let p = pencil("x0^2", "x0*x1", 3);
        assert!(matches!(segre_symbol(&p), Err(Error::Degenerate(_))));
        assert!(is_degenerate(&p));
    }

    #[test]
    fn irreducible_quadratic_factor() {
        // det ∝ (λ² + μ²)(λ + μ)(λ + 2μ) is squarefree, so the basis keeps
        // it whole and the one factor stands for four simple roots
        let p = pencil("x0^2 - x1^2 + x2^2 + x3^2", "2*x0*x1 + x2^2 + 2*x3^2", 3);
        let a = segre_analysis(&p).unwrap();
        assert_eq!(a.symbol.to_string(), "[1,1,1,1]");
        assert_eq!(a.rows.len(), 1);
        assert_eq!(a.rows[0].degree, 4);
    }

    #[test]
    fn render_and_parse() {
        for s in ["[(1,1),(1,1)]", "[4,1]", "[1,1,1,1,1]", "[(3,1),1]", "[(2,1),(1,1)]"] {
            assert_eq!(SegreSymbol::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(SegreSymbol::new(vec![vec![1], vec![2, 1], vec![1, 1]]).to_string(), "[(2,1),(1,1),1]");
    }
}

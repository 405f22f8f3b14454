//! Closed-form invariants: the log CM line bundle O(a(β), b(β)) and its
//! slope, the dimension of the moduli space, the codimension bounds of the
//! non-stable loci, and exact barycenters of lattice polytopes.

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::combinations;
use crate::monomial::binomial;
use crate::rat::{int, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CMCoefficients {
    #[serde(with = "crate::rat::as_str")]
    pub a: Rat,
    #[serde(with = "crate::rat::as_str")]
    pub b: Rat,
    #[serde(with = "crate::rat::as_str")]
    pub t: Rat,
}

fn check_cm_params(n: usize, d: u32, k: usize) -> Result<()> {
    if n == 0 || d == 0 || k == 0 {
        return Err(Error::pre("n, d, k must be positive"));
    }
    if k * d as usize > n {
        return Err(Error::pre(format!("kd = {} exceeds n = {n}", k * d as usize)));
    }
    Ok(())
}

fn pow(base: i64, e: i64) -> Rat {
    let b = int(base);
    if e >= 0 {
        num::pow(b, e as usize)
    } else {
        num::pow(b.recip(), (-e) as usize)
    }
}

/// a(β) and b(β) by the general formulas.
pub fn cm_general(n: usize, d: u32, k: usize, beta: &Rat) -> (Rat, Rat) {
    let (n, d, k) = (n as i64, d as i64, k as i64);
    let c = n + 1 - k * d;
    let one_b = Rat::one() - beta;
    let inner = int((n - k + 1) * ((1 - d) * n + 1)) * &one_b
        + (Rat::one() + int(n - k) * &one_b) * int(c * (d - 1) * (n + 1));
    let a = pow(c, n - k - 1) * pow(d, k - 1) * inner;
    let b = pow(c, n - k) * pow(d, k) * int(n - k + 1) * one_b;
    (a, b)
}

/// a(β) and b(β) by the kd = n forms.
pub fn cm_specialized(n: usize, d: u32, k: usize, beta: &Rat) -> (Rat, Rat) {
    let (n, d, k) = (n as i64, d as i64, k as i64);
    let a = pow(d, k - 1) * (int(d * (n - k + 1)) - beta);
    let b = pow(d, k) * int(n - k + 1) * (Rat::one() - beta);
    (a, b)
}

pub fn cm_coefficients(n: usize, d: u32, k: usize, beta: &Rat) -> Result<CMCoefficients> {
    check_cm_params(n, d, k)?;
    if !beta.is_positive() || *beta > Rat::one() {
        return Err(Error::pre("β must lie in (0, 1]"));
    }
    let (a, b) = cm_general(n, d, k, beta);
    if k * d as usize == n {
        let special = cm_specialized(n, d, k, beta);
        if special != (a.clone(), b.clone()) {
            return Err(Error::pre(format!("general and kd = n CM formulas disagree at β = {beta}")));
        }
    }
    if a.is_zero() {
        return Err(Error::degenerate("a(β) vanishes"));
    }
    let t = &b / &a;
    Ok(CMCoefficients { a, b, t })
}

/// The β ∈ (0, 1] with t(β) = t. Both a and b are affine in β, so
/// t(A₀ + A₁β) = B₀ + B₁β is solved directly.
pub fn beta_of_t(n: usize, d: u32, k: usize, t: &Rat) -> Result<Rat> {
    check_cm_params(n, d, k)?;
    let (a0, b0) = cm_general(n, d, k, &Rat::zero());
    let (a1, b1) = cm_general(n, d, k, &Rat::one());
    let (da, db) = (&a1 - &a0, &b1 - &b0);
    let den = t * &da - &db;
    if den.is_zero() {
        return Err(Error::pre(format!("t = {t} is not attained")));
    }
    let beta = (&b0 - t * &a0) / den;
    if !beta.is_positive() || beta > Rat::one() {
        return Err(Error::pre(format!("t = {t} lies outside the image of (0, 1]")));
    }
    Ok(beta)
}

/// k(C(n+d,d) − k) + mn − ((n+1)² − 1).
pub fn moduli_dimension(n: usize, d: u32, k: usize, m: usize) -> i64 {
    let (ni, ki) = (n as i64, k as i64);
    ki * (binomial(n as u64 + d as u64, d as u64) as i64 - ki) + m as i64 * ni - ((ni + 1) * (ni + 1) - 1)
}

/// k(n+1)(k(n+2)…(n+d)/d! − (n+1)) − n(n+m−2) − k², the closed product
/// form stated alongside the expression above. The two disagree in
/// general; this one is only reported for comparison.
pub fn moduli_dimension_display(n: usize, d: u32, k: usize, m: usize) -> Rat {
    let (n, k, m) = (n as i64, k as i64, m as i64);
    let rising: Rat = (2..=d as i64).map(|j| int(n + j)).product();
    let fact: Rat = (1..=d as i64).map(int).product();
    int(k * (n + 1)) * (int(k) * rising / fact - int(n + 1)) - int(n * (n + m - 2)) - int(k * k)
}

/// (codim M₁, codim M₂) for kd ≤ n, d ≥ 2; both are at least 2.
pub fn codimensions(n: usize, d: u32, k: usize) -> Result<(i64, i64)> {
    check_cm_params(n, d, k)?;
    if d < 2 {
        return Err(Error::pre("codimension bounds need d ≥ 2"));
    }
    let (nn, dd, ki) = (n as u64, d as u64, k as i64);
    let c1 = binomial(nn + dd - 1, dd) as i64 - (ki - 1) * (ki - 1);
    let c2 = ki * (binomial(nn + dd, dd) as i64 - binomial(nn + dd - 2, dd - 2) as i64) - ki * ki + n as i64;
    if c1 < 2 || c2 < 2 {
        return Err(Error::pre(format!("codimension bound below 2: ({c1}, {c2})")));
    }
    Ok((c1, c2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    pub vertices: Vec<Vec<i64>>,
}

impl LatticePolytope {
    pub fn new(vertices: Vec<Vec<i64>>) -> Result<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        if vertices.is_empty() || dim == 0 || vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::pre("vertices must be nonempty vectors of one dimension"));
        }
        Ok(LatticePolytope { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }
}

fn det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut out = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else { return Rat::zero() };
        if p != c {
            m.swap(p, c);
            out = -out;
        }
        out *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let x = &f * &m[c][j];
                m[r][j] -= x;
            }
        }
    }
    out
}

fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinates of every point in an affine basis of their span, so that a
/// face becomes full-dimensional in its own space.
fn local_coords(points: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let p0 = &points[0];
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    for p in &points[1..] {
        let v = sub(p, p0);
        let mut trial = basis.clone();
        trial.push(v.clone());
        if crate::lp::rank(&trial) == trial.len() {
            basis = trial;
        }
    }
    // Gram system G c = Eᵀ(x − p0)
    let r = basis.len();
    let gram: Vec<Vec<Rat>> = (0..r).map(|i| (0..r).map(|j| dot(&basis[i], &basis[j])).collect()).collect();
    points
        .iter()
        .map(|x| {
            let rhs: Vec<Rat> = basis.iter().map(|e| dot(e, &sub(x, p0))).collect();
            solve(&gram, &rhs)
        })
        .collect()
}

fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Vec<Rat> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero()).expect("Gram matrix of a basis is invertible");
        m.swap(p, c);
        let piv = m[c][c].clone();
        for j in c..=n {
            m[c][j] = &m[c][j] / &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in c..=n {
                    let x = &f * &m[c][j];
                    m[r][j] -= x;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n].clone()).collect()
}

/// Triangulates the convex hull of full-dimensional points by coning from
/// point 0 over a recursive triangulation of the facets avoiding it.
/// Returns simplices as index lists.
fn triangulate(points: &[Vec<Rat>]) -> Vec<Vec<usize>> {
    let r = points[0].len();
    if r == 0 {
        return vec![vec![0]];
    }
    if r == 1 {
        let lo = (0..points.len()).min_by(|&a, &b| points[a][0].cmp(&points[b][0])).unwrap();
        let hi = (0..points.len()).max_by(|&a, &b| points[a][0].cmp(&points[b][0])).unwrap();
        return vec![vec![lo, hi]];
    }
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for subset in combinations(points.len(), r) {
        let base = &points[subset[0]];
        let dirs: Vec<Vec<Rat>> = subset[1..].iter().map(|&i| sub(&points[i], base)).collect();
        // normal by cofactor expansion against the unit vectors
        let normal: Vec<Rat> = (0..r)
            .map(|c| {
                let mut m = dirs.clone();
                let mut e = vec![Rat::zero(); r];
                e[c] = Rat::one();
                m.push(e);
                det(m)
            })
            .collect();
        if normal.iter().all(Zero::is_zero) {
            continue;
        }
        let sides: Vec<Rat> = points.iter().map(|p| dot(&normal, &sub(p, base))).collect();
        if sides.iter().any(Signed::is_positive) && sides.iter().any(Signed::is_negative) {
            continue;
        }
        let on: Vec<usize> = (0..points.len()).filter(|&i| sides[i].is_zero()).collect();
        if !facets.contains(&on) {
            facets.push(on);
        }
    }
    let mut out = Vec::new();
    for facet in facets.iter().filter(|f| !f.contains(&0)) {
        let pts: Vec<Vec<Rat>> = facet.iter().map(|&i| points[i].clone()).collect();
        for simplex in triangulate(&local_coords(&pts)) {
            out.push(std::iter::once(0).chain(simplex.iter().map(|&j| facet[j])).collect());
        }
    }
    out
}

/// Volume-weighted centroid of the convex hull of the vertices.
pub fn polytope_barycenter(p: &LatticePolytope) -> Result<Vec<Rat>> {
    let dim = p.dim();
    let mut pts: Vec<Vec<Rat>> = p.vertices.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
    pts.sort();
    pts.dedup();
    if crate::lp::affine_dim(&pts) != Some(dim) {
        return Err(Error::pre("vertices do not affinely span the ambient space"));
    }
    let mut total = Rat::zero();
    let mut acc = vec![Rat::zero(); dim];
    for s in triangulate(&pts) {
        let vol = det(s[1..].iter().map(|&i| sub(&pts[i], &pts[s[0]])).collect()).abs();
        for (c, a) in acc.iter_mut().enumerate() {
            let sum: Rat = s.iter().map(|&i| pts[i][c].clone()).sum();
            *a += &vol * sum / int(dim as i64 + 1);
        }
        total += vol;
    }
    Ok(acc.into_iter().map(|a| a / &total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn cm_in_p4() {
        let beta = rat(1, 3);
        let c = cm_coefficients(4, 2, 2, &beta).unwrap();
        assert_eq!(c.a, int(2) * (int(6) - &beta));
        assert_eq!(c.b, int(12) * (int(1) - &beta));
        assert_eq!(cm_coefficients(4, 2, 2, &rat(6, 7)).unwrap().t, rat(1, 6));
        let one = cm_coefficients(4, 2, 2, &int(1)).unwrap();
        assert_eq!((one.b, one.t), (int(0), int(0)));
    }

    #[test]
    fn beta_inversion() {
        assert_eq!(beta_of_t(4, 2, 2, &rat(1, 6)).unwrap(), rat(6, 7));
        assert_eq!(beta_of_t(4, 2, 2, &int(0)).unwrap(), int(1));
        assert!(beta_of_t(4, 2, 2, &int(2)).is_err());
    }

    #[test]
    fn cm_range_errors() {
        assert!(cm_coefficients(3, 2, 2, &rat(1, 2)).is_err());
        assert!(cm_coefficients(4, 2, 2, &int(0)).is_err());
        assert!(cm_coefficients(4, 2, 2, &rat(3, 2)).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(moduli_dimension(4, 2, 2, 1), 6);
        assert_eq!(moduli_dimension(3, 2, 2, 0), 1);
        assert_eq!(moduli_dimension(4, 2, 2, 2) - moduli_dimension(4, 2, 2, 1), 4);
        assert_eq!(moduli_dimension_display(4, 2, 2, 1), int(-6));
    }

    #[test]
    fn codims() {
        assert_eq!(codimensions(4, 2, 2).unwrap(), (9, 28));
        assert_eq!(codimensions(2, 2, 1).unwrap(), (3, 6));
        assert!(codimensions(4, 1, 2).is_err());
    }

    #[test]
    fn simplex_and_cube() {
        let s = LatticePolytope::new(vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(polytope_barycenter(&s).unwrap(), vec![rat(1, 4); 3]);
        let mut cube = Vec::new();
        for x in [-1, 1] {
            for y in [-1, 1] {
                for z in [-1, 1] {
                    cube.push(vec![x, y, z]);
                }
            }
        }
        assert_eq!(polytope_barycenter(&LatticePolytope::new(cube).unwrap()).unwrap(), vec![int(0); 3]);
    }

    #[test]
    fn centroid_is_not_vertex_average() {
        // the listed points average to (1, 1/4); the triangle's centroid is (1, 1/3)
        let q = LatticePolytope::new(vec![vec![0, 0], vec![2, 0], vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(polytope_barycenter(&q).unwrap(), vec![int(1), rat(1, 3)]);
    }

    #[test]
    fn flat_polytope_rejected() {
        let p = LatticePolytope::new(vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert!(polytope_barycenter(&p).is_err());
    }
}

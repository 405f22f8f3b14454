//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are in equality form: maximize c·x subject to A x = b, x ≥ 0.
//! Bland's rule rules out cycling, and the problems seen here are small
//! (a handful of rows, a few hundred columns).

use num::{Signed, Zero};

use crate::rat::{int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, x: Vec<Rat> },
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x /= &p;
        }
        self.rhs[r] /= &p;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for j in 0..self.rows[i].len() {
                if !self.rows[r][j].is_zero() {
                    let delta = &f * &self.rows[r][j];
                    self.rows[i][j] -= delta;
                }
            }
            let delta = &f * &self.rhs[r];
            self.rhs[i] -= delta;
        }
        self.basis[r] = c;
    }

    /// Runs the simplex on columns `0..usable`; returns false if unbounded.
    fn optimize(&mut self, cost: &[Rat], usable: usize) -> bool {
        loop {
            // reduced cost r_j = c_j − c_B·column_j; enter the first positive one
            let mut enter = None;
            for j in 0..usable {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        rc -= &cost[b] * &self.rows[i][j];
                    }
                }
                if rc.is_positive() {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][c];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }
}

/// Maximize c·x subject to A x = b, x ≥ 0.
pub fn maximize(c: &[Rat], a: &[Vec<Rat>], b: &[Rat]) -> LpOutcome {
    let m = a.len();
    let nv = c.len();
    assert!(a.iter().all(|r| r.len() == nv) && b.len() == m, "LP shape mismatch");

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rat> = a[i].iter().map(|x| if flip { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|j| if j == i { int(1) } else { Rat::zero() }));
        rows.push(row);
        rhs.push(if flip { -&b[i] } else { b[i].clone() });
    }
    let mut t = Tableau { rows, rhs, basis: (nv..nv + m).collect() };

    // Phase 1: maximize −Σ artificials.
    let mut cost1 = vec![Rat::zero(); nv + m];
    for x in cost1[nv..].iter_mut() {
        *x = int(-1);
    }
    t.optimize(&cost1, nv + m);
    let infeas: Rat = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&bi, _)| bi >= nv)
        .map(|(_, v)| v.clone())
        .sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }

    // Drive zero-level artificials out of the basis or drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= nv {
            match (0..nv).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost2 = c.to_vec();
    cost2.extend((0..m).map(|_| Rat::zero()));
    if !t.optimize(&cost2, nv) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); nv];
    for (r, &bi) in t.basis.iter().enumerate() {
        if bi < nv {
            x[bi] = t.rhs[r].clone();
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { value, x }
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in c..cols {
                let delta = &f * &a[r][j];
                a[i][j] -= delta;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of a point set (−1 encoded as `None`).
pub fn affine_dim(points: &[Vec<Rat>]) -> Option<usize> {
    let first = points.first()?;
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank(&diffs))
}

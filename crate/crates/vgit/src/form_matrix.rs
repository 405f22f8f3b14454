//! Square matrices whose entries are binary forms of a common degree,
//! typically λF + μG for a pair of symmetric rational matrices.

use std::collections::HashMap;

use crate::binary_form::{gcd_all, BinaryForm};
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    size: usize,
    entries: Vec<BinaryForm>,
}

impl FormMatrix {
    /// Row-major entries; all nonzero entries must share one degree.
    pub fn new(size: usize, entries: Vec<BinaryForm>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::Dimension { expected: size * size, got: entries.len() });
        }
        let mut deg = None;
        for e in &entries {
            if let Some(d) = e.degree() {
                if deg.is_some_and(|x| x != d) {
                    return Err(Error::pre("matrix entries of mixed degree"));
                }
                deg = Some(d);
            }
        }
        if size > 16 {
            return Err(Error::pre("form matrices are limited to size 16"));
        }
        Ok(FormMatrix { size, entries })
    }

    /// The pencil λF + μG.
    pub fn pencil(f: &[Vec<Rat>], g: &[Vec<Rat>]) -> Result<Self> {
        let s = f.len();
        if g.len() != s || f.iter().chain(g).any(|r| r.len() != s) {
            return Err(Error::pre("pencil matrices must be square of equal size"));
        }
        let mut entries = Vec::with_capacity(s * s);
        for i in 0..s {
            for j in 0..s {
                entries.push(BinaryForm::linear(f[i][j].clone(), g[i][j].clone()));
            }
        }
        Self::new(s, entries)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BinaryForm {
        &self.entries[i * self.size + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Entrywise substitution (λ, μ) ↦ (aλ + bμ, cλ + dμ).
    pub fn substitute(&self, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Self {
        FormMatrix {
            size: self.size,
            entries: self.entries.iter().map(|e| e.substitute(a, b, c, d)).collect(),
        }
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> BinaryForm {
        let mut memo = HashMap::new();
        self.minor_memo(mask(rows), mask(cols), &mut memo)
    }

    fn minor_memo(&self, rows: u32, cols: u32, memo: &mut HashMap<(u32, u32), BinaryForm>) -> BinaryForm {
        if rows == 0 {
            return BinaryForm::constant(Rat::from_integer(1.into()));
        }
        if let Some(v) = memo.get(&(rows, cols)) {
            return v.clone();
        }
        let r = rows.trailing_zeros() as usize;
        let rest = rows & !(1 << r);
        let mut acc = BinaryForm::zero();
        let mut sign_neg = false;
        for c in 0..self.size {
            if cols & (1 << c) == 0 {
                continue;
            }
            let a = self.get(r, c);
            if !a.is_zero() {
                let sub = self.minor_memo(rest, cols & !(1 << c), memo);
                let term = a.mul(&sub);
                acc = if sign_neg { acc.sub(&term) } else { acc.add(&term) };
            }
            sign_neg = !sign_neg;
        }
        memo.insert((rows, cols), acc.clone());
        acc
    }

    /// The determinant as a form of degree `size` times the entry degree.
    pub fn det_form(&self) -> BinaryForm {
        let all: Vec<usize> = (0..self.size).collect();
        self.minor(&all, &all)
    }

    /// All size×size minors.
    pub fn minors(&self, size: usize) -> Result<Vec<BinaryForm>> {
        if size == 0 || size > self.size {
            return Err(Error::pre(format!("minor size {size} outside 1..={}", self.size)));
        }
        let subsets = subsets(self.size, size);
        let mut memo = HashMap::new();
        let mut out = Vec::with_capacity(subsets.len() * subsets.len());
        for r in &subsets {
            for c in &subsets {
                out.push(self.minor_memo(*r, *c, &mut memo));
            }
        }
        Ok(out)
    }

    /// Gcd of all size×size minors; zero form when every such minor vanishes.
    pub fn minors_gcd(&self, size: usize) -> Result<BinaryForm> {
        let minors = self.minors(size)?;
        Ok(gcd_all(minors.iter()))
    }
}

fn mask(idx: &[usize]) -> u32 {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

/// Free-function form of [`FormMatrix::det_form`].
pub fn det_form(m: &FormMatrix) -> BinaryForm {
    m.det_form()
}

/// Free-function form of [`FormMatrix::minors_gcd`].
pub fn minors_gcd(m: &FormMatrix, size: usize) -> Result<BinaryForm> {
    m.minors_gcd(size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use num::Zero;

    fn zeros(s: usize) -> Vec<Vec<Rat>> {
        vec![vec![Rat::zero(); s]; s]
    }

    fn quadrangle() -> FormMatrix {
        let mut f = zeros(4);
        let mut g = zeros(4);
        f[0][1] = rat(1, 2);
        f[1][0] = rat(1, 2);
        g[2][3] = rat(1, 2);
        g[3][2] = rat(1, 2);
        FormMatrix::pencil(&f, &g).unwrap()
    }

    #[test]
    fn antidiagonal_two_by_two() {
        let mut f = zeros(2);
        f[0][1] = rat(1, 2);
        f[1][0] = rat(1, 2);
        let m = FormMatrix::pencil(&f, &zeros(2)).unwrap();
        assert_eq!(m.det_form(), BinaryForm::new(vec![rat(-1, 4), int(0), int(0)]));
    }

    #[test]
    fn quadrangle_determinant() {
        let m = quadrangle();
        let expect = BinaryForm::new(vec![int(0), int(0), rat(1, 16), int(0), int(0)]);
        assert_eq!(m.det_form(), expect);
        assert_eq!(m.minors_gcd(4).unwrap(), expect.monic());
        assert!(m.minors_gcd(2).unwrap().is_constant());
    }

    #[test]
    fn diagonal_pencil() {
        let mut f = zeros(4);
        let mut g = zeros(4);
        for i in 0..4 {
            f[i][i] = int(1);
            g[i][i] = int(i as i64 + 1);
        }
        let m = FormMatrix::pencil(&f, &g).unwrap();
        let mut expect = BinaryForm::constant(int(1));
        for i in 0..4 {
            expect = expect.mul(&BinaryForm::from_ints(&[1, i + 1]));
        }
        assert_eq!(m.det_form(), expect);
    }

    #[test]
    fn scalar_identity_minors() {
        let mut f = zeros(3);
        for i in 0..3 {
            f[i][i] = int(1);
        }
        let m = FormMatrix::pencil(&f, &f).unwrap();
        let lm = BinaryForm::from_ints(&[1, 1]);
        assert_eq!(m.minors_gcd(2).unwrap(), lm.pow(2));
        assert!(m.minors_gcd(0).is_err());
        assert!(m.minors_gcd(4).is_err());
    }
}

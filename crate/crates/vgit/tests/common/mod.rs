//! Helpers shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use vgit::monomial::{Monomial, MonomialLattice};
use vgit::poly::parse_poly;
use vgit::rat::{int, Rat};
use vgit::segre::{pencil_from_forms, QuadricPencil};
use vgit::stability::TupleConfig;

pub struct Fixture {
    pub n: usize,
    pub symbol: String,
    pub f: String,
    pub g: String,
}

impl Fixture {
    pub fn pencil(&self) -> QuadricPencil {
        pencil_from_forms(&parse_poly(&self.f, self.n, 2).unwrap(), &parse_poly(&self.g, self.n, 2).unwrap(), self.n).unwrap()
    }
}

/// Rows of `tests/fixtures/segre_pencils.txt`: `n | symbol | f | g`.
pub fn segre_fixtures() -> Vec<Fixture> {
    let text = include_str!("../fixtures/segre_pencils.txt");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let parts: Vec<&str> = l.split('|').map(str::trim).collect();
            Fixture { n: parts[0].parse().unwrap(), symbol: parts[1].into(), f: parts[2].into(), g: parts[3].into() }
        })
        .collect()
}

/// Nonempty random subset of 0..len, each element kept with probability p.
pub fn subset(rng: &mut StdRng, len: usize, p: f64) -> Vec<usize> {
    loop {
        let v: Vec<usize> = (0..len).filter(|_| rng.gen_bool(p)).collect();
        if !v.is_empty() {
            return v;
        }
    }
}

/// Random supports for k degree-d forms and m hyperplanes; retries until a
/// pairwise-distinct tuple exists.
pub fn random_config(rng: &mut StdRng, n: usize, d: u32, k: usize, m: usize) -> TupleConfig {
    let lat = MonomialLattice::enumerate(n, d).unwrap();
    loop {
        let p = rng.gen_range(0.1..0.9);
        let ci: Vec<Vec<Monomial>> =
            (0..k).map(|_| subset(rng, lat.len(), p).into_iter().map(|i| lat.members()[i].clone()).collect()).collect();
        let hy: Vec<Vec<Monomial>> =
            (0..m).map(|_| subset(rng, n + 1, p).into_iter().map(|i| Monomial::var(i, n + 1)).collect()).collect();
        let cfg = TupleConfig::new(n, d, ci, hy).unwrap();
        if cfg.has_distinct_tuple() {
            return cfg;
        }
    }
}

/// Random rational in [0, 1] with denominator at most `den`.
pub fn random_unit(rng: &mut StdRng, den: i64) -> Rat {
    let q = rng.gen_range(1..=den);
    Rat::new(rng.gen_range(0..=q).into(), q.into())
}

/// Random rational in (0, 1].
pub fn random_open_unit(rng: &mut StdRng, den: i64) -> Rat {
    let q = rng.gen_range(1..=den);
    Rat::new(rng.gen_range(1..=q).into(), q.into())
}

/// Random invertible (n+1)×(n+1) integer matrix with entries in [−3, 3].
pub fn random_invertible(rng: &mut StdRng, size: usize) -> Vec<Vec<Rat>> {
    loop {
        let a: Vec<Vec<Rat>> = (0..size).map(|_| (0..size).map(|_| int(rng.gen_range(-3..=3))).collect()).collect();
        if vgit::lp::rank(&a) == size {
            return a;
        }
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

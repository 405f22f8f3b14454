//! Families of non-stable tuples attached to a one-parameter subgroup and
//! a choice of witnesses, their maximal representatives and annihilators.
//!
//! A family has one V-set and k−1 B-sets for the degree-d components and
//! one H-set per hyperplane. Sets are bitmasks over the monomial lattice
//! (index order of [`MonomialLattice`]) or over the variables.

use std::collections::HashMap;

use num::{Integer, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monomial::{as_text, Monomial, MonomialLattice};
use crate::rat::Rat;
use crate::stability::{hull_points, hull_position, centroid, centroid_criterion, CentroidVerdict, TupleConfig};
use crate::subgroup::FundamentalSet;

pub type Mask = u128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Σ < 0
    Strict,
    /// Σ ≤ 0
    Weak,
    /// Σ = 0
    Annihilator,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DestabFamily {
    pub kind: FamilyKind,
    pub lambda: Vec<i64>,
    #[serde(serialize_with = "as_text::list")]
    pub ci_witnesses: Vec<Monomial>,
    #[serde(serialize_with = "as_text::list")]
    pub hyp_witnesses: Vec<Monomial>,
    #[serde(serialize_with = "as_text::list")]
    pub v_set: Vec<Monomial>,
    #[serde(serialize_with = "as_text::nested")]
    pub b_sets: Vec<Vec<Monomial>>,
    #[serde(serialize_with = "as_text::nested")]
    pub h_sets: Vec<Vec<Monomial>>,
    #[serde(with = "crate::rat::vec_as_str")]
    pub t: Vec<Rat>,
}

impl DestabFamily {
    pub fn is_empty(&self) -> bool {
        self.v_set.is_empty()
    }

    /// The k degree-d components: V first, then the B-sets.
    pub fn ci_components(&self) -> Vec<Vec<Monomial>> {
        std::iter::once(self.v_set.clone()).chain(self.b_sets.iter().cloned()).collect()
    }

    /// The tuple whose supports are the full component sets.
    pub fn generic_member(&self) -> Result<TupleConfig> {
        let n = self.lambda.len() - 1;
        let d = self.ci_witnesses.first().map_or_else(
            || self.v_set.first().map_or(0, Monomial::degree),
            Monomial::degree,
        );
        TupleConfig::new(n, d, self.ci_components(), self.h_sets.clone())
    }

    pub fn key(&self) -> Result<FamilyKey> {
        let n = self.lambda.len() - 1;
        let d = self.v_set.first().map_or(0, Monomial::degree);
        let lattice = MonomialLattice::enumerate(n, d)?;
        let ci = self.ci_components().iter().map(|s| mask_of(&lattice, s)).collect();
        let h = self.h_sets.iter().map(|s| var_mask(s)).collect();
        Ok(FamilyKey::new(ci, h))
    }
}

/// Canonical form of a family: component masks, CI components sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyKey {
    pub ci: Vec<Mask>,
    pub h: Vec<Mask>,
}

impl FamilyKey {
    pub fn new(mut ci: Vec<Mask>, h: Vec<Mask>) -> Self {
        ci.sort_unstable();
        FamilyKey { ci, h }
    }

    pub fn size(&self) -> u32 {
        self.ci.iter().chain(&self.h).map(|m| m.count_ones()).sum()
    }

    /// Componentwise containment, allowing any matching of CI components.
    pub fn contained_in(&self, other: &FamilyKey) -> bool {
        if self.h.iter().zip(&other.h).any(|(a, b)| a & !b != 0) {
            return false;
        }
        fn assign(a: &[Mask], b: &[Mask], used: &mut Vec<bool>) -> bool {
            let Some((first, rest)) = a.split_first() else { return true };
            for j in 0..b.len() {
                if !used[j] && first & !b[j] == 0 {
                    used[j] = true;
                    if assign(rest, b, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        assign(&self.ci, &other.ci, &mut vec![false; other.ci.len()])
    }
}

impl FamilyKey {
    /// Tuple whose supports are the full component sets of the key.
    pub fn generic_member(&self, n: usize, d: u32) -> Result<TupleConfig> {
        let lattice = MonomialLattice::enumerate(n, d)?;
        TupleConfig::new(
            n,
            d,
            self.ci.iter().map(|&m| mask_monomials(&lattice, m)).collect(),
            self.h.iter().map(|&m| mask_vars(m, n + 1)).collect(),
        )
    }
}

fn mask_of(lattice: &MonomialLattice, s: &[Monomial]) -> Mask {
    s.iter().fold(0, |acc, m| acc | 1 << lattice.index_of(m).expect("monomial of the lattice"))
}

fn var_mask(s: &[Monomial]) -> Mask {
    s.iter().fold(0, |acc, m| acc | 1 << m.as_var().expect("degree-one monomial"))
}

fn mask_monomials(lattice: &MonomialLattice, mask: Mask) -> Vec<Monomial> {
    (0..lattice.len()).filter(|i| mask >> i & 1 == 1).map(|i| lattice.members()[i].clone()).collect()
}

fn mask_vars(mask: Mask, nvars: usize) -> Vec<Monomial> {
    (0..nvars).filter(|i| mask >> i & 1 == 1).map(|i| Monomial::var(i, nvars)).collect()
}

/// Slope scaled to integers: t_p = num[p] / den.
struct ScaledSlope {
    num: Vec<i128>,
    den: i128,
}

impl ScaledSlope {
    fn new(t: &[Rat]) -> Result<Self> {
        if t.iter().any(Signed::is_negative) {
            return Err(Error::pre("slope entries must be non-negative"));
        }
        let den = t.iter().fold(num::BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let big = |x: &num::BigInt| x.to_i128().ok_or_else(|| Error::pre("slope denominators too large"));
        let num = t.iter().map(|x| big(&(x.numer() * (&den / x.denom())))).collect::<Result<_>>()?;
        Ok(ScaledSlope { num, den: big(&den)? })
    }
}

/// Per-subgroup data: lattice pairings sorted into the λ-order.
pub(crate) struct LambdaData<'a> {
    pub(crate) w: &'a [i64],
    pub(crate) pw: Vec<i64>,
    rank: Vec<usize>,
    pub(crate) sorted_pw: Vec<i64>,
    pub(crate) prefix: Vec<Mask>,
}

impl<'a> LambdaData<'a> {
    pub(crate) fn new(lattice: &MonomialLattice, w: &'a [i64]) -> Self {
        let pw: Vec<i64> = lattice.members().iter().map(|m| m.pair(w)).collect();
        // increasing λ-order (pairing, then lex); the lattice is lex-descending, so a larger index is lex-smaller
        let mut order: Vec<usize> = (0..pw.len()).collect();
        order.sort_by(|&a, &b| pw[a].cmp(&pw[b]).then(b.cmp(&a)));
        let mut rank = vec![0; pw.len()];
        let mut prefix = vec![0; pw.len() + 1];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
            prefix[r + 1] = prefix[r] | 1 << i;
        }
        let sorted_pw = order.iter().map(|&i| pw[i]).collect();
        LambdaData { w, pw, rank, sorted_pw, prefix }
    }

    /// λ-order down-set of lattice index j.
    pub(crate) fn down_set(&self, j: usize) -> Mask {
        self.prefix[self.rank[j] + 1]
    }

    pub(crate) fn hyp_set(&self, x: usize) -> Mask {
        (0..self.w.len()).filter(|&y| self.w[y] <= self.w[x]).fold(0, |a, y| a | 1 << y)
    }

    fn hyp_level(&self, x: usize) -> Mask {
        (0..self.w.len()).filter(|&y| self.w[y] == self.w[x]).fold(0, |a, y| a | 1 << y)
    }

    /// {I : den·⟨I⟩ (<, ≤, =) −den·Σ⟨J⟩ − Σ num_p⟨x_p⟩}.
    fn v_set(&self, kind: FamilyKind, js: &[usize], xs: &[usize], slope: &ScaledSlope) -> Mask {
        let mut rhs: i128 = -slope.den * js.iter().map(|&j| self.pw[j] as i128).sum::<i128>();
        for (p, &x) in xs.iter().enumerate() {
            rhs -= slope.num[p] * self.w[x] as i128;
        }
        // largest integer pairing allowed, and the smallest for the annihilator
        let hi = match kind {
            FamilyKind::Weak | FamilyKind::Annihilator => Integer::div_floor(&rhs, &slope.den),
            FamilyKind::Strict => Integer::div_floor(&(rhs - 1), &slope.den),
        };
        if kind == FamilyKind::Annihilator && Integer::mod_floor(&rhs, &slope.den) != 0 {
            return 0;
        }
        let upto = self.sorted_pw.partition_point(|&p| (p as i128) <= hi);
        let from = if kind == FamilyKind::Annihilator {
            self.sorted_pw.partition_point(|&p| (p as i128) < hi)
        } else {
            0
        };
        self.prefix[upto] & !self.prefix[from]
    }

    /// Highest λ-pairing level inside a lattice mask.
    fn top_level(&self, mask: Mask) -> Mask {
        let Some(max) = (0..self.pw.len()).filter(|i| mask >> i & 1 == 1).map(|i| self.pw[i]).max() else {
            return 0;
        };
        (0..self.pw.len()).filter(|&i| mask >> i & 1 == 1 && self.pw[i] == max).fold(0, |a, i| a | 1 << i)
    }
}

pub(crate) fn check_shape(lattice: &MonomialLattice, k: usize) -> Result<()> {
    if lattice.len() > Mask::BITS as usize {
        return Err(Error::pre(format!("{} monomials exceed the {}-bit family masks", lattice.len(), Mask::BITS)));
    }
    if k == 0 {
        return Err(Error::pre("k must be positive"));
    }
    Ok(())
}

/// Builds one family from λ, k−1 degree-d witnesses and m variable witnesses.
pub fn build_family(
    kind: FamilyKind,
    lambda: &[i64],
    ci_witnesses: &[Monomial],
    hyp_witnesses: &[Monomial],
    t: &[Rat],
) -> Result<DestabFamily> {
    let n = lambda.len().checked_sub(1).ok_or_else(|| Error::pre("empty weight vector"))?;
    if hyp_witnesses.len() != t.len() {
        return Err(Error::Dimension { expected: hyp_witnesses.len(), got: t.len() });
    }
    let d = match ci_witnesses.first() {
        Some(m) => m.degree(),
        None => return Err(Error::pre("k = 1 families need the degree: use maximal_families")),
    };
    let lattice = MonomialLattice::enumerate(n, d)?;
    check_shape(&lattice, ci_witnesses.len() + 1)?;
    let js: Vec<usize> = ci_witnesses
        .iter()
        .map(|m| lattice.index_of(m).ok_or_else(|| Error::pre(format!("{m} is not a degree-{d} monomial in x0..x{n}"))))
        .collect::<Result<_>>()?;
    let mut seen = js.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != js.len() {
        return Err(Error::pre("degree-d witnesses must be pairwise distinct"));
    }
    let xs: Vec<usize> = hyp_witnesses
        .iter()
        .map(|m| m.as_var().filter(|&v| v <= n).ok_or_else(|| Error::pre(format!("{m} is not a variable of x0..x{n}"))))
        .collect::<Result<_>>()?;
    let slope = ScaledSlope::new(t)?;
    let ld = LambdaData::new(&lattice, lambda);
    let v = ld.v_set(kind, &js, &xs, &slope);
    let (b, h): (Vec<Mask>, Vec<Mask>) = if kind == FamilyKind::Annihilator {
        (js.iter().map(|&j| ld.top_level(ld.down_set(j))).collect(), xs.iter().map(|&x| ld.hyp_level(x)).collect())
    } else {
        (js.iter().map(|&j| ld.down_set(j)).collect(), xs.iter().map(|&x| ld.hyp_set(x)).collect())
    };
    let empty = v == 0;
    Ok(DestabFamily {
        kind,
        lambda: lambda.to_vec(),
        ci_witnesses: ci_witnesses.to_vec(),
        hyp_witnesses: hyp_witnesses.to_vec(),
        v_set: mask_monomials(&lattice, v),
        b_sets: if empty { vec![Vec::new(); b.len()] } else { b.iter().map(|&m| mask_monomials(&lattice, m)).collect() },
        h_sets: if empty { vec![Vec::new(); h.len()] } else { h.iter().map(|&m| mask_vars(m, n + 1)).collect() },
        t: t.to_vec(),
    })
}

/// Generator of a family: subgroup index, degree-d witness indices and
/// variable witnesses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Generator {
    lambda: usize,
    js: Vec<usize>,
    xs: Vec<usize>,
}

pub(crate) fn combinations(len: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, len: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            go(i + 1, len, r, cur, out);
            cur.pop();
        }
    }
    go(0, len, r, &mut cur, &mut out);
    out
}

/// One representative variable per distinct weight value.
pub(crate) fn level_reps(w: &[i64]) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    for (i, &x) in w.iter().enumerate() {
        if !reps.iter().any(|&r| w[r] == x) {
            reps.push(i);
        }
    }
    reps
}

fn cartesian(levels: &[usize], m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out.into_iter().flat_map(|v| levels.iter().map(move |&l| [v.clone(), vec![l]].concat())).collect();
    }
    out
}

/// Every distinct nonempty family over the fundamental set, each with the
/// least generator producing it.
pub fn all_families(
    fset: &FundamentalSet,
    d: u32,
    k: usize,
    t: &[Rat],
    kind: FamilyKind,
) -> Result<HashMap<FamilyKey, (Vec<i64>, Vec<usize>, Vec<usize>)>> {
    if kind == FamilyKind::Annihilator {
        return Err(Error::pre("annihilators are derived from weak families"));
    }
    let n = fset.n;
    let lattice = MonomialLattice::enumerate(n, d)?;
    check_shape(&lattice, k)?;
    let slope = ScaledSlope::new(t)?;
    let witness_sets = combinations(lattice.len(), k - 1);
    let m = t.len();
    let found: HashMap<FamilyKey, Generator> = fset
        .members
        .par_iter()
        .enumerate()
        .fold(HashMap::new, |mut acc: HashMap<FamilyKey, Generator>, (li, member)| {
            let ld = LambdaData::new(&lattice, member.weights());
            let hyp_choices = cartesian(&level_reps(member.weights()), m);
            for js in &witness_sets {
                let b: Vec<Mask> = js.iter().map(|&j| ld.down_set(j)).collect();
                for xs in &hyp_choices {
                    let v = ld.v_set(kind, js, xs, &slope);
                    if v == 0 {
                        continue;
                    }
                    let mut ci = b.clone();
                    ci.push(v);
                    let key = FamilyKey::new(ci, xs.iter().map(|&x| ld.hyp_set(x)).collect());
                    let gen = Generator { lambda: li, js: js.clone(), xs: xs.clone() };
                    match acc.get_mut(&key) {
                        Some(g) if *g <= gen => {}
                        Some(g) => *g = gen,
                        None => {
                            acc.insert(key, gen);
                        }
                    }
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, gen) in b {
                match a.get_mut(&key) {
                    Some(g) if *g <= gen => {}
                    Some(g) => *g = gen,
                    None => {
                        a.insert(key, gen);
                    }
                }
            }
            a
        });
    Ok(found
        .into_iter()
        .map(|(key, g)| (key, (fset.members[g.lambda].weights().to_vec(), g.js, g.xs)))
        .collect())
}

/// Keys not contained (up to CI permutation) in another key.
pub fn maximal_keys<K: Clone>(keys: impl IntoIterator<Item = (FamilyKey, K)>) -> Vec<(FamilyKey, K)> {
    let mut all: Vec<(FamilyKey, K)> = keys.into_iter().collect();
    all.sort_by(|a, b| b.0.size().cmp(&a.0.size()).then_with(|| a.0.cmp(&b.0)));
    let mut out: Vec<(FamilyKey, K)> = Vec::new();
    for (key, g) in all {
        if !out.iter().any(|(o, _)| key.contained_in(o)) {
            out.push((key, g));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Maximal families of the given kind at slope t, canonically ordered.
pub fn maximal_families(fset: &FundamentalSet, d: u32, k: usize, t: &[Rat], kind: FamilyKind) -> Result<Vec<DestabFamily>> {
    let all = all_families(fset, d, k, t, kind)?;
    let lattice = MonomialLattice::enumerate(fset.n, d)?;
    maximal_keys(all)
        .into_iter()
        .map(|(_, (w, js, xs))| from_generator(kind, &lattice, &w, &js, &xs, t))
        .collect()
}

fn from_generator(kind: FamilyKind, lattice: &MonomialLattice, w: &[i64], js: &[usize], xs: &[usize], t: &[Rat]) -> Result<DestabFamily> {
    let nvars = w.len();
    let hx: Vec<Monomial> = xs.iter().map(|&x| Monomial::var(x, nvars)).collect();
    if js.is_empty() {
        build_family_k1(kind, w, lattice, &hx, t)
    } else {
        let ci: Vec<Monomial> = js.iter().map(|&j| lattice.members()[j].clone()).collect();
        build_family(kind, w, &ci, &hx, t)
    }
}

/// Builds the families with the given keys at slope t, each from its least
/// generator. Keys produced by no generator are an error.
pub fn families_for_keys(
    fset: &FundamentalSet,
    d: u32,
    k: usize,
    t: &[Rat],
    kind: FamilyKind,
    keys: &[FamilyKey],
) -> Result<Vec<DestabFamily>> {
    if kind == FamilyKind::Annihilator {
        return Err(Error::pre("annihilators are derived from weak families"));
    }
    let lattice = MonomialLattice::enumerate(fset.n, d)?;
    check_shape(&lattice, k)?;
    let slope = ScaledSlope::new(t)?;
    let witness_sets = combinations(lattice.len(), k - 1);
    let m = t.len();
    let found: Vec<Option<Generator>> = fset
        .members
        .par_iter()
        .enumerate()
        .fold(
            || vec![None; keys.len()],
            |mut acc: Vec<Option<Generator>>, (li, member)| {
                let ld = LambdaData::new(&lattice, member.weights());
                let hyp_choices = cartesian(&level_reps(member.weights()), m);
                for js in &witness_sets {
                    let b: Vec<Mask> = js.iter().map(|&j| ld.down_set(j)).collect();
                    for xs in &hyp_choices {
                        let v = ld.v_set(kind, js, xs, &slope);
                        if v == 0 || !keys.iter().any(|key| key.ci.contains(&v)) {
                            continue;
                        }
                        let mut ci = b.clone();
                        ci.push(v);
                        let key = FamilyKey::new(ci, xs.iter().map(|&x| ld.hyp_set(x)).collect());
                        if let Some(i) = keys.iter().position(|k| *k == key) {
                            let gen = Generator { lambda: li, js: js.clone(), xs: xs.clone() };
                            if acc[i].as_ref().is_none_or(|g| gen < *g) {
                                acc[i] = Some(gen);
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![None; keys.len()],
            |a, b| a.into_iter().zip(b).map(|(x, y)| match (x, y) { (Some(x), Some(y)) => Some(x.min(y)), (x, y) => x.or(y) }).collect(),
        );
    found
        .into_iter()
        .map(|g| {
            let g = g.ok_or_else(|| Error::pre("family key not produced at this slope"))?;
            from_generator(kind, &lattice, fset.members[g.lambda].weights(), &g.js, &g.xs, t)
        })
        .collect()
}

fn build_family_k1(kind: FamilyKind, w: &[i64], lattice: &MonomialLattice, hx: &[Monomial], t: &[Rat]) -> Result<DestabFamily> {
    let slope = ScaledSlope::new(t)?;
    let ld = LambdaData::new(lattice, w);
    let xs: Vec<usize> = hx.iter().map(|m| m.as_var().unwrap()).collect();
    let v = ld.v_set(kind, &[], &xs, &slope);
    Ok(DestabFamily {
        kind,
        lambda: w.to_vec(),
        ci_witnesses: Vec::new(),
        hyp_witnesses: hx.to_vec(),
        v_set: mask_monomials(lattice, v),
        b_sets: Vec::new(),
        h_sets: xs.iter().map(|&x| mask_vars(ld.hyp_set(x), w.len())).collect(),
        t: t.to_vec(),
    })
}

/// Annihilator as the Cartesian product of top levels: the V-level
/// −Σ⟨J⟩ − Σt⟨x⟩, the top λ-level of each B-set and the weight level of
/// each hyperplane witness.
pub fn annihilator(fam: &DestabFamily) -> Result<DestabFamily> {
    if fam.kind == FamilyKind::Annihilator {
        return Ok(fam.clone());
    }
    if fam.ci_witnesses.is_empty() {
        let n = fam.lambda.len() - 1;
        let d = fam.v_set.first().map_or(0, Monomial::degree);
        let lattice = MonomialLattice::enumerate(n, d)?;
        let mut out = build_family_k1(FamilyKind::Annihilator, &fam.lambda, &lattice, &fam.hyp_witnesses, &fam.t)?;
        let ld = LambdaData::new(&lattice, &fam.lambda);
        let xs: Vec<usize> = fam.hyp_witnesses.iter().map(|m| m.as_var().unwrap()).collect();
        out.h_sets = xs.iter().map(|&x| mask_vars(ld.hyp_level(x), n + 1)).collect();
        return Ok(out);
    }
    build_family(FamilyKind::Annihilator, &fam.lambda, &fam.ci_witnesses, &fam.hyp_witnesses, &fam.t)
}

/// Annihilator as projections of the zero-weight tuples of the weak family:
/// a member of a component survives when it extends to a tuple, one from
/// each weak component, whose total weight is zero.
pub fn annihilator_by_projection(fam: &DestabFamily) -> Result<DestabFamily> {
    let weak = if fam.kind == FamilyKind::Weak {
        fam.clone()
    } else if fam.ci_witnesses.is_empty() {
        let n = fam.lambda.len() - 1;
        let d = fam.v_set.first().map_or(0, Monomial::degree);
        let lattice = MonomialLattice::enumerate(n, d)?;
        build_family_k1(FamilyKind::Weak, &fam.lambda, &lattice, &fam.hyp_witnesses, &fam.t)?
    } else {
        build_family(FamilyKind::Weak, &fam.lambda, &fam.ci_witnesses, &fam.hyp_witnesses, &fam.t)?
    };
    let w = &weak.lambda;
    let ci: Vec<Vec<(Monomial, Rat)>> = weak
        .ci_components()
        .into_iter()
        .map(|s| s.into_iter().map(|m| { let p = Rat::from_integer(m.pair(w).into()); (m, p) }).collect())
        .collect();
    let hy: Vec<Vec<(Monomial, Rat)>> = weak
        .h_sets
        .iter()
        .zip(&weak.t)
        .map(|(s, tp)| s.iter().map(|m| (m.clone(), tp * Rat::from_integer(m.pair(w).into()))).collect())
        .collect();
    let comps: Vec<&Vec<(Monomial, Rat)>> = ci.iter().chain(&hy).collect();
    // best achievable total from component i onwards
    let mut tail = vec![Rat::zero(); comps.len() + 1];
    for i in (0..comps.len()).rev() {
        let best = comps[i].iter().map(|x| x.1.clone()).max().unwrap_or_else(Rat::zero);
        tail[i] = &tail[i + 1] + best;
    }
    let mut keep: Vec<Vec<bool>> = comps.iter().map(|c| vec![false; c.len()]).collect();
    if comps.iter().all(|c| !c.is_empty()) && tail[0].is_zero() {
        // every member at its component maximum lies on a zero tuple
        for (i, c) in comps.iter().enumerate() {
            let best = &tail[i] - &tail[i + 1];
            for (j, x) in c.iter().enumerate() {
                keep[i][j] = x.1 == best;
            }
        }
    } else if comps.iter().all(|c| !c.is_empty()) && tail[0].is_positive() {
        // sums below the maximum: search for zero tuples directly
        let mut choice = vec![0usize; comps.len()];
        search_zero(&comps, 0, &Rat::zero(), &tail, &mut choice, &mut keep);
    }
    // a hyperplane at t = 0 adds nothing to the total, so only its λ-limit
    // (the top weight level) survives
    for (p, tp) in weak.t.iter().enumerate() {
        let i = ci.len() + p;
        if tp.is_zero() && keep[i].iter().any(|&k| k) {
            let top = weak.h_sets[p].iter().map(|m| m.pair(w)).max().unwrap();
            for (j, m) in weak.h_sets[p].iter().enumerate() {
                keep[i][j] = m.pair(w) == top;
            }
        }
    }
    let pick = |i: usize| -> Vec<Monomial> {
        comps[i].iter().zip(&keep[i]).filter(|(_, &k)| k).map(|(x, _)| x.0.clone()).collect()
    };
    let k = ci.len();
    let v_set = pick(0);
    let empty = v_set.is_empty();
    Ok(DestabFamily {
        kind: FamilyKind::Annihilator,
        lambda: weak.lambda.clone(),
        ci_witnesses: weak.ci_witnesses.clone(),
        hyp_witnesses: weak.hyp_witnesses.clone(),
        v_set,
        b_sets: (1..k).map(|i| if empty { Vec::new() } else { pick(i) }).collect(),
        h_sets: (k..comps.len()).map(|i| if empty { Vec::new() } else { pick(i) }).collect(),
        t: weak.t.clone(),
    })
}

fn search_zero(
    comps: &[&Vec<(Monomial, Rat)>],
    i: usize,
    acc: &Rat,
    tail: &[Rat],
    choice: &mut Vec<usize>,
    keep: &mut [Vec<bool>],
) {
    if i == comps.len() {
        if acc.is_zero() {
            for (c, &j) in choice.iter().enumerate() {
                keep[c][j] = true;
            }
        }
        return;
    }
    for (j, x) in comps[i].iter().enumerate() {
        let next = acc + &x.1;
        if (&next + &tail[i + 1]).is_negative() {
            continue;
        }
        choice[i] = j;
        search_zero(comps, i + 1, &next, tail, choice, keep);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyVerdict {
    StrictlySemistable,
    Unstable,
}

/// Centroid criterion applied to the generic member. A vanishing wedge
/// counts as unstable.
pub fn classify_family(fam: &DestabFamily) -> Result<FamilyVerdict> {
    if fam.is_empty() {
        return Err(Error::pre("empty family"));
    }
    let cfg = fam.generic_member()?;
    match centroid_criterion(&cfg, &fam.t) {
        Ok(CentroidVerdict::Unstable) | Err(Error::Degenerate(_)) => Ok(FamilyVerdict::Unstable),
        Ok(_) => Ok(FamilyVerdict::StrictlySemistable),
        Err(e) => Err(e),
    }
}

/// Whether the generic member of a family is torus-polystable: the
/// centroid is a strictly positive combination of all its points.
pub fn is_torus_polystable(fam: &DestabFamily) -> Result<bool> {
    if fam.is_empty() {
        return Ok(false);
    }
    let cfg = fam.generic_member()?;
    if !cfg.has_distinct_tuple() {
        return Ok(false);
    }
    let pts = hull_points(&cfg, &fam.t)?;
    let c = centroid(cfg.n, cfg.d, cfg.k(), cfg.m(), &fam.t)?;
    Ok(hull_position(&pts, &c).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use crate::subgroup::fundamental_set;

    fn mono(s: &str, nv: usize) -> Monomial {
        Monomial::parse(s, nv).unwrap()
    }

    fn names(s: &[Monomial]) -> Vec<String> {
        s.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn weak_family_everything() {
        let f = build_family(FamilyKind::Weak, &[1, 1, -1, -1], &[mono("x2*x3", 4)], &[mono("x2", 4)], &[rat(1, 2)]).unwrap();
        assert_eq!(f.v_set.len(), 10);
        let f = build_family(FamilyKind::Weak, &[1, 1, -1, -1], &[mono("x0^2", 4)], &[mono("x0", 4)], &[int(0)]).unwrap();
        assert_eq!(f.b_sets[0].len(), 10);
    }

    #[test]
    fn strict_and_weak_thresholds() {
        // λ = (1,1,−1,−1), J = x0^2 (weight 2): V = pairing ≤ −2 or < −2
        let w = [1, 1, -1, -1];
        let j = [mono("x0^2", 4)];
        let weak = build_family(FamilyKind::Weak, &w, &j, &[], &[]).unwrap();
        assert_eq!(names(&weak.v_set), ["x2^2", "x2*x3", "x3^2"]);
        let strict = build_family(FamilyKind::Strict, &w, &j, &[], &[]).unwrap();
        assert!(strict.is_empty());
        let ann = annihilator(&weak).unwrap();
        assert_eq!(names(&ann.v_set), ["x2^2", "x2*x3", "x3^2"]);
        assert_eq!(names(&ann.b_sets[0]), ["x0^2", "x0*x1", "x1^2"]);
    }

    #[test]
    fn witnesses_must_differ() {
        let j = [mono("x0^2", 4), mono("x0^2", 4)];
        assert!(build_family(FamilyKind::Weak, &[1, 1, -1, -1], &j, &[], &[]).is_err());
    }

    #[test]
    fn quadrangle_annihilator() {
        // λ = (1,1,−1,−1) with J = x0*x2 at t = 0: the zero level is the
        // four mixed monomials in both components.
        let w = [1, 1, -1, -1];
        let weak = build_family(FamilyKind::Weak, &w, &[mono("x0*x2", 4)], &[], &[]).unwrap();
        let ann = annihilator(&weak).unwrap();
        assert_eq!(names(&ann.v_set), ["x0*x2", "x0*x3", "x1*x2", "x1*x3"]);
        assert_eq!(ann.b_sets[0], ann.v_set);
        assert_eq!(annihilator_by_projection(&weak).unwrap(), ann);
        assert!(is_torus_polystable(&ann).unwrap());
    }

    #[test]
    fn containment_up_to_swap() {
        let a = FamilyKey::new(vec![0b011, 0b100], vec![]);
        let b = FamilyKey::new(vec![0b110, 0b011], vec![]);
        assert!(a.contained_in(&b));
        let c = FamilyKey::new(vec![0b111, 0b001], vec![]);
        assert!(!b.contained_in(&c));
    }

    #[test]
    fn strict_with_nothing_negative() {
        let p = fundamental_set(1, 1, 1, 0).unwrap();
        // λ = (1,−1) on lines: strict families need ⟨I⟩ < 0, which x1 has.
        let fams = maximal_families(&p, 1, 1, &[], FamilyKind::Strict).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(names(&fams[0].v_set), ["x1"]);
    }

    #[test]
    fn p3_pencils() {
        let p = fundamental_set(3, 2, 2, 0).unwrap();
        let weak = maximal_families(&p, 2, 2, &[], FamilyKind::Weak).unwrap();
        assert_eq!(weak.len(), 5);
        let strict = maximal_families(&p, 2, 2, &[], FamilyKind::Strict).unwrap();
        assert_eq!(strict.len(), 5);
        for f in &weak {
            assert_eq!(classify_family(f).unwrap(), FamilyVerdict::StrictlySemistable);
            let a = annihilator(f).unwrap();
            assert_eq!(a, annihilator_by_projection(f).unwrap());
        }
    }
}

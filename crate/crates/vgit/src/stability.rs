//! Hilbert–Mumford weights of tuples (f₁ ∧ … ∧ f_k, h₁, …, h_m), torus
//! stability, stability intervals and the centroid criterion.
//!
//! Torus verdicts quantify over every coordinate permutation of every
//! member of the fundamental set. The fundamental set lists normalized
//! subgroups only, which is enough once coordinates have been chosen, but
//! a fixed support configuration must be tested against the whole Weyl
//! orbit to decide stability for the diagonal torus.

use std::collections::{BTreeSet, HashMap};

use num::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::matching::max_distinct_sum;
use crate::monomial::{Monomial, MonomialLattice};
use crate::poly::PolyExpr;
use crate::rat::{int, Rat};
use crate::subgroup::{next_permutation, FundamentalSet};

/// Slope vector t = (t₁, …, t_m).
pub type Slope = Vec<Rat>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleConfig {
    pub n: usize,
    pub d: u32,
    ci: Vec<Vec<Monomial>>,
    hyp: Vec<Vec<Monomial>>,
    lattice: MonomialLattice,
    ci_idx: Vec<Vec<usize>>,
    hyp_vars: Vec<Vec<usize>>,
}

impl TupleConfig {
    /// Support-only configuration. Checks shapes and degrees; the
    /// distinct-tuple condition is checked where weights are evaluated.
    pub fn new(n: usize, d: u32, ci: Vec<Vec<Monomial>>, hyp: Vec<Vec<Monomial>>) -> Result<Self> {
        if ci.is_empty() {
            return Err(Error::pre("at least one degree-d component is needed"));
        }
        let lattice = MonomialLattice::enumerate(n, d)?;
        let mut ci_idx = Vec::new();
        for (i, s) in ci.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::pre(format!("support of f{} is empty", i + 1)));
            }
            let mut idx = Vec::new();
            for x in s {
                if x.nvars() != n + 1 || x.degree() != d {
                    return Err(Error::pre(format!("{x} is not a degree-{d} monomial in x0..x{n}")));
                }
                idx.push(lattice.index_of(x).unwrap());
            }
            idx.sort_unstable();
            idx.dedup();
            ci_idx.push(idx);
        }
        let mut hyp_vars = Vec::new();
        for (p, s) in hyp.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::pre(format!("support of h{} is empty", p + 1)));
            }
            let mut vars = Vec::new();
            for x in s {
                match x.as_var() {
                    Some(v) if x.nvars() == n + 1 => vars.push(v),
                    _ => return Err(Error::pre(format!("{x} is not a variable of x0..x{n}"))),
                }
            }
            vars.sort_unstable();
            vars.dedup();
            hyp_vars.push(vars);
        }
        let ci = ci_idx.iter().map(|s| s.iter().map(|&i| lattice.members()[i].clone()).collect()).collect();
        let hyp = hyp_vars.iter().map(|s| s.iter().map(|&v| Monomial::var(v, n + 1)).collect()).collect();
        Ok(TupleConfig { n, d, ci, hyp, lattice, ci_idx, hyp_vars })
    }

    /// Configuration given by polynomial supports.
    pub fn from_polys(n: usize, fs: &[PolyExpr], hs: &[PolyExpr]) -> Result<Self> {
        let d = fs
            .first()
            .and_then(PolyExpr::degree)
            .ok_or_else(|| Error::pre("first polynomial is zero or inhomogeneous"))?;
        Self::new(n, d, fs.iter().map(PolyExpr::support).collect(), hs.iter().map(PolyExpr::support).collect())
    }

    pub fn k(&self) -> usize {
        self.ci.len()
    }

    pub fn m(&self) -> usize {
        self.hyp.len()
    }

    pub fn ci_supports(&self) -> &[Vec<Monomial>] {
        &self.ci
    }

    pub fn hyp_supports(&self) -> &[Vec<Monomial>] {
        &self.hyp
    }

    /// Whether some choice of pairwise-distinct monomials, one per
    /// component, exists (otherwise the wedge vanishes).
    pub fn has_distinct_tuple(&self) -> bool {
        let zero = vec![0i64; self.lattice.len()];
        self.ci_max(&zero).is_some()
    }

    fn check_wedge(&self) -> Result<()> {
        if self.has_distinct_tuple() {
            Ok(())
        } else {
            Err(Error::degenerate("no tuple of pairwise-distinct monomials: the wedge vanishes"))
        }
    }

    fn lattice_pairings(&self, w: &[i64]) -> Vec<i64> {
        self.lattice.members().iter().map(|m| m.pair(w)).collect()
    }

    /// Max of Σ pairings over distinct tuples, given lattice pairings.
    fn ci_max(&self, pair: &[i64]) -> Option<i64> {
        match self.ci_idx.len() {
            1 => self.ci_idx[0].iter().map(|&i| pair[i]).max(),
            2 => pair_max(&self.ci_idx[0], &self.ci_idx[1], pair),
            _ => {
                let slots: Vec<Vec<(usize, i64)>> =
                    self.ci_idx.iter().map(|s| s.iter().map(|&i| (i, pair[i])).collect()).collect();
                max_distinct_sum(&slots)
            }
        }
    }

    fn hyp_max(&self, w: &[i64]) -> Vec<i64> {
        self.hyp_vars.iter().map(|s| s.iter().map(|&v| w[v]).max().unwrap()).collect()
    }

    fn check_dim(&self, w: &[i64]) -> Result<()> {
        if w.len() != self.n + 1 {
            return Err(Error::Dimension { expected: self.n + 1, got: w.len() });
        }
        Ok(())
    }

    fn check_slope(&self, t: &[Rat]) -> Result<()> {
        if t.len() != self.m() {
            return Err(Error::Dimension { expected: self.m(), got: t.len() });
        }
        if t.iter().any(Signed::is_negative) {
            return Err(Error::pre("slope entries must be non-negative"));
        }
        Ok(())
    }
}

fn pair_max(a: &[usize], b: &[usize], pair: &[i64]) -> Option<i64> {
    let top = |s: &[usize]| {
        let mut best: Option<(usize, i64)> = None;
        let mut second: Option<(usize, i64)> = None;
        for &i in s {
            let v = pair[i];
            if best.is_none_or(|x| v > x.1) {
                second = best;
                best = Some((i, v));
            } else if second.is_none_or(|x| v > x.1) {
                second = Some((i, v));
            }
        }
        (best, second)
    };
    let (a1, a2) = top(a);
    let (b1, b2) = top(b);
    let (a1, b1) = (a1?, b1?);
    if a1.0 != b1.0 {
        return Some(a1.1 + b1.1);
    }
    match (a2.map(|x| x.1 + b1.1), b2.map(|x| a1.1 + x.1)) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

/// μ(f₁ ∧ … ∧ f_k, λ): the largest Σ⟨Iᵢ, λ⟩ over pairwise-distinct Iᵢ ∈ Supp(fᵢ).
pub fn mu_ci(cfg: &TupleConfig, w: &[i64]) -> Result<i64> {
    cfg.check_dim(w)?;
    cfg.ci_max(&cfg.lattice_pairings(w))
        .ok_or_else(|| Error::degenerate("no tuple of pairwise-distinct monomials: the wedge vanishes"))
}

/// μ(H_p, λ) for each hyperplane.
pub fn mu_hyp(cfg: &TupleConfig, w: &[i64]) -> Result<Vec<i64>> {
    cfg.check_dim(w)?;
    Ok(cfg.hyp_max(w))
}

/// μ_t = μ_ci + Σ t_p μ(H_p, λ).
pub fn mu_t(cfg: &TupleConfig, w: &[i64], t: &[Rat]) -> Result<Rat> {
    cfg.check_slope(t)?;
    let a = mu_ci(cfg, w)?;
    let b = mu_hyp(cfg, w)?;
    Ok(combine(a, &b, t))
}

fn combine(a: i64, b: &[i64], t: &[Rat]) -> Rat {
    let mut v = int(a);
    for (bp, tp) in b.iter().zip(t) {
        if *bp != 0 {
            v += tp * int(*bp);
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorusClass {
    TorusStable,
    TorusStrictlySemistable,
    TorusUnstable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub class: TorusClass,
    /// Torus weights (not necessarily sorted) realizing the minimum;
    /// present unless the class is stable.
    pub witness: Option<Vec<i64>>,
    #[serde(with = "crate::rat::as_str")]
    pub min_weight: Rat,
}

/// The distinct values (μ_ci, μ(H_p)) over the Weyl orbit of the
/// fundamental set, each with its lexicographically least witness.
#[derive(Clone, Debug)]
pub struct TorusProfile {
    entries: Vec<(i64, Vec<i64>, Vec<i64>)>,
}

impl TorusProfile {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn classify(&self, t: &[Rat]) -> StabilityVerdict {
        let mut best: Option<(Rat, &Vec<i64>)> = None;
        for (a, b, w) in &self.entries {
            let v = combine(*a, b, t);
            let take = match &best {
                None => true,
                Some((bv, bw)) => v < *bv || (v == *bv && w < *bw),
            };
            if take {
                best = Some((v, w));
            }
        }
        let (min, w) = best.expect("fundamental set is never empty");
        let class = if min.is_positive() {
            TorusClass::TorusStable
        } else if min.is_zero() {
            TorusClass::TorusStrictlySemistable
        } else {
            TorusClass::TorusUnstable
        };
        let witness = (class != TorusClass::TorusStable).then(|| w.clone());
        StabilityVerdict { class, witness, min_weight: min }
    }

    /// The set of t ∈ [0, upper] with μ_t ≥ 0 for all entries (m = 1).
    pub fn interval(&self, upper: &Rat) -> Option<(Rat, Rat)> {
        let mut lo = Rat::zero();
        let mut hi = upper.clone();
        for (a, b, _) in &self.entries {
            let a = int(*a);
            let b = int(b[0]);
            if b.is_zero() {
                if a.is_negative() {
                    return None;
                }
            } else if b.is_positive() {
                let t0 = -&a / &b;
                if t0 > lo {
                    lo = t0;
                }
            } else {
                let t1 = -&a / &b;
                if t1 < hi {
                    hi = t1;
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Evaluates the configuration over all permutations of all members.
pub fn torus_profile(cfg: &TupleConfig, fset: &FundamentalSet) -> Result<TorusProfile> {
    cfg.check_wedge()?;
    if fset.n != cfg.n {
        return Err(Error::pre("fundamental set is for a different n"));
    }
    let mut map: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
    let mut key = Vec::with_capacity(cfg.m() + 1);
    let mut pair = vec![0i64; cfg.lattice.len()];
    for member in &fset.members {
        let mut w = member.weights().to_vec();
        w.sort_unstable();
        loop {
            for (slot, m) in pair.iter_mut().zip(cfg.lattice.members()) {
                *slot = m.pair(&w);
            }
            let a = cfg.ci_max(&pair).expect("wedge checked");
            key.clear();
            key.push(a);
            for s in &cfg.hyp_vars {
                key.push(s.iter().map(|&v| w[v]).max().unwrap());
            }
            match map.get_mut(key.as_slice()) {
                Some(best) => {
                    if w < *best {
                        best.clone_from(&w);
                    }
                }
                None => {
                    map.insert(key.clone(), w.clone());
                }
            }
            if !next_permutation(&mut w) {
                break;
            }
        }
    }
    let mut entries: Vec<(i64, Vec<i64>, Vec<i64>)> =
        map.into_iter().map(|(k, w)| (k[0], k[1..].to_vec(), w)).collect();
    entries.sort();
    Ok(TorusProfile { entries })
}

/// Torus verdict: sign of the minimum of μ_t over the orbit of P.
pub fn classify_torus(cfg: &TupleConfig, t: &[Rat], fset: &FundamentalSet) -> Result<StabilityVerdict> {
    cfg.check_slope(t)?;
    Ok(torus_profile(cfg, fset)?.classify(t))
}

/// Upper end kd/n of the slope range.
pub fn slope_bound(n: usize, d: u32, k: usize) -> Rat {
    Rat::new((k as i64 * d as i64).into(), (n as i64).into())
}

/// Interval of t ∈ [0, kd/n] on which the pair is torus-semistable.
pub fn stability_interval(cfg: &TupleConfig, fset: &FundamentalSet) -> Result<Option<(Rat, Rat)>> {
    if cfg.m() != 1 {
        return Err(Error::pre("stability intervals need exactly one hyperplane"));
    }
    Ok(torus_profile(cfg, fset)?.interval(&slope_bound(cfg.n, cfg.d, cfg.k())))
}

/// The point with every entry (kd + Σt_p)/(n + 1).
pub fn centroid(n: usize, d: u32, k: usize, m: usize, t: &[Rat]) -> Result<Vec<Rat>> {
    if t.len() != m {
        return Err(Error::Dimension { expected: m, got: t.len() });
    }
    let total: Rat = int(k as i64 * d as i64) + t.iter().sum::<Rat>();
    Ok(vec![total / int(n as i64 + 1); n + 1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CentroidVerdict {
    Stable,
    Semistable,
    Unstable,
}

/// Points A(I₁, …, I_k, x_{l₁}, …, x_{l_m}) over distinct tuples and all
/// hyperplane-support variables.
pub fn hull_points(cfg: &TupleConfig, t: &[Rat]) -> Result<Vec<Vec<Rat>>> {
    cfg.check_slope(t)?;
    cfg.check_wedge()?;
    let mut sums: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut used = Vec::new();
    collect_sums(cfg, 0, &mut used, &mut vec![0i64; cfg.n + 1], &mut sums);
    let mut points: BTreeSet<Vec<Rat>> = sums.into_iter().map(|s| s.into_iter().map(int).collect()).collect();
    for (p, vars) in cfg.hyp_vars.iter().enumerate() {
        let mut next = BTreeSet::new();
        for pt in &points {
            for &v in vars {
                let mut q = pt.clone();
                q[v] += &t[p];
                next.insert(q);
            }
        }
        points = next;
    }
    Ok(points.into_iter().collect())
}

fn collect_sums(cfg: &TupleConfig, i: usize, used: &mut Vec<usize>, acc: &mut Vec<i64>, out: &mut BTreeSet<Vec<i64>>) {
    if i == cfg.ci_idx.len() {
        out.insert(acc.clone());
        return;
    }
    for &j in &cfg.ci_idx[i] {
        if used.contains(&j) {
            continue;
        }
        used.push(j);
        let e = cfg.lattice.members()[j].exps();
        for (a, &x) in acc.iter_mut().zip(e) {
            *a += x as i64;
        }
        collect_sums(cfg, i + 1, used, acc, out);
        for (a, &x) in acc.iter_mut().zip(e) {
            *a -= x as i64;
        }
        used.pop();
    }
}

/// Decides whether `c` lies in conv(points) and, if so, whether it is a
/// strictly positive combination of all of them.
pub fn hull_position(points: &[Vec<Rat>], c: &[Rat]) -> (bool, bool) {
    let np = points.len();
    let dim = c.len();
    // variables s_1..s_np, ε ; w_i = s_i + ε
    let mut a = Vec::with_capacity(dim + 1);
    let mut b = Vec::with_capacity(dim + 1);
    for r in 0..dim {
        let mut row: Vec<Rat> = points.iter().map(|p| p[r].clone()).collect();
        row.push(points.iter().map(|p| p[r].clone()).sum());
        a.push(row);
        b.push(c[r].clone());
    }
    let mut conv = vec![int(1); np];
    conv.push(int(np as i64));
    a.push(conv);
    b.push(int(1));
    let mut cost = vec![Rat::zero(); np];
    cost.push(int(1));
    match lp::maximize(&cost, &a, &b) {
        LpOutcome::Infeasible => (false, false),
        LpOutcome::Unbounded => unreachable!("convex weights are bounded"),
        LpOutcome::Optimal { value, .. } => (true, value.is_positive()),
    }
}

/// Centroid criterion: semistable iff the centroid lies in the hull of the
/// tuple's points; stable iff it lies in the interior relative to the
/// hyperplane Σzᵢ = kd + Σt.
pub fn centroid_criterion(cfg: &TupleConfig, t: &[Rat]) -> Result<CentroidVerdict> {
    let points = hull_points(cfg, t)?;
    let c = centroid(cfg.n, cfg.d, cfg.k(), cfg.m(), t)?;
    let (inside, strictly) = hull_position(&points, &c);
    if !inside {
        return Ok(CentroidVerdict::Unstable);
    }
    let full = lp::affine_dim(&points) == Some(cfg.n);
    Ok(if strictly && full { CentroidVerdict::Stable } else { CentroidVerdict::Semistable })
}

/// Searches for instability in random coordinates. Only ever reports
/// instability: supports in new coordinates give an upper bound for the
/// weight, so a negative value there is conclusive.
pub fn probe_unstable(
    n: usize,
    fs: &[PolyExpr],
    hs: &[PolyExpr],
    t: &[Rat],
    fset: &FundamentalSet,
    trials: usize,
    seed: u64,
) -> Result<Option<(Vec<Vec<Rat>>, StabilityVerdict)>> {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let a: Vec<Vec<Rat>> =
            (0..=n).map(|_| (0..=n).map(|_| int(rng.gen_range(-3..=3))).collect()).collect();
        if lp::rank(&a) != n + 1 {
            continue;
        }
        let tf: Vec<PolyExpr> = fs.iter().map(|f| f.transform(&a)).collect();
        let th: Vec<PolyExpr> = hs.iter().map(|h| h.transform(&a)).collect();
        if tf.iter().chain(&th).any(PolyExpr::is_zero) {
            continue;
        }
        let cfg = TupleConfig::from_polys(n, &tf, &th)?;
        if !cfg.has_distinct_tuple() {
            continue;
        }
        let v = classify_torus(&cfg, t, fset)?;
        if v.class == TorusClass::TorusUnstable {
            return Ok(Some((a, v)));
        }
    }
    Ok(None)
}

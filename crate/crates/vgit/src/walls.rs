//! Candidate walls for one hyperplane, the family sweep across a list of
//! slopes, false-wall pruning and the wall/chamber decomposition.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use num::{Integer, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{
    annihilator, check_shape, classify_family, combinations, families_for_keys, is_torus_polystable, level_reps, DestabFamily,
    FamilyKey, FamilyKind, FamilyVerdict, LambdaData, Mask,
};
use crate::monomial::MonomialLattice;
use crate::rat::{int, midpoint, Rat};
use crate::segre::{generic_pencil, segre_symbol};
use crate::stability::slope_bound;
use crate::subgroup::{fundamental_set, FundamentalSet};

/// All t = −Σ⟨Iᵢ,λ⟩/⟨x_j,λ⟩ in (0, kd/n] over λ ∈ P, pairwise-distinct
/// degree-d tuples and variables of nonzero weight, together with 0.
pub fn candidate_walls(fset: &FundamentalSet, d: u32, k: usize) -> Result<Vec<Rat>> {
    let n = fset.n;
    let lattice = MonomialLattice::enumerate(n, d)?;
    check_shape(&lattice, k)?;
    if k > lattice.len() {
        return Err(Error::pre("more components than monomials"));
    }
    let (bn, bd) = ((k as i64) * d as i64, n as i64);
    let found: HashSet<(i64, i64)> = fset
        .members
        .par_iter()
        .fold(HashSet::new, |mut acc, member| {
            let w = member.weights();
            let pw: Vec<i64> = lattice.members().iter().map(|m| m.pair(w)).collect();
            for s in distinct_sums(&pw, k) {
                for &x in w {
                    if x == 0 {
                        continue;
                    }
                    let (mut p, mut q) = (-s, x);
                    if q < 0 {
                        p = -p;
                        q = -q;
                    }
                    if p <= 0 || p * bd > bn * q {
                        continue;
                    }
                    let g = p.gcd(&q);
                    acc.insert((p / g, q / g));
                }
            }
            acc
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let mut out: Vec<Rat> = found.into_iter().map(|(p, q)| Rat::new(p.into(), q.into())).collect();
    out.push(int(0));
    out.sort();
    Ok(out)
}

/// Sums of k entries at pairwise-distinct positions.
fn distinct_sums(values: &[i64], k: usize) -> Vec<i64> {
    // reach[c] = sums of c entries among those seen so far
    let mut reach: Vec<HashSet<i64>> = vec![HashSet::new(); k + 1];
    reach[0].insert(0);
    for &v in values {
        for c in (1..=k).rev() {
            let add: Vec<i64> = reach[c - 1].iter().map(|s| s + v).collect();
            reach[c].extend(add);
        }
    }
    let mut out: Vec<i64> = reach[k].iter().copied().collect();
    out.sort_unstable();
    out
}

/// Every distinct family (one hyperplane) at each slope of a sorted list,
/// computed in one pass: for fixed λ and witnesses the V-set is a step
/// function of t, so each family is recorded with the set of list
/// positions where it occurs.
pub struct FamilySweep {
    pub points: Vec<Rat>,
    pub kind: FamilyKind,
    keys: Vec<(FamilyKey, FixedBitSet)>,
}

impl FamilySweep {
    pub fn new(fset: &FundamentalSet, d: u32, k: usize, points: &[Rat], kind: FamilyKind) -> Result<Self> {
        if kind == FamilyKind::Annihilator {
            return Err(Error::pre("annihilators are derived from weak families"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) || points.first().is_some_and(Signed::is_negative) {
            return Err(Error::pre("sweep points must be non-negative and strictly increasing"));
        }
        let lattice = MonomialLattice::enumerate(fset.n, d)?;
        check_shape(&lattice, k)?;
        let pts: Vec<(i128, i128)> = points
            .iter()
            .map(|r| match (r.numer().to_i128(), r.denom().to_i128()) {
                (Some(p), Some(q)) => Ok((p, q)),
                _ => Err(Error::pre("sweep point too large")),
            })
            .collect::<Result<_>>()?;
        let len = pts.len();
        let strict = kind == FamilyKind::Strict;
        let witness_sets = combinations(lattice.len(), k - 1);
        // number of points p with p ≤ a/b (or < a/b), b > 0
        let count_le = |a: i128, b: i128, or_equal: bool| {
            pts.partition_point(|&(p, q)| if or_equal { p * b <= a * q } else { p * b < a * q })
        };
        let map: HashMap<FamilyKey, FixedBitSet> = fset
            .members
            .par_iter()
            .fold(HashMap::new, |mut acc: HashMap<FamilyKey, FixedBitSet>, member| {
                let w = member.weights();
                let ld = LambdaData::new(&lattice, w);
                let mut vals: Vec<i64> = Vec::new();
                let mut ends: Vec<usize> = Vec::new();
                for (i, &p) in ld.sorted_pw.iter().enumerate() {
                    if vals.last() == Some(&p) {
                        *ends.last_mut().unwrap() = i + 1;
                    } else {
                        vals.push(p);
                        ends.push(i + 1);
                    }
                }
                let levels = vals.len();
                let level_mask = |r: usize| if r == 0 { 0 } else { ld.prefix[ends[r - 1]] };
                let mut bounds = vec![0usize; levels];
                for js in &witness_sets {
                    let s: i64 = js.iter().map(|&j| ld.pw[j]).sum();
                    let b: Vec<Mask> = js.iter().map(|&j| ld.down_set(j)).collect();
                    for x in level_reps(w) {
                        let wx = w[x] as i128;
                        let h = ld.hyp_set(x);
                        let mut add = |r: usize, lo: usize, hi: usize| {
                            if r == 0 || lo >= hi {
                                return;
                            }
                            let mut ci = b.clone();
                            ci.push(level_mask(r));
                            let key = FamilyKey::new(ci, vec![h]);
                            acc.entry(key).or_insert_with(|| FixedBitSet::with_capacity(len)).insert_range(lo..hi);
                        };
                        if wx == 0 {
                            let r = vals.iter().filter(|&&v| if strict { v + s < 0 } else { v + s <= 0 }).count();
                            add(r, 0, len);
                        } else if wx > 0 {
                            // level l present at point i iff i < bounds[l]; bounds non-increasing
                            for (l, &v) in vals.iter().enumerate() {
                                bounds[l] = count_le(-(v + s) as i128, wx, !strict);
                            }
                            for r in 0..=levels {
                                let lo = if r < levels { bounds[r] } else { 0 };
                                let hi = if r > 0 { bounds[r - 1] } else { len };
                                add(r, lo, hi);
                            }
                        } else {
                            // level l present at point i iff i ≥ bounds[l]; bounds non-decreasing
                            for (l, &v) in vals.iter().enumerate() {
                                bounds[l] = count_le((v + s) as i128, -wx, strict);
                            }
                            for r in 1..=levels {
                                let hi = if r < levels { bounds[r] } else { len };
                                add(r, bounds[r - 1], hi);
                            }
                        }
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (key, bits) in b {
                    match a.get_mut(&key) {
                        Some(x) => x.union_with(&bits),
                        None => {
                            a.insert(key, bits);
                        }
                    }
                }
                a
            });
        let mut keys: Vec<(FamilyKey, FixedBitSet)> = map.into_iter().collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(FamilySweep { points: points.to_vec(), kind, keys })
    }

    /// Number of distinct families over all points.
    pub fn distinct(&self) -> usize {
        self.keys.len()
    }

    pub fn families_at(&self, i: usize) -> Vec<FamilyKey> {
        self.keys.iter().filter(|(_, b)| b.contains(i)).map(|(k, _)| k.clone()).collect()
    }

    pub fn maximal_at(&self, i: usize) -> Vec<FamilyKey> {
        crate::families::maximal_keys(self.families_at(i).into_iter().map(|k| (k, ()))).into_iter().map(|(k, _)| k).collect()
    }
}

/// Upper end of the slope range for one hyperplane.
pub fn slope_range(n: usize, d: u32, k: usize) -> Rat {
    slope_bound(n, d, k)
}

/// Which comparison let a wall be dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneRule {
    /// maximal families identical to the adjacent chambers'
    Identical,
    /// every chamber maximal family lies in a wall maximal family
    Contained,
}

/// How a wall's maximal families compare to a chamber's.
pub fn compare_maximal(wall: &[FamilyKey], chamber: &[FamilyKey]) -> Option<PruneRule> {
    if wall == chamber {
        Some(PruneRule::Identical)
    } else if chamber.iter().all(|c| wall.iter().any(|w| c.contained_in(w))) {
        Some(PruneRule::Contained)
    } else {
        None
    }
}

/// Maximal weak and strict families at one slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalPair {
    pub weak: Vec<FamilyKey>,
    pub strict: Vec<FamilyKey>,
}

/// Decides whether a wall is false given the maximal families at the wall
/// and at the chambers on either side (`None` past the end of the range).
/// Both kinds must pass against every present neighbour.
pub fn prune_decision(wall: &MaximalPair, left: Option<&MaximalPair>, right: Option<&MaximalPair>) -> Option<PruneRule> {
    let mut fired = Vec::new();
    for side in [left, right].into_iter().flatten() {
        fired.push(compare_maximal(&wall.weak, &side.weak)?);
        fired.push(compare_maximal(&wall.strict, &side.strict)?);
    }
    if fired.is_empty() {
        None
    } else if fired.iter().all(|r| *r == PruneRule::Identical) {
        Some(PruneRule::Identical)
    } else {
        Some(PruneRule::Contained)
    }
}

/// Open chambers cut out of [0, bound] by a sorted wall list, as (lo, hi).
pub fn chambers(walls: &[Rat], bound: &Rat) -> Vec<(Rat, Rat)> {
    let mut out: Vec<(Rat, Rat)> = walls.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    if let Some(last) = walls.last() {
        if last < bound {
            out.push((last.clone(), bound.clone()));
        }
    }
    out
}

/// A representative for each chamber: the first override value strictly
/// inside it, else the midpoint.
pub fn chamber_reps(chambers: &[(Rat, Rat)], overrides: &[Rat]) -> Vec<Rat> {
    chambers
        .iter()
        .map(|(lo, hi)| overrides.iter().find(|r| lo < *r && *r < hi).cloned().unwrap_or_else(|| midpoint(lo, hi)))
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    /// drop false walls (heuristic)
    pub prune: bool,
    /// preferred chamber representatives, used when strictly inside a chamber
    pub chamber_overrides: Vec<Rat>,
    /// coefficient seed for the generic annihilator pencils
    pub seed: u64,
}

impl PipelineOptions {
    pub fn new() -> Self {
        PipelineOptions { prune: true, chamber_overrides: Vec::new(), seed: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateWall {
    #[serde(with = "crate::rat::as_str")]
    pub t: Rat,
    pub pruned: bool,
    pub prune_rule: Option<PruneRule>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilatorReport {
    pub family: DestabFamily,
    /// candidate only: the converse of the polystability test can fail
    pub candidate_polystable: bool,
    /// Segre symbol of a seeded generic member (pencils of quadrics only)
    pub segre: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub family: DestabFamily,
    pub verdict: FamilyVerdict,
    pub annihilator: Option<AnnihilatorReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeRole {
    Wall,
    Chamber,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport {
    #[serde(with = "crate::rat::as_str")]
    pub t: Rat,
    pub role: SlopeRole,
    pub weak: Vec<FamilyReport>,
    pub strict: Vec<FamilyReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WallChamberDecomposition {
    pub n: usize,
    pub d: u32,
    pub k: usize,
    pub m: usize,
    pub fundamental_set_digest: String,
    pub fundamental_set_size: usize,
    #[serde(with = "crate::rat::as_str")]
    pub slope_bound: Rat,
    pub candidate_walls: Vec<CandidateWall>,
    pub pruning: String,
    #[serde(with = "crate::rat::vec_as_str")]
    pub surviving_walls: Vec<Rat>,
    #[serde(with = "crate::rat::vec_as_str")]
    pub chamber_reps: Vec<Rat>,
    /// surviving walls inside (0, bound) plus chambers
    pub quotient_count: usize,
    pub slopes: Vec<SlopeReport>,
}

impl WallChamberDecomposition {
    pub fn quotient_line(&self) -> String {
        format!("{} non-isomorphic quotients across walls and chambers", self.quotient_count)
    }
}

/// Maximal weak and strict families at each point of a sorted slope list.
pub fn maximal_at_points(fset: &FundamentalSet, d: u32, k: usize, points: &[Rat]) -> Result<Vec<MaximalPair>> {
    let weak = FamilySweep::new(fset, d, k, points, FamilyKind::Weak)?;
    let strict = FamilySweep::new(fset, d, k, points, FamilyKind::Strict)?;
    Ok((0..points.len())
        .into_par_iter()
        .map(|i| MaximalPair { weak: weak.maximal_at(i), strict: strict.maximal_at(i) })
        .collect())
}

/// Candidate walls with the false-wall decision for each.
pub fn prune_false_walls(fset: &FundamentalSet, d: u32, k: usize, candidates: &[Rat]) -> Result<Vec<CandidateWall>> {
    let bound = slope_bound(fset.n, d, k);
    let ch = chambers(candidates, &bound);
    let reps = chamber_reps(&ch, &[]);
    // walls at even positions, chamber reps at odd ones
    let mut points = Vec::with_capacity(candidates.len() + reps.len());
    for (i, c) in candidates.iter().enumerate() {
        points.push(c.clone());
        if let Some(r) = reps.get(i) {
            points.push(r.clone());
        }
    }
    let maxima = maximal_at_points(fset, d, k, &points)?;
    Ok(candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let rule = if c.is_zero() {
                None
            } else {
                prune_decision(&maxima[2 * i], Some(&maxima[2 * i - 1]), maxima.get(2 * i + 1))
            };
            CandidateWall { t: c.clone(), pruned: rule.is_some(), prune_rule: rule }
        })
        .collect())
}

/// The full pipeline for one hyperplane: candidate walls, pruning, chamber
/// representatives and the family reports at every surviving wall and
/// chamber representative.
pub fn pipeline(n: usize, d: u32, k: usize, opts: &PipelineOptions) -> Result<WallChamberDecomposition> {
    let fset = fundamental_set(n, k, d, 1)?;
    pipeline_with(&fset, d, k, opts)
}

pub fn pipeline_with(fset: &FundamentalSet, d: u32, k: usize, opts: &PipelineOptions) -> Result<WallChamberDecomposition> {
    let n = fset.n;
    let bound = slope_bound(n, d, k);
    let candidates = candidate_walls(fset, d, k)?;
    let walls = if opts.prune {
        prune_false_walls(fset, d, k, &candidates)?
    } else {
        candidates.iter().map(|c| CandidateWall { t: c.clone(), pruned: false, prune_rule: None }).collect()
    };
    let surviving: Vec<Rat> = walls.iter().filter(|w| !w.pruned).map(|w| w.t.clone()).collect();
    let reps = chamber_reps(&chambers(&surviving, &bound), &opts.chamber_overrides);
    let mut points: Vec<(Rat, SlopeRole)> = surviving
        .iter()
        .map(|t| (t.clone(), SlopeRole::Wall))
        .chain(reps.iter().map(|t| (t.clone(), SlopeRole::Chamber)))
        .collect();
    points.sort_by(|a, b| a.0.cmp(&b.0));
    let ts: Vec<Rat> = points.iter().map(|p| p.0.clone()).collect();
    let maxima = maximal_at_points(fset, d, k, &ts)?;
    let slopes = points
        .iter()
        .zip(&maxima)
        .map(|((t, role), mx)| {
            let t1 = [t.clone()];
            let weak = families_for_keys(fset, d, k, &t1, FamilyKind::Weak, &mx.weak)?;
            let strict = families_for_keys(fset, d, k, &t1, FamilyKind::Strict, &mx.strict)?;
            Ok(SlopeReport {
                t: t.clone(),
                role: *role,
                weak: weak.into_par_iter().map(|f| family_report(f, opts.seed)).collect::<Result<_>>()?,
                strict: strict.into_par_iter().map(|f| family_report(f, opts.seed)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let interior = surviving.iter().filter(|w| w.is_positive() && **w < bound).count();
    Ok(WallChamberDecomposition {
        n,
        d,
        k,
        m: 1,
        fundamental_set_digest: fset.digest(),
        fundamental_set_size: fset.len(),
        slope_bound: bound,
        candidate_walls: walls,
        pruning: if opts.prune {
            "HEURISTIC: a wall is dropped when, for both weak and strict maximal families, its list is identical to or covers the lists of the adjacent chambers".into()
        } else {
            "disabled".into()
        },
        quotient_count: interior + reps.len(),
        surviving_walls: surviving,
        chamber_reps: reps,
        slopes,
    })
}

fn family_report(family: DestabFamily, seed: u64) -> Result<FamilyReport> {
    let verdict = classify_family(&family)?;
    let annihilator = if family.kind == FamilyKind::Weak && verdict == FamilyVerdict::StrictlySemistable {
        let ann = annihilator(&family)?;
        let candidate_polystable = is_torus_polystable(&ann)?;
        let segre = if ann.b_sets.len() == 1 && ann.v_set.first().is_some_and(|m| m.degree() == 2) && !ann.is_empty() {
            let n = ann.lambda.len() - 1;
            let p = generic_pencil(n, &ann.v_set, &ann.b_sets[0], seed)?;
            Some(match segre_symbol(&p) {
                Ok(s) => s.to_string(),
                Err(Error::Degenerate(_)) => "degenerate".to_string(),
                Err(e) => return Err(e),
            })
        } else {
            None
        };
        Some(AnnihilatorReport { family: ann, candidate_polystable, segre })
    } else {
        None
    };
    Ok(FamilyReport { family, verdict, annihilator })
}

//! `vgit`: command-line front end. Every command prints one JSON report
//! (or writes it to `--out`); errors go to stderr with a fixed exit code.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vgit::cache::{Cache, Lookup};
use vgit::families::{annihilator, classify_family, is_torus_polystable, maximal_families, FamilyKind, FamilyVerdict};
use vgit::formulas::{
    beta_of_t, cm_coefficients, codimensions, moduli_dimension, moduli_dimension_display, polytope_barycenter, LatticePolytope,
};
use vgit::poly::{parse_poly, PolyExpr};
use vgit::rat::{fmt_rat, parse_rat};
use vgit::report::{walls_csv, RunReport};
use vgit::segre::{pencil_from_forms, segre_analysis, segre_by_jordan};
use vgit::stability::{centroid_criterion, classify_torus, probe_unstable, stability_interval, TupleConfig};
use vgit::subgroup::{fundamental_set, FundamentalSet};
use vgit::walls::{pipeline_with, PipelineOptions};
use vgit::{Error, Rat, Result};

#[derive(Parser)]
#[command(name = "vgit", version, about = "Exact VGIT walls, families and Segre symbols")]
struct Cli {
    /// skip the on-disk cache
    #[arg(long, global = true)]
    no_cache: bool,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Strict,
    Weak,
    Ann,
}

#[derive(Subcommand)]
enum Cmd {
    /// Wall/chamber decomposition for one hyperplane
    Walls {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: u32,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        no_prune: bool,
        /// comma-separated preferred chamber representatives
        #[arg(long, value_delimiter = ',')]
        chamber_reps: Vec<String>,
        /// also write the wall table as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Maximal destabilizing families at one slope
    Families {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: u32,
        #[arg(short)]
        k: usize,
        /// slope, comma-separated for several hyperplanes
        #[arg(long, value_delimiter = ',')]
        t: Vec<String>,
        #[arg(long, value_enum, default_value = "weak")]
        kind: KindArg,
    },
    /// Torus verdict of a tuple plus the centroid cross-check
    Check {
        /// file with one degree-d form per line
        #[arg(long)]
        f: PathBuf,
        /// file with one linear form per line
        #[arg(long)]
        h: PathBuf,
        #[arg(long, value_delimiter = ',')]
        t: Vec<String>,
        /// ambient dimension; inferred from the largest variable index when absent
        #[arg(short)]
        n: Option<usize>,
        /// random coordinate changes to search for instability
        #[arg(long)]
        probe: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Torus stability interval of a tuple with one hyperplane
    Interval {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(short)]
        n: Option<usize>,
    },
    /// Segre symbol of the pencil spanned by two quadrics
    Segre {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(short)]
        n: usize,
    },
    /// Log CM coefficients a(β), b(β) and the slope t(β), or β from t
    Cm {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: u32,
        #[arg(short)]
        k: usize,
        #[arg(long, conflicts_with = "t", required_unless_present = "t")]
        beta: Option<String>,
        #[arg(long)]
        t: Option<String>,
    },
    /// Moduli dimension and codimension bounds
    Dim {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: u32,
        #[arg(short)]
        k: usize,
        #[arg(short, default_value_t = 1)]
        m: usize,
    },
    /// Exact volume barycenter of a lattice polytope
    Barycenter {
        /// one vertex per line, integer coordinates separated by spaces or commas
        #[arg(long)]
        vertices: PathBuf,
    },
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn rats(list: &[String]) -> Result<Vec<Rat>> {
    list.iter().map(|s| parse_rat(s.trim())).collect()
}

fn join(list: &[Rat]) -> String {
    list.iter().map(fmt_rat).collect::<Vec<_>>().join(",")
}

fn cache(no_cache: bool) -> Option<Cache> {
    if no_cache {
        None
    } else {
        Cache::from_env()
    }
}

fn cached_fset(cache: Option<&Cache>, n: usize, k: usize, d: u32, m: usize) -> Result<FundamentalSet> {
    let key = Cache::key(&["fset", &n.to_string(), &k.to_string(), &d.to_string(), &m.to_string()]);
    if let Some(c) = cache {
        match c.get(&key)? {
            Lookup::Hit(s) => {
                if let Ok(f) = serde_json::from_str::<FundamentalSet>(&s) {
                    return Ok(f);
                }
                eprintln!("warning: cached fundamental set does not decode; recomputing");
            }
            Lookup::Corrupt(why) => eprintln!("warning: {why}; recomputing"),
            Lookup::Miss => {}
        }
    }
    let start = Instant::now();
    let f = fundamental_set(n, k, d, m)?;
    eprintln!("fundamental set: {} members in {:.1?}", f.len(), start.elapsed());
    if let Some(c) = cache {
        c.put(&key, &serde_json::to_string(&f)?)?;
    }
    Ok(f)
}

/// Reads one form per nonempty line, `#` starting a comment.
fn read_forms(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn infer_n(texts: &[String]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for t in texts {
        let b = t.as_bytes();
        let mut i = 0;
        while i < b.len() {
            if b[i] == b'x' {
                let j = b[i + 1..].iter().take_while(|c| c.is_ascii_digit()).count();
                if j > 0 {
                    let v: usize = t[i + 1..i + 1 + j].parse().map_err(|_| Error::parse(i, "variable index too large"))?;
                    best = Some(best.map_or(v, |b| b.max(v)));
                }
                i += j;
            }
            i += 1;
        }
    }
    match best {
        Some(v) if v >= 1 => Ok(v),
        _ => Err(Error::pre("cannot infer n; pass -n")),
    }
}

fn read_tuple(f: &Path, h: &Path, n: Option<usize>) -> Result<(usize, Vec<PolyExpr>, Vec<PolyExpr>)> {
    let ftxt = read_forms(f)?;
    let htxt = read_forms(h)?;
    if ftxt.is_empty() {
        return Err(Error::pre("no forms in the --f file"));
    }
    let n = match n {
        Some(n) => n,
        None => infer_n(&ftxt.iter().chain(&htxt).cloned().collect::<Vec<_>>())?,
    };
    let first = vgit::poly::parse_any(&ftxt[0], n)?;
    let d = first.degree().ok_or_else(|| Error::pre("the first form is zero"))?;
    let fs = ftxt.iter().map(|s| parse_poly(s, n, d)).collect::<Result<Vec<_>>>()?;
    let hs = htxt.iter().map(|s| parse_poly(s, n, 1)).collect::<Result<Vec<_>>>()?;
    Ok((n, fs, hs))
}

fn run(cli: Cli) -> Result<()> {
    let cache = cache(cli.no_cache);
    let (report, csv) = match cli.cmd {
        Cmd::Walls { n, d, k, no_prune, chamber_reps, csv } => {
            let overrides = rats(&chamber_reps)?;
            let p = params(&[
                ("n", n.to_string()),
                ("d", d.to_string()),
                ("k", k.to_string()),
                ("m", "1".into()),
                ("prune", (!no_prune).to_string()),
                ("chamber_reps", join(&overrides)),
            ]);
            let key = Cache::key(&["walls", &serde_json::to_string(&p)?]);
            let hit = match cache.as_ref().map(|c| c.get(&key)).transpose()? {
                Some(Lookup::Hit(s)) => Some(s),
                Some(Lookup::Corrupt(why)) => {
                    eprintln!("warning: {why}; recomputing");
                    None
                }
                _ => None,
            };
            if let (Some(text), None) = (&hit, &csv) {
                emit(text, cli.out.as_deref())?;
                eprintln!("walls: cache hit");
                return Ok(());
            }
            let fset = cached_fset(cache.as_ref(), n, k, d, 1)?;
            let start = Instant::now();
            let opts = PipelineOptions { prune: !no_prune, chamber_overrides: overrides, ..PipelineOptions::new() };
            let dec = pipeline_with(&fset, d, k, &opts)?;
            eprintln!("walls: {} in {:.1?}", dec.quotient_line(), start.elapsed());
            let text = RunReport::new("walls", p, &dec)?.to_json()?;
            if let Some(c) = &cache {
                c.put(&key, &text)?;
            }
            (text, csv.map(|path| (path, walls_csv(&dec))))
        }
        Cmd::Families { n, d, k, t, kind } => {
            let t = rats(&t)?;
            if t.is_empty() {
                return Err(Error::pre("--t is required"));
            }
            let fset = cached_fset(cache.as_ref(), n, k, d, t.len())?;
            let fam_kind = match kind {
                KindArg::Strict => FamilyKind::Strict,
                KindArg::Weak | KindArg::Ann => FamilyKind::Weak,
            };
            let fams = maximal_families(&fset, d, k, &t, fam_kind)?;
            let mut out = Vec::new();
            for f in fams {
                let verdict = classify_family(&f)?;
                match kind {
                    KindArg::Ann => {
                        if verdict == FamilyVerdict::StrictlySemistable {
                            let a = annihilator(&f)?;
                            let poly = is_torus_polystable(&a)?;
                            out.push(json!({ "family": a, "source": f, "candidate_polystable": poly }));
                        }
                    }
                    _ => out.push(json!({ "family": f, "verdict": verdict })),
                }
            }
            let kind_name = match kind {
                KindArg::Strict => "strict",
                KindArg::Weak => "weak",
                KindArg::Ann => "ann",
            };
            let p = params(&[("n", n.to_string()), ("d", d.to_string()), ("k", k.to_string()), ("t", join(&t)), ("kind", kind_name.into())]);
            let result = json!({ "fundamental_set_digest": fset.digest(), "families": out });
            (RunReport::new("families", p, &result)?.to_json()?, None)
        }
        Cmd::Check { f, h, t, n, probe, seed } => {
            let (n, fs, hs) = read_tuple(&f, &h, n)?;
            let t = rats(&t)?;
            if t.len() != hs.len() {
                return Err(Error::Dimension { expected: hs.len(), got: t.len() });
            }
            let cfg = TupleConfig::from_polys(n, &fs, &hs)?;
            let fset = cached_fset(cache.as_ref(), n, cfg.k(), cfg.d, cfg.m())?;
            let verdict = classify_torus(&cfg, &t, &fset)?;
            let centroid = centroid_criterion(&cfg, &t)?;
            let probed = match probe {
                Some(trials) => Some(match probe_unstable(n, &fs, &hs, &t, &fset, trials, seed)? {
                    Some((a, v)) => json!({ "unstable": true, "coordinates": a.iter().map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>(), "verdict": v }),
                    None => json!({ "unstable": false, "trials": trials }),
                }),
                None => None,
            };
            let p = params(&[("n", n.to_string()), ("d", cfg.d.to_string()), ("k", cfg.k().to_string()), ("m", cfg.m().to_string()), ("t", join(&t))]);
            let result = json!({ "torus": verdict, "centroid": centroid, "probe": probed });
            (RunReport::new("check", p, &result)?.to_json()?, None)
        }
        Cmd::Interval { f, h, n } => {
            let (n, fs, hs) = read_tuple(&f, &h, n)?;
            let cfg = TupleConfig::from_polys(n, &fs, &hs)?;
            let fset = cached_fset(cache.as_ref(), n, cfg.k(), cfg.d, cfg.m())?;
            let iv = stability_interval(&cfg, &fset)?;
            let p = params(&[("n", n.to_string()), ("d", cfg.d.to_string()), ("k", cfg.k().to_string())]);
            let result = match iv {
                Some((lo, hi)) => json!({ "semistable": true, "lower": fmt_rat(&lo), "upper": fmt_rat(&hi) }),
                None => json!({ "semistable": false }),
            };
            (RunReport::new("interval", p, &result)?.to_json()?, None)
        }
        Cmd::Segre { f, g, n } => {
            let pencil = pencil_from_forms(&parse_poly(&f, n, 2)?, &parse_poly(&g, n, 2)?, n)?;
            let a = segre_analysis(&pencil)?;
            let check = segre_by_jordan(&pencil)?;
            if check != a.symbol {
                return Err(Error::pre(format!("symbol paths disagree: {} vs {}", a.symbol, check)));
            }
            let rows: Vec<_> = a
                .rows
                .iter()
                .map(|r| json!({ "factor": r.factor.to_string(), "degree": r.degree, "l": r.l, "e": r.e }))
                .collect();
            let p = params(&[("n", n.to_string()), ("f", f), ("g", g)]);
            let result = json!({ "symbol": a.symbol.to_string(), "determinant": a.determinant.to_string(), "rows": rows });
            (RunReport::new("segre", p, &result)?.to_json()?, None)
        }
        Cmd::Cm { n, d, k, beta, t } => {
            let (p, result) = match (beta, t) {
                (Some(b), _) => {
                    let c = cm_coefficients(n, d, k, &parse_rat(&b)?)?;
                    (params(&[("n", n.to_string()), ("d", d.to_string()), ("k", k.to_string()), ("beta", b)]), serde_json::to_value(c)?)
                }
                (None, Some(t)) => {
                    let beta = beta_of_t(n, d, k, &parse_rat(&t)?)?;
                    (
                        params(&[("n", n.to_string()), ("d", d.to_string()), ("k", k.to_string()), ("t", t)]),
                        json!({ "beta": fmt_rat(&beta) }),
                    )
                }
                (None, None) => return Err(Error::pre("pass --beta or --t")),
            };
            (RunReport::new("cm", p, &result)?.to_json()?, None)
        }
        Cmd::Dim { n, d, k, m } => {
            let dim = moduli_dimension(n, d, k, m);
            let display = moduli_dimension_display(n, d, k, m);
            let codims = codimensions(n, d, k).ok();
            let mut result = json!({ "dimension": dim, "closed_form_value": fmt_rat(&display) });
            if display != Rat::from_integer(dim.into()) {
                result["discrepancy"] = json!("the closed product form differs from k(C(n+d,d)−k) + mn − ((n+1)²−1); the latter is reported");
            }
            if let Some((c1, c2)) = codims {
                result["codimensions"] = json!([c1, c2]);
            }
            let p = params(&[("n", n.to_string()), ("d", d.to_string()), ("k", k.to_string()), ("m", m.to_string())]);
            (RunReport::new("dim", p, &result)?.to_json()?, None)
        }
        Cmd::Barycenter { vertices } => {
            let text = fs::read_to_string(&vertices)?;
            let mut verts = Vec::new();
            for (line_no, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let v = line
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<i64>().map_err(|_| Error::parse(line_no + 1, format!("bad coordinate {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                verts.push(v);
            }
            let poly = LatticePolytope::new(verts)?;
            let c = polytope_barycenter(&poly)?;
            let is_origin = c.iter().all(|x| *x == Rat::from_integer(0.into()));
            let p = params(&[("vertices", vertices.display().to_string())]);
            let result = json!({ "barycenter": c.iter().map(fmt_rat).collect::<Vec<_>>(), "is_origin": is_origin });
            (RunReport::new("barycenter", p, &result)?.to_json()?, None)
        }
    };
    if let Some((path, text)) = csv {
        fs::write(path, text)?;
    }
    emit(&report, cli.out.as_deref())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Instantiates the pencil templates of the P³ and P⁴ tables with seeded
//! small-integer coefficients and prints, for each row, the first
//! instantiation whose symbol agrees with the stated one on both paths.
//! `Q(i,j,..)` is a quadratic form and `L(i,j,..)` a linear form in the
//! listed variables.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vgit::poly::parse_poly;
use vgit::segre::{pencil_from_forms, segre_by_jordan, segre_symbol};

const ROWS: &[(usize, &str, &str, &str)] = &[
    (3, "[4]", "Q(2,3) + x3*L(0,1) + x2*L(0,1)", "Q(2,3) + x3*L(0,1) + x2*L(0,1)"),
    (3, "[(3,1)]", "Q(1,2,3) + x0*x3", "x3*L(1,2,3)"),
    (3, "[(2,2)]", "Q(2,3) + x0*x3 + x1*L(2,3)", "Q(2,3)"),
    (3, "[3,1]", "Q(1,2,3) + x0*x3", "Q(2,3) + x1*x3"),
    (3, "[(2,1),1]", "Q(1,2,3) + x0*L(1,2,3) + x1*L(2,3)", "Q(2,3) + x0*x3 + x1*L(2,3)"),
    (3, "[(1,1,1),1]", "Q(0,1,2,3)", "x3^2"),
    (3, "[2,2]", "Q(2,3) + x0*L(2,3) + x1*L(2,3)", "Q(2,3) + x0*L(2,3) + x1*L(2,3)"),
    (3, "[2,(1,1)]", "Q(2,3) + x0*x3", "x3*L(0,1,2,3)"),
    (3, "[(1,1),(1,1)]", "Q(2,3)", "Q(0,1)"),
    (3, "[2,1,1]", "Q(1,2,3) + x0*x3", "Q(1,2,3)"),
    (3, "[(1,1),1,1]", "Q(0,1,2,3)", "Q(2,3)"),
    (3, "[1,1,1,1]", "Q(0,1,2,3)", "Q(0,1,2,3)"),
    (4, "[(4,1)]", "Q(2,3,4) + x1*L(3,4) + x0*x4", "Q(3,4) + x4*L(1,2)"),
    (4, "[4,1]", "Q(2,3,4) + x1*L(2,3,4) + x0*x4", "Q(2,3,4) + x1*x4"),
    (4, "[(3,1),1]", "Q(1,2,3,4) + x0*x4", "Q(3,4) + x4*L(1,2)"),
    (4, "[3,2]", "Q(2,3,4) + x4*L(0,1) + x3*L(0,1)", "Q(3,4) + x4*L(0,1,2) + x2*x3"),
    (4, "[3,1,1]", "Q(1,2,3,4) + x0*x4", "Q(2,3,4) + x1*x4"),
    (4, "[3,(1,1)]", "Q(1,2,3,4) + x0*x1", "x4^2 + x3^2 + x2*x1"),
    (4, "[(2,1),2]", "x1^2 + x0*L(2,3,4)", "Q(2,3,4)"),
    (4, "[(2,1),1,1]", "Q(1,2,3,4) + x0*L(2,3,4)", "Q(2,3,4)"),
    (4, "[(2,1),(1,1)]", "x0*x4 + x1*x3 + x2^2", "Q(3,4) + x3*L(1,2) + x4*L(1,2)"),
    (4, "[2,1,1,1]", "Q(1,2,3,4) + x0*x4", "Q(1,2,3,4) + x0*x4"),
    (4, "[2,2,1]", "Q(2,3,4) + x4*L(0,1) + x3*L(0,1)", "Q(2,3,4) + x4*L(0,1) + x3*L(0,1)"),
    (4, "[(1,1),2,1]", "Q(1,2,3,4) + x0*L(3,4)", "Q(3,4) + x4*L(0,1,2)"),
    (4, "[(1,1),1,1,1]", "Q(1,2,3) + x0*x4", "Q(1,2,3) + x0*x4"),
    (4, "[(1,1),(1,1),1]", "x4*L(0,1) + x3*L(0,1) + x2^2", "x4*L(0,1) + x3*L(0,1) + x2^2"),
    (4, "[1,1,1,1,1]", "Q(0,1,2,3,4)", "Q(0,1,2,3,4)"),
];

fn coef(rng: &mut StdRng) -> i64 {
    loop {
        let c = rng.gen_range(-3..=3);
        if c != 0 {
            return c;
        }
    }
}

fn form(vars: &[usize], quadratic: bool, rng: &mut StdRng) -> String {
    let mut terms = Vec::new();
    if quadratic {
        for (a, &i) in vars.iter().enumerate() {
            for &j in &vars[a..] {
                terms.push(format!("{}*x{i}*x{j}", coef(rng)));
            }
        }
    } else {
        for &i in vars {
            terms.push(format!("{}*x{i}", coef(rng)));
        }
    }
    format!("({})", terms.join(" + "))
}

/// Replaces each Q(..)/L(..) by a form with fresh coefficients and expands
/// products by parsing factors separately.
fn instantiate(template: &str, n: usize, rng: &mut StdRng) -> String {
    let mut out = Vec::new();
    for term in template.split(" + ") {
        let mut factors = Vec::new();
        for factor in term.split('*') {
            let f = factor.trim();
            if let Some(inner) = f.strip_prefix("Q(").or_else(|| f.strip_prefix("L(")) {
                let vars: Vec<usize> = inner.trim_end_matches(')').split(',').map(|v| v.parse().unwrap()).collect();
                factors.push(form(&vars, f.starts_with('Q'), rng));
            } else {
                factors.push(f.to_string());
            }
        }
        let mut acc = parse_any(&factors[0], n);
        for f in &factors[1..] {
            acc = acc.mul(&parse_any(f, n));
        }
        out.push(acc.to_string());
    }
    out.join(" + ").replace("+ -", "- ")
}

fn parse_any(s: &str, n: usize) -> vgit::poly::PolyExpr {
    let s = s.trim_start_matches('(').trim_end_matches(')');
    vgit::poly::parse_any(&s.replace("+ -", "- "), n).unwrap()
}

fn main() {
    let diagnose = std::env::args().any(|a| a == "--diagnose");
    let mut rng = StdRng::seed_from_u64(20240611);
    for &(n, symbol, ft, gt) in ROWS {
        let mut found = None;
        for _ in 0..200 {
            let f = instantiate(ft, n, &mut rng);
            let g = instantiate(gt, n, &mut rng);
            let p = pencil_from_forms(&parse_poly(&f, n, 2).unwrap(), &parse_poly(&g, n, 2).unwrap(), n).unwrap();
            let (Ok(a), Ok(b)) = (segre_symbol(&p), segre_by_jordan(&p)) else { continue };
            if a.to_string() == symbol && b.to_string() == symbol {
                found = Some((f, g));
                break;
            }
        }
        if diagnose && found.is_none() {
            let mut tally = std::collections::BTreeMap::new();
            for _ in 0..200 {
                let f = instantiate(ft, n, &mut rng);
                let g = instantiate(gt, n, &mut rng);
                let p = pencil_from_forms(&parse_poly(&f, n, 2).unwrap(), &parse_poly(&g, n, 2).unwrap(), n).unwrap();
                let a = segre_symbol(&p).map(|s| s.to_string()).unwrap_or_else(|e| e.to_string());
                let b = segre_by_jordan(&p).map(|s| s.to_string()).unwrap_or_else(|e| e.to_string());
                *tally.entry((a, b)).or_insert(0) += 1;
            }
            println!("## {symbol}: {tally:?}");
        }
        match found {
            Some((f, g)) => println!("{n} | {symbol} | {f} | {g}"),
            None => println!("# {n} | {symbol} | no instantiation reproduces the stated symbol"),
        }
    }
}

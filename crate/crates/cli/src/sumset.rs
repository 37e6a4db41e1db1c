//! `polydist sumset`: the sumset checks on a JSON instance.

use polydist::exactnum::rational::fmt_rational;
use polydist::exactnum::{Ring, RingElem, Symbol, Q};
use polydist::io::{elem_from_nums, parse_json, Num, RingSpec};
use polydist::sumsetlab::scans::cor37_growth_scan;
use polydist::sumsetlab::suites::{run_all, DEFAULT_SEED};
use polydist::sumsetlab::{
    cor36_dimension_check, dilated_diff_size, lemma33_extract, lemma35_iterate, ruzsa_check, Dilation, FiniteSet,
};
use polydist::Exec;
use serde::Deserialize;
use serde_json::json;

use crate::commands::list;
use crate::output::{Format, Sink, Table};
use crate::{CliError, Outcome, SumsetArgs, SumsetVerb};

const MAX_AUTO_D: usize = 16;

/// A scalar as power-basis coordinates, or a ratio of two such.
#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Coords(Vec<Num>),
    Ratio { num: Vec<Num>, den: Option<Vec<Num>> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Instance {
    ring: RingSpec,
    a: Vec<Vec<Num>>,
    b: Option<Vec<Vec<Num>>>,
    alpha: Option<Scalar>,
    alpha2: Option<Scalar>,
    k: Option<Num>,
    depth: Option<usize>,
    d: Option<usize>,
}

struct Loaded {
    ring: Ring,
    a: FiniteSet,
    b: FiniteSet,
    inst: Instance,
}

fn set(ring: &Ring, items: &[Vec<Num>]) -> Result<FiniteSet, CliError> {
    let elems: Vec<RingElem> = items
        .iter()
        .map(|c| elem_from_nums(ring, c))
        .collect::<polydist::Result<_>>()?;
    Ok(FiniteSet::new(ring, elems)?)
}

fn dilation(ring: &Ring, s: &Scalar) -> Result<Dilation, CliError> {
    Ok(match s {
        Scalar::Coords(c) => Dilation::of(&elem_from_nums(ring, c)?)?,
        Scalar::Ratio { num, den } => {
            let d = match den {
                Some(d) => elem_from_nums(ring, d)?,
                None => ring.one(),
            };
            Dilation::ratio(&elem_from_nums(ring, num)?, &d)?
        }
    })
}

fn load(args: &SumsetArgs) -> Result<Loaded, CliError> {
    let Some(path) = &args.input else {
        return Err(CliError::Config("this verb needs --input".into()));
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let inst: Instance = parse_json(&text)?;
    let ring = inst.ring.build()?;
    let a = set(&ring, &inst.a)?;
    let b = match &inst.b {
        Some(b) => set(&ring, b)?,
        None => a.clone(),
    };
    if a.is_empty() || b.is_empty() {
        return Err(polydist::Error::InvalidArgument("sets must be nonempty".into()).into());
    }
    Ok(Loaded { ring, a, b, inst })
}

fn ratio(n: usize, d: usize) -> Q {
    Q::new((n as i64).into(), (d as i64).into())
}

fn given_k(l: &Loaded) -> Result<Option<Q>, CliError> {
    Ok(l.inst.k.as_ref().map(Num::parse).transpose()?)
}

fn alpha(l: &Loaded, which: &Option<Scalar>, name: &str) -> Result<Dilation, CliError> {
    match which {
        Some(s) => dilation(&l.ring, s),
        None => Err(CliError::Config(format!("the instance needs `{name}`"))),
    }
}

/// The given `K`, or the least one meeting both pair conditions.
fn pair_k(l: &Loaded, a1: &Dilation, a2: &Dilation) -> Result<Q, CliError> {
    if let Some(k) = given_k(l)? {
        return Ok(k);
    }
    let k1 = ratio(dilated_diff_size(&l.a, a1, &l.b)?, l.b.len());
    let k2 = ratio(dilated_diff_size(&l.a, a2, &l.b)?, l.a.len());
    Ok(k1.max(k2))
}

/// The largest `d` with `|A| > K^(2d)`, at least 1.
fn auto_d(size: usize, k: &Q) -> usize {
    let n = ratio(size, 1);
    let k2 = k * k;
    let mut pow = k2.clone();
    let mut d = 0;
    while d < MAX_AUTO_D && n > pow {
        d += 1;
        pow = &pow * &k2;
    }
    d.max(1)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run(args: &SumsetArgs, out: &Sink) -> Result<Outcome, CliError> {
    match args.verb {
        SumsetVerb::CheckRuzsa => {
            let l = load(args)?;
            let r = ruzsa_check(&l.a, &l.b)?;
            out.emit(
                || {
                    let mut t = Table::new(&["size_a", "size_b", "size_sum", "dim", "bound", "pass"]);
                    t.row([
                        r.size_a.to_string(),
                        r.size_b.to_string(),
                        r.size_sum.to_string(),
                        r.dim.to_string(),
                        r.bound.to_string(),
                        r.pass.to_string(),
                    ]);
                    t.finish()
                },
                &r,
            )?;
            Ok(Outcome { pass: r.pass })
        }
        SumsetVerb::Decompose => {
            let l = load(args)?;
            let al = alpha(&l, &l.inst.alpha, "alpha")?;
            let k = match given_k(&l)? {
                Some(k) => k,
                None => ratio(dilated_diff_size(&l.a, &al, &l.b)?, l.b.len()),
            };
            let res = lemma33_extract(&l.a, &l.b, &al, &k)?;
            let pass = res.verify(&l.a)?;
            let certs: Vec<_> = res
                .parent
                .iter()
                .enumerate()
                .filter_map(|(pos, p)| p.map(|(par, i, j)| (res.indices[pos], res.indices[par], i, j)))
                .collect();
            out.emit(
                || {
                    let mut t = Table::new(&["b", "parent", "a_i", "a_j"]);
                    for (b, p, i, j) in &certs {
                        t.row([b.to_string(), p.to_string(), i.to_string(), j.to_string()]);
                    }
                    t.finish()
                },
                &json!({
                    "alpha": res.alpha.label(),
                    "k": fmt_rational(&res.k),
                    "components": res.components,
                    "b_prime": res.indices,
                    "root": res.indices[res.root],
                    "diff_size": res.diff_size,
                    "certificates": certs
                        .iter()
                        .map(|(b, p, i, j)| json!({ "b": b, "parent": p, "a_i": i, "a_j": j }))
                        .collect::<Vec<_>>(),
                    "verified": pass,
                }),
            )?;
            if out.format == Format::Csv {
                eprintln!(
                    "K = {}: |B'| = {} of {} components, |A - alpha B'| = {}: {}",
                    fmt_rational(&res.k),
                    res.indices.len(),
                    res.components,
                    res.diff_size,
                    verdict(pass)
                );
            }
            Ok(Outcome { pass })
        }
        SumsetVerb::Iterate => {
            let l = load(args)?;
            let a1 = alpha(&l, &l.inst.alpha, "alpha")?;
            let a2 = alpha(&l, &l.inst.alpha2, "alpha2")?;
            let k = pair_k(&l, &a1, &a2)?;
            let depth = l.inst.depth.unwrap_or(1);
            let chain = lemma35_iterate(&l.a, &l.b, &a1, &a2, &k, depth)?;
            let mut pass = chain.verify()?;
            for j in 1..=depth {
                pass &= (0..chain.a_level(j).len()).all(|pos| chain.check_level_expansion(j, pos));
            }
            let mut rows = vec![(0, l.a.len(), l.b.len(), dilated_diff_size(&l.a, &a2, &l.b)?)];
            rows.extend(
                chain
                    .levels
                    .iter()
                    .enumerate()
                    .map(|(j, lv)| (j + 1, lv.a.len(), lv.b.len(), lv.diff_size)),
            );
            out.emit(
                || {
                    let mut t = Table::new(&["level", "size_a", "size_b", "diff_size"]);
                    for (j, sa, sb, ds) in &rows {
                        t.row([j.to_string(), sa.to_string(), sb.to_string(), ds.to_string()]);
                    }
                    t.finish()
                },
                &json!({
                    "alpha1": a1.label(),
                    "alpha2": a2.label(),
                    "k": fmt_rational(&k),
                    "levels": rows
                        .iter()
                        .map(|(j, sa, sb, ds)| json!({ "level": j, "size_a": sa, "size_b": sb, "diff_size": ds }))
                        .collect::<Vec<_>>(),
                    "verified": pass,
                }),
            )?;
            Ok(Outcome { pass })
        }
        SumsetVerb::DimCheck => {
            let l = load(args)?;
            let x = l.ring.generator();
            let a1 = match &l.inst.alpha {
                Some(s) => dilation(&l.ring, s)?,
                None => Dilation::of(&x)?,
            };
            let a2 = match &l.inst.alpha2 {
                Some(s) => dilation(&l.ring, s)?,
                None => Dilation::ratio(&l.ring.one(), &x)?,
            };
            let k = pair_k(&l, &a1, &a2)?;
            let d = l.inst.d.unwrap_or_else(|| auto_d(l.a.len(), &k));
            let r = cor36_dimension_check(&l.a, &l.b, &a1, &a2, &k, d)?;
            out.emit(
                || {
                    let mut t = Table::new(&["size", "k", "d", "applies", "qdim", "witness_rank", "pass"]);
                    t.row([
                        r.size.to_string(),
                        r.k.clone(),
                        r.d.to_string(),
                        r.applies.to_string(),
                        r.qdim.to_string(),
                        r.witness_rank.map(|w| w.to_string()).unwrap_or_default(),
                        r.pass.to_string(),
                    ]);
                    t.finish()
                },
                &r,
            )?;
            Ok(Outcome { pass: r.pass })
        }
        SumsetVerb::GrowthScan => {
            let sizes = list(&args.sizes, "size list", |t| {
                t.parse::<usize>()
                    .map_err(|e| polydist::Error::Parse(format!("size {t:?}: {e}")))
            })?;
            let ring = Ring::symbolic(Symbol::Pi);
            let r = cor37_growth_scan(&ring, &sizes, args.monotone_from, Exec::default())?;
            out.emit(
                || {
                    let mut t = Table::new(&["size", "families", "best", "diff_size", "ratio", "reference"]);
                    for row in &r.rows {
                        let best: Vec<String> = row.best.iter().map(usize::to_string).collect();
                        t.row([
                            row.size.to_string(),
                            row.families.to_string(),
                            best.join("x"),
                            row.diff_size.to_string(),
                            format!("{:.6}", row.ratio),
                            row.reference.map(|v| format!("{v:.6}")).unwrap_or_default(),
                        ]);
                    }
                    t.finish()
                },
                &r,
            )?;
            Ok(Outcome { pass: r.nondecreasing })
        }
        SumsetVerb::Suites => {
            let seed = args.seed.unwrap_or(DEFAULT_SEED);
            let reports = run_all(seed, Exec::default())?;
            let pass = reports.iter().all(|r| r.passed());
            out.emit(
                || {
                    let mut t = Table::new(&["suite", "seed", "trials", "applicable", "violations", "pass"]);
                    for r in &reports {
                        t.row([
                            r.name.clone(),
                            r.seed.to_string(),
                            r.trials.to_string(),
                            r.applicable.to_string(),
                            r.violations.to_string(),
                            r.passed().to_string(),
                        ]);
                    }
                    t.finish()
                },
                &reports,
            )?;
            for r in reports.iter().filter(|r| !r.passed()) {
                if let Some(v) = &r.first_violation {
                    eprintln!("{}: {v}", r.name);
                }
            }
            Ok(Outcome { pass })
        }
    }
}

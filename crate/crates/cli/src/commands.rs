use polydist::construction::{build_stage_with, verify_containment_bound, BuildConfig};
use polydist::distset::{closure_check, compute, growth_scan, DistOptions, Mode, SetSource};
use polydist::exactnum::rational::{fmt_rational, parse_rational};
use polydist::exactnum::{Ring, Q};
use polydist::io::{elem_from_nums, field_preset_names, named_field, parse_json, FieldSpec, Num, RingSpec, SetFile};
use polydist::modelset::{enumerate_t, verify_local_count, verify_net, ModelSetSpec};
use polydist::polynorm::presets::{load, preset_file, preset_names, PolygonFile};
use polydist::polynorm::{norm_axioms_check, PolygonalNorm, Slope};
use polydist::repro::{run_criterion, CRITERIA};
use polydist::Exec;
use serde::Serialize;
use serde_json::json;

use crate::output::{bounds, coords, sig15, to_json, Format, Sink, Table};
use crate::{
    CliError, ConstructArgs, DistsetArgs, ModeArg, ModelsetAction, ModelsetArgs, NormAction, NormArgs, Outcome,
    ReproArgs,
};

const PASS: Outcome = Outcome { pass: true };

pub fn list<T>(s: &str, what: &str, f: impl Fn(&str) -> polydist::Result<T>) -> Result<Vec<T>, CliError> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if items.is_empty() {
        return Err(CliError::Config(format!("empty {what}")));
    }
    Ok(items.into_iter().map(f).collect::<polydist::Result<Vec<T>>>()?)
}

fn nums(s: &str) -> Result<Vec<Num>, CliError> {
    list(s, "coordinate list", |t| parse_rational(t).map(|v| Num::from_q(&v)))
}

fn rational(s: &str) -> Result<Q, CliError> {
    Ok(parse_rational(s)?)
}

/// A field preset name, or else a field file.
pub fn load_field(s: &str) -> Result<Ring, CliError> {
    let spec = if field_preset_names().contains(&s) {
        named_field(s)?
    } else {
        let text =
            std::fs::read_to_string(s).map_err(|e| CliError::Config(format!("cannot read field file {s}: {e}")))?;
        parse_json::<FieldSpec>(&text)?
    };
    Ok(Ring::field(spec.build()?))
}

fn slope_text(s: &Slope) -> String {
    match s {
        Slope::Finite(v) => format!("{v}"),
        Slope::Infinite => "inf".into(),
    }
}

fn norm_summary(p: &PolygonalNorm) -> Result<serde_json::Value, CliError> {
    let s = p.sandwich()?;
    let verts: Vec<_> = p
        .vertices()
        .iter()
        .map(|[x, y]| json!({ "x": coords(x), "y": coords(y), "approx": [x.to_f64(), y.to_f64()] }))
        .collect();
    let facets: Vec<_> = p
        .facets()
        .iter()
        .map(|f| json!({ "u": [coords(&f.u[0]), coords(&f.u[1])], "scale": fmt_rational(&f.scale) }))
        .collect();
    let slopes: Vec<String> = p.side_slopes()?.iter().map(slope_text).collect();
    Ok(json!({
        "name": p.name(),
        "ring": p.ring().name(),
        "vertices": verts,
        "facets": facets,
        "side_slopes": slopes,
        "sandwich": { "delta": fmt_rational(&s.delta), "rho": fmt_rational(&s.rho) },
    }))
}

/// The polygon file behind a preset name or path.
fn polygon_file(source: &str) -> Result<PolygonFile, CliError> {
    if preset_names().contains(&source) {
        return Ok(preset_file(source)?);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| CliError::Config(format!("cannot read polygon file {source}: {e}")))?;
    Ok(parse_json(&text)?)
}

pub fn norm(a: &NormArgs, out: &Sink) -> Result<Outcome, CliError> {
    match a.action {
        NormAction::List => {
            let mut rows = Vec::new();
            for name in preset_names() {
                let p = load(name)?;
                rows.push((name, p.ring().name(), p.vertices().len()));
            }
            out.emit(
                || {
                    let mut t = Table::new(&["name", "ring", "vertices"]);
                    for (n, r, v) in &rows {
                        t.row([n.to_string(), r.clone(), v.to_string()]);
                    }
                    t.finish()
                },
                &rows
                    .iter()
                    .map(|(n, r, v)| json!({ "name": n, "ring": r, "vertices": v }))
                    .collect::<Vec<_>>(),
            )?;
            Ok(PASS)
        }
        NormAction::Show => {
            let p = load(&a.norm)?;
            let mut summary = norm_summary(&p)?;
            summary["polygon"] =
                serde_json::to_value(polygon_file(&a.norm)?).map_err(|e| CliError::Config(e.to_string()))?;
            out.emit(
                || {
                    let mut t = Table::new(&["vertex", "x_lo", "x_hi", "y_lo", "y_hi"]);
                    for (i, [x, y]) in p.vertices().iter().enumerate() {
                        let (xl, xh) = bounds(x);
                        let (yl, yh) = bounds(y);
                        t.row([i.to_string(), sig15(xl), sig15(xh), sig15(yl), sig15(yh)]);
                    }
                    t.finish()
                },
                &summary,
            )?;
            Ok(PASS)
        }
        NormAction::Eval => {
            let p = load(&a.norm)?;
            let (Some(x), Some(y)) = (&a.x, &a.y) else {
                return Err(CliError::Config("eval needs --x and --y".into()));
            };
            let pt = [
                elem_from_nums(p.ring(), &nums(x)?)?,
                elem_from_nums(p.ring(), &nums(y)?)?,
            ];
            let (v, facet) = p.eval_with_facet(&pt)?;
            let (lo, hi) = bounds(&v);
            out.emit(
                || {
                    let mut t = Table::new(&["value_lo", "value_hi", "facet"]);
                    t.row([sig15(lo), sig15(hi), facet.to_string()]);
                    t.finish()
                },
                &json!({ "value": coords(&v), "value_lo": lo, "value_hi": hi, "facet": facet }),
            )?;
            Ok(PASS)
        }
        NormAction::Check => {
            let p = load(&a.norm)?;
            let rep = norm_axioms_check(&p, a.samples, a.seed)?;
            out.emit(
                || {
                    let mut t = Table::new(&["samples", "checks", "pass"]);
                    t.row([rep.samples.to_string(), rep.checks.to_string(), rep.passed().to_string()]);
                    t.finish()
                },
                &json!({ "samples": rep.samples, "checks": rep.checks, "first_violation": rep.first_violation, "pass": rep.passed() }),
            )?;
            Ok(Outcome { pass: rep.passed() })
        }
    }
}

pub fn modelset(a: &ModelsetArgs, out: &Sink) -> Result<Outcome, CliError> {
    let ring = load_field(&a.field)?;
    let c = a.c.as_deref().map(rational).transpose()?;
    let spec = ModelSetSpec::new(&ring, c)?;
    let r = rational(&a.r)?;
    let t = enumerate_t(&spec, &r, a.budget, Exec::default())?;
    let d = spec.degree();
    match a.action {
        ModelsetAction::Enumerate => {
            let render = || {
                let mut header: Vec<String> = (0..d).map(|i| format!("a{i}")).collect();
                header.push("value_lo".into());
                header.push("value_hi".into());
                let h: Vec<&str> = header.iter().map(String::as_str).collect();
                let mut tab = Table::new(&h);
                for (i, e) in t.elements().iter().enumerate() {
                    let (lo, hi) = bounds(e);
                    let mut row: Vec<String> = t.ints(i).iter().map(i64::to_string).collect();
                    row.push(sig15(lo));
                    row.push(sig15(hi));
                    tab.row(row);
                }
                tab.finish()
            };
            if out.format == Format::Csv {
                out.write(&render())?;
            } else {
                let pts: Vec<&[i64]> = (0..t.len()).map(|i| t.ints(i)).collect();
                out.write(&to_json(&json!({
                    "field": ring.name(),
                    "C": fmt_rational(spec.c()),
                    "R": fmt_rational(&r),
                    "count": t.len(),
                    "points": pts,
                }))?)?;
            }
            Ok(PASS)
        }
        ModelsetAction::Verify => {
            let net = verify_net(&t, &spec)?;
            let lc = verify_local_count(&t, &spec)?;
            let pass = net.pass && lc.pass && t.exact();
            out.emit(
                || {
                    let mut tab = Table::new(&["check", "value", "bound", "pass"]);
                    tab.row(["count".into(), t.len().to_string(), String::new(), "true".to_string()]);
                    tab.row([
                        "max_gap".into(),
                        sig15(net.max_gap_hi),
                        sig15(net.bound_f64),
                        net.pass.to_string(),
                    ]);
                    tab.row([
                        "local_count".into(),
                        lc.max_count.to_string(),
                        lc.k2.to_string(),
                        lc.pass.to_string(),
                    ]);
                    tab.row([
                        "result".into(),
                        if pass { "PASS" } else { "FAIL" }.to_string(),
                        String::new(),
                        pass.to_string(),
                    ]);
                    tab.finish()
                },
                &json!({
                    "field": ring.name(),
                    "C": fmt_rational(spec.c()),
                    "R": fmt_rational(&r),
                    "count": t.len(),
                    "net": net,
                    "local_count": lc,
                    "result": if pass { "PASS" } else { "FAIL" },
                }),
            )?;
            Ok(Outcome { pass })
        }
    }
}

fn set_source(a: &DistsetArgs, p: &PolygonalNorm) -> Result<SetSource, CliError> {
    Ok(match a.set.as_str() {
        "z2" => SetSource::Z2,
        "modelset" => {
            let c = a.c.as_deref().map(rational).transpose()?;
            let radius = a.r.as_deref().map(rational).transpose()?;
            SetSource::ModelSet {
                spec: ModelSetSpec::new(p.ring(), c)?,
                radius,
            }
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read set file {path}: {e}")))?;
            let f: SetFile = parse_json(&text)?;
            if !f.ring.build()?.same(p.ring()) {
                return Err(polydist::Error::RingMismatch.into());
            }
            SetSource::Finite {
                points: f.planar(p.ring())?,
                label: path.to_string(),
            }
        }
    })
}

#[derive(Serialize)]
struct DistsetJson<'a> {
    growth: &'a polydist::distset::GrowthReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    closure: Vec<polydist::distset::ClosureReport>,
}

pub fn distset(a: &DistsetArgs, out: &Sink) -> Result<Outcome, CliError> {
    let p = load(&a.norm)?;
    let src = set_source(a, &p)?;
    let Some(sched) = &a.schedule else {
        return Err(CliError::Config("distset needs --schedule".into()));
    };
    let schedule = list(sched, "schedule", parse_rational)?;
    let mode = match a.mode {
        ModeArg::Threshold => Mode::Threshold,
        ModeArg::Ball => Mode::Ball,
    };
    let mut opts = DistOptions::default();
    if let Some(m) = a.max_pairs {
        if m == 0 {
            return Err(CliError::Config("--max-pairs must be positive".into()));
        }
        opts.max_pairs = m;
    }
    let rep = growth_scan(&src, &p, &schedule, mode, &opts)?;
    if a.values {
        let last = schedule.last().expect("nonempty schedule");
        let ds = compute(&src, &p, last, mode, &opts)?;
        let vals = ds.values();
        out.emit(
            || {
                let mut t = Table::new(&["value_lo", "value_hi", "coords"]);
                for v in &vals {
                    let (lo, hi) = bounds(v);
                    t.row([sig15(lo), sig15(hi), coords(v).join(" ")]);
                }
                t.finish()
            },
            &json!({
                "N": fmt_rational(last),
                "count": vals.len(),
                "values": vals.iter().map(coords).collect::<Vec<_>>(),
            }),
        )?;
        return Ok(PASS);
    }
    let mut closure = Vec::new();
    if a.closure {
        let SetSource::ModelSet { spec, .. } = &src else {
            return Err(CliError::Config("--closure needs --set modelset".into()));
        };
        for n in &schedule {
            let ds = compute(&src, &p, n, mode, &opts)?;
            closure.push(closure_check(&ds, &p, spec)?);
        }
    }
    let pass = closure.iter().all(|c| c.failures == 0);
    out.emit(
        || {
            let mut t = Table::new(&["N", "count"]);
            for r in &rep.rows {
                t.row([r.n.clone(), r.count.to_string()]);
            }
            t.finish()
        },
        &DistsetJson { growth: &rep, closure },
    )?;
    if out.format == Format::Csv {
        eprintln!("exponent {:.6}, ratio spread {:.6}", rep.exponent, rep.ratio_spread);
    }
    Ok(Outcome { pass })
}

pub fn construct(a: &ConstructArgs, out: &Sink) -> Result<Outcome, CliError> {
    let schedule: Vec<u64> = match &a.schedule {
        Some(s) => list(s, "schedule", |t| {
            t.parse::<u64>()
                .map_err(|e| polydist::Error::Parse(format!("schedule entry {t:?}: {e}")))
        })?,
        None => Vec::new(),
    };
    let mut cfg = BuildConfig::default();
    if let Some(m) = a.max_primes {
        cfg.max_primes = m;
    }
    let d = build_stage_with(&schedule, a.stages, &cfg)?;
    let inv = d.check_invariants();
    let mut pass = inv.passed();
    let report = match a.check {
        Some(n) => {
            let rep = verify_containment_bound(&d, n, Exec::default())?;
            eprintln!(
                "stage {} N = {n}: count {} <= bound {}: {}",
                d.stage(),
                rep.count,
                rep.bound,
                if rep.pass { "PASS" } else { "FAIL" }
            );
            pass &= rep.pass;
            Some(rep)
        }
        None => None,
    };
    if let Some(path) = &a.log {
        let log = json!({ "build": d.log(), "invariants": { "checks": inv.checks, "failures": inv.failures }, "containment": report });
        std::fs::write(path, to_json(&log)?)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    let file = PolygonFile::of(d.norm(), RingSpec::Named("rational".into()));
    out.write(&to_json(&file)?)?;
    Ok(Outcome { pass })
}

pub fn repro(a: &ReproArgs, out: &Sink) -> Result<Outcome, CliError> {
    let ids: Vec<u8> = match &a.criterion {
        Some(s) => list(s, "criterion list", |t| {
            t.parse::<u8>()
                .ok()
                .filter(|i| CRITERIA.contains(i))
                .ok_or_else(|| polydist::Error::InvalidArgument(format!("no criterion {t:?}")))
        })?,
        None => CRITERIA.to_vec(),
    };
    let mut reports = Vec::new();
    for id in ids {
        let rep = run_criterion(id, Exec::default())?;
        if out.format == Format::Csv {
            eprintln!("{}", rep.line());
        }
        reports.push(rep);
    }
    let pass = reports.iter().all(|r| r.pass);
    out.emit(
        || {
            let mut t = Table::new(&["criterion", "title", "result", "seconds", "budget_seconds"]);
            for r in &reports {
                t.row([
                    r.id.to_string(),
                    r.title.to_string(),
                    if r.pass { "PASS" } else { "FAIL" }.to_string(),
                    format!("{:.3}", r.seconds),
                    format!("{:.0}", r.budget_seconds),
                ]);
            }
            t.finish()
        },
        &reports,
    )?;
    Ok(Outcome { pass })
}

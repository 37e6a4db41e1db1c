//! The reproduction checks, one per acceptance criterion.

use std::time::Instant;

use num_traits::Zero;
use serde::Serialize;

use crate::construction::{build_stage, verify_containment_bound};
use crate::distset::{closure_check, compute, growth_scan, oracle_distance_set, DistOptions, Mode, SetSource};
use crate::error::{Error, Result};
use crate::exactnum::{q, qr, Ring, Symbol, Q};
use crate::io::named_field;
use crate::modelset::{enumerate_t, verify_local_count, verify_net, ModelSetSpec, DEFAULT_BUDGET};
use crate::polynorm::presets::{preset, preset_names};
use crate::polynorm::{Point, PolygonalNorm};
use crate::sumsetlab::combine_size;
use crate::sumsetlab::scans::{algebraic_contrast, interval};
use crate::sumsetlab::suites::{run_all, DEFAULT_SEED};
use crate::Exec;

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub measurements: Vec<String>,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {}: {} ({:.2} s of {:.0} s)",
            self.id,
            self.title,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds,
            self.budget_seconds
        )
    }
}

struct Acc {
    pass: bool,
    notes: Vec<String>,
}

impl Acc {
    fn new() -> Acc {
        Acc {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, note: String) {
        self.pass &= ok;
        self.notes.push(format!("{} {note}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn field_ring(name: &str) -> Result<Ring> {
    Ok(Ring::field(named_field(name)?.build()?))
}

fn ten(ring: &Ring) -> Result<ModelSetSpec> {
    ModelSetSpec::new(ring, Some(q(10)))
}

fn threshold_count(src: &SetSource, p: &PolygonalNorm, n: i64, mode: Mode, exec: Exec) -> Result<usize> {
    let opts = DistOptions {
        exec,
        ..DistOptions::default()
    };
    Ok(compute(src, p, &q(n), mode, &opts)?.len())
}

fn linf_baseline(acc: &mut Acc, exec: Exec) -> Result<()> {
    let p = preset("linf")?;
    for n in [10i64, 100, 1000] {
        let t = threshold_count(&SetSource::Z2, &p, n, Mode::Threshold, exec)?;
        acc.check(
            t as i64 == n + 1,
            format!("threshold N = {n}: {t} (expected {})", n + 1),
        );
        let b = threshold_count(&SetSource::Z2, &p, n, Mode::Ball, exec)?;
        acc.check(
            b as i64 == 2 * n + 1,
            format!("ball N = {n}: {b} (expected {})", 2 * n + 1),
        );
    }
    Ok(())
}

fn octagon_growth(acc: &mut Acc, exec: Exec) -> Result<()> {
    let p = preset("octagon")?;
    let spec = ten(p.ring())?;
    let src = SetSource::ModelSet {
        spec: spec.clone(),
        radius: None,
    };
    let schedule: Vec<Q> = [50i64, 100, 200, 400].iter().map(|&n| q(n)).collect();
    let opts = DistOptions {
        exec,
        ..DistOptions::default()
    };
    let rep = growth_scan(&src, &p, &schedule, Mode::Threshold, &opts)?;
    for r in &rep.rows {
        acc.notes
            .push(format!("     N = {}: count {} ratio {:.4}", r.n, r.count, r.ratio));
    }
    acc.check(
        rep.exponent <= 1.1,
        format!("fitted exponent {:.4} <= 1.1", rep.exponent),
    );
    acc.check(
        rep.ratio_spread <= 3.0,
        format!("ratio spread {:.4} <= 3", rep.ratio_spread),
    );
    let mut failures = 0;
    let mut checked = 0;
    for n in &schedule {
        let ds = compute(&src, &p, n, Mode::Threshold, &opts)?;
        let c = closure_check(&ds, &p, &spec)?;
        failures += c.failures;
        checked += c.checked;
    }
    acc.check(
        failures == 0,
        format!("closure: {failures} failures over {checked} rescaled distances"),
    );
    Ok(())
}

fn modelset_structure(acc: &mut Acc, exec: Exec) -> Result<()> {
    let r = field_ring("sqrt2")?;
    let spec = ten(&r)?;
    let mut ratios = Vec::new();
    let mut largest = None;
    for radius in [100i64, 1000, 10_000] {
        let t = enumerate_t(&spec, &q(radius), DEFAULT_BUDGET, exec)?;
        ratios.push(t.len() as f64 / radius as f64);
        acc.notes.push(format!("     R = {radius}: |T| = {}", t.len()));
        largest = Some(t);
    }
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    acc.check(hi / lo <= 1.5, format!("density band {:.4} <= 1.5", hi / lo));
    let t = largest.expect("three radii");
    let net = verify_net(&t, &spec)?;
    let target = r.from_ints(&[1, 1]);
    acc.check(
        net.pass && net.bound == target && net.max_gap.cmp_value(&target)?.is_le(),
        format!(
            "max gap {:.6} <= 1 + sqrt2 over {} gaps",
            net.max_gap_hi, net.gaps_checked
        ),
    );
    let lc = verify_local_count(&t, &spec)?;
    acc.check(lc.pass, format!("window count {} <= K2 = {}", lc.max_count, lc.k2));
    Ok(())
}

fn stage_bound(acc: &mut Acc, exec: Exec) -> Result<()> {
    let schedule = [5u64, 25, 125];
    for j in 0..=2 {
        let d = build_stage(&schedule, j)?;
        let inv = d.check_invariants();
        acc.check(inv.passed(), format!("stage {j}: {} invariant checks", inv.checks));
        let lower = if j == 0 { 0 } else { schedule[j - 1] };
        for n in [lower + 1, schedule[j]] {
            let rep = verify_containment_bound(&d, n, exec)?;
            acc.check(
                rep.pass && rep.spot_failures == 0,
                format!(
                    "stage {j} N = {n}: |Δ| = {} <= {} with {} spot checks",
                    rep.count, rep.bound, rep.spot_checks
                ),
            );
        }
    }
    Ok(())
}

fn transcendental_contrast(acc: &mut Acc, exec: Exec) -> Result<()> {
    let p = preset("hexpi")?;
    let schedule: Vec<Q> = [32i64, 64, 128, 256, 512].iter().map(|&n| q(n)).collect();
    let opts = DistOptions {
        exec,
        ..DistOptions::default()
    };
    let rep = growth_scan(&SetSource::Z2, &p, &schedule, Mode::Threshold, &opts)?;
    for r in &rep.rows {
        acc.notes.push(format!("     N = {}: count {}", r.n, r.count));
    }
    acc.check(
        rep.exponent >= 1.3,
        format!("fitted exponent {:.4} >= 1.3", rep.exponent),
    );
    Ok(())
}

fn property_suites(acc: &mut Acc, exec: Exec) -> Result<()> {
    for rep in run_all(DEFAULT_SEED, exec)? {
        acc.check(
            rep.passed() && rep.applicable > 0,
            format!(
                "{}: {} trials, {} applicable, {} violations",
                rep.name, rep.trials, rep.applicable, rep.violations
            ),
        );
        if let Some(v) = rep.first_violation {
            acc.notes.push(format!("     {v}"));
        }
    }
    Ok(())
}

fn dilation_contrast(acc: &mut Acc, exec: Exec) -> Result<()> {
    let r = field_ring("sqrt2")?;
    let spec = ten(&r)?;
    let root = r.from_ints(&[0, 1]);
    let rep = algebraic_contrast(&spec, &root, &[q(50), q(100), q(200)], exec)?;
    for row in &rep.rows {
        acc.notes.push(format!(
            "     R = {}: |A| = {}, |A - sqrt2 A| = {}, ratio {:.4}",
            row.radius, row.size, row.diff_size, row.ratio
        ));
    }
    acc.check(rep.spread <= 1.25, format!("ratio spread {:.4} <= 1.25", rep.spread));
    let z = Ring::symbolic(Symbol::Pi);
    let x = z.generator();
    for n in [5usize, 10, 20] {
        let a = interval(&z, n);
        let s = combine_size(&a, &z.one(), &a, &-&x)?;
        acc.check(s == (n + 1) * (n + 1), format!("|A - xA| = {s} for A = {{0..{n}}}"));
    }
    Ok(())
}

fn grid(p: &PolygonalNorm, lo: i64, hi: i64) -> Vec<Point> {
    let mut v = Vec::new();
    for x in lo..=hi {
        for y in lo..=hi {
            v.push(p.point(&[x], &[y]));
        }
    }
    v
}

/// Integer vectors in the box `|a_j| <= R |W_j0| + C sum_{k >= 1} |W_jk|` that satisfy every band.
fn box_members(spec: &ModelSetSpec, radius: &Q) -> Result<Vec<Vec<i64>>> {
    let d = spec.degree();
    let bounds: Vec<i64> = spec
        .inverse_bounds()
        .iter()
        .map(|row| {
            let b = row
                .iter()
                .enumerate()
                .fold(Q::zero(), |s, (k, w)| s + w * if k == 0 { radius } else { spec.c() });
            i64::try_from(b.floor().to_integer()).unwrap_or(i64::MAX)
        })
        .collect();
    let ring = spec.ring();
    let mut out = Vec::new();
    let mut a: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let limit = ring.from_q(radius.clone());
    loop {
        let e = ring.from_ints(&a);
        if spec.contains(&e)? && e.abs()?.cmp_value(&limit)?.is_le() {
            out.push(a.clone());
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(out);
            }
            if a[i] < bounds[i] {
                a[i] += 1;
                break;
            }
            a[i] = -bounds[i];
            i += 1;
        }
    }
}

fn oracle_equivalence(acc: &mut Acc, exec: Exec) -> Result<()> {
    for name in preset_names() {
        let p = preset(name)?;
        let pts = if name == "octagon" {
            let t = enumerate_t(&ten(p.ring())?, &qr(3, 2), DEFAULT_BUDGET, exec)?;
            let e = t.elements();
            e.iter()
                .flat_map(|x| e.iter().map(move |y| [x.clone(), y.clone()]))
                .collect()
        } else {
            grid(&p, -10, 10)
        };
        if pts.len() > 500 {
            return Err(Error::Internal(format!("{name} window has {} points", pts.len())));
        }
        let mut same = true;
        for n in [q(0), qr(7, 2), q(6), q(40)] {
            let src = SetSource::Finite {
                points: pts.clone(),
                label: name.into(),
            };
            let opts = DistOptions {
                exec,
                ..DistOptions::default()
            };
            let fast = compute(&src, &p, &n, Mode::Threshold, &opts)?.values();
            same &= fast == oracle_distance_set(&pts, &p, Some(&n))?;
        }
        acc.check(same, format!("distance sets of {name} on {} points", pts.len()));
    }
    for name in ["rational", "sqrt2", "cubic"] {
        let r = field_ring(name)?;
        for spec in [ModelSetSpec::new(&r, None)?, ten(&r)?] {
            let radius = q(100);
            let t = enumerate_t(&spec, &radius, DEFAULT_BUDGET, exec)?;
            let mut fast: Vec<Vec<i64>> = (0..t.len()).map(|i| t.ints(i).to_vec()).collect();
            fast.sort();
            let mut brute = box_members(&spec, &radius)?;
            brute.sort();
            acc.check(
                fast == brute,
                format!("T({}) ∩ [-100, 100] in {name}: {} points", spec.c(), fast.len()),
            );
        }
    }
    Ok(())
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "l-infinity baseline",
        2 => "octagon over the model set",
        3 => "model-set structure",
        4 => "staged construction bound",
        5 => "transcendental hexagon",
        6 => "sumset property suites",
        7 => "dilation contrast",
        _ => "oracle equivalence",
    }
}

fn budget(id: u8) -> f64 {
    match id {
        1 => 10.0,
        2 | 4 | 5 => 300.0,
        3 | 7 => 60.0,
        _ => 120.0,
    }
}

/// Runs one criterion; an error inside a check fails the criterion with its message.
pub fn run_criterion(id: u8, exec: Exec) -> Result<CriterionReport> {
    let f: fn(&mut Acc, Exec) -> Result<()> = match id {
        1 => linf_baseline,
        2 => octagon_growth,
        3 => modelset_structure,
        4 => stage_bound,
        5 => transcendental_contrast,
        6 => property_suites,
        7 => dilation_contrast,
        8 => oracle_equivalence,
        _ => return Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let mut acc = Acc::new();
    let start = Instant::now();
    if let Err(e) = f(&mut acc, exec) {
        acc.check(false, format!("error: {e}"));
    }
    let seconds = start.elapsed().as_secs_f64();
    let budget_seconds = budget(id);
    acc.check(
        seconds <= budget_seconds,
        format!("runtime {seconds:.2} s <= {budget_seconds:.0} s"),
    );
    Ok(CriterionReport {
        id,
        title: title(id),
        pass: acc.pass,
        seconds,
        budget_seconds,
        measurements: acc.notes,
    })
}

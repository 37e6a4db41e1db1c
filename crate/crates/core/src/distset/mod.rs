//! Exact distance sets `{ ||a - a'|| <= N }` and growth fits.

pub mod kernel;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{ceil_dyadic, fmt_rational, to_f64};
use crate::exactnum::{q, Ring, RingElem, Q};
use crate::exec::Exec;
use crate::modelset::{enumerate_t, ModelSetSpec, WindowedSet, DEFAULT_BUDGET};
use crate::polynorm::{Point, PolygonalNorm};

pub use kernel::{Kernel, Key, KEY_LEN};

type KeyMap = FxHashMap<Key, u8>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Distances at most `N` between any two points of the set.
    Threshold,
    /// All distances between points of the set inside the ball of radius `N`.
    Ball,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "threshold" => Ok(Mode::Threshold),
            "ball" => Ok(Mode::Ball),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DistOptions {
    pub exec: Exec,
    /// Cap on the number of difference vectors examined.
    pub max_pairs: u64,
}

impl Default for DistOptions {
    fn default() -> Self {
        DistOptions {
            exec: Exec::default(),
            max_pairs: 4_000_000_000,
        }
    }
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum SetSource {
    /// The integer lattice.
    Z2,
    /// `T(C) × T(C)` over `[-R, R]`; `radius = None` picks `R = ceil(rho N)` at each `N`.
    ModelSet { spec: ModelSetSpec, radius: Option<Q> },
    /// An explicit finite set.
    Finite { points: Vec<Point>, label: String },
}

impl SetSource {
    pub fn label(&self) -> String {
        match self {
            SetSource::Z2 => "z2".into(),
            SetSource::ModelSet { spec, radius } => match radius {
                Some(r) => format!("modelset(C={}, R={})", fmt_rational(spec.c()), fmt_rational(r)),
                None => format!("modelset(C={}, R=auto)", fmt_rational(spec.c())),
            },
            SetSource::Finite { label, points } => format!("{label}({} points)", points.len()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistanceSet {
    norm: String,
    threshold: Q,
    mode: Mode,
    source: String,
    window: Option<Q>,
    kernel: Arc<Kernel>,
    /// `(key, half-facet)` sorted by value.
    entries: Vec<(Key, u8)>,
}

impl DistanceSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn threshold(&self) -> &Q {
        &self.threshold
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn norm_name(&self) -> &str {
        &self.norm
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Window radius of a model-set source.
    pub fn window(&self) -> Option<&Q> {
        self.window.as_ref()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn entries(&self) -> &[(Key, u8)] {
        &self.entries
    }

    /// Distinct values in increasing order.
    pub fn values(&self) -> Vec<RingElem> {
        self.entries.iter().map(|(k, _)| self.kernel.to_elem(k)).collect()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|(k, _)| self.kernel.key_f64(k)).collect()
    }

    pub fn contains(&self, v: &RingElem) -> bool {
        self.key_of(v)
            .map(|k| self.entries.iter().any(|(e, _)| *e == k))
            .unwrap_or(false)
    }

    fn key_of(&self, v: &RingElem) -> Option<Key> {
        let l = Q::from_integer(self.kernel.denominator().clone());
        if v.coords().len() > self.kernel.dk() {
            return None;
        }
        let mut k = [0i64; KEY_LEN];
        for (r, c) in v.coords().iter().enumerate() {
            let x = c * &l;
            if !x.is_integer() {
                return None;
            }
            k[r] = i64::try_from(&x.to_integer()).ok()?;
        }
        Some(k)
    }
}

/// `||z||` as an exact ring element; its coordinate vector is the dedup key.
pub fn canonical_distance(p: &PolygonalNorm, z: &Point) -> Result<RingElem> {
    p.eval(z)
}

pub fn canonical_key(p: &PolygonalNorm, z: &Point) -> Result<Vec<Q>> {
    let v = canonical_distance(p, z)?;
    let mut c = v.coords().to_vec();
    if c.is_empty() {
        c.push(Q::zero());
    }
    Ok(c)
}

/// Window radius `ceil(rho N)` for model-set sources.
pub fn window_radius(p: &PolygonalNorm, n: &Q) -> Result<Q> {
    let s = p.sandwich()?;
    Ok((&s.rho * n).ceil())
}

/// Distances at most `n` in a finite set.
pub fn distance_set(points: &[Point], p: &PolygonalNorm, n: &Q) -> Result<DistanceSet> {
    compute(
        &SetSource::Finite {
            points: points.to_vec(),
            label: "set".into(),
        },
        p,
        n,
        Mode::Threshold,
        &DistOptions::default(),
    )
}

pub fn compute(source: &SetSource, p: &PolygonalNorm, n: &Q, mode: Mode, opts: &DistOptions) -> Result<DistanceSet> {
    if n < &Q::zero() {
        return Err(Error::InvalidArgument("threshold must be nonnegative".into()));
    }
    if p.half() > u8::MAX as usize {
        return Err(Error::InvalidArgument("polygon has too many sides".into()));
    }
    let ring = p.ring().clone();
    let mut window = None;
    let (kernel, map) = match (source, mode) {
        (SetSource::Z2, Mode::Threshold) => {
            let k = Kernel::compile(p, &[ring.one()], Some(n))?;
            let m = z2_threshold(&k, p, n, opts)?;
            (k, m)
        }
        (SetSource::Z2, Mode::Ball) => z2_ball(p, n, opts)?,
        (SetSource::ModelSet { spec, radius }, Mode::Threshold) => {
            let need = window_radius(p, n)?;
            let r = match radius {
                Some(r) if r < &need => {
                    return Err(Error::WindowInsufficient(format!(
                        "window radius {} is below {} needed at N = {}",
                        fmt_rational(r),
                        fmt_rational(&need),
                        fmt_rational(n)
                    )))
                }
                Some(r) => r.clone(),
                None => need,
            };
            window = Some(r.clone());
            product_threshold(spec, &r, p, n, opts)?
        }
        (SetSource::ModelSet { spec, radius }, Mode::Ball) => {
            if !spec.ring().same(&ring) {
                return Err(Error::RingMismatch);
            }
            let b = p.sandwich()?.box_radius * n;
            let r = radius.clone().unwrap_or_else(|| b.ceil());
            if r < b {
                return Err(Error::WindowInsufficient(format!(
                    "window radius {} does not cover the ball of radius {}",
                    fmt_rational(&r),
                    fmt_rational(n)
                )));
            }
            window = Some(r.clone());
            let t = enumerate_t(spec, &r, DEFAULT_BUDGET, opts.exec)?;
            let est = (t.len() as u64).saturating_mul(t.len() as u64);
            if est > opts.max_pairs {
                return Err(Error::Budget(format!("{est} candidate points exceed the pair budget")));
            }
            let mut pts = Vec::new();
            for x in t.elements() {
                for y in t.elements() {
                    pts.push([x.clone(), y.clone()]);
                }
            }
            finite(&pts, p, n, Mode::Ball, opts)?
        }
        (SetSource::Finite { points, .. }, mode) => finite(points, p, n, mode, opts)?,
    };
    finish(p, n, mode, source.label(), window, kernel, map)
}

fn finish(
    p: &PolygonalNorm,
    n: &Q,
    mode: Mode,
    source: String,
    window: Option<Q>,
    kernel: Kernel,
    map: KeyMap,
) -> Result<DistanceSet> {
    let mut entries: Vec<(Key, u8, f64)> = map.into_iter().map(|(k, f)| (k, f, kernel.key_f64(&k))).collect();
    let mut failure = None;
    entries.sort_by(|a, b| {
        let tol = 1e-9 * (1.0 + a.2.abs().max(b.2.abs()));
        if (a.2 - b.2).abs() > tol {
            return a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal);
        }
        match kernel.cmp_keys(&a.0, &b.0) {
            Ok(o) => o,
            Err(e) => {
                failure.get_or_insert(e);
                Ordering::Equal
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(DistanceSet {
        norm: p.name().to_string(),
        threshold: n.clone(),
        mode,
        source,
        window,
        kernel: Arc::new(kernel),
        entries: entries.into_iter().map(|(k, f, _)| (k, f)).collect(),
    })
}

fn merge(a: KeyMap, b: KeyMap) -> KeyMap {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (k, f) in small {
        insert(&mut big, k, f);
    }
    big
}

fn insert(m: &mut KeyMap, k: Key, f: u8) {
    m.entry(k).and_modify(|g| *g = (*g).min(f)).or_insert(f);
}

type Acc = Result<KeyMap>;

fn reduce(a: Acc, b: Acc) -> Acc {
    Ok(merge(a?, b?))
}

/// Range of `y` with `|a x + b y| <= n` for every half-facet, in doubles and slightly widened.
fn y_range(k: &Kernel, x: f64, n: f64, swap: bool) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let slack = 1e-9 * (1.0 + n + x.abs());
    for i in 0..k.half() {
        let (mut a, mut b) = k.facet_f64(i);
        if swap {
            std::mem::swap(&mut a, &mut b);
        }
        if b.abs() < 1e-300 {
            if (a * x).abs() > n + slack {
                return None;
            }
            continue;
        }
        let u = (-n - a * x) / b;
        let v = (n - a * x) / b;
        lo = lo.max(u.min(v) - slack);
        hi = hi.min(u.max(v) + slack);
    }
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

fn box_extent(p: &PolygonalNorm, n: &Q) -> Result<i64> {
    let b = p.sandwich()?.box_radius * n;
    i64::try_from(&b.floor().to_integer()).map_err(|_| Error::Budget("threshold too large".into()))
}

fn z2_threshold(k: &Kernel, p: &PolygonalNorm, n: &Q, opts: &DistOptions) -> Result<KeyMap> {
    let m = box_extent(p, n)?;
    k.check_range(m + 2)?;
    let side = (2 * m + 1) as u64;
    if side.saturating_mul(side) / 2 > opts.max_pairs {
        return Err(Error::Budget(format!("about {} difference vectors", side * side / 2)));
    }
    let nf = to_f64(n);
    let rows: Vec<i64> = (0..=m).collect();
    opts.exec.fold(
        &rows,
        || Ok(KeyMap::default()),
        |acc: Acc, &z1| {
            let mut acc = acc?;
            let mut scratch = Vec::new();
            let Some((lo, hi)) = y_range(k, z1 as f64, nf, false) else {
                return Ok(acc);
            };
            let mut lo = (lo.floor() as i64).max(-m);
            let hi = (hi.ceil() as i64).min(m);
            if z1 == 0 {
                lo = lo.max(0);
            }
            for z2 in lo..=hi {
                if let Some((key, f)) = k.classify(&[z1, z2], &mut scratch)? {
                    insert(&mut acc, key, f);
                }
            }
            Ok(acc)
        },
        reduce,
    )
}

/// Differences of lattice points inside the ball, via row intervals.
fn z2_ball(p: &PolygonalNorm, n: &Q, opts: &DistOptions) -> Result<(Kernel, KeyMap)> {
    let ring = p.ring().clone();
    let member = Kernel::compile(p, &[ring.one()], Some(n))?;
    let k = Kernel::compile(p, &[ring.one()], None)?;
    let m = box_extent(p, n)?;
    k.check_range(2 * m + 2)?;
    let nf = to_f64(n);
    let mut scratch = Vec::new();
    let mut rows: Vec<Option<(i64, i64)>> = Vec::with_capacity((2 * m + 1) as usize);
    for y in -m..=m {
        let Some((lo, hi)) = y_range(&member, y as f64, nf, true) else {
            rows.push(None);
            continue;
        };
        let mut lo = (lo.floor() as i64).max(-m);
        let mut hi = (hi.ceil() as i64).min(m);
        while lo <= hi && member.classify(&[lo, y], &mut scratch)?.is_none() {
            lo += 1;
        }
        while hi >= lo && member.classify(&[hi, y], &mut scratch)?.is_none() {
            hi -= 1;
        }
        rows.push(if lo <= hi { Some((lo, hi)) } else { None });
    }
    let side = (4 * m + 1) as u64;
    if side.saturating_mul(side) / 2 > opts.max_pairs {
        return Err(Error::Budget(format!("about {} difference vectors", side * side / 2)));
    }
    let dys: Vec<i64> = (0..=2 * m).collect();
    let rows = &rows;
    let map = opts.exec.fold(
        &dys,
        || Ok(KeyMap::default()),
        |acc: Acc, &dy| {
            let mut acc = acc?;
            let mut scratch = Vec::new();
            let mut iv: Vec<(i64, i64)> = Vec::new();
            for y2 in -m..=m - dy {
                let y1 = y2 + dy;
                if let (Some((l1, r1)), Some((l2, r2))) = (rows[(y1 + m) as usize], rows[(y2 + m) as usize]) {
                    iv.push((l1 - r2, r1 - l2));
                }
            }
            iv.sort_unstable();
            let mut merged: Vec<(i64, i64)> = Vec::new();
            for (a, b) in iv {
                match merged.last_mut() {
                    Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
                    _ => merged.push((a, b)),
                }
            }
            for (a, b) in merged {
                let a = if dy == 0 { a.max(0) } else { a };
                for dx in a..=b {
                    if let Some((key, f)) = k.classify(&[dx, dy], &mut scratch)? {
                        insert(&mut acc, key, f);
                    }
                }
            }
            Ok(acc)
        },
        reduce,
    )?;
    Ok((k, map))
}

fn pad(ints: &[i64]) -> Key {
    let mut k = [0i64; KEY_LEN];
    k[..ints.len()].copy_from_slice(ints);
    k
}

/// `(T_R - T_R) ∩ [-r, r]`, decided exactly from the two windows.
pub fn window_differences(spec: &ModelSetSpec, t: &WindowedSet, r: &Q, exec: Exec) -> Result<WindowedSet> {
    let band = spec.c() * q(2);
    let cand = enumerate_t(&spec.with_band(band)?, r, DEFAULT_BUDGET, exec)?;
    let d = spec.degree();
    let members: FxHashSet<Key> = (0..t.len()).map(|i| pad(t.ints(i))).collect();
    let rf = to_f64(t.radius());
    let vals = t.values();
    let idx: Vec<usize> = (0..cand.len()).collect();
    let keep = exec.map(&idx, |&i| {
        let dv = cand.values()[i];
        let dz = cand.ints(i);
        let lo = (-rf).max(dv - rf) - 1e-6;
        let hi = rf.min(dv + rf) + 1e-6;
        let start = vals.partition_point(|&v| v < lo);
        let mut tmp = [0i64; KEY_LEN];
        for (j, &v) in vals.iter().enumerate().skip(start) {
            if v > hi {
                break;
            }
            let a = t.ints(j);
            for c in 0..d {
                tmp[c] = a[c] - dz[c];
            }
            if members.contains(&tmp) {
                return true;
            }
        }
        false
    });
    Ok(cand.filter(|i| keep[i]))
}

fn product_threshold(
    spec: &ModelSetSpec,
    r: &Q,
    p: &PolygonalNorm,
    n: &Q,
    opts: &DistOptions,
) -> Result<(Kernel, KeyMap)> {
    let ring = p.ring().clone();
    if !spec.ring().same(&ring) {
        return Err(Error::RingMismatch);
    }
    let d = spec.degree();
    let basis: Vec<RingElem> = (0..d).map(|c| ring.generator().pow(c as u32)).collect();
    let basis = if d == 1 { vec![ring.one()] } else { basis };
    let k = Kernel::compile(p, &basis, Some(n))?;
    let t = enumerate_t(spec, r, DEFAULT_BUDGET, opts.exec)?;
    let b = p.sandwich()?.box_radius * n;
    let diffs = window_differences(spec, &t, &b, opts.exec)?;
    let zmax = (0..diffs.len())
        .flat_map(|i| diffs.ints(i).iter().map(|v| v.abs()))
        .max()
        .unwrap_or(0);
    k.check_range(zmax)?;
    let nd = diffs.len() as u64;
    if nd.saturating_mul(nd) / 2 > opts.max_pairs {
        return Err(Error::Budget(format!("about {} difference vectors", nd * nd / 2)));
    }
    let vals = diffs.values();
    let zero = (0..diffs.len()).find(|&i| diffs.ints(i).iter().all(|&v| v == 0));
    let Some(zero) = zero else {
        return Ok((k, KeyMap::default()));
    };
    let nf = to_f64(n);
    let rows: Vec<usize> = (zero..diffs.len()).collect();
    let diffs = &diffs;
    let map = opts.exec.fold(
        &rows,
        || Ok(KeyMap::default()),
        |acc: Acc, &i| {
            let mut acc = acc?;
            let mut scratch = Vec::new();
            let Some((lo, hi)) = y_range(&k, vals[i], nf, false) else {
                return Ok(acc);
            };
            let mut j = vals.partition_point(|&v| v < lo);
            if i == zero {
                j = j.max(zero);
            }
            let mut z = vec![0i64; 2 * d];
            z[..d].copy_from_slice(diffs.ints(i));
            while j < vals.len() && vals[j] <= hi {
                z[d..].copy_from_slice(diffs.ints(j));
                if let Some((key, f)) = k.classify(&z, &mut scratch)? {
                    insert(&mut acc, key, f);
                }
                j += 1;
            }
            Ok(acc)
        },
        reduce,
    )?;
    Ok((k, map))
}

/// Basis `gen^c / D` making every point coordinate an integer vector.
fn finite_basis(ring: &Ring, points: &[Point]) -> Result<(Vec<RingElem>, BigInt)> {
    let den = kernel::common_denominator(points.iter().flat_map(|p| p.iter()));
    let dz = match ring.degree() {
        Some(d) => d,
        None => points
            .iter()
            .flat_map(|p| p.iter().map(|e| e.coords().len()))
            .max()
            .unwrap_or(1)
            .max(1),
    };
    let inv = Q::new(BigInt::one(), den.clone());
    let g = ring.generator();
    let basis = (0..dz)
        .map(|c| if c == 0 { ring.one() } else { g.pow(c as u32) }.scale(&inv))
        .collect();
    Ok((basis, den))
}

fn point_ints(p: &Point, dz: usize, den: &BigInt) -> Result<Vec<i64>> {
    let dq = Q::from_integer(den.clone());
    let mut out = Vec::with_capacity(2 * dz);
    for e in p {
        for c in 0..dz {
            let x = (e.coord(c) * &dq).to_integer();
            out.push(i64::try_from(&x).map_err(|_| Error::Budget("point coordinate exceeds 64 bits".into()))?);
        }
    }
    Ok(out)
}

fn finite(points: &[Point], p: &PolygonalNorm, n: &Q, mode: Mode, opts: &DistOptions) -> Result<(Kernel, KeyMap)> {
    let ring = p.ring().clone();
    for pt in points {
        if !pt[0].ring().same(&ring) || !pt[1].ring().same(&ring) {
            return Err(Error::RingMismatch);
        }
    }
    let (basis, den) = finite_basis(&ring, points)?;
    let dz = basis.len();
    let mut ints: Vec<Vec<i64>> = points
        .iter()
        .map(|pt| point_ints(pt, dz, &den))
        .collect::<Result<_>>()?;
    let mut xy: Vec<(f64, f64)> = points.iter().map(|pt| (pt[0].to_f64(), pt[1].to_f64())).collect();
    let k_threshold = Kernel::compile(p, &basis, Some(n))?;
    let zmax = ints.iter().flatten().map(|v| v.abs()).max().unwrap_or(0);
    k_threshold.check_range(2 * zmax + 1)?;
    let mut scratch = Vec::new();
    let k = match mode {
        Mode::Threshold => k_threshold,
        Mode::Ball => {
            let mut keep_i = Vec::new();
            let mut keep_xy = Vec::new();
            for (a, c) in ints.into_iter().zip(xy) {
                if k_threshold.classify(&a, &mut scratch)?.is_some() {
                    keep_i.push(a);
                    keep_xy.push(c);
                }
            }
            ints = keep_i;
            xy = keep_xy;
            Kernel::compile(p, &basis, None)?
        }
    };
    let mut map = KeyMap::default();
    if ints.is_empty() {
        return Ok((k, map));
    }
    insert(&mut map, [0; KEY_LEN], 0);
    // Bucket width at least the box bound on difference coordinates in threshold mode.
    let width = match mode {
        Mode::Threshold => (to_f64(&p.sandwich()?.box_radius) * to_f64(n)).max(1e-6) * (1.0 + 1e-9) + 1e-9,
        Mode::Ball => f64::INFINITY,
    };
    let cell = |c: (f64, f64)| -> (i64, i64) {
        if width.is_infinite() {
            (0, 0)
        } else {
            ((c.0 / width).floor() as i64, (c.1 / width).floor() as i64)
        }
    };
    let mut buckets: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
    for (i, c) in xy.iter().enumerate() {
        buckets.entry(cell(*c)).or_default().push(i);
    }
    let mut cells: Vec<(i64, i64)> = buckets.keys().copied().collect();
    cells.sort_unstable();
    let neighbors = [(0, 0), (0, 1), (1, -1), (1, 0), (1, 1)];
    let mut pairs: u64 = 0;
    for c in &cells {
        let a = buckets[c].len() as u64;
        for (dx, dy) in neighbors {
            if let Some(b) = buckets.get(&(c.0 + dx, c.1 + dy)) {
                pairs += if (dx, dy) == (0, 0) {
                    a * (a - 1) / 2
                } else {
                    a * b.len() as u64
                };
            }
        }
    }
    if pairs > opts.max_pairs {
        return Err(Error::Budget(format!("{pairs} point pairs exceed the pair budget")));
    }
    let buckets = &buckets;
    let ints = &ints;
    let found = opts.exec.fold(
        &cells,
        || Ok(KeyMap::default()),
        |acc: Acc, c| {
            let mut acc = acc?;
            let mut scratch = Vec::new();
            let mut z = vec![0i64; 2 * dz];
            let here = &buckets[c];
            for (dx, dy) in neighbors {
                let Some(other) = buckets.get(&(c.0 + dx, c.1 + dy)) else {
                    continue;
                };
                let same = (dx, dy) == (0, 0);
                for (ai, &i) in here.iter().enumerate() {
                    let from = if same { ai + 1 } else { 0 };
                    for &j in &other[from..] {
                        for (t, zt) in z.iter_mut().enumerate() {
                            *zt = ints[i][t] - ints[j][t];
                        }
                        if let Some((key, f)) = k.classify(&z, &mut scratch)? {
                            insert(&mut acc, key, f);
                        }
                    }
                }
            }
            Ok(acc)
        },
        reduce,
    )?;
    Ok((k, merge(map, found)))
}

/// All-pairs reference computation: every value is compared by exact sign tests only.
#[allow(clippy::mutable_key_type)]
pub fn oracle_distance_set(points: &[Point], p: &PolygonalNorm, n: Option<&Q>) -> Result<Vec<RingElem>> {
    let nv = n.map(|n| p.ring().from_q(n.clone()));
    let mut seen: HashSet<RingElem> = HashSet::new();
    let mut out = Vec::new();
    let mut diffs: HashSet<[RingElem; 2]> = HashSet::new();
    for i in 0..points.len() {
        for j in i..points.len() {
            diffs.insert([&points[i][0] - &points[j][0], &points[i][1] - &points[j][1]]);
        }
    }
    for z in &diffs {
        let mut best: Option<RingElem> = None;
        for f in p.facets() {
            let v = f.eval(z);
            best = Some(match best {
                Some(b) if b.cmp_value(&v)? != Ordering::Less => b,
                _ => v,
            });
        }
        let v = best.expect("polygon has facets");
        if let Some(nv) = &nv {
            if v.cmp_value(nv)? == Ordering::Greater {
                continue;
            }
        }
        if seen.insert(v.clone()) {
            out.push(v);
        }
    }
    let mut failure = None;
    out.sort_by(|a, b| match a.cmp_value(b) {
        Ok(o) => o,
        Err(e) => {
            failure.get_or_insert(e);
            Ordering::Equal
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: String,
    pub n_f64: f64,
    pub count: u64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub norm: String,
    pub source: String,
    pub mode: Mode,
    pub rows: Vec<GrowthRow>,
    pub exponent: f64,
    pub intercept: f64,
    /// Root mean square residual of the log-log fit.
    pub residual: f64,
    /// Largest over smallest `count / N`.
    pub ratio_spread: f64,
}

/// Least squares fit of `log y = a log x + b`, returning `(a, b, rms residual)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

pub fn growth_scan(
    source: &SetSource,
    p: &PolygonalNorm,
    schedule: &[Q],
    mode: Mode,
    opts: &DistOptions,
) -> Result<GrowthReport> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    for w in schedule.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidArgument("schedule must be strictly increasing".into()));
        }
    }
    if !schedule[0].is_positive() {
        return Err(Error::InvalidArgument("schedule values must be positive".into()));
    }
    let mut rows = Vec::with_capacity(schedule.len());
    for n in schedule {
        let ds = compute(source, p, n, mode, opts)?;
        let nf = to_f64(n);
        rows.push(GrowthRow {
            n: fmt_rational(n),
            n_f64: nf,
            count: ds.len() as u64,
            ratio: ds.len() as f64 / nf,
            window: ds.window().map(fmt_rational),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n_f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.count as f64).collect();
    let (exponent, intercept, residual) = fit_loglog(&xs, &ys);
    let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(GrowthReport {
        norm: p.name().to_string(),
        source: source.label(),
        mode,
        rows,
        exponent,
        intercept,
        residual,
        ratio_spread: hi / lo,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub c_prime: String,
    pub c_prime_f64: f64,
    pub checked: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<String>,
}

/// Rational `C' >= 2C max_i max_{k>=1} (|sigma_k(s_i u_i1)| + |sigma_k(s_i u_i2)|)`.
pub fn closure_bound(p: &PolygonalNorm, spec: &ModelSetSpec) -> Result<Q> {
    let field = spec.field();
    let mut best = Q::zero();
    for f in &p.facets()[..p.half()] {
        for k in field.embedding_representatives() {
            if k == 0 {
                continue;
            }
            let mut s = Q::zero();
            for u in &f.u {
                let w = u.scale(&f.scale);
                s += w.embed(k, 64).abs_upper();
            }
            if s > best {
                best = s;
            }
        }
    }
    Ok(ceil_dyadic(&(best * spec.c() * q(2)), 20))
}

/// Each distance attained on half-facet `i`, scaled by `s_i`, lies in `T(C')`.
pub fn closure_check(ds: &DistanceSet, p: &PolygonalNorm, spec: &ModelSetSpec) -> Result<ClosureReport> {
    let c_prime = closure_bound(p, spec)?;
    let mut failures = 0;
    let mut examples = Vec::new();
    for (key, f) in ds.entries() {
        let v = ds.kernel().to_elem(key);
        let w = v.scale(&p.facets()[*f as usize].scale);
        if !spec.in_band(&w, &c_prime)? {
            failures += 1;
            if examples.len() < 5 {
                examples.push(format!("{v} on facet {f}"));
            }
        }
    }
    Ok(ClosureReport {
        c_prime_f64: to_f64(&c_prime),
        c_prime: fmt_rational(&c_prime),
        checked: ds.len(),
        failures,
        examples,
    })
}

/// Number of points of a source within norm `r` of the origin.
pub fn ball_count(source: &SetSource, p: &PolygonalNorm, r: &Q, exec: Exec) -> Result<u64> {
    let ring = p.ring().clone();
    match source {
        SetSource::Z2 => {
            let k = Kernel::compile(p, &[ring.one()], Some(r))?;
            let m = box_extent(p, r)?;
            let mut scratch = Vec::new();
            let mut c = 0;
            for x in -m..=m {
                for y in -m..=m {
                    c += k.classify(&[x, y], &mut scratch)?.is_some() as u64;
                }
            }
            Ok(c)
        }
        SetSource::ModelSet { spec, .. } => {
            let d = spec.degree();
            let basis: Vec<RingElem> = (0..d).map(|c| ring.generator().pow(c as u32)).collect();
            let basis = if d == 1 { vec![ring.one()] } else { basis };
            let k = Kernel::compile(p, &basis, Some(r))?;
            let b = (p.sandwich()?.box_radius * r).ceil();
            let t = enumerate_t(spec, &b, DEFAULT_BUDGET, exec)?;
            let mut scratch = Vec::new();
            let mut c = 0;
            let mut z = vec![0i64; 2 * d];
            for i in 0..t.len() {
                for j in 0..t.len() {
                    z[..d].copy_from_slice(t.ints(i));
                    z[d..].copy_from_slice(t.ints(j));
                    c += k.classify(&z, &mut scratch)?.is_some() as u64;
                }
            }
            Ok(c)
        }
        SetSource::Finite { points, .. } => {
            let rv = ring.from_q(r.clone());
            let mut c = 0;
            for pt in points {
                c += (p.eval(pt)?.cmp_value(&rv)? != Ordering::Greater) as u64;
            }
            Ok(c)
        }
    }
}

//! Staged polygons whose vertex directions avoid short lattice directions, and the
//! coordinate change sending one side slope to `1`.
//!
//! A stage polygon lives in the quadrant `x2 >= |x1|` and is stored as its upper chain of
//! vertices, from `(-1/2, 1/2)` to `(1/2, 1/2)`. The ball of the associated norm is the
//! union of the four rotated copies of that chain. Directions along the chain are tracked
//! by the ratio `t = x1 / x2`, which increases from `-1` to `1`.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::distset::{compute, DistOptions, Mode, SetSource};
use crate::error::{Error, Result};
use crate::exactnum::rational::{fmt_rational, q, qr, rationals_between};
use crate::exactnum::{Ring, RingElem, Q};
use crate::polynorm::{Point, PolygonalNorm};
use crate::Exec;

pub const DEFAULT_MAX_STAGE: usize = 4;

/// A rational point of the plane.
pub type RPoint = [Q; 2];

/// Closed interval of directions `t = x1 / x2` along the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub lo: Q,
    pub hi: Q,
}

impl Region {
    pub fn contains_strictly(&self, t: &Q) -> bool {
        &self.lo < t && t < &self.hi
    }

    /// True when no fraction with denominator at most `n` lies in the region.
    pub fn avoids(&self, n: u64) -> bool {
        simplest_in(&self.lo, &self.hi).denom() > &BigInt::from(n)
    }

    fn mirror(&self) -> Region {
        Region {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

/// A corner cut on the right half of the chain, along `2^(stage-1) x2 - a x1 = b`.
///
/// The mirrored cut on the left half is implied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub stage: usize,
    pub a: i64,
    pub b: Q,
    pub vertices: [RPoint; 2],
}

impl Cut {
    pub fn slope(&self) -> Q {
        qr(self.a, 1i64 << (self.stage - 1))
    }
}

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub max_stage: usize,
    /// Primes tried per corner before the offset search gives up.
    pub max_primes: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            max_stage: DEFAULT_MAX_STAGE,
            max_primes: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StagePolygon {
    stage: usize,
    schedule: Vec<u64>,
    chain: Vec<RPoint>,
    /// Chain indices of the vertices created by the last stage, with their regions.
    fresh: Vec<(usize, Region)>,
    cuts: Vec<Cut>,
    norm: PolygonalNorm,
}

/// The fraction of least denominator in `[lo, hi]`.
pub fn simplest_in(lo: &Q, hi: &Q) -> Q {
    debug_assert!(lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let up = &fl + Q::one();
    if &up <= hi {
        return up;
    }
    let x = lo - &fl;
    let y = hi - &fl;
    &fl + simplest_in(&y.recip(), &x.recip()).recip()
}

/// Direction `x1 / x2` of a point with `x2 > 0`.
pub fn direction(p: &RPoint) -> Q {
    &p[0] / &p[1]
}

fn mirror(p: &RPoint) -> RPoint {
    [-&p[0], p[1].clone()]
}

fn slope(a: &RPoint, b: &RPoint) -> Q {
    (&b[1] - &a[1]) / (&b[0] - &a[0])
}

/// Meeting point of the line through `a, b` with `x2 - sigma x1 = c`.
fn meet(a: &RPoint, b: &RPoint, sigma: &Q, c: &Q) -> RPoint {
    let d = [&b[0] - &a[0], &b[1] - &a[1]];
    let s = (c - (&a[1] - sigma * &a[0])) / (&d[1] - sigma * &d[0]);
    [&a[0] + &s * &d[0], &a[1] + &s * &d[1]]
}

/// Offset `c` of the line of slope `sigma` through the point of segment `a b` with direction `t`.
fn offset_through(a: &RPoint, b: &RPoint, t: &Q, sigma: &Q) -> Q {
    let d = [&b[0] - &a[0], &b[1] - &a[1]];
    let s = -(&a[0] - t * &a[1]) / (&d[0] - t * &d[1]);
    let p = [&a[0] + &s * &d[0], &a[1] + &s * &d[1]];
    &p[1] - sigma * &p[0]
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn next_prime(mut n: u64) -> u64 {
    while !is_prime(n) {
        n += 1;
    }
    n
}

fn denominator_exceeds(t: &Q, n: u64) -> bool {
    t.denom() > &BigInt::from(n)
}

fn cut_corner(
    prev: &RPoint,
    v: &RPoint,
    next: &RPoint,
    region: &Region,
    stage: usize,
    n: u64,
    cfg: &BuildConfig,
) -> Result<Cut> {
    let sigma = (slope(prev, v) + slope(v, next)) / q(2);
    let scale = q(1i64 << (stage - 1));
    let a = &sigma * &scale;
    if !a.is_integer() || a.abs() > scale {
        return Err(Error::Precondition(format!(
            "corner slopes at stage {stage} have no dyadic midpoint"
        )));
    }
    let a = i64::try_from(a.to_integer()).expect("|a| is at most 2^stage");
    let c_vertex = &v[1] - &sigma * &v[0];
    let c_min = offset_through(prev, v, &region.lo, &sigma).max(offset_through(v, next, &region.hi, &sigma));
    let (b_lo, b_hi) = (&c_min * &scale, &c_vertex * &scale);
    let mut p = n + 1;
    for _ in 0..cfg.max_primes {
        p = next_prime(p);
        for b in rationals_between(&b_lo, &b_hi, p) {
            let c = &b / &scale;
            let p1 = meet(prev, v, &sigma, &c);
            let p2 = meet(v, next, &sigma, &c);
            if denominator_exceeds(&direction(&p1), n) && denominator_exceeds(&direction(&p2), n) {
                return Ok(Cut {
                    stage,
                    a,
                    b,
                    vertices: [p1, p2],
                });
            }
        }
        p += 1;
    }
    Err(Error::SearchExhausted(format!(
        "no admissible cut offset at stage {stage} after {} primes; the schedule is too dense",
        cfg.max_primes
    )))
}

/// Region around chain vertex `i` inside `parent`, shrunk until it avoids denominators up to `n`.
fn region_for(chain: &[RPoint], i: usize, parent: &Region, n: u64) -> Region {
    let t = direction(&chain[i]);
    let gaps = [
        &t - direction(&chain[i - 1]),
        direction(&chain[i + 1]) - &t,
        &t - &parent.lo,
        &parent.hi - &t,
    ];
    let mut delta = gaps.into_iter().min().expect("four gaps") / q(3);
    loop {
        let r = Region {
            lo: &t - &delta,
            hi: &t + &delta,
        };
        if r.avoids(n) {
            return r;
        }
        delta /= q(2);
    }
}

fn chain_norm(chain: &[RPoint], stage: usize) -> Result<PolygonalNorm> {
    let ring = Ring::rationals();
    let inner: Vec<&RPoint> = chain[1..chain.len() - 1].iter().rev().collect();
    let mut vertices: Vec<Point> = Vec::with_capacity(4 * inner.len());
    for turn in 0..4 {
        for p in &inner {
            let (x, y) = match turn {
                0 => (p[0].clone(), p[1].clone()),
                1 => (-&p[1], p[0].clone()),
                2 => (-&p[0], -&p[1]),
                _ => (p[1].clone(), -&p[0]),
            };
            vertices.push([ring.from_q(x), ring.from_q(y)]);
        }
    }
    Ok(PolygonalNorm::new(ring, vertices)?.with_name(format!("stage-{stage}")))
}

pub fn build_stage(schedule: &[u64], stage: usize) -> Result<StagePolygon> {
    build_stage_with(schedule, stage, &BuildConfig::default())
}

/// Applies `stage` rounds of symmetric corner cuts to the square `D0`.
pub fn build_stage_with(schedule: &[u64], stage: usize, cfg: &BuildConfig) -> Result<StagePolygon> {
    if stage > cfg.max_stage {
        return Err(Error::InvalidArgument(format!(
            "stage {stage} exceeds the cap {}",
            cfg.max_stage
        )));
    }
    if schedule.len() < stage {
        return Err(Error::InvalidArgument(format!(
            "stage {stage} needs {stage} schedule entries, got {}",
            schedule.len()
        )));
    }
    if schedule.first() == Some(&0) || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "schedule must be positive and strictly increasing".into(),
        ));
    }
    let mut chain: Vec<RPoint> = vec![[qr(-1, 2), qr(1, 2)], [q(0), q(1)], [qr(1, 2), qr(1, 2)]];
    let mut fresh = vec![(1usize, Region { lo: q(-1), hi: q(1) })];
    let mut cuts = Vec::new();
    for j in 1..=stage {
        let n = schedule[j - 1];
        let len = chain.len();
        let mut replaced: Vec<Option<(RPoint, RPoint, Region)>> = vec![None; len];
        for (i, region) in &fresh {
            let i = *i;
            if chain[i][0].is_negative() {
                continue;
            }
            let cut = cut_corner(&chain[i - 1], &chain[i], &chain[i + 1], region, j, n, cfg)?;
            let [p1, p2] = cut.vertices.clone();
            let m = len - 1 - i;
            if m != i {
                replaced[m] = Some((mirror(&p2), mirror(&p1), region.mirror()));
            }
            replaced[i] = Some((p1, p2, region.clone()));
            cuts.push(cut);
        }
        let mut next = Vec::with_capacity(len + fresh.len());
        let mut parents = Vec::new();
        for (i, p) in chain.iter().enumerate() {
            match &replaced[i] {
                Some((a, b, r)) => {
                    parents.push((next.len(), r.clone()));
                    next.push(a.clone());
                    parents.push((next.len(), r.clone()));
                    next.push(b.clone());
                }
                None => next.push(p.clone()),
            }
        }
        chain = next;
        fresh = parents
            .into_iter()
            .map(|(i, parent)| (i, region_for(&chain, i, &parent, n)))
            .collect();
    }
    let norm = chain_norm(&chain, stage)?;
    Ok(StagePolygon {
        stage,
        schedule: schedule.to_vec(),
        chain,
        fresh,
        cuts,
        norm,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct InvariantReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

impl StagePolygon {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn schedule(&self) -> &[u64] {
        &self.schedule
    }

    /// Upper chain in the quadrant, by increasing direction.
    pub fn chain(&self) -> &[RPoint] {
        &self.chain
    }

    pub fn fresh_vertices(&self) -> Vec<&RPoint> {
        self.fresh.iter().map(|(i, _)| &self.chain[*i]).collect()
    }

    /// Protected regions around the vertices created by the last stage.
    pub fn regions(&self) -> Vec<&Region> {
        self.fresh.iter().map(|(_, r)| r).collect()
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn norm(&self) -> &PolygonalNorm {
        &self.norm
    }

    /// Threshold `N_j` of the current stage, with `N_0 = 0`.
    pub fn current_threshold(&self) -> u64 {
        if self.stage == 0 {
            0
        } else {
            self.schedule[self.stage - 1]
        }
    }

    /// Exact structural checks on the chain, slopes, certificates, and regions.
    pub fn check_invariants(&self) -> InvariantReport {
        let mut rep = InvariantReport::default();
        let c = &self.chain;
        let len = c.len();
        rep.check(
            c[0] == [qr(-1, 2), qr(1, 2)] && c[len - 1] == [qr(1, 2), qr(1, 2)],
            || "chain no longer ends at (-1/2, 1/2) and (1/2, 1/2)".into(),
        );
        for (i, p) in c.iter().enumerate() {
            rep.check(c[len - 1 - i] == mirror(p), || {
                format!("vertex {i} has no mirror image")
            });
            rep.check(p[0].abs() <= q(1) && p[1].abs() <= q(1), || {
                format!("vertex {i} lies outside [-1, 1]^2")
            });
        }
        let mut slopes = Vec::with_capacity(len - 1);
        for i in 0..len - 1 {
            let s = slope(&c[i], &c[i + 1]);
            let allowed = s.abs() == q(1)
                || (0..self.stage).any(|k| {
                    let a = &s * q(1i64 << k);
                    a.is_integer() && a.abs() <= q(1i64 << k)
                });
            rep.check(allowed, || {
                format!("side {i} has slope {} outside the dyadic ledger", fmt_rational(&s))
            });
            slopes.push(s);
        }
        rep.check(slopes[0] == q(1) && slopes[len - 2] == q(-1), || {
            "sides next to (±1/2, 1/2) have changed".into()
        });
        for w in slopes.windows(2) {
            rep.check(w[0] > w[1], || "chain is not strictly convex".into());
        }
        let n = self.current_threshold();
        let mut last_hi: Option<Q> = None;
        for (i, r) in &self.fresh {
            let t = direction(&c[*i]);
            rep.check(self.stage == 0 || denominator_exceeds(&t, n), || {
                format!(
                    "vertex {i} has direction {} with denominator at most {n}",
                    fmt_rational(&t)
                )
            });
            if self.stage > 0 {
                rep.check(r.contains_strictly(&t), || format!("region of vertex {i} misses it"));
                rep.check(r.avoids(n), || format!("region of vertex {i} meets a short direction"));
                if let Some(h) = &last_hi {
                    rep.check(h < &r.lo, || format!("region of vertex {i} overlaps its neighbor"));
                }
                last_hi = Some(r.hi.clone());
            }
        }
        for cut in &self.cuts {
            let n = self.schedule[cut.stage - 1];
            for v in &cut.vertices {
                let t = direction(v);
                rep.check(denominator_exceeds(&t, n), || {
                    format!("stage {} cut vertex has direction {}", cut.stage, fmt_rational(&t))
                });
                let lhs = q(1i64 << (cut.stage - 1)) * &v[1] - q(cut.a) * &v[0];
                rep.check(lhs == cut.b, || {
                    format!("stage {} cut vertex is off its line", cut.stage)
                });
            }
        }
        rep
    }

    pub fn log(&self) -> BuildLog {
        let pt = |p: &RPoint| [fmt_rational(&p[0]), fmt_rational(&p[1])];
        BuildLog {
            stage: self.stage,
            schedule: self.schedule.clone(),
            chain: self.chain.iter().map(pt).collect(),
            cuts: self
                .cuts
                .iter()
                .map(|c| CutLog {
                    stage: c.stage,
                    slope: fmt_rational(&c.slope()),
                    a: c.a,
                    scale: 1i64 << (c.stage - 1),
                    offset: fmt_rational(&c.b),
                    vertices: c.vertices.iter().map(pt).collect(),
                    directions: c.vertices.iter().map(|v| fmt_rational(&direction(v))).collect(),
                    threshold: self.schedule[c.stage - 1],
                })
                .collect(),
            regions: self
                .fresh
                .iter()
                .map(|(_, r)| [fmt_rational(&r.lo), fmt_rational(&r.hi)])
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CutLog {
    pub stage: usize,
    pub slope: String,
    /// The cut line is `scale x2 - a x1 = offset`.
    pub a: i64,
    pub scale: i64,
    pub offset: String,
    pub vertices: Vec<[String; 2]>,
    /// `x1 / x2` of each new vertex; its denominator exceeds `threshold`.
    pub directions: Vec<String>,
    pub threshold: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildLog {
    pub stage: usize,
    pub schedule: Vec<u64>,
    pub chain: Vec<[String; 2]>,
    pub cuts: Vec<CutLog>,
    pub regions: Vec<[String; 2]>,
}

/// True when every vertex of `inner` lies in the ball of `outer`.
pub fn is_nested(inner: &StagePolygon, outer: &StagePolygon) -> Result<bool> {
    for v in inner.norm.vertices() {
        if outer.norm.boundary_sign(v)? == crate::exactnum::Sign::Positive {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub stage: usize,
    pub n: u64,
    pub count: u64,
    pub bound: u64,
    pub spot_checks: usize,
    pub spot_failures: usize,
    pub pass: bool,
}

/// Lattice vectors used to test `||z|| >= max(|z1|, |z2|)`.
fn spot_vectors(n: u64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for x in -8i64..=8 {
        for y in -8i64..=8 {
            v.push((x, y));
        }
    }
    let n = n as i64;
    for k in [0, 1, n / 3, n / 2, n - 1, n] {
        v.extend([(n, k), (k, n), (-n, k), (k, -n)]);
    }
    v
}

/// Counts `Δ_{X,N}(Z^2)` for the stage norm and compares it with `2^(2j+3) N`.
pub fn verify_containment_bound(d: &StagePolygon, n: u64, exec: Exec) -> Result<ContainmentReport> {
    let j = d.stage;
    let lower = d.current_threshold();
    let upper = d.schedule.get(j).copied().unwrap_or(u64::MAX);
    if n <= lower || n > upper {
        return Err(Error::Precondition(format!(
            "N = {n} is outside ({lower}, {upper}] for stage {j}"
        )));
    }
    let p = &d.norm;
    let opts = DistOptions {
        exec,
        ..DistOptions::default()
    };
    let n_q = q(i64::try_from(n).map_err(|_| Error::InvalidArgument("N exceeds 64 bits".into()))?);
    let ds = compute(&SetSource::Z2, p, &n_q, Mode::Threshold, &opts)?;
    let count = ds.len() as u64;
    let bound = (1u64 << (2 * j + 3)).saturating_mul(n);
    let ring = p.ring();
    let spots = spot_vectors(n);
    let mut spot_failures = 0;
    for &(x, y) in &spots {
        let z: Point = [ring.from_ints(&[x]), ring.from_ints(&[y])];
        let lower = ring.from_ints(&[x.abs().max(y.abs())]);
        if p.eval(&z)?.cmp_value(&lower)?.is_lt() {
            spot_failures += 1;
        }
    }
    Ok(ContainmentReport {
        stage: j,
        n,
        count,
        bound,
        spot_checks: spots.len(),
        spot_failures,
        pass: count <= bound && spot_failures == 0,
    })
}

/// The norm in coordinates `x1' = x1`, `x2' = x2 / alpha`, where a side of slope `beta`
/// gets slope `beta / alpha`.
pub fn affine_slope_change(p: &PolygonalNorm, alpha: &RingElem) -> Result<PolygonalNorm> {
    if !alpha.ring().same(p.ring()) {
        return Err(Error::RingMismatch);
    }
    if alpha.is_zero() {
        return Err(Error::InvalidArgument("alpha must be nonzero".into()));
    }
    let mut vertices: Vec<Point> = p
        .vertices()
        .iter()
        .map(|v| Ok([v[0].clone(), v[1].try_div(alpha)?]))
        .collect::<Result<_>>()?;
    if alpha.sign()?.as_i32() < 0 {
        vertices.reverse();
    }
    let name = if p.name().is_empty() {
        String::new()
    } else {
        format!("{}-normalized", p.name())
    };
    Ok(PolygonalNorm::new(p.ring().clone(), vertices)?.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_fraction() {
        assert_eq!(simplest_in(&qr(1, 3), &qr(1, 2)), qr(1, 2));
        assert_eq!(simplest_in(&qr(3, 10), &qr(7, 20)), qr(1, 3));
        assert_eq!(simplest_in(&qr(-7, 20), &qr(-3, 10)), qr(-1, 3));
        assert_eq!(simplest_in(&qr(5, 2), &qr(5, 2)), qr(5, 2));
    }

    #[test]
    fn first_stage_offset() {
        let d = build_stage(&[4], 1).unwrap();
        assert_eq!(d.cuts()[0].b, qr(5, 7));
        assert_eq!(d.chain().len(), 4);
    }
}

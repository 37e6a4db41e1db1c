//! Cut-and-project sets `T(C)`: integer combinations of powers of `alpha_0` whose
//! other conjugates stay in the band `|sigma_k| <= C`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::rational::{ceil_dyadic, to_f64};
use crate::exactnum::{q, qr, ComplexInterval, NumberField, Ring, RingElem, Sign, Q};
use crate::exec::Exec;

/// Default cap on the number of enumerated points.
pub const DEFAULT_BUDGET: usize = 20_000_000;

#[derive(Clone, Debug)]
pub struct ModelSetSpec {
    ring: Ring,
    field: Arc<NumberField>,
    c: Q,
    k1: RingElem,
    k1_upper: Q,
    k2: u64,
    /// Upper bounds on `|W_{jk}|` for the inverse Vandermonde matrix `W`.
    inv_abs: Vec<Vec<Q>>,
    conj: Vec<Complex64>,
    powers: Vec<Vec<Complex64>>,
}

impl ModelSetSpec {
    /// `c = None` selects the default band.
    pub fn new(ring: &Ring, c: Option<Q>) -> Result<ModelSetSpec> {
        let field = ring
            .as_field()
            .ok_or_else(|| Error::InvalidArgument("model sets need a number field".into()))?
            .clone();
        let need = band_requirement(&field);
        let c = match c {
            Some(c) => {
                if !c.is_positive() {
                    return Err(Error::InvalidArgument("C must be positive".into()));
                }
                if c < need {
                    return Err(Error::Precondition(format!(
                        "C = {c} is below the band requirement {:.6}",
                        to_f64(&need)
                    )));
                }
                c
            }
            None => default_c(&field),
        };
        let d = field.degree();
        let alpha = ring.generator();
        let mut k1 = ring.zero();
        let mut p = ring.one();
        for _ in 0..d {
            k1 = &k1 + &p.abs()?;
            p = &p * &alpha;
        }
        let k1 = k1.scale(&qr(1, 2));
        let k1_upper = ceil_dyadic(k1.embed(0, 64).re.hi(), 32);
        let inv_abs = inverse_vandermonde_bounds(&field)?;
        let conj = field.conjugates_f64();
        let powers = conj
            .iter()
            .map(|a| {
                let mut v = Vec::with_capacity(d);
                let mut p = Complex64::new(1.0, 0.0);
                for _ in 0..d {
                    v.push(p);
                    p *= a;
                }
                v
            })
            .collect();
        let mut spec = ModelSetSpec {
            ring: ring.clone(),
            field,
            c,
            k1,
            k1_upper,
            k2: 0,
            inv_abs,
            conj,
            powers,
        };
        spec.k2 = spec.local_bound(&spec.c)?;
        Ok(spec)
    }

    /// The same field with another band, skipping the sufficiency check.
    pub fn with_band(&self, c: Q) -> Result<ModelSetSpec> {
        let mut s = self.clone();
        s.k2 = s.local_bound(&c)?;
        s.c = c;
        Ok(s)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn c(&self) -> &Q {
        &self.c
    }

    /// `K1 = 1/2 sum_j |alpha_0^j|` exactly.
    pub fn k1(&self) -> &RingElem {
        &self.k1
    }

    /// Dyadic upper bound on `K1`.
    pub fn k1_upper(&self) -> &Q {
        &self.k1_upper
    }

    /// Bound on the number of points of `T(C)` in any closed interval of length `2C`.
    pub fn k2(&self) -> u64 {
        self.k2
    }

    pub fn inverse_bounds(&self) -> &[Vec<Q>] {
        &self.inv_abs
    }

    /// `prod_j (floor(2 h_j) + 1)` with `h_j = band * sum_k |W_jk|`.
    fn local_bound(&self, band: &Q) -> Result<u64> {
        let mut k2: u64 = 1;
        for row in &self.inv_abs {
            let h: Q = row.iter().fold(Q::zero(), |a, w| a + w) * band;
            let f = (h * q(2)).floor().to_integer() + BigInt::one();
            let f = f
                .to_u64()
                .ok_or_else(|| Error::Budget("local count bound overflows".into()))?;
            k2 = k2
                .checked_mul(f)
                .ok_or_else(|| Error::Budget("local count bound overflows".into()))?;
        }
        Ok(k2)
    }

    /// `a` has integer coordinates and `|sigma_k(a)| <= band` for every `k >= 1`.
    pub fn in_band(&self, a: &RingElem, band: &Q) -> Result<bool> {
        if !a.ring().same(&self.ring) {
            return Err(Error::RingMismatch);
        }
        if !a.is_integral() {
            return Ok(false);
        }
        for k in self.field.embedding_representatives() {
            if k == 0 {
                continue;
            }
            if self.field.cmp_abs(a.coords(), k, band)? == Ordering::Greater {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Membership in `T(C)`.
    pub fn contains(&self, a: &RingElem) -> Result<bool> {
        self.in_band(a, &self.c)
    }

    /// Double-precision `sigma_k` of an integer coordinate vector.
    pub fn sigma_f64(&self, a: &[i64], k: usize) -> (Complex64, f64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (c, p) in a.iter().zip(&self.powers[k]) {
            let t = *p * (*c as f64);
            mag += t.norm();
            v += t;
        }
        (v, mag * 2f64.powi(-40) + 1e-300)
    }

    /// Approximate expected count of `T(C) ∩ [-r, r]`.
    pub fn estimate_count(&self, r: f64) -> f64 {
        let d = self.degree();
        let mut det = 1.0;
        for i in 0..d {
            for j in i + 1..d {
                det *= (self.conj[j] - self.conj[i]).norm();
            }
        }
        // The embedded lattice has covolume |det V| / 2^s for s conjugate pairs.
        let c = to_f64(&self.c);
        let mut vol = 2.0 * r;
        for k in self.field.embedding_representatives() {
            if k == 0 {
                continue;
            }
            vol *= if self.field.is_real_embedding(k) {
                2.0 * c
            } else {
                std::f64::consts::PI * c * c * 2.0
            };
        }
        vol / det
    }
}

/// `max_{k >= 1} 1/2 sum_j |alpha_k^j|`, as a rational upper bound.
fn band_requirement(field: &NumberField) -> Q {
    let roots = field.root_enclosures();
    let mut best = Q::zero();
    for r in roots.iter().skip(1) {
        let a = r.abs_upper();
        let mut s = Q::zero();
        let mut p = Q::one();
        for _ in 0..field.degree() {
            s += &p;
            p *= &a;
        }
        let s = s * qr(1, 2);
        if s > best {
            best = s;
        }
    }
    best
}

/// Smallest integer at or above the band requirement, and at least 1.
pub fn default_c(field: &NumberField) -> Q {
    let c = band_requirement(field).ceil();
    if c < q(1) {
        q(1)
    } else {
        c
    }
}

/// Entry bounds for the inverse of `V_{kj} = alpha_k^j` via Lagrange interpolation:
/// `W_{jk} = [x^j] (f(x) / (x - alpha_k)) / f'(alpha_k)`.
fn inverse_vandermonde_bounds(field: &NumberField) -> Result<Vec<Vec<Q>>> {
    let d = field.degree();
    let f = field.minpoly();
    let df = f.derivative();
    let roots = field.root_enclosures();
    let mut w = vec![vec![Q::zero(); d]; d];
    for (k, a) in roots.iter().enumerate() {
        let den = df.eval_complex(a, 80).abs_lower();
        if !den.is_positive() {
            return Err(Error::Internal("derivative enclosure contains zero".into()));
        }
        let mut b = ComplexInterval::point(Q::one(), Q::zero());
        w[d - 1][k] = b.abs_upper() / &den;
        for j in (1..d).rev() {
            let cj = ComplexInterval::point(f.coeff(j), Q::zero());
            b = (&cj + &(a * &b)).round_out(80);
            w[j - 1][k] = ceil_dyadic(&(b.abs_upper() / &den), 48);
        }
    }
    Ok(w)
}

/// A finite window of a model set, sorted by the value at embedding 0.
#[derive(Clone, Debug)]
pub struct WindowedSet {
    ring: Ring,
    degree: usize,
    radius: Q,
    band: Q,
    elements: Vec<RingElem>,
    ints: Vec<i64>,
    values: Vec<f64>,
}

impl WindowedSet {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn radius(&self) -> &Q {
        &self.radius
    }

    pub fn band(&self) -> &Q {
        &self.band
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[RingElem] {
        &self.elements
    }

    /// Integer coordinates of element `i`.
    pub fn ints(&self, i: usize) -> &[i64] {
        &self.ints[i * self.degree..(i + 1) * self.degree]
    }

    /// Approximate values at embedding 0, in sorted order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Enumeration is decided exactly on every boundary case.
    pub fn exact(&self) -> bool {
        true
    }

    /// The elements whose index passes `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> WindowedSet {
        let mut out = WindowedSet {
            ring: self.ring.clone(),
            degree: self.degree,
            radius: self.radius.clone(),
            band: self.band.clone(),
            elements: Vec::new(),
            ints: Vec::new(),
            values: Vec::new(),
        };
        for i in 0..self.len() {
            if keep(i) {
                out.elements.push(self.elements[i].clone());
                out.ints.extend_from_slice(self.ints(i));
                out.values.push(self.values[i]);
            }
        }
        out
    }

    /// Sub-window `[-r, r]` of this window.
    pub fn restrict(&self, r: &Q) -> Result<WindowedSet> {
        let rf = to_f64(r);
        let mut out = WindowedSet {
            ring: self.ring.clone(),
            degree: self.degree,
            radius: r.clone(),
            band: self.band.clone(),
            elements: Vec::new(),
            ints: Vec::new(),
            values: Vec::new(),
        };
        let field = self.ring.as_field().expect("model set ring is a field");
        for i in 0..self.len() {
            let v = self.values[i];
            let keep = if v.abs() < rf * (1.0 - 1e-12) - 1e-9 {
                true
            } else if v.abs() > rf * (1.0 + 1e-12) + 1e-9 {
                false
            } else {
                field.cmp_abs(self.elements[i].coords(), 0, r)? != Ordering::Greater
            };
            if keep {
                out.elements.push(self.elements[i].clone());
                out.ints.extend_from_slice(self.ints(i));
                out.values.push(v);
            }
        }
        Ok(out)
    }
}

fn floor_f(x: f64) -> i64 {
    x.floor().clamp(-9e15, 9e15) as i64
}

fn ceil_f(x: f64) -> i64 {
    x.ceil().clamp(-9e15, 9e15) as i64
}

/// Interval of `t` with `|s + t beta| <= b` implied by one real linear constraint.
fn linear_range(s: f64, beta: f64, b: f64) -> Option<(f64, f64)> {
    if beta.abs() < 1e-300 {
        return None;
    }
    let x = (-b - s) / beta;
    let y = (b - s) / beta;
    Some((x.min(y), x.max(y)))
}

/// All points of `T(C) ∩ [-r, r]`, sorted by value.
pub fn enumerate_t(spec: &ModelSetSpec, r: &Q, budget: usize, exec: Exec) -> Result<WindowedSet> {
    if !r.is_positive() {
        return Err(Error::InvalidArgument("window radius must be positive".into()));
    }
    let rf = to_f64(r);
    let est = spec.estimate_count(rf);
    if est > budget as f64 {
        return Err(Error::Budget(format!(
            "window radius {rf} would hold about {est:.0} points (budget {budget})"
        )));
    }
    let d = spec.degree();
    let cf = to_f64(&spec.c);
    let reps: Vec<usize> = spec.field.embedding_representatives();
    let bound = |k: usize| if k == 0 { rf } else { cf };
    let bound_q = |k: usize| if k == 0 { r.clone() } else { spec.c.clone() };
    let h: Vec<i64> = spec
        .inv_abs
        .iter()
        .map(|row| {
            let s: f64 = row.iter().enumerate().map(|(k, w)| to_f64(w) * bound(k)).sum();
            floor_f(s * (1.0 + 1e-12)) + 1
        })
        .collect();
    let outer: Vec<i64> = if d == 1 { vec![0] } else { (-h[0]..=h[0]).collect() };

    let scan = |mut acc: Vec<Vec<i64>>, &a0: &i64| -> Vec<Vec<i64>> {
        let mut prefix = vec![0i64; d];
        if d > 1 {
            prefix[0] = a0;
        }
        scan_prefix(
            spec,
            &reps,
            &h,
            &bound,
            &mut prefix,
            if d > 1 { 1 } else { 0 },
            &mut acc,
        );
        acc
    };
    let candidates = exec.fold(&outer, Vec::new, scan, |mut a, mut b| {
        a.append(&mut b);
        a
    });
    if candidates.len() > budget {
        return Err(Error::Budget(format!(
            "{} candidates exceed the budget {budget}",
            candidates.len()
        )));
    }
    // Exact decisions for candidates near a boundary.
    let decided = exec.map(&candidates, |a| -> Result<Option<(Vec<i64>, f64, f64)>> {
        let mut inside_all = true;
        for &k in &reps {
            let (v, err) = spec.sigma_f64(a, k);
            let n = v.norm();
            let b = bound(k);
            let slack = err * 2.0 + b * 1e-14;
            if n > b + slack {
                return Ok(None);
            }
            if n >= b - slack {
                inside_all = false;
            }
        }
        if !inside_all {
            let coords: Vec<Q> = a.iter().map(|&x| Q::from_integer(x.into())).collect();
            for &k in &reps {
                if spec.field.cmp_abs(&coords, k, &bound_q(k))? == Ordering::Greater {
                    return Ok(None);
                }
            }
        }
        let (v, err) = spec.sigma_f64(a, 0);
        Ok(Some((a.clone(), v.re, err)))
    });
    let mut pts: Vec<(Vec<i64>, f64, f64)> = Vec::with_capacity(decided.len());
    for x in decided {
        if let Some(p) = x? {
            pts.push(p);
        }
    }
    let ring = spec.ring.clone();
    let mut items: Vec<(RingElem, Vec<i64>, f64, f64)> =
        pts.into_iter().map(|(a, v, e)| (ring.from_ints(&a), a, v, e)).collect();
    let mut failure: Option<Error> = None;
    items.sort_by(|x, y| {
        if (x.2 - y.2).abs() > x.3 + y.3 {
            return x.2.partial_cmp(&y.2).unwrap_or(Ordering::Equal);
        }
        match x.0.cmp_value(&y.0) {
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
    let mut out = WindowedSet {
        ring,
        degree: d,
        radius: r.clone(),
        band: spec.c.clone(),
        elements: Vec::with_capacity(items.len()),
        ints: Vec::with_capacity(items.len() * d),
        values: Vec::with_capacity(items.len()),
    };
    for (e, a, v, _) in items {
        out.elements.push(e);
        out.ints.extend_from_slice(&a);
        out.values.push(v);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn scan_prefix(
    spec: &ModelSetSpec,
    reps: &[usize],
    h: &[i64],
    bound: &dyn Fn(usize) -> f64,
    prefix: &mut Vec<i64>,
    j: usize,
    out: &mut Vec<Vec<i64>>,
) {
    let d = prefix.len();
    if j + 1 < d {
        for a in -h[j]..=h[j] {
            prefix[j] = a;
            scan_prefix(spec, reps, h, bound, prefix, j + 1, out);
        }
        prefix[j] = 0;
        return;
    }
    // Last coordinate: intersect the ranges forced by every embedding.
    let mut lo = -h[j];
    let mut hi = h[j];
    prefix[j] = 0;
    for &k in reps {
        let (s, _) = spec.sigma_f64(prefix, k);
        let beta = spec.powers[k][j];
        let b = bound(k);
        let mut ranges = vec![linear_range(s.re, beta.re, b)];
        if !spec.field.is_real_embedding(k) {
            ranges.push(linear_range(s.im, beta.im, b));
        }
        for (x, y) in ranges.into_iter().flatten() {
            lo = lo.max(floor_f(x) - 1);
            hi = hi.min(ceil_f(y) + 1);
        }
        if lo > hi {
            return;
        }
    }
    for t in lo..=hi {
        prefix[j] = t;
        out.push(prefix.clone());
    }
    prefix[j] = 0;
}

/// The planar product `T × T` of a window with itself.
#[derive(Clone, Debug)]
pub struct ProductSet {
    factor: Arc<WindowedSet>,
}

impl ProductSet {
    pub fn new(t: WindowedSet) -> ProductSet {
        ProductSet { factor: Arc::new(t) }
    }

    pub fn factor(&self) -> &WindowedSet {
        &self.factor
    }

    pub fn len(&self) -> usize {
        self.factor.len() * self.factor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factor.is_empty()
    }

    /// All coordinate pairs, row by row.
    pub fn points(&self, budget: usize) -> Result<Vec<[RingElem; 2]>> {
        if self.len() > budget {
            return Err(Error::Budget(format!(
                "product set holds {} points (budget {budget})",
                self.len()
            )));
        }
        let e = self.factor.elements();
        let mut out = Vec::with_capacity(self.len());
        for x in e {
            for y in e {
                out.push([x.clone(), y.clone()]);
            }
        }
        Ok(out)
    }
}

/// `S = T × T`.
pub fn product_set(t: &WindowedSet) -> ProductSet {
    ProductSet::new(t.clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct NetReport {
    /// Largest consecutive gap over the inner window, exactly, as power-basis coordinates.
    #[serde(serialize_with = "ser_elem")]
    pub max_gap: RingElem,
    pub max_gap_lo: f64,
    pub max_gap_hi: f64,
    #[serde(serialize_with = "ser_elem")]
    pub bound: RingElem,
    pub bound_f64: f64,
    pub gaps_checked: usize,
    pub pass: bool,
}

fn ser_elem<S: serde::Serializer>(e: &RingElem, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(e.coords().len()))?;
    for c in e.coords() {
        seq.serialize_element(&crate::exactnum::rational::fmt_rational(c))?;
    }
    seq.end()
}

/// Largest gap between consecutive points that meets `[-R + K1, R - K1]`, compared with `2 K1`.
pub fn verify_net(t: &WindowedSet, spec: &ModelSetSpec) -> Result<NetReport> {
    if t.is_empty() {
        return Err(Error::InvalidArgument("empty window".into()));
    }
    let bound = spec.k1.scale(&q(2));
    let bf = bound.to_f64();
    let inner = to_f64(&t.radius) - spec.k1.to_f64();
    let e = t.elements();
    let v = t.values();
    let mut best: Option<usize> = None;
    let mut checked = 0;
    let mut pass = true;
    for i in 0..e.len().saturating_sub(1) {
        if v[i + 1] < -inner - 1e-6 || v[i] > inner + 1e-6 {
            continue;
        }
        checked += 1;
        let g = v[i + 1] - v[i];
        if g > bf - 1e-9 {
            let gap = &e[i + 1] - &e[i];
            if gap.cmp_value(&bound)? == Ordering::Greater {
                pass = false;
            }
        }
        best = Some(match best {
            None => i,
            Some(b) => {
                let gb = v[b + 1] - v[b];
                if (g - gb).abs() > 1e-9 * (1.0 + gb) {
                    if g > gb {
                        i
                    } else {
                        b
                    }
                } else {
                    let x = &e[i + 1] - &e[i];
                    let y = &e[b + 1] - &e[b];
                    if x.cmp_value(&y)? == Ordering::Greater {
                        i
                    } else {
                        b
                    }
                }
            }
        });
    }
    let (max_gap, lo, hi) = match best {
        Some(b) => {
            let g = &e[b + 1] - &e[b];
            let iv = g.embed(0, 64).re;
            let (lo, hi) = iv.to_f64_pair();
            (g, lo, hi)
        }
        None => (spec.ring.zero(), 0.0, 0.0),
    };
    Ok(NetReport {
        max_gap,
        max_gap_lo: lo,
        max_gap_hi: hi,
        bound,
        bound_f64: bf,
        gaps_checked: checked,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalCountReport {
    pub max_count: usize,
    pub k2: u64,
    pub pass: bool,
}

/// Largest number of points in a closed interval of length `2C`.
pub fn verify_local_count(t: &WindowedSet, spec: &ModelSetSpec) -> Result<LocalCountReport> {
    if t.is_empty() {
        return Err(Error::InvalidArgument("empty window".into()));
    }
    let width = spec.ring.from_q(&spec.c * q(2));
    let wf = width.to_f64();
    let e = t.elements();
    let v = t.values();
    let within = |i: usize, j: usize| -> Result<bool> {
        let g = v[j] - v[i];
        if g < wf - 1e-9 * (1.0 + wf) {
            return Ok(true);
        }
        if g > wf + 1e-9 * (1.0 + wf) {
            return Ok(false);
        }
        Ok((&(&e[j] - &e[i]) - &width).sign()? != Sign::Positive)
    };
    let mut best = 0;
    let mut j = 0;
    for i in 0..e.len() {
        if j < i {
            j = i;
        }
        while j + 1 < e.len() && within(i, j + 1)? {
            j += 1;
        }
        best = best.max(j - i + 1);
    }
    Ok(LocalCountReport {
        max_count: best,
        k2: spec.k2,
        pass: best as u64 <= spec.k2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::named_field;

    fn ring(name: &str) -> Ring {
        Ring::field(named_field(name).unwrap().build().unwrap())
    }

    #[test]
    fn sqrt2_constants() {
        let r = ring("sqrt2");
        let s = ModelSetSpec::new(&r, Some(q(10))).unwrap();
        assert_eq!(s.k2(), 315);
        assert_eq!(s.k1().scale(&q(2)), r.from_ints(&[1, 1]));
        assert_eq!(default_c(s.field()), q(2));
    }

    #[test]
    fn rational_window() {
        let r = ring("rational");
        let s = ModelSetSpec::new(&r, None).unwrap();
        let t = enumerate_t(&s, &q(5), DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(t.len(), 11);
        assert_eq!(t.ints(0), &[-5]);
    }
}

//! Certified isolation and refinement of polynomial roots.

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::interval::{ComplexInterval, Interval};
use super::poly::{sturm_count, QPoly};
use super::rational::{ceil_dyadic, eps, floor_dyadic, from_f64, q, qr, sqrt_bounds, to_f64, Q};
use super::Sign;
use crate::error::{Error, Result};

/// Isolating intervals for the real roots of a squarefree polynomial, in increasing order.
///
/// Each returned interval `[lo, hi]` holds one root strictly inside, and `p` has opposite
/// nonzero signs at the two endpoints.
pub fn isolate_real_roots(p: &QPoly) -> Vec<Interval> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let seq = p.sturm();
    let b = p.root_bound();
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm_count(&seq, &lo, &hi);
        match n {
            0 => {}
            1 => out.push(Interval::new(lo, hi)),
            _ => {
                let m = split_point(p, &lo, &hi);
                stack.push((m.clone(), hi));
                stack.push((lo, m));
            }
        }
    }
    out.sort_by(|a, b| a.lo().cmp(b.lo()));
    out
}

fn split_point(p: &QPoly, lo: &Q, hi: &Q) -> Q {
    let mut m = (lo + hi) / q(2);
    let w = hi - lo;
    let mut k = 3;
    while p.eval(&m).is_zero() {
        m = lo + &w * qr(1, k);
        k += 1;
    }
    m
}

/// Shrinks an isolating interval of a simple real root to width at most `2^-bits`.
pub fn refine_real(p: &QPoly, iv: &Interval, bits: u32) -> Interval {
    if iv.lo() == iv.hi() {
        return iv.clone();
    }
    let target = eps(bits);
    let dp = p.derivative();
    let mut lo = iv.lo().clone();
    let mut hi = iv.hi().clone();
    let mut s_lo = p.sign_at(&lo);
    while &hi - &lo > target {
        let w = &hi - &lo;
        let x = (&lo + &hi) / q(2);
        let d = dp.eval(&x);
        if !d.is_zero() {
            let y = &x - p.eval(&x) / d;
            let e = pow2_at_least(&(&w * &w), &target);
            let prec = e_bits(&e) + 8;
            let y = floor_dyadic(&y, prec);
            let a = &y - &e;
            let b = &y + &e;
            if a >= lo && b <= hi {
                let sa = p.sign_at(&a);
                let sb = p.sign_at(&b);
                if sa == Sign::Zero {
                    return Interval::point(a);
                }
                if sb == Sign::Zero {
                    return Interval::point(b);
                }
                if sa != sb {
                    lo = a;
                    hi = b;
                    s_lo = sa;
                    continue;
                }
            }
        }
        for _ in 0..4 {
            let m = (&lo + &hi) / q(2);
            let sm = p.sign_at(&m);
            if sm == Sign::Zero {
                return Interval::point(m);
            }
            if sm == s_lo {
                lo = m;
            } else {
                hi = m;
            }
        }
    }
    Interval::new(lo, hi)
}

fn e_bits(e: &Q) -> u32 {
    e.denom().bits() as u32
}

/// Smallest power of two at least `max(x, target / 2)`.
fn pow2_at_least(x: &Q, target: &Q) -> Q {
    let floor = target / q(2);
    let v = if x > &floor { x.clone() } else { floor };
    let mut p = Q::one();
    while p < v {
        p *= q(2);
    }
    while &p / q(2) >= v {
        p /= q(2);
    }
    p
}

/// A certified disk `|z - center| <= radius` holding exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisk {
    pub re: Q,
    pub im: Q,
    pub radius: Q,
}

impl RootDisk {
    pub fn to_box(&self) -> ComplexInterval {
        ComplexInterval::new(
            Interval::new(&self.re - &self.radius, &self.re + &self.radius),
            Interval::new(&self.im - &self.radius, &self.im + &self.radius),
        )
    }

    pub fn conj(&self) -> RootDisk {
        RootDisk {
            re: self.re.clone(),
            im: -&self.im,
            radius: self.radius.clone(),
        }
    }
}

/// Aberth simultaneous iteration in double precision.
pub fn aberth(p: &QPoly) -> Vec<Complex64> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let c: Vec<f64> = p.coeffs().iter().map(to_f64).collect();
    let lead = c[d];
    let c: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dv = dv * z + v;
            v = v * z + a;
        }
        (v, dv)
    };
    let r = to_f64(&p.root_bound()).min(1e6) * 0.5 + 0.5;
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(r, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for i in 0..d {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-17 {
            break;
        }
    }
    z
}

/// Disk of radius `d |p(z)| / |p'(z)|` about a Gaussian rational `z`, which always
/// contains at least one root of `p`.
pub fn inclusion_disk(p: &QPoly, dp: &QPoly, re: &Q, im: &Q, bits: u32) -> Option<RootDisk> {
    let d = q(p.degree().unwrap_or(0) as i64);
    let (pr, pi) = p.eval_gaussian(re, im);
    let (dr, di) = dp.eval_gaussian(re, im);
    let den = &dr * &dr + &di * &di;
    if den.is_zero() {
        return None;
    }
    let r2 = &d * &d * (&pr * &pr + &pi * &pi) / den;
    let radius = ceil_dyadic(&sqrt_bounds(&r2, bits).1, bits);
    Some(RootDisk {
        re: re.clone(),
        im: im.clone(),
        radius,
    })
}

/// Certified disks for the roots of `p` with positive imaginary part.
pub fn isolate_upper_roots(p: &QPoly, real_count: usize) -> Result<Vec<RootDisk>> {
    let d = p.degree().unwrap_or(0);
    let want = (d - real_count) / 2;
    if want == 0 {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let mut approx: Vec<Complex64> = aberth(p);
    approx.sort_by(|a, b| b.im.total_cmp(&a.im));
    let mut disks = Vec::with_capacity(want);
    for z in approx.into_iter().take(want) {
        if z.im <= 0.0 {
            return Err(Error::RootCertification);
        }
        let re = floor_dyadic(&from_f64(z.re), 60);
        let im = floor_dyadic(&from_f64(z.im), 60);
        let mut disk = inclusion_disk(p, &dp, &re, &im, 80).ok_or(Error::RootCertification)?;
        // A few exact Newton steps tighten loose double-precision estimates.
        for _ in 0..3 {
            if disk.radius < &disk.im / q(4) {
                break;
            }
            match newton_complex(p, &dp, &disk, 120) {
                Some(nd) => disk = nd,
                None => break,
            }
        }
        if disk.radius >= disk.im {
            return Err(Error::RootCertification);
        }
        disks.push(disk);
    }
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let a = disks[i].to_box();
            let b = disks[j].to_box();
            if a.re.intersects(&b.re) && a.im.intersects(&b.im) {
                return Err(Error::RootCertification);
            }
        }
    }
    Ok(disks)
}

fn newton_complex(p: &QPoly, dp: &QPoly, disk: &RootDisk, bits: u32) -> Option<RootDisk> {
    let (pr, pi) = p.eval_gaussian(&disk.re, &disk.im);
    let (dr, di) = dp.eval_gaussian(&disk.re, &disk.im);
    let den = &dr * &dr + &di * &di;
    if den.is_zero() {
        return None;
    }
    // p / p' = p * conj(p') / |p'|^2
    let qr_ = (&pr * &dr + &pi * &di) / &den;
    let qi_ = (&pi * &dr - &pr * &di) / &den;
    let re = floor_dyadic(&(&disk.re - qr_), bits);
    let im = floor_dyadic(&(&disk.im - qi_), bits);
    inclusion_disk(p, dp, &re, &im, bits + 16)
}

fn disk_inside(inner: &RootDisk, outer: &RootDisk) -> bool {
    let a = inner.to_box();
    let b = outer.to_box();
    a.re.subset_of(&b.re) && a.im.subset_of(&b.im)
}

/// Shrinks a certified root disk until its radius is at most `2^-bits`.
///
/// Every accepted step lies inside the previous box, so the isolated root is preserved.
pub fn refine_disk(p: &QPoly, disk: &RootDisk, bits: u32) -> Result<RootDisk> {
    let target = eps(bits);
    let dp = p.derivative();
    let mut cur = disk.clone();
    let mut prec = 64u32;
    let mut stalls = 0;
    while cur.radius > target {
        prec = (prec * 2).min(bits + 32);
        match newton_complex(p, &dp, &cur, prec) {
            Some(nd) if disk_inside(&nd, &cur) && nd.radius < cur.radius => {
                cur = nd;
                stalls = 0;
            }
            _ => {
                stalls += 1;
                if stalls > 8 {
                    return Err(Error::RootCertification);
                }
            }
        }
    }
    Ok(cur)
}

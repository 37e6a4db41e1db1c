//! Number fields `Q(alpha)` given by a monic integer minimal polynomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::interval::{ComplexInterval, Interval};
use super::linalg;
use super::poly::{sturm_count, QPoly};
use super::rational::{eps, fmt_rational, to_f64, Q};
use super::roots::{isolate_real_roots, isolate_upper_roots, refine_disk, refine_real, RootDisk};
use super::{precision_cap, Sign, PRECISION_START};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum RootEnc {
    Real(Interval),
    Upper(RootDisk),
    /// Complex conjugate of the root at the given index.
    Lower(usize),
}

/// `Q(alpha_0)` with certified enclosures of all conjugates of `alpha_0`.
///
/// Embedding `0` is always the distinguished real root selected by the hint.
pub struct NumberField {
    minpoly: QPoly,
    int_coeffs: Vec<BigInt>,
    degree: usize,
    roots: Vec<RootEnc>,
    /// Coordinates of `alpha^(d+i)` for `i < d - 1`.
    reduction: Vec<Vec<Q>>,
    /// Double-precision powers `alpha_k^j`.
    powers: Vec<Vec<Complex64>>,
    levels: Mutex<BTreeMap<u32, Arc<Vec<ComplexInterval>>>>,
}

impl NumberField {
    pub fn new(minpoly: &[BigInt], hint: (Q, Q)) -> Result<NumberField> {
        let degree = minpoly.len().checked_sub(1).ok_or(Error::NotMonic)?;
        if degree == 0 || !minpoly[degree].is_one() {
            return Err(Error::NotMonic);
        }
        let p = QPoly::from_bigints(minpoly);
        if !p.is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        let (hlo, hhi) = hint;
        if hlo >= hhi {
            return Err(Error::InvalidArgument("empty root hint".into()));
        }
        let seq = p.sturm();
        let count = sturm_count(&seq, &hlo, &hhi) + usize::from(p.eval(&hlo).is_zero());
        if count != 1 {
            return Err(Error::BadHint {
                lo: fmt_rational(&hlo),
                hi: fmt_rational(&hhi),
                count,
            });
        }
        let real = isolate_real_roots(&p);
        for iv in real.iter().filter(|_| degree >= 2) {
            if let Some(r) = integer_root_in(&p, iv) {
                return Err(Error::RationalRoot(r.to_string()));
            }
        }
        let mut hinted = None;
        let mut others = Vec::new();
        for iv in real.iter() {
            let lo = iv.lo().max(&hlo).clone();
            let hi = iv.hi().min(&hhi).clone();
            if hinted.is_none() && lo < hi && sturm_count(&seq, &lo, &hi) == 1 {
                hinted = Some(iv.clone());
            } else {
                others.push(iv.clone());
            }
        }
        let hinted = hinted.ok_or(Error::RootCertification)?;
        let upper = isolate_upper_roots(&p, real.len())?;
        let mut roots = vec![RootEnc::Real(hinted)];
        roots.extend(others.into_iter().map(RootEnc::Real));
        for disk in upper {
            roots.push(RootEnc::Upper(disk));
            roots.push(RootEnc::Lower(roots.len() - 1));
        }
        if roots.len() != degree {
            return Err(Error::RootCertification);
        }
        let reduction = reduction_table(&p, degree);
        let mut field = NumberField {
            minpoly: p,
            int_coeffs: minpoly.to_vec(),
            degree,
            roots,
            reduction,
            powers: Vec::new(),
            levels: Mutex::new(BTreeMap::new()),
        };
        let base = field.roots_at(PRECISION_START)?;
        field.powers = base
            .iter()
            .map(|z| {
                let a = Complex64::new(to_f64(&z.re.mid()), to_f64(&z.im.mid()));
                let mut v = Vec::with_capacity(degree);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..degree {
                    v.push(acc);
                    acc *= a;
                }
                v
            })
            .collect();
        Ok(field)
    }

    pub fn from_i64(minpoly: &[i64], hint: (Q, Q)) -> Result<NumberField> {
        let c: Vec<BigInt> = minpoly.iter().map(|&v| BigInt::from(v)).collect();
        NumberField::new(&c, hint)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn minpoly(&self) -> &QPoly {
        &self.minpoly
    }

    pub fn minpoly_coeffs(&self) -> &[BigInt] {
        &self.int_coeffs
    }

    /// Index of the distinguished real root; always `0`.
    pub fn real_index(&self) -> usize {
        0
    }

    pub fn is_real_embedding(&self, k: usize) -> bool {
        matches!(self.roots[k], RootEnc::Real(_))
    }

    /// Indices of the embeddings with nonnegative imaginary part, one per conjugate pair.
    pub fn embedding_representatives(&self) -> Vec<usize> {
        (0..self.degree)
            .filter(|&k| !matches!(self.roots[k], RootEnc::Lower(_)))
            .collect()
    }

    /// Certified root enclosures at the starting precision.
    pub fn root_enclosures(&self) -> Vec<ComplexInterval> {
        self.roots_at(PRECISION_START)
            .map(|v| v.as_ref().clone())
            .unwrap_or_default()
    }

    fn roots_at(&self, level: u32) -> Result<Arc<Vec<ComplexInterval>>> {
        if let Some(v) = self.levels.lock().expect("root cache poisoned").get(&level) {
            return Ok(v.clone());
        }
        let mut out: Vec<ComplexInterval> = Vec::with_capacity(self.degree);
        for r in &self.roots {
            out.push(match r {
                RootEnc::Real(iv) => ComplexInterval::real(refine_real(&self.minpoly, iv, level)),
                RootEnc::Upper(d) => refine_disk(&self.minpoly, d, level + 1)?.to_box(),
                RootEnc::Lower(i) => out[*i].conj(),
            });
        }
        let out = Arc::new(out);
        self.levels
            .lock()
            .expect("root cache poisoned")
            .insert(level, out.clone());
        Ok(out)
    }

    fn check_len(&self, coords: &[Q]) {
        assert_eq!(coords.len(), self.degree, "coordinate vector has the wrong length");
    }

    /// Reduces an arbitrary polynomial in `alpha` to power-basis coordinates.
    pub fn reduce(&self, coeffs: &[Q]) -> Vec<Q> {
        let d = self.degree;
        let mut out: Vec<Q> = coeffs.iter().take(d).cloned().collect();
        out.resize(d, Q::zero());
        for (i, c) in coeffs.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            let row = self.reduction_row(i - d);
            for (o, r) in out.iter_mut().zip(row.iter()) {
                *o += c * r;
            }
        }
        out
    }

    fn reduction_row(&self, i: usize) -> std::borrow::Cow<'_, [Q]> {
        if i < self.reduction.len() {
            std::borrow::Cow::Borrowed(&self.reduction[i])
        } else {
            let mut c = vec![Q::zero(); self.degree + i + 1];
            c[self.degree + i] = Q::one();
            let (_, r) = QPoly::new(c).div_rem(&self.minpoly);
            let mut v = r.into_coeffs();
            v.resize(self.degree, Q::zero());
            std::borrow::Cow::Owned(v)
        }
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        self.check_len(a);
        self.check_len(b);
        let d = self.degree;
        let mut prod = vec![Q::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(&prod)
    }

    /// Matrix of multiplication by `u` on power-basis coordinates.
    pub fn mul_matrix(&self, u: &[Q]) -> Vec<Vec<Q>> {
        let d = self.degree;
        let cols: Vec<Vec<Q>> = (0..d)
            .map(|j| {
                let mut e = vec![Q::zero(); d];
                e[j] = Q::one();
                self.mul(u, &e)
            })
            .collect();
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn inverse(&self, u: &[Q]) -> Result<Vec<Q>> {
        self.check_len(u);
        if u.iter().all(|x| x.is_zero()) {
            return Err(Error::NotDivisible);
        }
        let mut e = vec![Q::zero(); self.degree];
        e[0] = Q::one();
        linalg::solve(&self.mul_matrix(u), &e).ok_or(Error::NotDivisible)
    }

    /// Enclosure of `sum_j a_j alpha_k^j` of width at most `2^-bits`.
    ///
    /// The result is the intersection of enclosures at every starting level up to the
    /// first one that is narrow enough, so higher precision requests nest inside lower ones.
    pub fn embed(&self, a: &[Q], k: usize, bits: u32) -> ComplexInterval {
        assert!(k < self.degree, "embedding index out of range");
        self.check_len(a);
        if a[1..].iter().all(|x| x.is_zero()) {
            return ComplexInterval::point(a[0].clone(), Q::zero());
        }
        let target = eps(bits);
        let mut level = PRECISION_START;
        let mut acc: Option<ComplexInterval> = None;
        loop {
            let e = self.enclosure_at(a, k, level);
            let cur = match acc {
                None => e,
                Some(prev) => intersect(&prev, &e),
            };
            if cur.width() <= target {
                return cur;
            }
            acc = Some(cur);
            level *= 2;
        }
    }

    fn enclosure_at(&self, a: &[Q], k: usize, level: u32) -> ComplexInterval {
        let roots = self
            .roots_at(level)
            .unwrap_or_else(|e| panic!("root refinement failed: {e}"));
        QPoly::new(a.to_vec()).eval_complex(&roots[k], level + 16)
    }

    /// Double-precision value at embedding `k` with a rigorous-in-practice error radius.
    pub fn embed_f64(&self, a: &[Q], k: usize) -> (Complex64, f64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (c, p) in a.iter().zip(&self.powers[k]) {
            if c.is_zero() {
                continue;
            }
            let t = *p * to_f64(c);
            mag += t.norm();
            v += t;
        }
        (v, mag * 2f64.powi(-44) + f64::MIN_POSITIVE)
    }

    /// Exact sign at a real embedding.
    pub fn sign_at(&self, a: &[Q], k: usize) -> Result<Sign> {
        assert!(self.is_real_embedding(k), "sign requested at a complex embedding");
        self.check_len(a);
        if a.iter().all(|x| x.is_zero()) {
            return Ok(Sign::Zero);
        }
        if a[1..].iter().all(|x| x.is_zero()) {
            return Ok(Sign::of(&a[0]));
        }
        let (v, err) = self.embed_f64(a, k);
        if v.re.is_finite() && v.re.abs() > err {
            return Ok(if v.re > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        let mut level = PRECISION_START;
        loop {
            if let Some(s) = self.enclosure_at(a, k, level).re.sign() {
                if s != Sign::Zero {
                    return Ok(s);
                }
            }
            let cap = precision_cap();
            if level >= cap {
                return Err(Error::PrecisionCap(cap));
            }
            level *= 2;
        }
    }

    /// Compares `|sigma_k(a)|` with a nonnegative rational bound.
    pub fn cmp_abs(&self, a: &[Q], k: usize, c: &Q) -> Result<Ordering> {
        if self.is_real_embedding(k) {
            let mut lo = a.to_vec();
            lo[0] += c;
            let mut hi = a.to_vec();
            hi[0] -= c;
            let s_hi = self.sign_at(&hi, k)?;
            let s_lo = self.sign_at(&lo, k)?;
            return Ok(match (s_lo, s_hi) {
                (Sign::Negative, _) | (_, Sign::Positive) => Ordering::Greater,
                (Sign::Zero, _) | (_, Sign::Zero) => Ordering::Equal,
                _ => Ordering::Less,
            });
        }
        if a[1..].iter().all(|x| x.is_zero()) {
            return Ok(a[0].abs().cmp(c));
        }
        let c2 = c * c;
        let (v, err) = self.embed_f64(a, k);
        let cf = to_f64(c);
        let n = v.norm();
        if n.is_finite() && (n - cf).abs() > err * 2.0 + cf * 1e-15 {
            return Ok(n.partial_cmp(&cf).unwrap_or(Ordering::Equal));
        }
        let mut level = PRECISION_START;
        loop {
            let ns = self.enclosure_at(a, k, level).norm_sqr();
            if ns.hi() < &c2 {
                return Ok(Ordering::Less);
            }
            if ns.lo() > &c2 {
                return Ok(Ordering::Greater);
            }
            let cap = precision_cap();
            if level >= cap {
                return Err(Error::PrecisionCap(cap));
            }
            level *= 2;
        }
    }

    /// Double-precision conjugates of `alpha_0`.
    pub fn conjugates_f64(&self) -> Vec<Complex64> {
        self.powers
            .iter()
            .map(|p| p.get(1).copied().unwrap_or(Complex64::new(0.0, 0.0)))
            .collect()
    }

    pub fn same_as(&self, other: &NumberField) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.int_coeffs != other.int_coeffs {
            return false;
        }
        let a = self.root_enclosures();
        let b = other.root_enclosures();
        a[0].re.intersects(&b[0].re)
    }
}

fn intersect(a: &ComplexInterval, b: &ComplexInterval) -> ComplexInterval {
    let iv = |x: &Interval, y: &Interval| {
        let lo = x.lo().max(y.lo()).clone();
        let hi = x.hi().min(y.hi()).clone();
        if lo <= hi {
            Interval::new(lo, hi)
        } else {
            y.clone()
        }
    };
    ComplexInterval::new(iv(&a.re, &b.re), iv(&a.im, &b.im))
}

fn reduction_table(p: &QPoly, d: usize) -> Vec<Vec<Q>> {
    // alpha^d = -(c_0 + ... + c_{d-1} alpha^{d-1})
    let mut rows = Vec::new();
    if d < 2 {
        return rows;
    }
    let mut cur: Vec<Q> = p.coeffs()[..d].iter().map(|c| -c).collect();
    for _ in 0..d - 1 {
        rows.push(cur.clone());
        let top = cur[d - 1].clone();
        let mut next = vec![Q::zero(); d];
        next[1..d].clone_from_slice(&cur[..d - 1]);
        for (n, r) in next.iter_mut().zip(rows[0].iter()) {
            *n += &top * r;
        }
        cur = next;
    }
    rows
}

fn integer_root_in(p: &QPoly, iv: &Interval) -> Option<BigInt> {
    let fine = refine_real(p, iv, 2);
    let lo = fine.lo().ceil().to_integer();
    let hi = fine.hi().floor().to_integer();
    let mut n = lo;
    while n <= hi {
        if p.eval(&Q::from_integer(n.clone())).is_zero() {
            return Some(n);
        }
        n += 1;
    }
    None
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("minpoly", &self.minpoly.to_string())
            .field("degree", &self.degree)
            .field("alpha0", &self.powers.first().and_then(|p| p.get(1)))
            .finish()
    }
}

/// Parses a field description with decimal-string or numeric entries.
pub fn parse_field(minpoly: &[String], hint: &[String; 2]) -> Result<NumberField> {
    let mut c = Vec::with_capacity(minpoly.len());
    for s in minpoly {
        let v = super::rational::parse_rational(s)?;
        if !super::rational::is_integer(&v) {
            return Err(Error::Parse(format!("minpoly coefficient {s:?} is not an integer")));
        }
        c.push(v.to_integer());
    }
    let lo = super::rational::parse_rational(&hint[0])?;
    let hi = super::rational::parse_rational(&hint[1])?;
    NumberField::new(&c, (lo, hi))
}

//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::{ComplexInterval, Interval};
use super::rational::{fmt_rational, Q};
use super::Sign;

/// Coefficients stored constant-first, always trimmed of trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    c: Vec<Q>,
}

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&v| Q::from_integer(v.into())).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        QPoly::new(c.iter().map(|v| Q::from_integer(v.clone())).collect())
    }

    pub fn zero() -> Self {
        QPoly { c: Vec::new() }
    }

    pub fn constant(v: Q) -> Self {
        QPoly::new(vec![v])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        QPoly::new(vec![Q::zero(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Q> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Q> {
        self.c.last()
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, k: &Q) -> QPoly {
        QPoly::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn monic(&self) -> QPoly {
        match self.lead() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => QPoly::zero(),
        }
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.c.iter().map(|x| -x).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.c[dd].recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let f = &r[k] * &lead_inv;
            if f.is_zero() {
                continue;
            }
            for (i, dc) in d.c.iter().enumerate() {
                r[k - dd + i] -= &f * dc;
            }
            quot[k - dd] = f;
        }
        r.truncate(dd);
        (QPoly::new(quot), QPoly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Q) -> Sign {
        Sign::of(&self.eval(x))
    }

    /// Horner evaluation over an interval, rounding outward after each step.
    pub fn eval_interval(&self, x: &Interval, bits: u32) -> Interval {
        let mut acc = Interval::zero();
        for c in self.c.iter().rev() {
            acc = (&(&acc * x) + &Interval::point(c.clone())).round_out(bits);
        }
        acc
    }

    pub fn eval_complex(&self, z: &ComplexInterval, bits: u32) -> ComplexInterval {
        if z.is_real() {
            return ComplexInterval::real(self.eval_interval(&z.re, bits));
        }
        let mut acc = ComplexInterval::real(Interval::zero());
        for c in self.c.iter().rev() {
            let cz = ComplexInterval::real(Interval::point(c.clone()));
            acc = (&(&acc * z) + &cz).round_out(bits);
        }
        acc
    }

    /// Exact value at the Gaussian rational `re + i im`.
    pub fn eval_gaussian(&self, re: &Q, im: &Q) -> (Q, Q) {
        let mut ar = Q::zero();
        let mut ai = Q::zero();
        for c in self.c.iter().rev() {
            let nr = &ar * re - &ai * im + c;
            let ni = &ar * im + &ai * re;
            ar = nr;
            ai = ni;
        }
        (ar, ai)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.c
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + super::rational::to_f64(c))
    }

    /// Canonical Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        seq
    }

    /// Cauchy bound: every complex root has modulus strictly below it.
    pub fn root_bound(&self) -> Q {
        let d = self.degree().unwrap_or(0);
        if d == 0 {
            return Q::one();
        }
        let lead = self.c[d].abs();
        let m = self.c[..d]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Q::zero(), |a, b| if b > a { b } else { a });
        m + Q::one()
    }
}

/// Number of sign changes in a sequence of values, ignoring zeros.
pub fn sign_changes<'a>(vals: impl Iterator<Item = &'a Q>) -> usize {
    let mut last: Option<bool> = None;
    let mut n = 0;
    for v in vals {
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if last.is_some_and(|l| l != pos) {
            n += 1;
        }
        last = Some(pos);
    }
    n
}

/// Distinct real roots in the half-open interval `(a, b]`, given a Sturm sequence.
pub fn sturm_count(seq: &[QPoly], a: &Q, b: &Q) -> usize {
    let va: Vec<Q> = seq.iter().map(|p| p.eval(a)).collect();
    let vb: Vec<Q> = seq.iter().map(|p| p.eval(b)).collect();
    sign_changes(va.iter()).saturating_sub(sign_changes(vb.iter()))
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", fmt_rational(c))?,
                1 => write!(f, "{}*x", fmt_rational(c))?,
                _ => write!(f, "{}*x^{i}", fmt_rational(c))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::rational::q;
    use super::*;

    #[test]
    fn div_rem_roundtrip() {
        let a = QPoly::from_ints(&[-1, -1, 0, 1]);
        let b = QPoly::from_ints(&[1, 2]);
        let (qu, r) = a.div_rem(&b);
        assert_eq!(qu.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_finds_common_factor() {
        let a = QPoly::from_ints(&[-1, 0, 1]);
        let b = QPoly::from_ints(&[-1, 1]).mul(&QPoly::from_ints(&[3, 1]));
        assert_eq!(a.gcd(&b), QPoly::from_ints(&[-1, 1]));
        assert!(!a.mul(&QPoly::from_ints(&[-1, 1])).is_squarefree());
    }

    #[test]
    fn sturm_counts_real_roots() {
        let p = QPoly::from_ints(&[-1, -1, 0, 1]);
        let s = p.sturm();
        assert_eq!(sturm_count(&s, &q(-10), &q(10)), 1);
        assert_eq!(sturm_count(&s, &q(1), &q(2)), 1);
        let p = QPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(sturm_count(&p.sturm(), &q(-2), &q(2)), 2);
    }

    #[test]
    fn gaussian_eval() {
        // x^2 + 1 at i is 0
        let p = QPoly::from_ints(&[1, 0, 1]);
        assert_eq!(p.eval_gaussian(&q(0), &q(1)), (q(0), q(0)));
    }
}

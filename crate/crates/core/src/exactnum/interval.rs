//! Closed intervals with rational endpoints, and rectangular complex intervals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::rational::{ceil_dyadic, floor_dyadic, sqrt_bounds, to_f64, Q};
use super::Sign;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Q,
    hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Q::zero())
    }

    pub fn lo(&self) -> &Q {
        &self.lo
    }

    pub fn hi(&self) -> &Q {
        &self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign of every point in the interval, if they all agree.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Largest absolute value attained.
    pub fn mag(&self) -> Q {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn scale(&self, k: &Q) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if self.contains_zero() {
            Interval::new(Q::zero(), hi)
        } else {
            Interval::new(lo, hi)
        }
    }

    /// Outward rounding of both endpoints onto the dyadic grid of spacing `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        if self.lo == self.hi {
            return rhs.scale(&self.lo);
        }
        if rhs.lo == rhs.hi {
            return self.scale(&rhs.lo);
        }
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = &c[0];
        let mut hi = &c[0];
        for v in &c[1..] {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        Interval {
            lo: lo.clone(),
            hi: hi.clone(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64_pair();
        write!(f, "[{a:.15e}, {b:.15e}]")
    }
}

/// Axis-aligned box in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        ComplexInterval {
            re,
            im: Interval::zero(),
        }
    }

    pub fn point(re: Q, im: Q) -> Self {
        ComplexInterval {
            re: Interval::point(re),
            im: Interval::point(im),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.lo.is_zero() && self.im.hi.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexInterval {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Enclosure of `|z|^2`.
    pub fn norm_sqr(&self) -> Interval {
        &self.re.sqr() + &self.im.sqr()
    }

    /// Upper bound on `|z|`.
    pub fn abs_upper(&self) -> Q {
        let n = self.norm_sqr();
        sqrt_bounds(n.hi(), 64).1
    }

    /// Lower bound on `|z|`.
    pub fn abs_lower(&self) -> Q {
        let n = self.norm_sqr();
        sqrt_bounds(n.lo(), 64).0
    }

    /// The larger of the two side lengths.
    pub fn width(&self) -> Q {
        let a = self.re.width();
        let b = self.im.width();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn round_out(&self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.round_out(bits),
            im: self.im.round_out(bits),
        }
    }

    pub fn scale(&self, k: &Q) -> Self {
        ComplexInterval {
            re: self.re.scale(k),
            im: self.im.scale(k),
        }
    }
}

impl Add for &ComplexInterval {
    type Output = ComplexInterval;
    fn add(self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &ComplexInterval {
    type Output = ComplexInterval;
    fn sub(self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &ComplexInterval {
    type Output = ComplexInterval;
    fn mul(self, rhs: &ComplexInterval) -> ComplexInterval {
        if self.is_real() && rhs.is_real() {
            return ComplexInterval::real(&self.re * &rhs.re);
        }
        ComplexInterval {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{} + i{}", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::rational::{q, qr};
    use super::*;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(q(a), q(b))
    }

    #[test]
    fn multiplication_covers_sign_mix() {
        let p = &iv(-2, 3) * &iv(-5, 1);
        assert_eq!(p, iv(-15, 10));
        assert_eq!(iv(-2, 3).sqr(), iv(0, 9));
    }

    #[test]
    fn signs() {
        assert_eq!(iv(1, 2).sign(), Some(Sign::Positive));
        assert_eq!(iv(-2, -1).sign(), Some(Sign::Negative));
        assert_eq!(iv(0, 0).sign(), Some(Sign::Zero));
        assert_eq!(iv(-1, 1).sign(), None);
    }

    #[test]
    fn complex_product_contains_exact() {
        // (1/2 + i)(2 - i/3) = 4/3 + (11/6) i
        let a = ComplexInterval::point(qr(1, 2), q(1));
        let b = ComplexInterval::point(q(2), qr(-1, 3));
        let p = &a * &b;
        assert!(p.re.contains(&qr(4, 3)));
        assert!(p.im.contains(&qr(11, 6)));
        assert_eq!(p.norm_sqr(), Interval::point(qr(16, 9) + qr(121, 36)));
    }
}

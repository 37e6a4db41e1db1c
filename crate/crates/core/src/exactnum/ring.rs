//! A single element type covering number fields and the symbolic ring.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::field::NumberField;
use super::interval::ComplexInterval;
use super::poly::QPoly;
use super::rational::{fmt_rational, q, to_f64, Q};
use super::symbolic::{Symbol, SymbolicRing};
use super::{precision_cap, Sign};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum Ring {
    Field(Arc<NumberField>),
    Symbolic(Arc<SymbolicRing>),
}

impl Ring {
    pub fn field(f: NumberField) -> Ring {
        Ring::Field(Arc::new(f))
    }

    pub fn symbolic(s: Symbol) -> Ring {
        Ring::Symbolic(Arc::new(SymbolicRing::new(s)))
    }

    /// The field `Q`, presented as `Q(1)`.
    pub fn rationals() -> Ring {
        Ring::field(NumberField::from_i64(&[-1, 1], (q(0), q(2))).expect("x - 1 is a valid field"))
    }

    pub fn same(&self, other: &Ring) -> bool {
        match (self, other) {
            (Ring::Field(a), Ring::Field(b)) => Arc::ptr_eq(a, b) || a.same_as(b),
            (Ring::Symbolic(a), Ring::Symbolic(b)) => a == b,
            _ => false,
        }
    }

    /// Field degree, or `None` for the symbolic ring.
    pub fn degree(&self) -> Option<usize> {
        match self {
            Ring::Field(f) => Some(f.degree()),
            Ring::Symbolic(_) => None,
        }
    }

    pub fn as_field(&self) -> Option<&Arc<NumberField>> {
        match self {
            Ring::Field(f) => Some(f),
            Ring::Symbolic(_) => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Ring::Symbolic(_))
    }

    fn normalize(&self, mut coords: Vec<Q>) -> Vec<Q> {
        match self {
            Ring::Field(f) => {
                if coords.len() > f.degree() {
                    coords = f.reduce(&coords);
                }
                coords.resize(f.degree(), Q::zero());
                coords
            }
            Ring::Symbolic(_) => QPoly::new(coords).into_coeffs(),
        }
    }

    pub fn elem(&self, coords: Vec<Q>) -> RingElem {
        RingElem {
            coords: self.normalize(coords),
            ring: self.clone(),
        }
    }

    pub fn from_ints(&self, coords: &[i64]) -> RingElem {
        self.elem(coords.iter().map(|&v| q(v)).collect())
    }

    pub fn from_q(&self, v: Q) -> RingElem {
        self.elem(vec![v])
    }

    pub fn zero(&self) -> RingElem {
        self.elem(Vec::new())
    }

    pub fn one(&self) -> RingElem {
        self.from_q(Q::one())
    }

    /// `alpha_0` for a field, the symbol for the symbolic ring.
    pub fn generator(&self) -> RingElem {
        self.elem(vec![Q::zero(), Q::one()])
    }

    pub fn name(&self) -> String {
        match self {
            Ring::Field(f) => format!("Q[x]/({})", f.minpoly()),
            Ring::Symbolic(s) => format!("Q[{}]", s.symbol().name()),
        }
    }

    fn var(&self) -> &'static str {
        match self {
            Ring::Field(_) => "a",
            Ring::Symbolic(s) => s.symbol().name(),
        }
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        self.same(other)
    }
}

impl Eq for Ring {}

/// Element stored as power-basis (or polynomial) coordinates over `Q`.
#[derive(Clone, Debug)]
pub struct RingElem {
    ring: Ring,
    coords: Vec<Q>,
}

impl RingElem {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Canonical coordinates: length `d` for fields, trimmed for the symbolic ring.
    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> Q {
        self.coords.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The rational value, when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Q> {
        if self.coords.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coord(0))
        } else {
            None
        }
    }

    fn check(&self, o: &RingElem) -> Result<()> {
        if self.ring.same(&o.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    fn with(&self, coords: Vec<Q>) -> RingElem {
        self.ring.elem(coords)
    }

    pub fn try_add(&self, o: &RingElem) -> Result<RingElem> {
        self.check(o)?;
        let n = self.coords.len().max(o.coords.len());
        Ok(self.with((0..n).map(|i| self.coord(i) + o.coord(i)).collect()))
    }

    pub fn try_sub(&self, o: &RingElem) -> Result<RingElem> {
        self.check(o)?;
        let n = self.coords.len().max(o.coords.len());
        Ok(self.with((0..n).map(|i| self.coord(i) - o.coord(i)).collect()))
    }

    pub fn try_mul(&self, o: &RingElem) -> Result<RingElem> {
        self.check(o)?;
        Ok(match &self.ring {
            Ring::Field(f) => self.with(f.mul(&self.coords, &o.coords)),
            Ring::Symbolic(_) => {
                let p = QPoly::new(self.coords.clone()).mul(&QPoly::new(o.coords.clone()));
                self.with(p.into_coeffs())
            }
        })
    }

    /// Exact quotient; in the symbolic ring only exact polynomial division succeeds.
    pub fn try_div(&self, o: &RingElem) -> Result<RingElem> {
        self.check(o)?;
        if o.is_zero() {
            return Err(Error::NotDivisible);
        }
        match &self.ring {
            Ring::Field(f) => {
                let inv = f.inverse(&o.coords)?;
                Ok(self.with(f.mul(&self.coords, &inv)))
            }
            Ring::Symbolic(_) => {
                let (qu, r) = QPoly::new(self.coords.clone()).div_rem(&QPoly::new(o.coords.clone()));
                if r.is_zero() {
                    Ok(self.with(qu.into_coeffs()))
                } else {
                    Err(Error::NotDivisible)
                }
            }
        }
    }

    pub fn scale(&self, k: &Q) -> RingElem {
        self.with(self.coords.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: u32) -> RingElem {
        let mut acc = self.ring.one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact sign at embedding `0`.
    pub fn sign(&self) -> Result<Sign> {
        match &self.ring {
            Ring::Field(f) => f.sign_at(&self.coords, 0),
            Ring::Symbolic(s) => s.sign(&QPoly::new(self.coords.clone()), precision_cap()),
        }
    }

    /// Exact comparison of values at embedding `0`.
    pub fn cmp_value(&self, o: &RingElem) -> Result<Ordering> {
        Ok(match self.try_sub(o)?.sign()? {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }

    pub fn abs(&self) -> Result<RingElem> {
        Ok(if self.sign()? == Sign::Negative {
            -self
        } else {
            self.clone()
        })
    }

    /// Value at embedding `0` in double precision.
    pub fn to_f64(&self) -> f64 {
        match &self.ring {
            Ring::Field(f) => {
                if let Some(r) = self.as_rational() {
                    return to_f64(&r);
                }
                f.embed_f64(&self.coords, 0).0.re
            }
            Ring::Symbolic(s) => s.eval_f64(&QPoly::new(self.coords.clone())),
        }
    }

    /// Value at embedding `0` in double precision, with an error radius.
    pub fn approx(&self) -> (f64, f64) {
        match &self.ring {
            Ring::Field(f) => {
                let (v, err) = f.embed_f64(&self.coords, 0);
                (v.re, err)
            }
            Ring::Symbolic(s) => {
                let x = s.symbol().to_f64();
                let mut v = 0.0;
                let mut mag = 0.0;
                let mut p = 1.0;
                for (i, c) in self.coords.iter().enumerate() {
                    let t = to_f64(c) * p;
                    v += t;
                    mag += t.abs() * (i as f64 + 2.0);
                    p *= x;
                }
                (v, mag * 2f64.powi(-48) + f64::MIN_POSITIVE)
            }
        }
    }

    /// Enclosure of width at most `2^-bits` at embedding `k`.
    pub fn embed(&self, k: usize, bits: u32) -> ComplexInterval {
        match &self.ring {
            Ring::Field(f) => f.embed(&self.coords, k, bits),
            Ring::Symbolic(s) => {
                assert_eq!(k, 0, "the symbolic ring has a single embedding");
                ComplexInterval::real(s.eval(&QPoly::new(self.coords.clone()), bits))
            }
        }
    }

    /// Coordinates as a plain polynomial in the generator.
    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.coords.clone())
    }

    /// Whether every coordinate is an integer.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(super::rational::is_integer)
    }
}

impl PartialEq for RingElem {
    fn eq(&self, o: &RingElem) -> bool {
        self.coords == o.coords && self.ring.same(&o.ring)
    }
}

impl Eq for RingElem {}

impl Hash for RingElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl PartialOrd for RingElem {
    fn partial_cmp(&self, o: &RingElem) -> Option<Ordering> {
        self.cmp_value(o).ok()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&RingElem> for &RingElem {
            type Output = RingElem;
            fn $m(self, rhs: &RingElem) -> RingElem {
                self.$f(rhs).expect("ring mismatch")
            }
        }
        impl $tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $m(self, rhs: RingElem) -> RingElem {
                self.$f(&rhs).expect("ring mismatch")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Div<&RingElem> for &RingElem {
    type Output = RingElem;
    fn div(self, rhs: &RingElem) -> RingElem {
        self.try_div(rhs).expect("inexact division")
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.with(self.coords.iter().map(|c| -c).collect())
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.ring.var();
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag = fmt_rational(&a);
            match (i, a.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "{var}")?,
                (1, false) => write!(f, "{mag}*{var}")?,
                (_, true) => write!(f, "{var}^{i}")?,
                (_, false) => write!(f, "{mag}*{var}^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Ring {
        Ring::field(NumberField::from_i64(&[-2, 0, 1], (q(1), q(2))).unwrap())
    }

    #[test]
    fn field_ops() {
        let r = sqrt2();
        let a = r.from_ints(&[1, 1]);
        let b = r.from_ints(&[1, -1]);
        assert_eq!(&a * &b, r.from_ints(&[-1, 0]));
        assert_eq!((&a / &b).to_string(), "-3 - 2*a");
        assert_eq!(r.generator().pow(2), r.from_ints(&[2]));
        assert_eq!(b.sign().unwrap(), Sign::Negative);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = sqrt2().one();
        let b = Ring::symbolic(Symbol::Pi).one();
        assert_eq!(a.try_add(&b).unwrap_err(), Error::RingMismatch);
    }

    #[test]
    fn symbolic_ops() {
        let r = Ring::symbolic(Symbol::Pi);
        let x = r.generator();
        let one = r.one();
        let p = &(&x - &one) * &(&x + &one);
        assert_eq!(p.coords().len(), 3);
        assert_eq!(p.try_div(&(&x - &one)).unwrap(), &x + &one);
        assert_eq!(one.try_div(&x).unwrap_err(), Error::NotDivisible);
        assert_eq!((&x - &r.from_ints(&[3])).sign().unwrap(), Sign::Positive);
        assert!((x.to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }
}

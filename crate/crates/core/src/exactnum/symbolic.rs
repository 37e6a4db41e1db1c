//! Polynomial ring over the rationals in one transcendental real symbol.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::interval::Interval;
use super::poly::QPoly;
use super::rational::{ceil_dyadic, floor_dyadic, Q};
use super::Sign;
use crate::error::{Error, Result};

/// Transcendental constants with arbitrarily refinable enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    Pi,
    E,
}

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::Pi => "pi",
            Symbol::E => "e",
        }
    }

    pub fn parse(s: &str) -> Result<Symbol> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pi" | "π" => Ok(Symbol::Pi),
            "e" => Ok(Symbol::E),
            other => Err(Error::Parse(format!("unknown symbol {other:?}"))),
        }
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn enclosure(self, bits: u32) -> Interval {
        match self {
            Symbol::Pi => pi_enclosure(bits),
            Symbol::E => e_enclosure(bits),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Symbol::Pi => std::f64::consts::PI,
            Symbol::E => std::f64::consts::E,
        }
    }
}

/// Fixed-point `atan(1/x)` scaled by `2^s`, with its absolute error bound in ulps.
fn atan_inv(x: u64, s: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << s as usize;
    let x2 = BigInt::from(x * x);
    let mut power = &one / x;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // At most three ulps per term from truncation, plus the dropped tail.
    (sum, BigInt::from(3 * k + 6))
}

fn pi_enclosure(bits: u32) -> Interval {
    let s = bits + 24;
    let (a, ea) = atan_inv(5, s);
    let (b, eb) = atan_inv(239, s);
    let v = a * 16 - b * 4;
    let err = ea * 16 + eb * 4;
    fixed_to_interval(v, err, s, bits)
}

fn e_enclosure(bits: u32) -> Interval {
    let s = bits + 24;
    let mut term = BigInt::one() << s as usize;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        k += 1;
        term /= k;
    }
    fixed_to_interval(sum, BigInt::from(2 * k + 6), s, bits)
}

fn fixed_to_interval(v: BigInt, err: BigInt, s: u32, bits: u32) -> Interval {
    let den = BigInt::one() << s as usize;
    let lo = Q::new(&v - &err, den.clone());
    let hi = Q::new(v + err, den);
    Interval::new(floor_dyadic(&lo, bits + 2), ceil_dyadic(&hi, bits + 2))
}

/// `Q[x]` with `x` bound to a transcendental real; elements are never reduced.
#[derive(Debug)]
pub struct SymbolicRing {
    symbol: Symbol,
    cache: Mutex<BTreeMap<u32, Interval>>,
}

impl SymbolicRing {
    pub fn new(symbol: Symbol) -> Self {
        SymbolicRing {
            symbol,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    /// Enclosure of the symbol value of width at most `2^-bits`.
    pub fn symbol_value(&self, bits: u32) -> Interval {
        let mut cache = self.cache.lock().expect("symbol cache poisoned");
        if let Some((_, iv)) = cache.range(bits..).next() {
            return iv.clone();
        }
        let iv = self.symbol.enclosure(bits);
        cache.insert(bits, iv.clone());
        iv
    }

    /// Enclosure of `p(symbol)` of width at most `2^-bits`.
    pub fn eval(&self, p: &QPoly, bits: u32) -> Interval {
        let target = super::rational::eps(bits);
        let mut prec = bits + 8 + 4 * p.degree().unwrap_or(0) as u32;
        loop {
            let x = self.symbol_value(prec);
            let v = p.eval_interval(&x, prec + 8);
            if v.width() <= target {
                return v;
            }
            prec += prec / 2 + 16;
        }
    }

    pub fn eval_f64(&self, p: &QPoly) -> f64 {
        p.eval_f64(self.symbol.to_f64())
    }

    /// Exact sign at the symbol value; only the zero polynomial vanishes.
    pub fn sign(&self, p: &QPoly, cap: u32) -> Result<Sign> {
        if p.is_zero() {
            return Ok(Sign::Zero);
        }
        let mut bits = 64;
        loop {
            let x = self.symbol_value(bits);
            if let Some(s) = p.eval_interval(&x, bits + 8).sign() {
                if s != Sign::Zero {
                    return Ok(s);
                }
            }
            if bits >= cap {
                return Err(Error::PrecisionCap(cap));
            }
            bits *= 2;
        }
    }
}

impl PartialEq for SymbolicRing {
    fn eq(&self, other: &Self) -> bool {
        self.symbol == other.symbol
    }
}

impl Eq for SymbolicRing {}

#[cfg(test)]
mod tests {
    use super::super::rational::{eps, q, qr, to_f64};
    use super::*;

    #[test]
    fn pi_digits() {
        let iv = Symbol::Pi.enclosure(300);
        assert!(iv.width() <= eps(300));
        // 355/113 overshoots pi by about 2.7e-7.
        assert!(iv.hi() < &qr(355, 113));
        assert!(iv.lo() > &qr(333, 106));
        assert!((to_f64(iv.lo()) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn e_digits() {
        let iv = Symbol::E.enclosure(200);
        assert!(iv.width() <= eps(200));
        assert!((to_f64(iv.lo()) - std::f64::consts::E).abs() < 1e-15);
        assert!(iv.lo() > &qr(2718281, 1000000) && iv.hi() < &qr(2718282, 1000000));
    }

    #[test]
    fn symbolic_signs() {
        let r = SymbolicRing::new(Symbol::Pi);
        // 355 - 113 pi > 0
        let p = QPoly::new(vec![q(355), q(-113)]);
        assert_eq!(r.sign(&p, 16384).unwrap(), Sign::Positive);
        assert_eq!(r.sign(&QPoly::zero(), 64).unwrap(), Sign::Zero);
        assert_eq!(r.sign(&p.neg(), 16384).unwrap(), Sign::Negative);
    }
}

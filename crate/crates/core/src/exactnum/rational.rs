//! Helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// Largest dyadic `k / 2^bits` not above `x`.
pub fn floor_dyadic(x: &Q, bits: u32) -> Q {
    if x.denom().bits() <= bits as u64 && is_pow2(x.denom()) {
        return x.clone();
    }
    let s = two_pow(bits);
    Q::new((x * Q::from_integer(s.clone())).floor().to_integer(), s)
}

/// Smallest dyadic `k / 2^bits` not below `x`.
pub fn ceil_dyadic(x: &Q, bits: u32) -> Q {
    if x.denom().bits() <= bits as u64 && is_pow2(x.denom()) {
        return x.clone();
    }
    let s = two_pow(bits);
    Q::new((x * Q::from_integer(s.clone())).ceil().to_integer(), s)
}

fn is_pow2(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}

/// `2^-bits` as a rational.
pub fn eps(bits: u32) -> Q {
    Q::new(BigInt::one(), two_pow(bits))
}

/// Lower and upper dyadic bounds on `sqrt(x)` for `x >= 0`, at most `2^-bits` apart.
pub fn sqrt_bounds(x: &Q, bits: u32) -> (Q, Q) {
    assert!(!x.is_negative(), "sqrt of a negative rational");
    let scaled = x * Q::from_integer(BigInt::one() << (2 * bits as usize));
    let n = scaled.floor().to_integer();
    let s = n.sqrt();
    let den = two_pow(bits);
    let exact = is_integer(&scaled) && &s * &s == n;
    let lo = Q::new(s.clone(), den.clone());
    let hi = if exact { lo.clone() } else { Q::new(s + 1, den) };
    (lo, hi)
}

pub fn to_f64(x: &Q) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back on shifting both parts down to a representable range.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let n = (x.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(v: f64) -> Q {
    Q::from_float(v).expect("finite float")
}

/// Parses `"3"`, `"-7/4"`, or a plain decimal such as `"1.25"` or `"-0.5e-3"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let neg = int_part.starts_with('-');
    let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut value = Q::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exp - frac_part.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Canonical string form, `"n"` or `"n/d"`.
pub fn fmt_rational(x: &Q) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rationals in `(lo, hi)` with denominator `den`, nearest the midpoint first.
pub fn rationals_between(lo: &Q, hi: &Q, den: u64) -> Vec<Q> {
    let d = BigInt::from(den);
    let dq = Q::from_integer(d.clone());
    let first = (lo * &dq).floor().to_integer() + 1;
    let last = (hi * &dq).ceil().to_integer() - 1;
    if first > last {
        return Vec::new();
    }
    let mid = (&first + &last) / 2;
    let mut out = Vec::new();
    let mut offset = BigInt::zero();
    loop {
        let up = &mid + &offset;
        let down = &mid - &offset;
        let mut any = false;
        if up <= last {
            out.push(Q::new(up, d.clone()));
            any = true;
        }
        if !offset.is_zero() && down >= first {
            out.push(Q::new(down, d.clone()));
            any = true;
        }
        if !any {
            break;
        }
        offset += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_rounding_brackets() {
        let x = qr(1, 3);
        let lo = floor_dyadic(&x, 10);
        let hi = ceil_dyadic(&x, 10);
        assert!(lo < x && x < hi);
        assert_eq!(&hi - &lo, eps(10));
        assert_eq!(floor_dyadic(&qr(3, 4), 10), qr(3, 4));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let (lo, hi) = sqrt_bounds(&q(2), 40);
        assert!(&lo * &lo <= q(2) && &hi * &hi >= q(2));
        assert!(&hi - &lo <= eps(40));
        let (lo, hi) = sqrt_bounds(&qr(9, 4), 8);
        assert_eq!(lo, qr(3, 2));
        assert_eq!(hi, qr(3, 2));
    }

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("-7/4").unwrap(), qr(-7, 4));
        assert_eq!(parse_rational("1.25").unwrap(), qr(5, 4));
        assert_eq!(parse_rational("-0.5e-1").unwrap(), qr(-1, 20));
        assert_eq!(parse_rational("12").unwrap(), q(12));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn between_midpoint_first() {
        let v = rationals_between(&q(0), &q(1), 7);
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], qr(3, 7));
    }
}

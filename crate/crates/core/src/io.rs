//! JSON formats for fields, rings, polygons, and point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{fmt_rational, is_integer, parse_rational};
use crate::exactnum::{NumberField, Ring, RingElem, Symbol, Q};

/// A rational written as a decimal string (`"-7/4"`, `"1.5"`) or a bare integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    pub fn parse(&self) -> Result<Q> {
        match self {
            Num::Int(v) => Ok(Q::from_integer((*v).into())),
            Num::Str(s) => parse_rational(s),
        }
    }

    pub fn from_q(v: &Q) -> Num {
        Num::Str(fmt_rational(v))
    }
}

/// `{ "minpoly": [c0, ..., cd], "real_root_hint": [lo, hi] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub minpoly: Vec<Num>,
    pub real_root_hint: [Num; 2],
}

impl FieldSpec {
    pub fn build(&self) -> Result<NumberField> {
        let mut c = Vec::with_capacity(self.minpoly.len());
        for n in &self.minpoly {
            let v = n.parse()?;
            if !is_integer(&v) {
                return Err(Error::Parse(format!(
                    "minpoly coefficient {} is not an integer",
                    fmt_rational(&v)
                )));
            }
            c.push(v.to_integer());
        }
        let lo = self.real_root_hint[0].parse()?;
        let hi = self.real_root_hint[1].parse()?;
        NumberField::new(&c, (lo, hi))
    }

    pub fn of(f: &NumberField, hint: (&Q, &Q)) -> FieldSpec {
        FieldSpec {
            minpoly: f.minpoly_coeffs().iter().map(|c| Num::Str(c.to_string())).collect(),
            real_root_hint: [Num::from_q(hint.0), Num::from_q(hint.1)],
        }
    }
}

/// A coefficient ring: a named preset field, an explicit field, or a symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RingSpec {
    Named(String),
    Field(FieldSpec),
    Symbolic { symbol: String },
}

impl RingSpec {
    pub fn build(&self) -> Result<Ring> {
        match self {
            RingSpec::Named(name) => named_field(name)?.build().map(Ring::field),
            RingSpec::Field(f) => f.build().map(Ring::field),
            RingSpec::Symbolic { symbol } => Ok(Ring::symbolic(Symbol::parse(symbol)?)),
        }
    }
}

/// Shipped field presets.
pub fn named_field(name: &str) -> Result<FieldSpec> {
    let spec = |c: &[i64], lo: &str, hi: &str| FieldSpec {
        minpoly: c.iter().map(|&v| Num::Int(v)).collect(),
        real_root_hint: [Num::Str(lo.into()), Num::Str(hi.into())],
    };
    match name {
        "rational" | "q" => Ok(spec(&[-1, 1], "1/2", "3/2")),
        "sqrt2" => Ok(spec(&[-2, 0, 1], "1", "2")),
        "cubic" => Ok(spec(&[-1, -1, 0, 1], "1", "2")),
        other => Err(Error::Parse(format!("unknown field preset {other:?}"))),
    }
}

pub fn field_preset_names() -> &'static [&'static str] {
    &["rational", "sqrt2", "cubic"]
}

/// Power-basis coordinates as a list of rationals.
pub fn elem_from_nums(ring: &Ring, coords: &[Num]) -> Result<RingElem> {
    let c: Result<Vec<Q>> = coords.iter().map(Num::parse).collect();
    let c = c?;
    if let Some(d) = ring.degree() {
        if c.len() > d {
            return Err(Error::Parse(format!(
                "coordinate vector of length {} exceeds field degree {d}",
                c.len()
            )));
        }
    }
    Ok(ring.elem(c))
}

pub fn elem_to_nums(e: &RingElem) -> Vec<Num> {
    e.coords().iter().map(Num::from_q).collect()
}

/// `{ "ring": ..., "points": [[[q...], [q...]], ...] }` for planar sets, or
/// `{ "ring": ..., "elements": [[q...], ...] }` for subsets of the ring.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetFile {
    pub ring: RingSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<[Vec<Num>; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<Vec<Num>>,
}

impl SetFile {
    pub fn planar(&self, ring: &Ring) -> Result<Vec<[RingElem; 2]>> {
        self.points
            .iter()
            .map(|[x, y]| Ok([elem_from_nums(ring, x)?, elem_from_nums(ring, y)?]))
            .collect()
    }

    pub fn linear(&self, ring: &Ring) -> Result<Vec<RingElem>> {
        self.elements.iter().map(|e| elem_from_nums(ring, e)).collect()
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_spec_forms() {
        let a: RingSpec = parse_json(r#""sqrt2""#).unwrap();
        assert_eq!(a.build().unwrap().degree(), Some(2));
        let b: RingSpec = parse_json(r#"{"minpoly": ["-1", "-1", "0", "1"], "real_root_hint": ["1", "2"]}"#).unwrap();
        assert_eq!(b.build().unwrap().degree(), Some(3));
        let c: RingSpec = parse_json(r#"{"symbol": "pi"}"#).unwrap();
        assert!(c.build().unwrap().is_symbolic());
        let bad: RingSpec = parse_json(r#"{"minpoly": ["-2", "0", "3"], "real_root_hint": ["0", "1"]}"#).unwrap();
        assert_eq!(bad.build().unwrap_err(), Error::NotMonic);
    }
}

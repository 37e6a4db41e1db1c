//! Centrally symmetric convex polygons and their gauge norms.

mod axioms;
pub mod presets;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::rational::{floor_dyadic, from_f64};
use crate::exactnum::{Ring, RingElem, Sign, Q};

pub use axioms::{norm_axioms_check, AxiomReport};

pub type Point = [RingElem; 2];

/// Linear functional `u1 x1 + u2 x2`, equal to `1` along its side of the polygon.
#[derive(Clone, Debug)]
pub struct Facet {
    pub u: [RingElem; 2],
    /// Smallest positive rational `s` making `s u` integral and primitive.
    pub scale: Q,
}

impl Facet {
    pub fn eval(&self, x: &Point) -> RingElem {
        &(&self.u[0] * &x[0]) + &(&self.u[1] * &x[1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slope {
    Finite(RingElem),
    Infinite,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(v) => write!(f, "{v}"),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

/// Rational radii with `delta * B_2 ⊆ BX ⊆ rho * B_2` and `BX ⊆ [-box, box]^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sandwich {
    pub delta: Q,
    pub rho: Q,
    pub box_radius: Q,
}

#[derive(Clone, Debug)]
pub struct PolygonalNorm {
    name: String,
    ring: Ring,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
}

fn cross(a: &Point, b: &Point) -> RingElem {
    &(&a[0] * &b[1]) - &(&a[1] * &b[0])
}

fn sub(a: &Point, b: &Point) -> Point {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

impl PolygonalNorm {
    /// Validates a counterclockwise vertex cycle and derives its facet functionals.
    pub fn new(ring: Ring, vertices: Vec<Point>) -> Result<PolygonalNorm> {
        let n = vertices.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidPolygon(format!(
                "need an even number of at least 4 vertices, got {n}"
            )));
        }
        for v in &vertices {
            for c in v {
                if !c.ring().same(&ring) {
                    return Err(Error::RingMismatch);
                }
            }
        }
        let m = n / 2;
        for i in 0..m {
            let a = &vertices[i];
            let b = &vertices[i + m];
            if !(&a[0] + &b[0]).is_zero() || !(&a[1] + &b[1]).is_zero() {
                return Err(Error::InvalidPolygon(format!(
                    "vertex {} is not the negative of vertex {i}",
                    i + m
                )));
            }
        }
        let mut turning = 0.0;
        for i in 0..n {
            let e1 = sub(&vertices[(i + 1) % n], &vertices[i]);
            let e2 = sub(&vertices[(i + 2) % n], &vertices[(i + 1) % n]);
            match cross(&e1, &e2).sign()? {
                Sign::Positive => {}
                Sign::Zero => {
                    return Err(Error::InvalidPolygon(format!(
                        "vertices {i}, {}, {} are collinear or repeated",
                        (i + 1) % n,
                        (i + 2) % n
                    )))
                }
                Sign::Negative => {
                    return Err(Error::InvalidPolygon(format!(
                        "vertex cycle is not convex at vertex {}",
                        (i + 1) % n
                    )))
                }
            }
            let a1 = e1[1].to_f64().atan2(e1[0].to_f64());
            let a2 = e2[1].to_f64().atan2(e2[0].to_f64());
            let mut t = a2 - a1;
            while t < 0.0 {
                t += std::f64::consts::TAU;
            }
            turning += t;
        }
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidPolygon("vertex cycle winds more than once".into()));
        }
        let mut facets = Vec::with_capacity(n);
        for i in 0..n {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            let normal = [&b[1] - &a[1], &a[0] - &b[0]];
            let c = &(&normal[0] * &a[0]) + &(&normal[1] * &a[1]);
            if c.sign()? != Sign::Positive {
                return Err(Error::InvalidPolygon("origin is not interior".into()));
            }
            let u = [normal[0].try_div(&c)?, normal[1].try_div(&c)?];
            let scale = primitive_scale(&u);
            facets.push(Facet { u, scale });
        }
        Ok(PolygonalNorm {
            name: String::new(),
            ring,
            vertices,
            facets,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// All `2m` facets; facet `i` joins vertex `i` to vertex `i + 1`.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Number of antipodal facet pairs.
    pub fn half(&self) -> usize {
        self.facets.len() / 2
    }

    pub fn point(&self, x: &[i64], y: &[i64]) -> Point {
        [self.ring.from_ints(x), self.ring.from_ints(y)]
    }

    /// `max_i l_i(x)` together with one facet index attaining it.
    pub fn eval_with_facet(&self, x: &Point) -> Result<(RingElem, usize)> {
        if !x[0].ring().same(&self.ring) || !x[1].ring().same(&self.ring) {
            return Err(Error::RingMismatch);
        }
        let vals: Vec<RingElem> = self.facets.iter().map(|f| f.eval(x)).collect();
        let approx: Vec<(f64, f64)> = vals.iter().map(RingElem::approx).collect();
        let floor = approx.iter().map(|(v, e)| v - e).fold(f64::NEG_INFINITY, f64::max);
        let mut best: Option<usize> = None;
        for (i, (v, e)) in approx.iter().enumerate() {
            if v + e < floor {
                continue;
            }
            best = Some(match best {
                None => i,
                Some(b) if vals[i].cmp_value(&vals[b])?.is_gt() => i,
                Some(b) => b,
            });
        }
        let b = best.expect("polygon has facets");
        Ok((vals[b].clone(), b))
    }

    /// The gauge `||x||`.
    pub fn eval(&self, x: &Point) -> Result<RingElem> {
        self.eval_with_facet(x).map(|(v, _)| v)
    }

    /// `-1`, `0`, or `1` as `x` lies inside, on, or outside the boundary.
    pub fn boundary_sign(&self, x: &Point) -> Result<Sign> {
        let v = self.eval(x)?;
        (&v - &self.ring.one()).sign()
    }

    /// One slope per antipodal pair of sides, in facet order.
    pub fn side_slopes(&self) -> Result<Vec<Slope>> {
        self.facets[..self.half()]
            .iter()
            .map(|f| {
                if f.u[1].is_zero() {
                    Ok(Slope::Infinite)
                } else {
                    Ok(Slope::Finite(-(f.u[0].try_div(&f.u[1])?)))
                }
            })
            .collect()
    }

    /// Rational sandwich radii, each certified exactly.
    pub fn sandwich(&self) -> Result<Sandwich> {
        let one = self.ring.one();
        // Distance from the origin to side i is 1 / |u_i|.
        let umax = self
            .facets
            .iter()
            .map(|f| f.u[0].to_f64().hypot(f.u[1].to_f64()))
            .fold(0.0, f64::max);
        let vmax = self
            .vertices
            .iter()
            .map(|v| v[0].to_f64().hypot(v[1].to_f64()))
            .fold(0.0, f64::max);
        let bmax = self
            .vertices
            .iter()
            .map(|v| v[0].to_f64().abs().max(v[1].to_f64().abs()))
            .fold(0.0, f64::max);
        let mut delta = floor_dyadic(&from_f64(0.999 / umax), 20);
        let mut rho = ceil_rational(1.001 * vmax);
        let mut box_radius = floor_dyadic(&from_f64(bmax), 20);
        loop {
            let d2 = &delta * &delta;
            let ok = self.facets.iter().try_fold(true, |acc, f| -> Result<bool> {
                let s = &(&f.u[0] * &f.u[0]) + &(&f.u[1] * &f.u[1]);
                Ok(acc && (&one - &s.scale(&d2)).sign()? != Sign::Negative)
            })?;
            if ok {
                break;
            }
            delta /= Q::from_integer(2.into());
        }
        loop {
            let r2 = self.ring.from_q(&rho * &rho);
            let ok = self.vertices.iter().try_fold(true, |acc, v| -> Result<bool> {
                let s = &(&v[0] * &v[0]) + &(&v[1] * &v[1]);
                Ok(acc && (&r2 - &s).sign()? != Sign::Negative)
            })?;
            if ok {
                break;
            }
            rho *= Q::from_integer(2.into());
        }
        loop {
            let b = self.ring.from_q(box_radius.clone());
            let ok = self.vertices.iter().try_fold(true, |acc, v| -> Result<bool> {
                Ok(acc
                    && (&b - &v[0].abs()?).sign()? != Sign::Negative
                    && (&b - &v[1].abs()?).sign()? != Sign::Negative)
            })?;
            if ok {
                break;
            }
            box_radius = &box_radius + Q::new(BigInt::one(), BigInt::from(1 << 20));
        }
        Ok(Sandwich { delta, rho, box_radius })
    }

    /// Largest vertex coordinate in absolute value, as a double.
    pub fn box_radius_f64(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[0].to_f64().abs().max(v[1].to_f64().abs()))
            .fold(0.0, f64::max)
    }
}

fn ceil_rational(v: f64) -> Q {
    let x = from_f64(v);
    let k = Q::from_integer(BigInt::from(1 << 20));
    (x * &k).ceil() / k
}

/// Positive rational `s` such that `s * u` has coprime integer coordinates.
fn primitive_scale(u: &[RingElem; 2]) -> Q {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for e in u {
        for c in e.coords() {
            den = den.lcm(c.denom());
        }
    }
    for e in u {
        for c in e.coords() {
            let v = (c * Q::from_integer(den.clone())).to_integer();
            num = num.gcd(&v);
        }
    }
    if num.is_zero() {
        return Q::one();
    }
    Q::new(den, num.abs())
}

impl fmt::Display for PolygonalNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "polygon {:?} over {} with vertices", self.name, self.ring.name())?;
        for v in &self.vertices {
            write!(f, " ({}, {})", v[0], v[1])?;
        }
        Ok(())
    }
}

/// Approximate vertex coordinates, for plotting and quick checks.
pub fn vertices_f64(p: &PolygonalNorm) -> Vec<(f64, f64)> {
    p.vertices.iter().map(|v| (v[0].to_f64(), v[1].to_f64())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    #[test]
    fn linf_square() {
        let r = Ring::rationals();
        let p = PolygonalNorm::new(
            r.clone(),
            vec![
                [r.from_ints(&[1]), r.from_ints(&[-1])],
                [r.from_ints(&[1]), r.from_ints(&[1])],
                [r.from_ints(&[-1]), r.from_ints(&[1])],
                [r.from_ints(&[-1]), r.from_ints(&[-1])],
            ],
        )
        .unwrap();
        assert_eq!(p.eval(&p.point(&[3], &[-2])).unwrap(), r.from_ints(&[3]));
        assert_eq!(p.eval(&p.point(&[0], &[0])).unwrap(), r.zero());
        assert_eq!(p.side_slopes().unwrap(), vec![Slope::Infinite, Slope::Finite(r.zero())]);
        let s = p.sandwich().unwrap();
        assert!(s.delta <= q(1) && s.rho >= q(1));
        assert_eq!(s.box_radius, q(1));
    }

    #[test]
    fn rejects_bad_cycles() {
        let r = Ring::rationals();
        let pt = |x: i64, y: i64| [r.from_ints(&[x]), r.from_ints(&[y])];
        let clockwise = vec![pt(1, 1), pt(1, -1), pt(-1, -1), pt(-1, 1)];
        assert!(PolygonalNorm::new(r.clone(), clockwise).is_err());
        let collinear = vec![pt(1, 0), pt(1, 1), pt(1, 2), pt(-1, 0), pt(-1, -1), pt(-1, -2)];
        assert!(PolygonalNorm::new(r.clone(), collinear).is_err());
        let asym = vec![pt(1, 0), pt(0, 1), pt(-1, 0), pt(0, -2)];
        assert!(PolygonalNorm::new(r.clone(), asym).is_err());
    }
}

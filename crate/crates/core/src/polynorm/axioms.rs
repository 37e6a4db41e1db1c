use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Point, PolygonalNorm};
use crate::error::Result;
use crate::exactnum::{qr, Ring, RingElem, Sign, Q};

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub checks: usize,
    pub first_violation: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

pub(crate) fn random_elem(ring: &Ring, rng: &mut impl Rng) -> RingElem {
    let dim = ring.degree().unwrap_or(2);
    let den = rng.gen_range(1..=6);
    let coords: Vec<Q> = (0..dim).map(|_| qr(rng.gen_range(-20..=20), den)).collect();
    ring.elem(coords)
}

fn random_point(ring: &Ring, rng: &mut impl Rng) -> Point {
    [random_elem(ring, rng), random_elem(ring, rng)]
}

/// Exact homogeneity, symmetry, and triangle-inequality checks on random rational points.
pub fn norm_axioms_check(p: &PolygonalNorm, samples: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = p.ring();
    let mut checks = 0;
    for s in 0..samples {
        let x = random_point(ring, &mut rng);
        let y = random_point(ring, &mut rng);
        let lambda = qr(rng.gen_range(-30..=30), rng.gen_range(1..=7));
        let nx = p.eval(&x)?;
        let ny = p.eval(&y)?;
        let neg = p.eval(&[-&x[0], -&x[1]])?;
        checks += 1;
        if neg != nx {
            return Ok(violation(
                s,
                checks,
                format!("||-x|| != ||x|| at x = ({}, {})", x[0], x[1]),
            ));
        }
        let lx = [x[0].scale(&lambda), x[1].scale(&lambda)];
        checks += 1;
        let abs_l = if lambda < Q::from_integer(0.into()) {
            -&lambda
        } else {
            lambda.clone()
        };
        if p.eval(&lx)? != nx.scale(&abs_l) {
            return Ok(violation(s, checks, format!("homogeneity fails for lambda = {lambda}")));
        }
        let sum = [&x[0] + &y[0], &x[1] + &y[1]];
        checks += 1;
        if (&(&nx + &ny) - &p.eval(&sum)?).sign()? == Sign::Negative {
            return Ok(violation(
                s,
                checks,
                format!(
                    "triangle inequality fails at x = ({}, {}), y = ({}, {})",
                    x[0], x[1], y[0], y[1]
                ),
            ));
        }
        checks += 1;
        if nx.sign()? == Sign::Negative || (nx.is_zero() != (x[0].is_zero() && x[1].is_zero())) {
            return Ok(violation(
                s,
                checks,
                "norm is negative or vanishes off the origin".into(),
            ));
        }
    }
    Ok(AxiomReport {
        samples,
        checks,
        first_violation: None,
    })
}

fn violation(sample: usize, checks: usize, msg: String) -> AxiomReport {
    AxiomReport {
        samples: sample + 1,
        checks,
        first_violation: Some(msg),
    }
}

//! Seeded randomized property suites.

use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;

use super::scans::progression;
use super::{
    combine_size, cor36_dimension_check, dilated_diff_size, freiman_embed, lemma33_extract, multi_sum_size, qdim,
    ruzsa_check, Dilation, FiniteSet,
};
use crate::error::Result;
use crate::exactnum::{q, qr, Ring, RingElem, Symbol, Q};
use crate::io::named_field;
use crate::Exec;

pub const DEFAULT_SEED: u64 = 0x5eed_2003;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    /// Trials whose hypotheses held, so that the property was actually asserted.
    pub applicable: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

enum Outcome {
    Skipped,
    Held,
    Violated(String),
}

fn run_suite(
    name: &str,
    trials: usize,
    seed: u64,
    exec: Exec,
    f: impl Fn(&mut ChaCha8Rng) -> Result<Outcome> + Sync + Send,
) -> Result<SuiteReport> {
    let ids: Vec<u64> = (0..trials as u64).collect();
    let outcomes = exec.map(&ids, |&t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        f(&mut rng)
    });
    let mut rep = SuiteReport {
        name: name.into(),
        seed,
        trials,
        applicable: 0,
        violations: 0,
        first_violation: None,
    };
    for (t, o) in outcomes.into_iter().enumerate() {
        match o? {
            Outcome::Skipped => {}
            Outcome::Held => rep.applicable += 1,
            Outcome::Violated(msg) => {
                rep.applicable += 1;
                rep.violations += 1;
                rep.first_violation.get_or_insert(format!("trial {t}: {msg}"));
            }
        }
    }
    Ok(rep)
}

fn zx() -> Ring {
    Ring::symbolic(Symbol::Pi)
}

fn describe(a: &FiniteSet) -> String {
    let v: Vec<String> = a.elements().iter().map(|e| format!("{e}")).collect();
    format!("{{{}}}", v.join(", "))
}

/// At most `max_size` points `sum_i c_i v_i` with `0 <= c_i < span`.
fn lattice_set(rng: &mut ChaCha8Rng, ring: &Ring, basis: &[[i64; 3]], max_size: usize, span: i64) -> FiniteSet {
    let size = rng.gen_range(1..=max_size);
    let mut pts: FxHashSet<[i64; 3]> = FxHashSet::default();
    for _ in 0..size * 8 {
        if pts.len() == size {
            break;
        }
        let mut p = [0i64; 3];
        for v in basis {
            let c = rng.gen_range(0..span);
            for k in 0..3 {
                p[k] += c * v[k];
            }
        }
        pts.insert(p);
    }
    FiniteSet::new(ring, pts.iter().map(|p| ring.from_ints(p))).expect("one ring")
}

/// Between 1 and `max_dim` nonzero vectors in `Z^3`.
fn random_basis(rng: &mut ChaCha8Rng, max_dim: usize) -> Vec<[i64; 3]> {
    let dim = rng.gen_range(1..=max_dim);
    (0..dim)
        .map(|_| loop {
            let v = [rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2)];
            if v != [0, 0, 0] {
                break v;
            }
        })
        .collect()
}

/// A random subset of the box `prod [0, sides_i)` in coordinates `1, x, x^2`.
fn box_subset(rng: &mut ChaCha8Rng, ring: &Ring, sides: &[i64], density: f64) -> FiniteSet {
    let mut out = Vec::new();
    let total: i64 = sides.iter().product();
    for idx in 0..total {
        let mut rest = idx;
        let mut c = [0i64; 3];
        for (k, &s) in sides.iter().enumerate() {
            c[k] = rest % s;
            rest /= s;
        }
        if out.is_empty() && idx == total - 1 || rng.gen_bool(density) {
            out.push(ring.from_ints(&c));
        }
    }
    FiniteSet::new(ring, out).expect("one ring")
}

/// `|A + B| >= |B| + d|A| - d(d + 1)/2` on sets of dimension at most 3 and size at most 12.
pub fn ruzsa_suite(trials: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let ring = zx();
    run_suite("ruzsa", trials, seed, exec, |rng| {
        let basis = random_basis(rng, 3);
        let span = rng.gen_range(2..=5);
        let a = lattice_set(rng, &ring, &basis, 12, span);
        let b = lattice_set(rng, &ring, &basis, 12, span);
        let rep = ruzsa_check(&a, &b)?;
        Ok(if rep.pass && rep.dim <= 3 {
            Outcome::Held
        } else {
            Outcome::Violated(format!("{rep:?} for A = {}, B = {}", describe(&a), describe(&b)))
        })
    })
}

fn random_dilation(rng: &mut ChaCha8Rng, ring: &Ring) -> Dilation {
    let x = ring.generator();
    let one = ring.one();
    let pick = rng.gen_range(0..6);
    let (num, den) = match pick {
        0 => (one.clone(), one),
        1 => (ring.from_ints(&[2]), one),
        2 => (ring.from_ints(&[-1]), one),
        3 => (x, one),
        4 => (&x + &one, one),
        _ => (ring.from_ints(&[2]), ring.from_ints(&[3])),
    };
    Dilation::ratio(&num, &den).expect("nonzero")
}

/// Exact guarantees and certificates of the component extraction.
pub fn decomposition_suite(trials: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let ring = zx();
    run_suite("decomposition", trials, seed, exec, |rng| {
        let basis = random_basis(rng, 2);
        let span = rng.gen_range(2..=6);
        let a = lattice_set(rng, &ring, &basis, 10, span);
        let b = lattice_set(rng, &ring, &basis, 10, span);
        let alpha = random_dilation(rng, &ring);
        let slack = [q(1), qr(3, 2), q(2)][rng.gen_range(0..3)].clone();
        let k = qr(dilated_diff_size(&a, &alpha, &b)? as i64, b.len() as i64) * slack;
        let res = lemma33_extract(&a, &b, &alpha, &k)?;
        let n = res.b_prime.len();
        let mut bad = Vec::new();
        if !res.verify(&a)? {
            bad.push("guarantees".to_string());
        }
        if q(res.diff_size as i64) > &k * q(n as i64) || &k * q(n as i64) < q(a.len() as i64) {
            bad.push(format!("sizes {} / {n}", res.diff_size));
        }
        for p1 in 0..n {
            for p2 in 0..n {
                if !res.check_pair(&a, p1, p2) {
                    bad.push(format!("certificate ({p1}, {p2})"));
                }
            }
        }
        Ok(if bad.is_empty() {
            Outcome::Held
        } else {
            Outcome::Violated(format!("{} with alpha = {}", bad.join(", "), alpha.label()))
        })
    })
}

fn vsum(x: &[Vec<Q>], y: &[Vec<Q>], sign: i64) -> Vec<Vec<Q>> {
    let s = q(sign);
    let set: FxHashSet<Vec<Q>> = x
        .iter()
        .flat_map(|a| {
            y.iter()
                .map(|b| a.iter().zip(b).map(|(u, v)| u + &s * v).collect::<Vec<Q>>())
        })
        .collect();
    set.into_iter().collect()
}

fn random_elem(rng: &mut ChaCha8Rng, ring: &Ring, width: usize, basis: &[Vec<Q>]) -> RingElem {
    let mut c = vec![Q::zero(); width];
    for v in basis {
        let t = q(rng.gen_range(-2..=2));
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += &t * vi;
        }
    }
    ring.elem(c)
}

/// Sumset cardinalities of order up to 3 survive the coordinate embedding.
pub fn freiman_suite(trials: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let rings: Vec<(Ring, usize)> = vec![
        (Ring::field(named_field("sqrt2")?.build()?), 2),
        (Ring::field(named_field("cubic")?.build()?), 3),
        (zx(), 4),
    ];
    run_suite("freiman", trials, seed, exec, |rng| {
        let (ring, width) = &rings[rng.gen_range(0..rings.len())];
        let rank = rng.gen_range(1..=*width);
        let basis: Vec<Vec<Q>> = (0..rank)
            .map(|_| {
                (0..*width)
                    .map(|_| qr(rng.gen_range(-3..=3), rng.gen_range(1..=2)))
                    .collect()
            })
            .collect();
        let (na, nb) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let mut gen = |n: usize| {
            let elems: Vec<RingElem> = (0..n).map(|_| random_elem(rng, ring, *width, &basis)).collect();
            FiniteSet::new(ring, elems).expect("one ring")
        };
        let (a, b) = (gen(na), gen(nb));
        let emb = freiman_embed(&[&a, &b])?;
        let (ea, eb) = (&emb.images[0], &emb.images[1]);
        let one = ring.one();
        let mut bad = Vec::new();
        let mut check = |label: &str, lhs: usize, rhs: usize| {
            if lhs != rhs {
                bad.push(format!("{label}: {lhs} vs {rhs}"));
            }
        };
        check("A+B", combine_size(&a, &one, &b, &one)?, vsum(ea, eb, 1).len());
        check("A-B", combine_size(&a, &one, &b, &-&one)?, vsum(ea, eb, -1).len());
        check("A+A", combine_size(&a, &one, &a, &one)?, vsum(ea, ea, 1).len());
        check("B+B", combine_size(&b, &one, &b, &one)?, vsum(eb, eb, 1).len());
        for (label, sets, imgs) in [
            ("A+A+A", [&a, &a, &a], [ea, ea, ea]),
            ("A+A+B", [&a, &a, &b], [ea, ea, eb]),
            ("A+B+B", [&a, &b, &b], [ea, eb, eb]),
            ("B+B+B", [&b, &b, &b], [eb, eb, eb]),
        ] {
            let v = vsum(&vsum(imgs[0], imgs[1], 1), imgs[2], 1).len();
            check(label, multi_sum_size(&sets)?, v);
        }
        if emb.dim > *width {
            bad.push(format!("dimension {} above {width}", emb.dim));
        }
        Ok(if bad.is_empty() {
            Outcome::Held
        } else {
            Outcome::Violated(bad.join(", "))
        })
    })
}

fn dense_box(rng: &mut ChaCha8Rng, ring: &Ring) -> FiniteSet {
    let dim = rng.gen_range(1..=3);
    let sides: Vec<i64> = (0..dim).map(|_| rng.gen_range(2..=8)).collect();
    let density = rng.gen_range(0.5..1.0);
    box_subset(rng, ring, &sides, density)
}

/// `dim_Q A <= K` whenever `|A + A| <= K |A|` and `K^2 <= |A|`, with `K = |A + A| / |A|`.
pub fn small_doubling_suite(trials: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let ring = zx();
    run_suite("small-doubling", trials, seed, exec, |rng| {
        let a = dense_box(rng, &ring);
        let n = a.len() as i64;
        let k = qr(combine_size(&a, &ring.one(), &a, &ring.one())? as i64, n);
        if &k * &k > q(n) {
            return Ok(Outcome::Skipped);
        }
        let d = qdim(&a)?;
        Ok(if q(d as i64) <= k {
            Outcome::Held
        } else {
            Outcome::Violated(format!("dimension {d} above K = {k} for {}", describe(&a)))
        })
    })
}

/// `|A + A| <= K^2 |A|` whenever `min(|A|, |B|) >= N` and `|A + B| <= K N` with `K > 1`.
pub fn plunnecke_suite(trials: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let ring = zx();
    run_suite("plunnecke", trials, seed, exec, |rng| {
        let (a, b) = if rng.gen_bool(0.5) {
            (dense_box(rng, &ring), dense_box(rng, &ring))
        } else {
            let basis = random_basis(rng, 3);
            let span = rng.gen_range(2..=5);
            let a = lattice_set(rng, &ring, &basis, 16, span);
            (a, lattice_set(rng, &ring, &basis, 16, span))
        };
        let one = ring.one();
        let n = a.len().min(b.len()) as i64;
        let k = qr(combine_size(&a, &one, &b, &one)? as i64, n);
        if k <= q(1) {
            return Ok(Outcome::Skipped);
        }
        let aa = combine_size(&a, &one, &a, &one)?;
        Ok(if q(aa as i64) <= &k * &k * q(a.len() as i64) {
            Outcome::Held
        } else {
            Outcome::Violated(format!(
                "|A+A| = {aa} with K = {k} for A = {}, B = {}",
                describe(&a),
                describe(&b)
            ))
        })
    })
}

/// Dimension check with `alpha_1 = x`, `alpha_2 = 1/x` and `A = B` a random progression subset.
pub fn transcendence_suite(trials: usize, seed: u64, exec: Exec) -> Result<SuiteReport> {
    let ring = zx();
    let x = ring.generator();
    let a1 = Dilation::of(&x)?;
    let a2 = Dilation::ratio(&ring.one(), &x)?;
    run_suite("transcendence", trials, seed, exec, |rng| {
        let len = rng.gen_range(1..=3);
        let dims: Vec<usize> = (0..len).map(|_| rng.gen_range(2..=7)).collect();
        let full = progression(&ring, &dims, &x)?;
        let keep = rng.gen_range(full.len().div_ceil(2)..=full.len());
        let picked = sample(rng, full.len(), keep);
        let a = FiniteSet::new(&ring, picked.iter().map(|i| full.elements()[i].clone()))?;
        let n = q(a.len() as i64);
        let s1 = dilated_diff_size(&a, &a1, &a)?;
        let s2 = dilated_diff_size(&a, &a2, &a)?;
        let k = qr(s1.max(s2) as i64, a.len() as i64);
        let mut d = 0;
        let mut kp = &k * &k;
        while kp < n {
            d += 1;
            kp = &kp * &k * &k;
        }
        let rep = cor36_dimension_check(&a, &a, &a1, &a2, &k, d)?;
        Ok(if !rep.applies {
            Outcome::Skipped
        } else if rep.pass {
            Outcome::Held
        } else {
            Outcome::Violated(format!("{rep:?}"))
        })
    })
}

/// Every suite at its default trial count.
pub fn run_all(seed: u64, exec: Exec) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        ruzsa_suite(500, seed, exec)?,
        decomposition_suite(200, seed, exec)?,
        freiman_suite(200, seed, exec)?,
        small_doubling_suite(200, seed, exec)?,
        plunnecke_suite(200, seed, exec)?,
        transcendence_suite(100, seed, exec)?,
    ])
}

//! Growth of `|A - alpha A|` over structured families.

use serde::Serialize;

use super::{combine_size, FiniteSet};
use crate::error::{Error, Result};
use crate::exactnum::rational::fmt_rational;
use crate::exactnum::{Ring, RingElem, Q};
use crate::modelset::{enumerate_t, ModelSetSpec, DEFAULT_BUDGET};
use crate::Exec;

/// Longest progression searched by [`cor37_growth_scan`]; `x A` then needs one more coordinate.
pub const MAX_FACTORS: usize = 7;

/// `{0, 1, ..., n}`.
pub fn interval(ring: &Ring, n: usize) -> FiniteSet {
    FiniteSet::new(ring, (0..=n as i64).map(|i| ring.from_ints(&[i]))).expect("one ring")
}

/// `{sum_i e_i alpha^i : 0 <= e_i < dims[i]}`.
pub fn progression(ring: &Ring, dims: &[usize], alpha: &RingElem) -> Result<FiniteSet> {
    if !alpha.ring().same(ring) {
        return Err(Error::RingMismatch);
    }
    let mut elems = vec![ring.zero()];
    let mut step = ring.one();
    for &m in dims {
        if m == 0 {
            return Err(Error::InvalidArgument("progression dimensions must be positive".into()));
        }
        let mut next = Vec::with_capacity(elems.len() * m);
        for e in &elems {
            let mut v = e.clone();
            for _ in 0..m {
                next.push(v.clone());
                v = &v + &step;
            }
        }
        elems = next;
        step = &step * alpha;
    }
    FiniteSet::new(ring, elems)
}

/// Ordered factorizations of `n` into factors `>= 2` with at most `max_len` factors.
pub fn ordered_factorizations(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            out.push(cur.clone());
            return;
        }
        if left == 0 {
            return;
        }
        for f in 2..=n {
            if n.is_multiple_of(f) {
                cur.push(f);
                go(n / f, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n >= 2 {
        go(n, max_len, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub size: usize,
    pub families: usize,
    pub best: Vec<usize>,
    pub diff_size: usize,
    pub ratio: f64,
    /// `N ln N / ln ln N`, or `None` when `ln ln N <= 0`.
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthScanReport {
    pub rows: Vec<GrowthRow>,
    pub monotone_from: usize,
    pub nondecreasing: bool,
}

/// Minimum of `|A - x A| / |A|` over all box progressions in powers of `x` of each size.
pub fn cor37_growth_scan(ring: &Ring, sizes: &[usize], monotone_from: usize, exec: Exec) -> Result<GrowthScanReport> {
    if !ring.is_symbolic() {
        return Err(Error::Precondition("the growth scan runs in the symbolic ring".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes.first().is_some_and(|&s| s < 2) {
        return Err(Error::InvalidArgument("sizes must be increasing and at least 2".into()));
    }
    let x = ring.generator();
    let one = ring.one();
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let fams = ordered_factorizations(n, MAX_FACTORS);
        let counts: Vec<Result<usize>> = exec.map(&fams, |dims| {
            let a = progression(ring, dims, &x)?;
            combine_size(&a, &one, &a, &-&x)
        });
        let mut best: Option<(usize, &Vec<usize>)> = None;
        for (c, dims) in counts.into_iter().zip(&fams) {
            let c = c?;
            if best.is_none_or(|(b, _)| c < b) {
                best = Some((c, dims));
            }
        }
        let (diff_size, dims) = best.expect("n >= 2 has a factorization");
        let nf = n as f64;
        let lnln = nf.ln().ln();
        rows.push(GrowthRow {
            size: n,
            families: fams.len(),
            best: dims.clone(),
            diff_size,
            ratio: diff_size as f64 / nf,
            reference: (lnln > 0.0).then(|| nf * nf.ln() / lnln),
        });
    }
    let tail: Vec<f64> = rows
        .iter()
        .filter(|r| r.size >= monotone_from)
        .map(|r| r.ratio)
        .collect();
    let nondecreasing = tail.windows(2).all(|w| w[0] <= w[1]);
    Ok(GrowthScanReport {
        rows,
        monotone_from,
        nondecreasing,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContrastRow {
    pub radius: String,
    pub size: usize,
    pub diff_size: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContrastReport {
    pub alpha: String,
    pub rows: Vec<ContrastRow>,
    /// `max ratio / min ratio`.
    pub spread: f64,
}

/// `|A - alpha A| / |A|` for `A = T(C) ∩ [-R, R]`.
pub fn algebraic_contrast(spec: &ModelSetSpec, alpha: &RingElem, radii: &[Q], exec: Exec) -> Result<ContrastReport> {
    if !alpha.ring().same(spec.ring()) {
        return Err(Error::RingMismatch);
    }
    let one = spec.ring().one();
    let mut rows = Vec::with_capacity(radii.len());
    for r in radii {
        let t = enumerate_t(spec, r, DEFAULT_BUDGET, exec)?;
        let a = FiniteSet::new(spec.ring(), t.elements().iter().cloned())?;
        if a.is_empty() {
            return Err(Error::WindowInsufficient(format!(
                "T(C) ∩ [-{0}, {0}] is empty",
                fmt_rational(r)
            )));
        }
        let diff_size = combine_size(&a, &one, &a, &-alpha)?;
        rows.push(ContrastRow {
            radius: fmt_rational(r),
            size: a.len(),
            diff_size,
            ratio: diff_size as f64 / a.len() as f64,
        });
    }
    let hi = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let lo = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    Ok(ContrastReport {
        alpha: format!("{alpha}"),
        rows,
        spread: if lo > 0.0 { hi / lo } else { f64::NAN },
    })
}

//! Sumsets, affine dimension over `Q`, and the component decompositions behind the
//! sum-dilate bounds.

pub mod scans;
pub mod suites;

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::distset::kernel::common_denominator;
use crate::error::{Error, Result};
use crate::exactnum::linalg::{echelon, rank};
use crate::exactnum::rational::fmt_rational;
use crate::exactnum::{q, Ring, RingElem, Q};

const KEY_WIDTH: usize = 8;
type Key = [i64; KEY_WIDTH];

/// Orders elements by their coordinate vectors, padded with zeros.
pub fn elem_order(a: &RingElem, b: &RingElem) -> Ordering {
    let (x, y) = (a.coords(), b.coords());
    let zero = Q::zero();
    for i in 0..x.len().max(y.len()) {
        let o = x.get(i).unwrap_or(&zero).cmp(y.get(i).unwrap_or(&zero));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// A duplicate-free finite subset of a ring, sorted by [`elem_order`].
#[derive(Clone, Debug)]
pub struct FiniteSet {
    ring: Ring,
    elems: Vec<RingElem>,
}

impl PartialEq for FiniteSet {
    fn eq(&self, o: &FiniteSet) -> bool {
        self.ring.same(&o.ring) && self.elems == o.elems
    }
}

impl FiniteSet {
    pub fn new(ring: &Ring, elems: impl IntoIterator<Item = RingElem>) -> Result<FiniteSet> {
        let mut v: Vec<RingElem> = elems.into_iter().collect();
        if v.iter().any(|e| !e.ring().same(ring)) {
            return Err(Error::RingMismatch);
        }
        v.sort_by(elem_order);
        v.dedup();
        Ok(FiniteSet {
            ring: ring.clone(),
            elems: v,
        })
    }

    /// Elements given by integer power-basis coordinates.
    pub fn from_coords(ring: &Ring, coords: &[Vec<i64>]) -> Result<FiniteSet> {
        FiniteSet::new(ring, coords.iter().map(|c| ring.from_ints(c)))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[RingElem] {
        &self.elems
    }

    pub fn position(&self, x: &RingElem) -> Option<usize> {
        self.elems.binary_search_by(|e| elem_order(e, x)).ok()
    }

    pub fn contains(&self, x: &RingElem) -> bool {
        self.position(x).is_some()
    }

    pub fn is_subset(&self, o: &FiniteSet) -> bool {
        self.elems.iter().all(|e| o.contains(e))
    }

    fn subset(&self, idx: &[usize]) -> FiniteSet {
        FiniteSet {
            ring: self.ring.clone(),
            elems: idx.iter().map(|&i| self.elems[i].clone()).collect(),
        }
    }
}

fn same_ring(sets: &[&FiniteSet]) -> Result<()> {
    if sets.windows(2).any(|w| !w[0].ring.same(&w[1].ring)) {
        return Err(Error::RingMismatch);
    }
    Ok(())
}

fn key_of(e: &RingElem, den: &Q) -> Result<Key> {
    let c = e.coords();
    if c.len() > KEY_WIDTH {
        return Err(Error::Budget(format!(
            "elements with {} coordinates exceed the {KEY_WIDTH}-coordinate key",
            c.len()
        )));
    }
    let mut k = [0i64; KEY_WIDTH];
    for (slot, v) in k.iter_mut().zip(c) {
        *slot = (v * den)
            .to_integer()
            .to_i64()
            .filter(|x| x.unsigned_abs() < 1 << 60)
            .ok_or_else(|| Error::Budget("set coordinates exceed 60 bits".into()))?;
    }
    Ok(k)
}

/// Integer keys for several element lists over one common denominator.
fn keys_of(groups: &[&[RingElem]]) -> Result<Vec<Vec<Key>>> {
    let den = Q::from_integer(common_denominator(groups.iter().flat_map(|g| g.iter())));
    groups
        .iter()
        .map(|g| g.iter().map(|e| key_of(e, &den)).collect())
        .collect()
}

fn add_keys(a: &Key, b: &Key) -> Key {
    let mut k = [0i64; KEY_WIDTH];
    for i in 0..KEY_WIDTH {
        k[i] = a[i] + b[i];
    }
    k
}

fn scaled(s: &RingElem, a: &FiniteSet) -> Vec<RingElem> {
    a.elems.iter().map(|x| s * x).collect()
}

/// `|{s a + t b : a in A, b in B}|`.
pub fn combine_size(a: &FiniteSet, s: &RingElem, b: &FiniteSet, t: &RingElem) -> Result<usize> {
    same_ring(&[a, b])?;
    let (sa, tb) = (scaled(s, a), scaled(t, b));
    let keys = keys_of(&[&sa, &tb])?;
    let mut seen: FxHashSet<Key> = FxHashSet::default();
    seen.reserve(a.len().max(b.len()) * 4);
    for ka in &keys[0] {
        for kb in &keys[1] {
            seen.insert(add_keys(ka, kb));
        }
    }
    Ok(seen.len())
}

/// `{s a + t b : a in A, b in B}`.
pub fn combine(a: &FiniteSet, s: &RingElem, b: &FiniteSet, t: &RingElem) -> Result<FiniteSet> {
    same_ring(&[a, b])?;
    let (sa, tb) = (scaled(s, a), scaled(t, b));
    let keys = keys_of(&[&sa, &tb])?;
    let mut seen: FxHashMap<Key, (usize, usize)> = FxHashMap::default();
    for (i, ka) in keys[0].iter().enumerate() {
        for (j, kb) in keys[1].iter().enumerate() {
            seen.entry(add_keys(ka, kb)).or_insert((i, j));
        }
    }
    FiniteSet::new(&a.ring, seen.values().map(|&(i, j)| &sa[i] + &tb[j]))
}

pub fn sum_set(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
    let one = a.ring.one();
    combine(a, &one, b, &one)
}

pub fn diff_set(a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
    let one = a.ring.one();
    combine(a, &one, b, &-&one)
}

pub fn dilate(alpha: &RingElem, a: &FiniteSet) -> Result<FiniteSet> {
    if !alpha.ring().same(&a.ring) {
        return Err(Error::RingMismatch);
    }
    FiniteSet::new(&a.ring, scaled(alpha, a))
}

/// `|A_1 + ... + A_r|`.
pub fn multi_sum_size(sets: &[&FiniteSet]) -> Result<usize> {
    let Some((first, rest)) = sets.split_first() else {
        return Ok(1);
    };
    let Some((last, mid)) = rest.split_last() else {
        return Ok(first.len());
    };
    let mut acc = (*first).clone();
    for s in mid {
        acc = sum_set(&acc, s)?;
    }
    let one = acc.ring.one();
    combine_size(&acc, &one, last, &one)
}

fn padded(rows: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let w = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
    rows.into_iter()
        .map(|mut r| {
            r.resize(w, Q::zero());
            r
        })
        .collect()
}

/// Affine dimension over `Q` of `A_1 + ... + A_r`.
pub fn sum_dimension(sets: &[&FiniteSet]) -> Result<usize> {
    same_ring(sets)?;
    let mut rows = Vec::new();
    for s in sets {
        let Some(base) = s.elems.first() else {
            return Err(Error::InvalidArgument("dimension of an empty set".into()));
        };
        rows.extend(s.elems[1..].iter().map(|e| (e - base).coords().to_vec()));
    }
    Ok(rank(&padded(rows)))
}

/// Affine dimension of `A` over `Q`.
pub fn qdim(a: &FiniteSet) -> Result<usize> {
    sum_dimension(&[a])
}

#[derive(Clone, Debug, Serialize)]
pub struct RuzsaReport {
    pub size_a: usize,
    pub size_b: usize,
    pub size_sum: usize,
    pub dim: usize,
    pub bound: i64,
    pub pass: bool,
}

/// Checks `|A + B| >= |B| + d|A| - d(d + 1)/2` with `d` the dimension of `A + B`.
pub fn ruzsa_check(a: &FiniteSet, b: &FiniteSet) -> Result<RuzsaReport> {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if a.is_empty() {
        return Err(Error::InvalidArgument("sets must be nonempty".into()));
    }
    let one = a.ring.one();
    let size_sum = combine_size(a, &one, b, &one)?;
    let dim = sum_dimension(&[a, b])?;
    let d = dim as i64;
    let bound = b.len() as i64 + d * a.len() as i64 - d * (d + 1) / 2;
    Ok(RuzsaReport {
        size_a: a.len(),
        size_b: b.len(),
        size_sum,
        dim,
        bound,
        pass: size_sum as i64 >= bound,
    })
}

/// Coordinates of the sets in a basis of the `Q`-span of all their elements.
#[derive(Clone, Debug)]
pub struct FreimanEmbedding {
    pub dim: usize,
    pub basis: Vec<Vec<Q>>,
    pub pivots: Vec<usize>,
    pub images: Vec<Vec<Vec<Q>>>,
}

pub fn freiman_embed(sets: &[&FiniteSet]) -> Result<FreimanEmbedding> {
    same_ring(sets)?;
    let rows: Vec<Vec<Q>> = sets
        .iter()
        .flat_map(|s| s.elems.iter().map(|e| e.coords().to_vec()))
        .collect();
    let w = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let rows = padded(rows);
    let (basis, pivots) = echelon(&rows);
    let mut images = Vec::with_capacity(sets.len());
    let mut it = rows.into_iter();
    for s in sets {
        let mut img = Vec::with_capacity(s.len());
        for _ in 0..s.len() {
            let v = it.next().expect("one row per element");
            let c: Vec<Q> = pivots.iter().map(|&p| v[p].clone()).collect();
            let mut back = vec![Q::zero(); w];
            for (ci, row) in c.iter().zip(&basis) {
                for (b, r) in back.iter_mut().zip(row) {
                    *b += ci * r;
                }
            }
            if back != v {
                return Err(Error::Internal("element outside the computed span".into()));
            }
            img.push(c);
        }
        images.push(img);
    }
    Ok(FreimanEmbedding {
        dim: pivots.len(),
        basis,
        pivots,
        images,
    })
}

/// `|{x + sign y}|` for coordinate vectors.
pub fn vector_combine_size(x: &[Vec<Q>], y: &[Vec<Q>], sign: i64) -> usize {
    let s = q(sign);
    let mut seen: FxHashSet<Vec<Q>> = FxHashSet::default();
    for a in x {
        for b in y {
            seen.insert(a.iter().zip(b).map(|(u, v)| u + &s * v).collect());
        }
    }
    seen.len()
}

/// The scalar `num / den`, kept as a pair so that the sets `den A - num B` stay in the ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Dilation {
    pub num: RingElem,
    pub den: RingElem,
}

impl Dilation {
    pub fn of(alpha: &RingElem) -> Result<Dilation> {
        Dilation::ratio(alpha, &alpha.ring().one())
    }

    pub fn ratio(num: &RingElem, den: &RingElem) -> Result<Dilation> {
        if !num.ring().same(den.ring()) {
            return Err(Error::RingMismatch);
        }
        if num.is_zero() || den.is_zero() {
            return Err(Error::InvalidArgument("dilation must be a nonzero ratio".into()));
        }
        Ok(Dilation {
            num: num.clone(),
            den: den.clone(),
        })
    }

    pub fn inverse(&self) -> Dilation {
        Dilation {
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn ring(&self) -> &Ring {
        self.num.ring()
    }

    pub fn label(&self) -> String {
        if self.den == self.den.ring().one() {
            format!("{}", self.num)
        } else {
            format!("({}) / ({})", self.num, self.den)
        }
    }
}

/// `|A - alpha B|`, computed as `|den A - num B|`.
pub fn dilated_diff_size(a: &FiniteSet, alpha: &Dilation, b: &FiniteSet) -> Result<usize> {
    if !alpha.ring().same(&a.ring) {
        return Err(Error::RingMismatch);
    }
    combine_size(a, &alpha.den, b, &-&alpha.num)
}

/// `sum_k c_k (A[i_k] - A[j_k])` over a fixed set `A`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub terms: Vec<(i64, usize, usize)>,
}

impl Expansion {
    fn push(&mut self, c: i64, i: usize, j: usize) {
        if i != j && c != 0 {
            self.terms.push(if i < j { (c, i, j) } else { (-c, j, i) });
        }
    }

    fn normalize(mut self) -> Expansion {
        self.terms.sort_by_key(|t| (t.1, t.2));
        let mut out: Vec<(i64, usize, usize)> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match out.last_mut() {
                Some(l) if l.1 == t.1 && l.2 == t.2 => l.0 += t.0,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.0 != 0);
        Expansion { terms: out }
    }

    fn minus(&self, o: &Expansion) -> Expansion {
        let mut e = self.clone();
        for &(c, i, j) in &o.terms {
            e.push(-c, i, j);
        }
        e.normalize()
    }

    pub fn eval(&self, a: &FiniteSet) -> RingElem {
        let mut s = a.ring.zero();
        for &(c, i, j) in &self.terms {
            s = &s + &(&a.elems[i] - &a.elems[j]).scale(&q(c));
        }
        s
    }
}

/// A component `B'` of the coincidence graph on `B` with certificates.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub alpha: Dilation,
    pub k: Q,
    pub components: usize,
    /// Positions of `B'` inside `B`.
    pub indices: Vec<usize>,
    pub b_prime: FiniteSet,
    /// `|A - alpha B'|`.
    pub diff_size: usize,
    pub root: usize,
    /// For each element of `B'` except the root: its tree parent in `B'` and positions
    /// `(i, j)` in `A` with `num (b - parent) = den (A[i] - A[j])`.
    pub parent: Vec<Option<(usize, usize, usize)>>,
}

impl DecompositionResult {
    /// `e` with `num (B'[pos] - B'[root]) = den e(A)`.
    pub fn expansion(&self, pos: usize) -> Expansion {
        let mut e = Expansion::default();
        let mut cur = pos;
        while let Some((p, i, j)) = self.parent[cur] {
            e.push(1, i, j);
            cur = p;
        }
        e.normalize()
    }

    /// `e` with `num (B'[p1] - B'[p2]) = den e(A)`.
    pub fn pair_expansion(&self, p1: usize, p2: usize) -> Expansion {
        self.expansion(p1).minus(&self.expansion(p2))
    }

    pub fn check_pair(&self, a: &FiniteSet, p1: usize, p2: usize) -> bool {
        let b = &self.b_prime.elems;
        let lhs = &self.alpha.num * &(&b[p1] - &b[p2]);
        lhs == &self.alpha.den * &self.pair_expansion(p1, p2).eval(a)
    }

    /// Re-verifies both size guarantees and every tree edge exactly.
    pub fn verify(&self, a: &FiniteSet) -> Result<bool> {
        let n = q(self.b_prime.len() as i64);
        let diff = dilated_diff_size(a, &self.alpha, &self.b_prime)?;
        let sizes = diff == self.diff_size && q(diff as i64) <= &self.k * &n && &self.k * &n >= q(a.len() as i64);
        let b = &self.b_prime.elems;
        let edges = self.parent.iter().enumerate().all(|(pos, e)| match *e {
            None => pos == self.root,
            Some((p, i, j)) => &self.alpha.num * &(&b[pos] - &b[p]) == &self.alpha.den * &(&a.elems[i] - &a.elems[j]),
        });
        Ok(sizes && edges)
    }
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// The component `B'` of `B` minimizing `|A - alpha B_j| / |B_j|`, given `|A - alpha B| <= K |B|`.
pub fn lemma33_extract(a: &FiniteSet, b: &FiniteSet, alpha: &Dilation, k: &Q) -> Result<DecompositionResult> {
    same_ring(&[a, b])?;
    if !alpha.ring().same(&a.ring) {
        return Err(Error::RingMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("sets must be nonempty".into()));
    }
    if !k.is_positive() {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let da = scaled(&alpha.den, a);
    let nb = scaled(&alpha.num, b);
    let keys = keys_of(&[&da, &nb])?;
    let mut uf: Vec<usize> = (0..b.len()).collect();
    let mut first: FxHashMap<Key, (usize, usize)> = FxHashMap::default();
    let mut edges: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (ib, kb) in keys[1].iter().enumerate() {
        let neg: Key = kb.map(|v| -v);
        for (ia, ka) in keys[0].iter().enumerate() {
            match first.entry(add_keys(ka, &neg)) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert((ib, ia));
                }
                std::collections::hash_map::Entry::Occupied(e) => {
                    let (jb, ja) = *e.get();
                    let (r1, r2) = (find(&mut uf, jb), find(&mut uf, ib));
                    if r1 != r2 {
                        uf[r1.max(r2)] = r1.min(r2);
                        // den a_ja - num b_jb = den a_ia - num b_ib
                        edges.push((jb, ib, ia, ja));
                    }
                }
            }
        }
    }
    let total = first.len();
    if q(total as i64) > k * q(b.len() as i64) {
        return Err(Error::Precondition(format!(
            "|A - alpha B| = {total} exceeds K |B| = {}",
            fmt_rational(&(k * q(b.len() as i64)))
        )));
    }
    let roots: Vec<usize> = (0..b.len()).map(|i| find(&mut uf, i)).collect();
    let mut comp_b: FxHashMap<usize, usize> = FxHashMap::default();
    let mut comp_s: FxHashMap<usize, usize> = FxHashMap::default();
    for &r in &roots {
        *comp_b.entry(r).or_default() += 1;
    }
    for &(ib, _) in first.values() {
        *comp_s.entry(roots[ib]).or_default() += 1;
    }
    // Union by smaller index makes each root the least position in its component.
    let mut best: Option<usize> = None;
    for (&r, &nb_r) in &comp_b {
        let ns_r = comp_s[&r];
        best = Some(match best {
            None => r,
            Some(c) => {
                let (nb_c, ns_c) = (comp_b[&c], comp_s[&c]);
                let o = (ns_r * nb_c).cmp(&(ns_c * nb_r)).then(nb_c.cmp(&nb_r)).then(r.cmp(&c));
                if o == Ordering::Less {
                    r
                } else {
                    c
                }
            }
        });
    }
    let chosen = best.expect("B is nonempty");
    let indices: Vec<usize> = (0..b.len()).filter(|&i| roots[i] == chosen).collect();
    let pos_of: FxHashMap<usize, usize> = indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut adj: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); indices.len()];
    for &(u, v, i, j) in &edges {
        if let (Some(&pu), Some(&pv)) = (pos_of.get(&u), pos_of.get(&v)) {
            // num (b_v - b_u) = den (a_i - a_j)
            adj[pu].push((pv, i, j));
            adj[pv].push((pu, j, i));
        }
    }
    let root = 0;
    let mut parent: Vec<Option<(usize, usize, usize)>> = vec![None; indices.len()];
    let mut seen = vec![false; indices.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &(v, i, j) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, i, j));
                queue.push_back(v);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Internal("spanning tree misses part of its component".into()));
    }
    let b_prime = b.subset(&indices);
    let diff_size = dilated_diff_size(a, alpha, &b_prime)?;
    let res = DecompositionResult {
        alpha: alpha.clone(),
        k: k.clone(),
        components: comp_b.len(),
        indices,
        b_prime,
        diff_size,
        root,
        parent,
    };
    if !res.verify(a)? {
        return Err(Error::Internal("component fails its own guarantees".into()));
    }
    Ok(res)
}

/// One round of the two-sided extraction.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub a: FiniteSet,
    pub b: FiniteSet,
    /// `B_j` out of `B_{j-1}` against `A_{j-1}` with `alpha_1`.
    pub step_b: DecompositionResult,
    /// `A_j` out of `A_{j-1}` against `B_j` with `1 / alpha_2`.
    pub step_a: DecompositionResult,
    /// `|A_j - alpha_2 B_j|`.
    pub diff_size: usize,
}

#[derive(Clone, Debug)]
pub struct IterationChain {
    pub k: Q,
    pub alpha1: Dilation,
    pub alpha2: Dilation,
    pub a0: FiniteSet,
    pub b0: FiniteSet,
    pub levels: Vec<ChainLevel>,
}

impl IterationChain {
    pub fn a_level(&self, j: usize) -> &FiniteSet {
        if j == 0 {
            &self.a0
        } else {
            &self.levels[j - 1].a
        }
    }

    pub fn b_level(&self, j: usize) -> &FiniteSet {
        if j == 0 {
            &self.b0
        } else {
            &self.levels[j - 1].b
        }
    }

    /// `e` over `A_{j-1}` with `n1 d2 (A_j[pos] - A_j[root]) = d1 n2 e(A_{j-1})`.
    pub fn level_expansion(&self, j: usize, pos: usize) -> Expansion {
        let lv = &self.levels[j - 1];
        let mut out = Expansion::default();
        for &(c, i, k) in &lv.step_a.expansion(pos).terms {
            for &(c2, x, y) in &lv.step_b.pair_expansion(i, k).terms {
                out.push(c * c2, x, y);
            }
        }
        out.normalize()
    }

    pub fn check_level_expansion(&self, j: usize, pos: usize) -> bool {
        let lv = &self.levels[j - 1];
        let (a1, a2) = (&self.alpha1, &self.alpha2);
        let x = &lv.a.elems;
        let lhs = &(&a1.num * &a2.den) * &(&x[pos] - &x[lv.step_a.root]);
        let rhs = &(&a1.den * &a2.num) * &self.level_expansion(j, pos).eval(self.a_level(j - 1));
        lhs == rhs
    }

    /// Nesting, both size guarantees, and every certificate edge at every level.
    pub fn verify(&self) -> Result<bool> {
        let mut kpow = Q::one();
        for j in 1..=self.levels.len() {
            let lv = &self.levels[j - 1];
            let (pa, pb) = (self.a_level(j - 1), self.b_level(j - 1));
            kpow = &kpow * &self.k * &self.k;
            let ok = lv.a.is_subset(pa)
                && lv.b.is_subset(pb)
                && !lv.a.is_empty()
                && lv.diff_size == dilated_diff_size(&lv.a, &self.alpha2, &lv.b)?
                && q(lv.diff_size as i64) <= &self.k * q(lv.a.len() as i64)
                && q(lv.a.len() as i64) * &kpow >= q(self.a0.len() as i64)
                && lv.step_b.verify(pa)?
                && lv.step_a.verify(&lv.b)?;
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn check_pair_conditions(a: &FiniteSet, b: &FiniteSet, a1: &Dilation, a2: &Dilation, k: &Q) -> Result<()> {
    let s1 = dilated_diff_size(a, a1, b)?;
    if q(s1 as i64) > k * q(b.len() as i64) {
        return Err(Error::Precondition(format!("|A - alpha1 B| = {s1} exceeds K |B|")));
    }
    let s2 = dilated_diff_size(a, a2, b)?;
    if q(s2 as i64) > k * q(a.len() as i64) {
        return Err(Error::Precondition(format!("|A - alpha2 B| = {s2} exceeds K |A|")));
    }
    Ok(())
}

/// Nested `A_0 ⊇ ... ⊇ A_depth` with `|A_j| >= |A| / K^(2j)`.
pub fn lemma35_iterate(
    a: &FiniteSet,
    b: &FiniteSet,
    alpha1: &Dilation,
    alpha2: &Dilation,
    k: &Q,
    depth: usize,
) -> Result<IterationChain> {
    same_ring(&[a, b])?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("sets must be nonempty".into()));
    }
    check_pair_conditions(a, b, alpha1, alpha2, k)?;
    let mut chain = IterationChain {
        k: k.clone(),
        alpha1: alpha1.clone(),
        alpha2: alpha2.clone(),
        a0: a.clone(),
        b0: b.clone(),
        levels: Vec::with_capacity(depth),
    };
    let inv2 = alpha2.inverse();
    for j in 1..=depth {
        let (pa, pb) = (chain.a_level(j - 1).clone(), chain.b_level(j - 1).clone());
        let step_b = lemma33_extract(&pa, &pb, alpha1, k)?;
        let nb = step_b.b_prime.clone();
        let step_a = lemma33_extract(&nb, &pa, &inv2, k)?;
        let na = step_a.b_prime.clone();
        let diff_size = dilated_diff_size(&na, alpha2, &nb)?;
        chain.levels.push(ChainLevel {
            a: na,
            b: nb,
            step_b,
            step_a,
            diff_size,
        });
    }
    if !chain.verify()? {
        return Err(Error::Internal("extraction chain fails its guarantees".into()));
    }
    Ok(chain)
}

/// Whether `p / q` is a rational constant.
fn proportional(p: &RingElem, r: &RingElem) -> bool {
    let Some(i) = r.coords().iter().position(|c| !c.is_zero()) else {
        return false;
    };
    let c = &p.coord(i) / &r.coords()[i];
    p == &r.scale(&c)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub size: usize,
    pub k: String,
    pub d: usize,
    /// Whether `|A| > K^(2d)`.
    pub applies: bool,
    pub qdim: usize,
    /// `(|A_j|, |B_j|)` along the extraction chain.
    pub chain_sizes: Vec<(usize, usize)>,
    /// Rank of `(n1 d2)^j (d1 n2)^(d-j) (a1 - a2)`, `j = 0..=d`, for distinct `a1, a2` in `A_d`.
    pub witness_rank: Option<usize>,
    pub pass: bool,
}

/// Checks that `dim_Q A > d` whenever `|A| > K^(2d)`, for a transcendental ratio `alpha1 / alpha2`.
pub fn cor36_dimension_check(
    a: &FiniteSet,
    b: &FiniteSet,
    alpha1: &Dilation,
    alpha2: &Dilation,
    k: &Q,
    d: usize,
) -> Result<DimensionReport> {
    if !a.ring.is_symbolic() {
        return Err(Error::Precondition(
            "the ratio alpha1 / alpha2 must be transcendental, which needs the symbolic ring".into(),
        ));
    }
    let top = &alpha1.num * &alpha2.den;
    let bottom = &alpha1.den * &alpha2.num;
    if proportional(&top, &bottom) {
        return Err(Error::Precondition("alpha1 / alpha2 is a rational constant".into()));
    }
    check_pair_conditions(a, b, alpha1, alpha2, k)?;
    let mut kpow = Q::one();
    for _ in 0..2 * d {
        kpow = &kpow * k;
    }
    let applies = q(a.len() as i64) > kpow;
    let qd = qdim(a)?;
    let mut report = DimensionReport {
        size: a.len(),
        k: fmt_rational(k),
        d,
        applies,
        qdim: qd,
        chain_sizes: vec![(a.len(), b.len())],
        witness_rank: None,
        pass: true,
    };
    if !applies {
        return Ok(report);
    }
    let chain = lemma35_iterate(a, b, alpha1, alpha2, k, d)?;
    report
        .chain_sizes
        .extend(chain.levels.iter().map(|l| (l.a.len(), l.b.len())));
    let ad = chain.a_level(d);
    if ad.len() < 2 {
        return Err(Error::Internal(format!("|A_{d}| = {} although |A| > K^(2d)", ad.len())));
    }
    let delta = &ad.elems[1] - &ad.elems[0];
    let rows: Vec<Vec<Q>> = (0..=d)
        .map(|j| {
            (&(&top.pow(j as u32) * &bottom.pow((d - j) as u32)) * &delta)
                .coords()
                .to_vec()
        })
        .collect();
    let wr = rank(&padded(rows));
    report.witness_rank = Some(wr);
    report.pass = qd > d && wr == d + 1;
    Ok(report)
}

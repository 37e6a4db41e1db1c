use std::collections::BTreeSet;

use polydist::exactnum::{q, qr, Ring, RingElem, Symbol, Q};
use polydist::io::named_field;
use polydist::modelset::{enumerate_t, ModelSetSpec, DEFAULT_BUDGET};
use polydist::sumsetlab::scans::{
    algebraic_contrast, cor37_growth_scan, interval, ordered_factorizations, progression,
};
use polydist::sumsetlab::suites::{run_all, DEFAULT_SEED};
use polydist::sumsetlab::{
    combine_size, cor36_dimension_check, diff_set, dilate, dilated_diff_size, freiman_embed, lemma33_extract,
    lemma35_iterate, qdim, ruzsa_check, sum_set, vector_combine_size, Dilation, FiniteSet,
};
use polydist::{Error, Exec};
use proptest::prelude::*;

fn zx() -> Ring {
    Ring::symbolic(Symbol::Pi)
}

fn sqrt2() -> Ring {
    Ring::field(named_field("sqrt2").unwrap().build().unwrap())
}

fn set(r: &Ring, c: &[&[i64]]) -> FiniteSet {
    FiniteSet::from_coords(r, &c.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).unwrap()
}

/// `{s a + t b}` by exact arithmetic on every pair.
fn brute_combine(a: &FiniteSet, s: &RingElem, b: &FiniteSet, t: &RingElem) -> BTreeSet<Vec<Q>> {
    let mut out = BTreeSet::new();
    for x in a.elements() {
        for y in b.elements() {
            let mut c = (&(s * x) + &(t * y)).coords().to_vec();
            while c.last().is_some_and(|v| *v == q(0)) {
                c.pop();
            }
            out.insert(c);
        }
    }
    out
}

/// `m_0 * prod_{i >= 1} (m_i + m_{i-1} - 1) * m_{k-1}` for the box progression in powers of `x`.
fn box_diff_size(dims: &[usize]) -> usize {
    let inner: usize = dims.windows(2).map(|w| w[0] + w[1] - 1).product();
    dims[0] * inner * dims[dims.len() - 1]
}

#[test]
fn sumset_examples() {
    let r = zx();
    let a = set(&r, &[&[0], &[1]]);
    assert_eq!(sum_set(&a, &a).unwrap(), set(&r, &[&[0], &[1], &[2]]));
    let x = r.generator();
    let d = polydist::sumsetlab::combine(&a, &r.one(), &a, &-&x).unwrap();
    assert_eq!(d, set(&r, &[&[0], &[1], &[0, -1], &[1, -1]]));
    assert_eq!(diff_set(&a, &a).unwrap().len(), 3);

    let s = sqrt2();
    let root = s.from_ints(&[0, 1]);
    let a = set(&s, &[&[0], &[1], &[0, 1]]);
    assert_eq!(dilate(&root, &a).unwrap(), set(&s, &[&[0], &[0, 1], &[2]]));
    assert!(matches!(sum_set(&a, &set(&r, &[&[0]])), Err(Error::RingMismatch)));
}

#[test]
fn qdim_examples() {
    let r = zx();
    assert_eq!(qdim(&set(&r, &[&[0], &[1], &[2]])).unwrap(), 1);
    assert_eq!(qdim(&set(&sqrt2(), &[&[0], &[1], &[0, 1]])).unwrap(), 2);
    for d in 0..6 {
        let mut c: Vec<Vec<i64>> = vec![vec![0]];
        for i in 0..=d {
            let mut v = vec![0; i + 1];
            v[i] = 1;
            c.push(v);
        }
        let a = FiniteSet::from_coords(&r, &c).unwrap();
        assert_eq!(qdim(&a).unwrap(), d + 1);
        // {1, x, ..., x^d} alone spans an affine space of dimension d.
        let b = FiniteSet::new(&r, a.elements().iter().filter(|e| !e.is_zero()).cloned()).unwrap();
        assert_eq!(qdim(&b).unwrap(), d);
    }
}

#[test]
fn ruzsa_examples() {
    let r = zx();
    let sq = set(&r, &[&[0], &[1], &[0, 1], &[1, 1]]);
    let rep = ruzsa_check(&sq, &sq).unwrap();
    assert_eq!((rep.size_sum, rep.dim, rep.bound), (9, 2, 9));
    assert!(rep.pass);
    for n in [1usize, 4, 9] {
        let a = interval(&r, n);
        let rep = ruzsa_check(&a, &a).unwrap();
        assert_eq!(rep.size_sum, 2 * n + 1);
        assert_eq!(rep.bound, 2 * n as i64 + 1);
    }
    let big = interval(&r, 6);
    let small = set(&r, &[&[0], &[0, 1]]);
    let rep = ruzsa_check(&big, &small).unwrap();
    assert_eq!((rep.size_a, rep.size_b), (2, 7));
    assert_eq!(rep.size_sum, 14);
}

#[test]
fn freiman_examples() {
    let s = sqrt2();
    let a = set(&s, &[&[0], &[1], &[0, 1]]);
    let emb = freiman_embed(&[&a]).unwrap();
    assert_eq!(emb.dim, 2);
    assert_eq!(vector_combine_size(&emb.images[0], &emb.images[0], 1), 6);
    assert_eq!(combine_size(&a, &s.one(), &a, &s.one()).unwrap(), 6);
    let one = set(&s, &[&[3, -1]]);
    let emb = freiman_embed(&[&one]).unwrap();
    assert_eq!(emb.images[0].len(), 1);
    assert_eq!(vector_combine_size(&emb.images[0], &emb.images[0], -1), 1);
}

#[test]
fn decomposition_examples() {
    let r = zx();
    let a = set(&r, &[&[0], &[1]]);
    let one = Dilation::of(&r.one()).unwrap();
    let res = lemma33_extract(&a, &a, &one, &qr(3, 2)).unwrap();
    assert_eq!(res.components, 1);
    assert_eq!(res.b_prime, a);
    assert_eq!(res.diff_size, 3);
    assert!(res.verify(&a).unwrap());

    let zero = set(&r, &[&[0]]);
    let b = set(&r, &[&[4], &[-2], &[0, 3], &[7, 1]]);
    let alpha = Dilation::of(&r.generator()).unwrap();
    let res = lemma33_extract(&zero, &b, &alpha, &q(1)).unwrap();
    assert_eq!(res.components, 4);
    assert_eq!(res.b_prime.len(), 1);
    assert_eq!(res.diff_size, 1);
    assert_eq!(res.b_prime.elements()[0], b.elements()[0]);

    assert!(matches!(
        lemma33_extract(&a, &a, &alpha, &q(1)),
        Err(Error::Precondition(_))
    ));
}

/// Components of the coincidence graph by direct pair comparison.
fn brute_components(a: &FiniteSet, b: &FiniteSet, al: &Dilation) -> Vec<Vec<usize>> {
    let n = b.len();
    let val = |i: usize, j: usize| &(&al.den * &a.elements()[i]) - &(&al.num * &b.elements()[j]);
    let mut comp: Vec<usize> = (0..n).collect();
    for j1 in 0..n {
        for j2 in 0..n {
            let linked = (0..a.len()).any(|i1| (0..a.len()).any(|i2| val(i1, j1) == val(i2, j2)));
            if linked && comp[j1] != comp[j2] {
                let (from, to) = (comp[j1].max(comp[j2]), comp[j1].min(comp[j2]));
                comp.iter_mut().filter(|c| **c == from).for_each(|c| *c = to);
            }
        }
    }
    let roots: BTreeSet<usize> = comp.iter().copied().collect();
    roots
        .into_iter()
        .map(|r| (0..n).filter(|&i| comp[i] == r).collect())
        .collect()
}

#[test]
fn decomposition_matches_brute_components() {
    let s = sqrt2();
    let spec = ModelSetSpec::new(&s, Some(q(10))).unwrap();
    let t = enumerate_t(&spec, &q(20), DEFAULT_BUDGET, Exec::default()).unwrap();
    let a = FiniteSet::new(&s, t.elements().iter().cloned()).unwrap();
    let alpha = Dilation::of(&s.from_ints(&[0, 1])).unwrap();
    let k = qr(dilated_diff_size(&a, &alpha, &a).unwrap() as i64, a.len() as i64);
    let res = lemma33_extract(&a, &a, &alpha, &k).unwrap();
    assert!(res.verify(&a).unwrap());
    for p in 0..res.b_prime.len() {
        assert!(res.check_pair(&a, p, 0));
    }

    let r = zx();
    let x = r.generator();
    let a = progression(&r, &[3, 2], &x).unwrap();
    let b = set(&r, &[&[0], &[1], &[2], &[0, 1], &[5, 5], &[9], &[1, 1]]);
    for al in [Dilation::of(&r.one()).unwrap(), Dilation::of(&x).unwrap()] {
        let comps = brute_components(&a, &b, &al);
        let k = qr(dilated_diff_size(&a, &al, &b).unwrap() as i64, b.len() as i64);
        let res = lemma33_extract(&a, &b, &al, &k).unwrap();
        assert_eq!(res.components, comps.len());
        let score = |c: &Vec<usize>| {
            let sub = FiniteSet::new(&r, c.iter().map(|&i| b.elements()[i].clone())).unwrap();
            qr(dilated_diff_size(&a, &al, &sub).unwrap() as i64, c.len() as i64)
        };
        let best = comps.iter().map(score).min().unwrap();
        assert_eq!(score(&res.indices), best);
        assert!(comps.contains(&res.indices));
        for p1 in 0..res.b_prime.len() {
            for p2 in 0..res.b_prime.len() {
                assert!(res.check_pair(&a, p1, p2));
            }
        }
    }
}

#[test]
fn extraction_chain_examples() {
    let r = zx();
    let a = set(&r, &[&[0], &[1]]);
    let one = Dilation::of(&r.one()).unwrap();
    let chain = lemma35_iterate(&a, &a, &one, &one, &q(2), 0).unwrap();
    assert!(chain.levels.is_empty());
    assert_eq!(chain.a_level(0), &a);
    let chain = lemma35_iterate(&a, &a, &one, &one, &q(2), 2).unwrap();
    assert_eq!(chain.levels.len(), 2);
    assert!(chain.levels.iter().all(|l| !l.a.is_empty()));

    let sq = set(&r, &[&[0], &[1], &[0, 1], &[1, 1]]);
    let x = r.generator();
    let a1 = Dilation::of(&x).unwrap();
    let a2 = Dilation::ratio(&r.one(), &x).unwrap();
    let s1 = dilated_diff_size(&sq, &a1, &sq).unwrap();
    let s2 = dilated_diff_size(&sq, &a2, &sq).unwrap();
    assert_eq!(s1, brute_combine(&sq, &r.one(), &sq, &-&x).len());
    let k = qr(s1.max(s2) as i64, 4);
    let chain = lemma35_iterate(&sq, &sq, &a1, &a2, &k, 1).unwrap();
    assert!(chain.verify().unwrap());
    let lv = &chain.levels[0];
    for p in 0..lv.a.len() {
        assert!(chain.check_level_expansion(1, p));
    }
    assert!(matches!(
        lemma35_iterate(&sq, &sq, &a1, &a2, &q(1), 1),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn dimension_check_examples() {
    let r = zx();
    let x = r.generator();
    let a1 = Dilation::of(&x).unwrap();
    let a2 = Dilation::ratio(&r.one(), &x).unwrap();
    let tiny = set(&r, &[&[0], &[1], &[0, 1], &[0, 0, 1]]);
    let k = qr(dilated_diff_size(&tiny, &a1, &tiny).unwrap() as i64, 4);
    assert_eq!(k, qr(14, 4));
    let rep = cor36_dimension_check(&tiny, &tiny, &a1, &a2, &k, 1).unwrap();
    assert!(!rep.applies && rep.pass);
    assert_eq!(rep.qdim, 3);
    let rep = cor36_dimension_check(&tiny, &tiny, &a1, &a2, &k, 0).unwrap();
    assert!(rep.applies && rep.pass && rep.qdim >= 1);

    let boxp = progression(&r, &[10, 20, 10], &x).unwrap();
    let n = boxp.len();
    let s = dilated_diff_size(&boxp, &a1, &boxp).unwrap();
    assert_eq!(s, box_diff_size(&[10, 20, 10]));
    let k = qr(s as i64, n as i64);
    assert!(&k * &k < q(n as i64));
    let rep = cor36_dimension_check(&boxp, &boxp, &a1, &a2, &k, 1).unwrap();
    assert!(rep.applies && rep.pass, "{rep:?}");
    assert_eq!(rep.qdim, 3);
    assert_eq!(rep.witness_rank, Some(2));

    let s2 = sqrt2();
    let sq = set(&s2, &[&[0], &[1]]);
    let d = Dilation::of(&s2.from_ints(&[0, 1])).unwrap();
    assert!(matches!(
        cor36_dimension_check(&sq, &sq, &d, &d, &q(4), 0),
        Err(Error::Precondition(_))
    ));
    assert!(cor36_dimension_check(&tiny, &tiny, &a1, &a1, &k, 0).is_err());
}

#[test]
fn growth_scan_matches_closed_forms() {
    let r = zx();
    let x = r.generator();
    for n in [5usize, 10, 20] {
        let a = interval(&r, n);
        assert_eq!(combine_size(&a, &r.one(), &a, &-&x).unwrap(), (n + 1) * (n + 1));
    }
    for dims in [vec![2, 3], vec![4, 2, 5], vec![2, 2, 2, 2], vec![3, 1, 4]] {
        let a = progression(&r, &dims, &x).unwrap();
        assert_eq!(a.len(), dims.iter().product::<usize>());
        let exact = brute_combine(&a, &r.one(), &a, &-&x).len();
        assert_eq!(exact, box_diff_size(&dims), "{dims:?}");
        assert_eq!(combine_size(&a, &r.one(), &a, &-&x).unwrap(), exact);
    }
    assert_eq!(ordered_factorizations(12, 7).len(), 8);
    let sizes = [4usize, 8, 16, 32, 64, 128];
    let rep = cor37_growth_scan(&r, &sizes, 4, Exec::default()).unwrap();
    for row in &rep.rows {
        let best = ordered_factorizations(row.size, 7)
            .iter()
            .map(|d| box_diff_size(d))
            .min()
            .unwrap();
        assert_eq!(row.diff_size, best, "size {}", row.size);
    }
    assert_eq!(rep.rows[0].diff_size, 12);
    assert!(rep.nondecreasing);
    assert!(cor37_growth_scan(&r, &[8, 4], 4, Exec::default()).is_err());
}

#[test]
fn algebraic_contrast_is_bounded() {
    let s = sqrt2();
    let spec = ModelSetSpec::new(&s, Some(q(10))).unwrap();
    let root = s.from_ints(&[0, 1]);
    let rep = algebraic_contrast(&spec, &root, &[q(50), q(100), q(200)], Exec::default()).unwrap();
    assert!(rep.spread <= 1.25, "{rep:?}");
    let t = enumerate_t(&spec, &q(50), DEFAULT_BUDGET, Exec::default()).unwrap();
    let a = FiniteSet::new(&s, t.elements().iter().cloned()).unwrap();
    assert_eq!(rep.rows[0].diff_size, brute_combine(&a, &s.one(), &a, &-&root).len());
}

#[test]
fn randomized_suites_hold() {
    for rep in run_all(DEFAULT_SEED, Exec::default()).unwrap() {
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.applicable > 0, "{} never applied", rep.name);
    }
}

#[test]
fn suites_are_reproducible() {
    use polydist::sumsetlab::suites::small_doubling_suite;
    let a = small_doubling_suite(40, 7, Exec::Sequential).unwrap();
    let b = small_doubling_suite(40, 7, Exec::Parallel).unwrap();
    assert_eq!((a.applicable, a.violations), (b.applicable, b.violations));
}

fn small_set() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-4i64..5, -3i64..4), 1..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sumset_size_bounds(a in small_set(), b in small_set()) {
        let r = zx();
        let fa = FiniteSet::new(&r, a.iter().map(|&(u, v)| r.from_ints(&[u, v]))).unwrap();
        let fb = FiniteSet::new(&r, b.iter().map(|&(u, v)| r.from_ints(&[u, v]))).unwrap();
        let s = sum_set(&fa, &fb).unwrap();
        prop_assert!(s.len() >= fa.len().max(fb.len()));
        prop_assert!(s.len() <= fa.len() * fb.len());
        prop_assert_eq!(s.len(), brute_combine(&fa, &r.one(), &fb, &r.one()).len());
    }

    #[test]
    fn embedding_keeps_difference_sizes(a in small_set(), b in small_set()) {
        let r = sqrt2();
        let fa = FiniteSet::new(&r, a.iter().map(|&(u, v)| r.elem(vec![qr(u, 2), q(v)]))).unwrap();
        let fb = FiniteSet::new(&r, b.iter().map(|&(u, v)| r.from_ints(&[v, u]))).unwrap();
        let emb = freiman_embed(&[&fa, &fb]).unwrap();
        let one = r.one();
        prop_assert_eq!(
            vector_combine_size(&emb.images[0], &emb.images[1], -1),
            combine_size(&fa, &one, &fb, &-&one).unwrap()
        );
    }
}

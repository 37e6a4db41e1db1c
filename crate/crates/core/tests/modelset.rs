use std::cmp::Ordering;

use polydist::exactnum::{q, Ring, RingElem, Q};
use polydist::io::named_field;
use polydist::modelset::{enumerate_t, product_set, verify_local_count, verify_net, ModelSetSpec, DEFAULT_BUDGET};
use polydist::Exec;

fn ring(name: &str) -> Ring {
    Ring::field(named_field(name).unwrap().build().unwrap())
}

/// Membership decided from power sums in f64, with a high-precision enclosure near the boundary.
fn oracle_member(r: &Ring, a: &[i64], bounds: &[f64], bounds_q: &[Q]) -> bool {
    let f = r.as_field().unwrap();
    let conj = f.conjugates_f64();
    for (k, al) in conj.iter().enumerate() {
        let mut v = num_complex::Complex64::new(0.0, 0.0);
        let mut p = num_complex::Complex64::new(1.0, 0.0);
        for &c in a {
            v += p * c as f64;
            p *= al;
        }
        let n = v.norm();
        if n > bounds[k] + 1e-7 {
            return false;
        }
        if n >= bounds[k] - 1e-7 {
            let coords: Vec<Q> = a.iter().map(|&x| q(x)).collect();
            let e = f.embed(&coords, k, 300).norm_sqr();
            let b2 = &bounds_q[k] * &bounds_q[k];
            assert!(e.hi() < &b2 || e.lo() > &b2 || e.lo() == e.hi(), "oracle undecided");
            if e.lo() > &b2 {
                return false;
            }
        }
    }
    true
}

fn brute_force(r: &Ring, c: &Q, radius: &Q, boxr: i64) -> Vec<Vec<i64>> {
    let d = r.degree().unwrap();
    let mut bounds = vec![polydist::exactnum::rational::to_f64(c); d];
    bounds[0] = polydist::exactnum::rational::to_f64(radius);
    let mut bq = vec![c.clone(); d];
    bq[0] = radius.clone();
    let mut out = Vec::new();
    let mut a = vec![-boxr; d];
    loop {
        if oracle_member(r, &a, &bounds, &bq) {
            out.push(a.clone());
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            if a[i] < boxr {
                a[i] += 1;
                break;
            }
            a[i] = -boxr;
            i += 1;
        }
    }
}

fn as_vecs(t: &polydist::modelset::WindowedSet) -> Vec<Vec<i64>> {
    let mut v: Vec<Vec<i64>> = (0..t.len()).map(|i| t.ints(i).to_vec()).collect();
    v.sort();
    v
}

#[test]
fn sqrt2_small_window_matches_box() {
    let r = ring("sqrt2");
    let spec = ModelSetSpec::new(&r, Some(q(10))).unwrap();
    let t = enumerate_t(&spec, &q(3), DEFAULT_BUDGET, Exec::Sequential).unwrap();
    let mut brute = brute_force(&r, &q(10), &q(3), 12);
    brute.sort();
    assert_eq!(as_vecs(&t), brute);
    for w in t.values().windows(2) {
        assert!(w[0] < w[1]);
    }
}

#[test]
fn completeness_up_to_radius_100() {
    for (name, boxr) in [("rational", 105), ("sqrt2", 112), ("cubic", 110)] {
        let r = ring(name);
        let spec = ModelSetSpec::new(&r, None).unwrap();
        let radius = q(100);
        let t = enumerate_t(&spec, &radius, DEFAULT_BUDGET, Exec::default()).unwrap();
        let mut brute = brute_force(&r, spec.c(), &radius, boxr);
        brute.sort();
        assert_eq!(as_vecs(&t), brute, "{name}");
    }
    let r = ring("sqrt2");
    let spec = ModelSetSpec::new(&r, Some(q(10))).unwrap();
    let t = enumerate_t(&spec, &q(100), DEFAULT_BUDGET, Exec::default()).unwrap();
    let mut brute = brute_force(&r, &q(10), &q(100), 115);
    brute.sort();
    assert_eq!(as_vecs(&t), brute);
}

#[test]
fn boundary_points_are_included() {
    let r = ring("sqrt2");
    let spec = ModelSetSpec::new(&r, Some(q(3))).unwrap();
    let t = enumerate_t(&spec, &q(2), DEFAULT_BUDGET, Exec::Sequential).unwrap();
    let vals: Vec<RingElem> = t.elements().to_vec();
    assert!(vals.contains(&r.from_ints(&[2])));
    assert!(vals.contains(&r.from_ints(&[-2])));
    // |1 + sqrt2| < 3 but |3 + sqrt2| > 3.
    assert!(vals.contains(&r.from_ints(&[1, -1])));
    assert!(!vals.contains(&r.from_ints(&[3, -1])));
}

#[test]
fn rational_field_degenerates_to_integers() {
    let r = ring("rational");
    let spec = ModelSetSpec::new(&r, None).unwrap();
    let t = enumerate_t(&spec, &q(5), DEFAULT_BUDGET, Exec::Sequential).unwrap();
    assert_eq!(t.len(), 11);
    let net = verify_net(&t, &spec).unwrap();
    assert_eq!(net.max_gap, r.one());
    assert!(net.pass);
    let lc = verify_local_count(&t, &spec).unwrap();
    let c = spec.c().clone();
    let expect = (c * q(2)).floor().to_integer();
    assert_eq!(lc.max_count as i64, i64::try_from(expect).unwrap() + 1);
    assert!(lc.pass);
}

#[test]
fn density_is_linear() {
    let r = ring("sqrt2");
    let spec = ModelSetSpec::new(&r, Some(q(10))).unwrap();
    let mut ratios = Vec::new();
    for radius in [100i64, 1000, 10_000] {
        let t = enumerate_t(&spec, &q(radius), DEFAULT_BUDGET, Exec::default()).unwrap();
        ratios.push(t.len() as f64 / radius as f64);
        let t2 = enumerate_t(&spec, &q(2 * radius), DEFAULT_BUDGET, Exec::default()).unwrap();
        let g = t2.len() as f64 / t.len() as f64;
        assert!((1.6..=2.4).contains(&g), "growth {g} at R = {radius}");
    }
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo <= 1.5, "{ratios:?}");
}

#[test]
fn net_and_local_count() {
    let r = ring("sqrt2");
    let spec = ModelSetSpec::new(&r, Some(q(10))).unwrap();
    let t = enumerate_t(&spec, &q(10_000), DEFAULT_BUDGET, Exec::default()).unwrap();
    let net = verify_net(&t, &spec).unwrap();
    assert!(net.pass);
    assert_eq!(net.bound, r.from_ints(&[1, 1]));
    assert!(net.max_gap.cmp_value(&net.bound).unwrap() != Ordering::Greater);
    let lc = verify_local_count(&t, &spec).unwrap();
    assert!(lc.pass && lc.k2 == 315);
    let t2 = enumerate_t(&spec, &q(20_000), DEFAULT_BUDGET, Exec::default()).unwrap();
    assert_eq!(verify_local_count(&t2, &spec).unwrap().max_count, lc.max_count);

    let c = ring("cubic");
    let spec = ModelSetSpec::new(&c, None).unwrap();
    let t = enumerate_t(&spec, &q(1000), DEFAULT_BUDGET, Exec::default()).unwrap();
    assert!(verify_net(&t, &spec).unwrap().pass);
    assert!(verify_local_count(&t, &spec).unwrap().pass);
}

#[test]
fn difference_and_dilation_closure() {
    let r = ring("sqrt2");
    let spec = ModelSetSpec::new(&r, Some(q(10))).unwrap();
    let t = enumerate_t(&spec, &q(6), DEFAULT_BUDGET, Exec::Sequential).unwrap();
    let twice = q(20);
    for a in t.elements() {
        for b in t.elements() {
            assert!(spec.in_band(&(a - b), &twice).unwrap());
        }
    }
    // beta = 3 + 2 sqrt2 has |sigma_1(beta)| = 3 - 2 sqrt2 < 1/5.
    let beta = r.from_ints(&[3, 2]);
    let c1 = twice.clone() * Q::new(1.into(), 5.into());
    let d = enumerate_t(
        &spec.with_band(twice.clone()).unwrap(),
        &q(6),
        DEFAULT_BUDGET,
        Exec::Sequential,
    )
    .unwrap();
    assert!(d.len() > t.len());
    for x in d.elements() {
        assert!(spec.in_band(&(&beta * x), &c1).unwrap());
    }
}

#[test]
fn product_and_budget() {
    let r = ring("sqrt2");
    let spec = ModelSetSpec::new(&r, Some(q(10))).unwrap();
    let t = enumerate_t(&spec, &q(5), DEFAULT_BUDGET, Exec::Sequential).unwrap();
    let s = product_set(&t);
    assert_eq!(s.len(), t.len() * t.len());
    assert_eq!(s.points(usize::MAX).unwrap().len(), s.len());
    assert!(s.points(3).is_err());
    assert!(enumerate_t(&spec, &q(1_000_000_000), DEFAULT_BUDGET, Exec::Sequential).is_err());
    assert!(ModelSetSpec::new(&r, Some(q(1))).is_err());
}

#[test]
fn parallel_and_sequential_agree() {
    let r = ring("cubic");
    let spec = ModelSetSpec::new(&r, None).unwrap();
    let a = enumerate_t(&spec, &q(300), DEFAULT_BUDGET, Exec::Sequential).unwrap();
    let b = enumerate_t(&spec, &q(300), DEFAULT_BUDGET, Exec::Parallel).unwrap();
    assert_eq!(a.elements(), b.elements());
}

use polydist::exactnum::{q, qr, Ring, RingElem, Sign, Q};
use polydist::polynorm::presets::{preset, preset_names};
use polydist::polynorm::{norm_axioms_check, Point, PolygonalNorm, Slope};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cross(a: &Point, b: &Point) -> RingElem {
    &(&a[0] * &b[1]) - &(&a[1] * &b[0])
}

/// Exact point-in-convex-polygon test from edge orientations alone.
fn oracle_side(p: &PolygonalNorm, x: &Point) -> Sign {
    let v = p.vertices();
    let n = v.len();
    let mut on_edge = false;
    for i in 0..n {
        let a = &v[i];
        let b = &v[(i + 1) % n];
        let e = [&b[0] - &a[0], &b[1] - &a[1]];
        let w = [&x[0] - &a[0], &x[1] - &a[1]];
        match cross(&e, &w).sign().unwrap() {
            Sign::Negative => return Sign::Positive,
            Sign::Zero => on_edge = true,
            Sign::Positive => {}
        }
    }
    if on_edge {
        Sign::Zero
    } else {
        Sign::Negative
    }
}

fn random_coord(ring: &Ring, rng: &mut ChaCha8Rng) -> RingElem {
    let dim = ring.degree().unwrap_or(2);
    let den = rng.gen_range(1..=8);
    ring.elem((0..dim).map(|_| qr(rng.gen_range(-12..=12), den)).collect())
}

fn random_point(p: &PolygonalNorm, rng: &mut ChaCha8Rng) -> Point {
    let ring = p.ring();
    if rng.gen_bool(0.2) {
        // A point on a boundary edge.
        let v = p.vertices();
        let i = rng.gen_range(0..v.len());
        let a = &v[i];
        let b = &v[(i + 1) % v.len()];
        let t = qr(rng.gen_range(0..=10), 10);
        let s = q(1) - &t;
        [&a[0].scale(&s) + &b[0].scale(&t), &a[1].scale(&s) + &b[1].scale(&t)]
    } else {
        [random_coord(ring, rng), random_coord(ring, rng)]
    }
}

fn pip_f64(verts: &[(f64, f64)], x: f64, y: f64) -> bool {
    let n = verts.len();
    (0..n).all(|i| {
        let (ax, ay) = verts[i];
        let (bx, by) = verts[(i + 1) % n];
        (bx - ax) * (y - ay) - (by - ay) * (x - ax) >= 0.0
    })
}

/// Gauge by bisection on the scale factor with a floating point-in-polygon test.
fn bisection_gauge(p: &PolygonalNorm, x: f64, y: f64) -> f64 {
    let verts = polydist::polynorm::vertices_f64(p);
    let (mut lo, mut hi) = (0.0f64, 1e6f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pip_f64(&verts, x / mid, y / mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn presets_build_with_declared_slopes() {
    for name in preset_names() {
        let p = preset(name).unwrap();
        assert_eq!(p.facets().len(), p.vertices().len(), "{name}");
    }
    let linf = preset("linf").unwrap();
    let r = linf.ring().clone();
    assert_eq!(
        linf.side_slopes().unwrap(),
        vec![Slope::Infinite, Slope::Finite(r.zero())]
    );
    let l1 = preset("l1").unwrap();
    assert_eq!(
        l1.side_slopes().unwrap(),
        vec![Slope::Finite(r.from_ints(&[-1])), Slope::Finite(r.one())]
    );
    let hex = preset("hex01").unwrap();
    assert_eq!(
        hex.side_slopes().unwrap(),
        vec![Slope::Infinite, Slope::Finite(r.zero()), Slope::Finite(r.one())]
    );
    let oct = preset("octagon").unwrap();
    let s = oct.ring().clone();
    assert_eq!(
        oct.side_slopes().unwrap(),
        vec![
            Slope::Infinite,
            Slope::Finite(s.from_ints(&[-1])),
            Slope::Finite(s.zero()),
            Slope::Finite(s.generator()),
        ]
    );
    let hexpi = preset("hexpi").unwrap();
    let pi = hexpi.ring().clone();
    assert_eq!(
        hexpi.side_slopes().unwrap(),
        vec![Slope::Finite(pi.generator()), Slope::Infinite, Slope::Finite(pi.zero())]
    );
}

#[test]
fn facet_functionals() {
    let linf = preset("linf").unwrap();
    let r = linf.ring().clone();
    let u: Vec<[RingElem; 2]> = linf.facets().iter().map(|f| f.u.clone()).collect();
    assert_eq!(u[0], [r.one(), r.zero()]);
    assert_eq!(u[1], [r.zero(), r.one()]);
    assert_eq!(u[2], [r.from_ints(&[-1]), r.zero()]);
    let oct = preset("octagon").unwrap();
    let s = oct.ring().clone();
    assert_eq!(oct.facets()[1].u, [s.from_q(qr(2, 3)), s.from_q(qr(2, 3))]);
    assert_eq!(oct.facets()[1].scale, qr(3, 2));
    assert_eq!(oct.facets()[3].u, [s.elem(vec![q(0), qr(-1, 2)]), s.from_q(qr(1, 2))]);
}

#[test]
fn eval_examples() {
    let linf = preset("linf").unwrap();
    let r = linf.ring().clone();
    assert_eq!(linf.eval(&linf.point(&[3], &[-2])).unwrap(), r.from_ints(&[3]));
    for name in preset_names() {
        let p = preset(name).unwrap();
        let z = [p.ring().zero(), p.ring().zero()];
        assert!(p.eval(&z).unwrap().is_zero());
    }
    let oct = preset("octagon").unwrap();
    let one = oct.point(&[1], &[1]);
    let v = oct.eval(&one).unwrap();
    assert_eq!(v, oct.ring().from_q(qr(4, 3)));
    assert!((v.to_f64() - bisection_gauge(&oct, 1.0, 1.0)).abs() < 1e-12);
}

#[test]
fn gauge_matches_bisection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in preset_names() {
        let p = preset(name).unwrap();
        for _ in 0..200 {
            let x = random_point(&p, &mut rng);
            let (fx, fy) = (x[0].to_f64(), x[1].to_f64());
            if fx == 0.0 && fy == 0.0 {
                continue;
            }
            let exact = p.eval(&x).unwrap().to_f64();
            let b = bisection_gauge(&p, fx, fy);
            assert!((exact - b).abs() <= 1e-12 * exact.max(1.0), "{name}: {exact} vs {b}");
        }
    }
}

#[test]
fn gauge_consistent_with_point_in_polygon() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in preset_names() {
        let p = preset(name).unwrap();
        let n = if name == "hexpi" { 2_000 } else { 10_000 };
        let mut boundary = 0;
        for _ in 0..n {
            let x = random_point(&p, &mut rng);
            let s = p.boundary_sign(&x).unwrap();
            assert_eq!(s, oracle_side(&p, &x), "{name} at ({}, {})", x[0], x[1]);
            boundary += (s == Sign::Zero) as usize;
        }
        assert!(boundary > 0, "{name}: no boundary samples drawn");
    }
}

#[test]
fn axioms_hold_on_presets() {
    for name in preset_names() {
        let p = preset(name).unwrap();
        let samples = if name == "hexpi" { 300 } else { 1000 };
        let rep = norm_axioms_check(&p, samples, 1).unwrap();
        assert!(rep.passed(), "{name}: {:?}", rep.first_violation);
        assert_eq!(rep.samples, samples);
    }
}

#[test]
fn corrupted_vertices_are_rejected() {
    let oct = preset("octagon").unwrap();
    let mut v = oct.vertices().to_vec();
    v.swap(1, 2);
    let m = v.len() / 2;
    v.swap(1 + m, 2 + m);
    assert!(PolygonalNorm::new(oct.ring().clone(), v).is_err());
    let r = Ring::rationals();
    let pt = |x: i64, y: i64| [r.from_ints(&[x]), r.from_ints(&[y])];
    let off_center = vec![pt(2, 1), pt(2, 2), pt(1, 2), pt(1, 1)];
    assert!(PolygonalNorm::new(r.clone(), off_center).is_err());
    let other = preset("octagon").unwrap();
    let x = [other.ring().one(), other.ring().one()];
    assert!(preset("linf").unwrap().eval(&x).is_err());
}

#[test]
fn sandwich_radii_hold() {
    for name in preset_names() {
        let p = preset(name).unwrap();
        let s = p.sandwich().unwrap();
        assert!(s.delta > q(0));
        for v in p.vertices() {
            let (x, y) = (v[0].to_f64(), v[1].to_f64());
            let r = (x * x + y * y).sqrt();
            assert!(r <= polydist::exactnum::rational::to_f64(&s.rho) + 1e-12);
            assert!(x.abs().max(y.abs()) <= polydist::exactnum::rational::to_f64(&s.box_radius) + 1e-12);
            assert!(r >= polydist::exactnum::rational::to_f64(&s.delta) - 1e-12);
        }
    }
}

fn small_q() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| qr(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_and_homogeneous(a in small_q(), b in small_q(), c in small_q(), d in small_q(), l in 0i64..20) {
        let p = preset("octagon").unwrap();
        let s = p.ring().clone();
        let x = [s.elem(vec![a, b]), s.elem(vec![c, d])];
        let v = p.eval(&x).unwrap();
        prop_assert_eq!(p.eval(&[-&x[0], -&x[1]]).unwrap(), v.clone());
        let lq = qr(l, 3);
        prop_assert_eq!(p.eval(&[x[0].scale(&lq), x[1].scale(&lq)]).unwrap(), v.scale(&lq));
        prop_assert!(v.sign().unwrap() != Sign::Negative);
    }

    #[test]
    fn triangle_inequality_linf(a in small_q(), b in small_q(), c in small_q(), d in small_q()) {
        let p = preset("hex01").unwrap();
        let r = p.ring().clone();
        let x = [r.from_q(a), r.from_q(b)];
        let y = [r.from_q(c), r.from_q(d)];
        let lhs = p.eval(&[&x[0] + &y[0], &x[1] + &y[1]]).unwrap();
        let rhs = &p.eval(&x).unwrap() + &p.eval(&y).unwrap();
        prop_assert!(lhs.cmp_value(&rhs).unwrap().is_le());
    }
}

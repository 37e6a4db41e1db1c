use std::collections::BTreeSet;

use num_traits::Signed;
use polydist::construction::{
    affine_slope_change, build_stage, build_stage_with, direction, is_nested, simplest_in, verify_containment_bound,
    BuildConfig, Region,
};
use polydist::exactnum::{q, qr, Ring, RingElem, Q};
use polydist::io::named_field;
use polydist::polynorm::presets::preset;
use polydist::polynorm::{Point, PolygonalNorm, Slope};
use polydist::Exec;
use proptest::prelude::*;

const SCHEDULE: [u64; 4] = [5, 25, 125, 625];

/// True when some `a / k` with `k <= n` lies in `[lo, hi]`, by scanning every denominator.
fn meets_short_fraction(lo: &Q, hi: &Q, n: u64) -> bool {
    (1..=n as i64).any(|k| (lo * q(k)).ceil() <= (hi * q(k)).floor())
}

/// `|Δ_{X,N}(Z^2)|` from every lattice vector in the box `max(|z1|, |z2|) <= N`.
fn brute_count(p: &PolygonalNorm, n: i64) -> usize {
    let r = p.ring();
    let limit = r.from_ints(&[n]);
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    for x in -n..=n {
        for y in -n..=n {
            let v = p.eval(&[r.from_ints(&[x]), r.from_ints(&[y])]).unwrap();
            if v.cmp_value(&limit).unwrap().is_le() {
                seen.insert(v.coords().to_vec());
            }
        }
    }
    seen.len()
}

fn sqrt2() -> Ring {
    Ring::field(named_field("sqrt2").unwrap().build().unwrap())
}

fn finite_slopes(p: &PolygonalNorm) -> Vec<Option<RingElem>> {
    p.side_slopes()
        .unwrap()
        .into_iter()
        .map(|s| match s {
            Slope::Finite(v) => Some(v),
            Slope::Infinite => None,
        })
        .collect()
}

#[test]
fn stage_zero_is_the_rotated_square() {
    let d = build_stage(&[], 0).unwrap();
    assert_eq!(d.chain(), &[[qr(-1, 2), qr(1, 2)], [q(0), q(1)], [qr(1, 2), qr(1, 2)]]);
    let p = d.norm();
    let r = p.ring();
    for (x, y) in [(3i64, -4i64), (0, 7), (5, 5)] {
        let v = p.eval(&[r.from_ints(&[x]), r.from_ints(&[y])]).unwrap();
        assert_eq!(v, r.from_ints(&[x.abs() + y.abs()]));
    }
    assert!(d.check_invariants().passed());
}

#[test]
fn first_stage_cut_avoids_short_directions() {
    let d = build_stage(&[4], 1).unwrap();
    let cut = &d.cuts()[0];
    assert_eq!(cut.a, 0);
    let u = cut.b.clone();
    assert!(u > qr(1, 2) && u < q(1));
    assert_eq!(d.chain().len(), 4);
    for v in &cut.vertices {
        assert_eq!(v[1], u);
        let t = direction(v);
        assert!(!meets_short_fraction(&t, &t, 4), "{t}");
    }
    assert_eq!(cut.vertices[1], [q(1) - &u, u.clone()]);
    assert!(d.check_invariants().passed());
}

#[test]
fn stages_nest_and_keep_their_invariants() {
    let mut prev = build_stage(&SCHEDULE, 0).unwrap();
    for j in 1..=4 {
        let d = build_stage(&SCHEDULE, j).unwrap();
        let rep = d.check_invariants();
        assert!(rep.passed(), "stage {j}: {:?}", rep.failures);
        assert!(is_nested(&d, &prev).unwrap(), "stage {j}");
        assert!(!is_nested(&prev, &d).unwrap(), "stage {j}");
        assert_eq!(d.fresh_vertices().len(), 1 << j);
        let n = SCHEDULE[j - 1];
        for (v, r) in d.fresh_vertices().iter().zip(d.regions()) {
            let t = direction(v);
            assert!(r.contains_strictly(&t));
            assert!(!meets_short_fraction(&r.lo, &r.hi, n), "stage {j} region {r:?}");
            if j > 1 {
                assert!(
                    prev.regions().iter().any(|p| p.lo < r.lo && r.hi < p.hi),
                    "stage {j} region {r:?} escapes its parent"
                );
            }
        }
        // (1/2, 1/2) stays a vertex: the side before it still lies on x1 + x2 = 1.
        let c = d.chain();
        assert_eq!(&c[c.len() - 2][0] + &c[c.len() - 2][1], q(1));
        assert!(c[c.len() - 2][0] < qr(1, 2));
        prev = d;
    }
}

#[test]
fn short_directions_meet_the_boundary_inside_sides() {
    for j in 1..=3 {
        let d = build_stage(&SCHEDULE, j).unwrap();
        let n = SCHEDULE[j - 1] as i64;
        let vertex_dirs: Vec<Q> = d.chain()[1..d.chain().len() - 1].iter().map(direction).collect();
        for k in 1..=n {
            for a in -k..=k {
                let t = qr(a, k);
                if t.abs() == q(1) {
                    continue;
                }
                assert!(!vertex_dirs.contains(&t), "stage {j}: direction {t} hits a vertex");
            }
        }
        let c = d.chain();
        for i in 0..c.len() - 1 {
            let s = (&c[i + 1][1] - &c[i][1]) / (&c[i + 1][0] - &c[i][0]);
            let dyadic = (0..j).any(|e| {
                let a = &s * q(1 << e);
                a.is_integer() && a.abs() <= q(1 << e)
            });
            assert!(dyadic, "stage {j} side {i} slope {s}");
        }
    }
}

#[test]
fn simplest_fraction_matches_denominator_scan() {
    let samples = [
        (qr(2, 7), qr(3, 10)),
        (qr(-5, 11), qr(-4, 9)),
        (qr(13, 100), qr(14, 100)),
        (qr(1, 7), qr(1, 7)),
        (qr(355, 113), qr(22, 7)),
    ];
    for (lo, hi) in samples {
        let s = simplest_in(&lo, &hi);
        assert!(lo <= s && s <= hi);
        let d = i64::try_from(s.denom().clone()).unwrap() as u64;
        assert!(!meets_short_fraction(&lo, &hi, d - 1));
        assert!(Region {
            lo: lo.clone(),
            hi: hi.clone()
        }
        .avoids(d - 1));
        assert!(!Region { lo, hi }.avoids(d));
    }
}

#[test]
fn containment_bound_on_the_square() {
    let d = build_stage(&[], 0).unwrap();
    let rep = verify_containment_bound(&d, 8, Exec::default()).unwrap();
    assert_eq!(rep.count as usize, brute_count(d.norm(), 8));
    assert_eq!(rep.count, 9);
    assert_eq!(rep.bound, 64);
    assert!(rep.pass);
}

#[test]
fn containment_bound_matches_brute_force() {
    for j in 0..=2 {
        let d = build_stage(&SCHEDULE, j).unwrap();
        let lower = if j == 0 { 0 } else { SCHEDULE[j - 1] };
        for n in [lower + 1, SCHEDULE[j].min(lower + 12)] {
            let rep = verify_containment_bound(&d, n, Exec::default()).unwrap();
            assert_eq!(rep.count as usize, brute_count(d.norm(), n as i64), "stage {j} N = {n}");
            assert!(rep.pass && rep.spot_failures == 0);
            assert_eq!(rep.bound, (1 << (2 * j + 3)) * n);
        }
        let top = verify_containment_bound(&d, SCHEDULE[j], Exec::default()).unwrap();
        assert!(top.pass, "{top:?}");
        assert!(verify_containment_bound(&d, SCHEDULE[j] + 1, Exec::default()).is_err());
    }
}

#[test]
fn unit_threshold_only_sees_unit_vectors() {
    let d = build_stage(&SCHEDULE, 1).unwrap();
    let p = d.norm();
    let r = p.ring();
    let rep = verify_containment_bound(&d, 6, Exec::default()).unwrap();
    assert!(rep.pass);
    let d0 = build_stage(&[3], 0).unwrap();
    let one = verify_containment_bound(&d0, 1, Exec::default()).unwrap();
    // 0 and ||e1|| = 1 are the only distances up to 1 for the square.
    assert_eq!(one.count, 2);
    let e1 = p.eval(&[r.one(), r.zero()]).unwrap();
    assert!(e1.cmp_value(&r.one()).unwrap().is_ge());
}

#[test]
fn build_rejects_bad_parameters() {
    assert!(build_stage(&[5, 5], 2).is_err());
    assert!(build_stage(&[5], 2).is_err());
    assert!(build_stage(&[5, 25, 125, 625, 3125], 5).is_err());
    let cfg = BuildConfig {
        max_stage: 4,
        max_primes: 0,
    };
    assert!(matches!(
        build_stage_with(&[5], 1, &cfg),
        Err(polydist::Error::SearchExhausted(_))
    ));
}

#[test]
fn builds_are_reproducible() {
    let a = build_stage(&SCHEDULE, 3).unwrap();
    let b = build_stage(&SCHEDULE, 3).unwrap();
    assert_eq!(a.cuts(), b.cuts());
    let log = serde_json::to_string(&a.log()).unwrap();
    assert_eq!(log, serde_json::to_string(&b.log()).unwrap());
}

fn sqrt2_hexagon() -> PolygonalNorm {
    let r = sqrt2();
    let s = r.from_ints(&[0, 1]);
    let h = |x: Q, y: RingElem| [r.from_q(x), y];
    let half = qr(1, 2);
    let verts: Vec<Point> = vec![
        h(q(0), r.from_ints(&[-1])),
        h(half.clone(), &r.from_ints(&[-1]) + &s.scale(&half)),
        h(half.clone(), r.one()),
        h(q(0), r.one()),
        h(-&half, &r.one() - &s.scale(&half)),
        h(-&half, r.from_ints(&[-1])),
    ];
    PolygonalNorm::new(r, verts).unwrap()
}

#[test]
fn slope_change_sends_alpha_to_one() {
    let p = sqrt2_hexagon();
    let r = p.ring().clone();
    let alpha = r.from_ints(&[0, 1]);
    assert_eq!(finite_slopes(&p), vec![Some(alpha.clone()), None, Some(r.zero())]);
    let t = affine_slope_change(&p, &alpha).unwrap();
    assert_eq!(finite_slopes(&t), vec![Some(r.one()), None, Some(r.zero())]);

    let id = affine_slope_change(&p, &r.one()).unwrap();
    assert_eq!(finite_slopes(&id), finite_slopes(&p));

    let oct = preset("octagon").unwrap();
    let r = oct.ring().clone();
    let a1 = r.from_ints(&[0, 1]);
    let before = finite_slopes(&oct);
    let after = finite_slopes(&affine_slope_change(&oct, &a1).unwrap());
    for (b, a) in before.iter().zip(&after) {
        match (b, a) {
            (None, None) => {}
            (Some(b), Some(a)) => assert_eq!(&b.try_div(&a1).unwrap(), a),
            _ => panic!("vertical sides must stay vertical"),
        }
    }
    assert!(after.contains(&Some(r.one())));
    assert!(after.contains(&Some(r.zero())));
    assert!(after.contains(&None));

    let flipped = affine_slope_change(&oct, &r.from_ints(&[-1])).unwrap();
    assert_eq!(flipped.facets().len(), oct.facets().len());
    assert!(affine_slope_change(&oct, &r.zero()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slope_change_preserves_the_norm(
        x in -50i64..50, y in -50i64..50, a in -4i64..5, b in -3i64..4, num in 1i64..5,
    ) {
        prop_assume!(a != 0 || b != 0);
        let oct = preset("octagon").unwrap();
        let r = oct.ring().clone();
        let alpha = r.elem(vec![qr(a, num), q(b)]);
        let t = affine_slope_change(&oct, &alpha).unwrap();
        let z: Point = [r.from_ints(&[x]), r.from_ints(&[y])];
        let moved: Point = [z[0].clone(), z[1].try_div(&alpha).unwrap()];
        prop_assert_eq!(t.eval(&moved).unwrap(), oct.eval(&z).unwrap());
    }
}

use polydist::distset::{
    ball_count, canonical_distance, canonical_key, closure_check, compute, distance_set, fit_loglog, growth_scan,
    oracle_distance_set, DistOptions, Mode, SetSource,
};
use polydist::exactnum::{q, qr, Ring, Q};
use polydist::io::named_field;
use polydist::modelset::{enumerate_t, ModelSetSpec, DEFAULT_BUDGET};
use polydist::polynorm::presets::{preset, preset_names};
use polydist::polynorm::{Point, PolygonalNorm};
use polydist::Exec;

fn opts() -> DistOptions {
    DistOptions::default()
}

fn grid(p: &PolygonalNorm, lo: i64, hi: i64) -> Vec<Point> {
    let mut v = Vec::new();
    for x in lo..=hi {
        for y in lo..=hi {
            v.push(p.point(&[x], &[y]));
        }
    }
    v
}

fn sqrt2_spec() -> ModelSetSpec {
    let r = Ring::field(named_field("sqrt2").unwrap().build().unwrap());
    ModelSetSpec::new(&r, Some(q(10))).unwrap()
}

/// A small window of `T(10) × T(10)` in the octagon's ring.
fn model_window(p: &PolygonalNorm, radius: Q) -> Vec<Point> {
    let spec = ModelSetSpec::new(p.ring(), Some(q(10))).unwrap();
    let t = enumerate_t(&spec, &radius, DEFAULT_BUDGET, Exec::Sequential).unwrap();
    let mut v = Vec::new();
    for x in t.elements() {
        for y in t.elements() {
            v.push([x.clone(), y.clone()]);
        }
    }
    v
}

fn window_for(name: &str, p: &PolygonalNorm) -> Vec<Point> {
    if name == "octagon" {
        model_window(p, qr(3, 2))
    } else {
        grid(p, -10, 10)
    }
}

#[test]
fn linf_lattice_counts() {
    let p = preset("linf").unwrap();
    for n in [10i64, 100] {
        let t = compute(&SetSource::Z2, &p, &q(n), Mode::Threshold, &opts()).unwrap();
        assert_eq!(t.len() as i64, n + 1);
        let b = compute(&SetSource::Z2, &p, &q(n), Mode::Ball, &opts()).unwrap();
        assert_eq!(b.len() as i64, 2 * n + 1);
        let vals = t.values();
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(*v, p.ring().from_ints(&[i as i64]));
        }
    }
}

#[test]
fn single_point_and_empty() {
    for name in preset_names() {
        let p = preset(name).unwrap();
        let one = vec![[p.ring().one(), p.ring().zero()]];
        let ds = distance_set(&one, &p, &q(5)).unwrap();
        assert_eq!(ds.values(), vec![p.ring().zero()]);
        assert!(distance_set(&[], &p, &q(5)).unwrap().is_empty());
    }
}

#[test]
fn kernel_matches_all_pairs_oracle() {
    for name in preset_names() {
        let p = preset(name).unwrap();
        let pts = window_for(name, &p);
        assert!(pts.len() <= 500, "{name}: {}", pts.len());
        for n in [q(0), qr(7, 2), q(6), q(40)] {
            let fast = distance_set(&pts, &p, &n).unwrap().values();
            let slow = oracle_distance_set(&pts, &p, Some(&n)).unwrap();
            assert_eq!(fast, slow, "{name} at N = {n}");
        }
        let ball = compute(
            &SetSource::Finite {
                points: pts.clone(),
                label: "w".into(),
            },
            &p,
            &q(4),
            Mode::Ball,
            &opts(),
        )
        .unwrap()
        .values();
        let inside: Vec<Point> = pts
            .iter()
            .filter(|x| p.eval(x).unwrap().cmp_value(&p.ring().from_ints(&[4])).unwrap().is_le())
            .cloned()
            .collect();
        assert_eq!(ball, oracle_distance_set(&inside, &p, None).unwrap(), "{name} ball");
    }
}

#[test]
fn lattice_kernel_matches_a_covering_window() {
    for name in ["linf", "l1", "hex01", "hexpi"] {
        let p = preset(name).unwrap();
        let pts = grid(&p, 0, 20);
        for n in [5i64, 9] {
            let lattice = compute(&SetSource::Z2, &p, &q(n), Mode::Threshold, &opts()).unwrap();
            let oracle = oracle_distance_set(&pts, &p, Some(&q(n))).unwrap();
            assert_eq!(lattice.values(), oracle, "{name} at N = {n}");
        }
        let ball = compute(&SetSource::Z2, &p, &q(4), Mode::Ball, &opts()).unwrap();
        let inside: Vec<Point> = grid(&p, -8, 8)
            .into_iter()
            .filter(|x| p.eval(x).unwrap().cmp_value(&p.ring().from_ints(&[4])).unwrap().is_le())
            .collect();
        assert_eq!(
            ball.values(),
            oracle_distance_set(&inside, &p, None).unwrap(),
            "{name} ball"
        );
    }
}

#[test]
fn product_source_matches_oracle() {
    let p = preset("octagon").unwrap();
    let spec = ModelSetSpec::new(p.ring(), Some(q(10))).unwrap();
    let n = q(2);
    let src = SetSource::ModelSet {
        spec: spec.clone(),
        radius: Some(q(3)),
    };
    let fast = compute(&src, &p, &n, Mode::Threshold, &opts()).unwrap();
    let pts = model_window(&p, q(3));
    let slow = distance_set(&pts, &p, &n).unwrap();
    assert_eq!(fast.values(), slow.values());
    let tiny = SetSource::ModelSet {
        spec,
        radius: Some(q(1)),
    };
    assert!(compute(&tiny, &p, &q(2), Mode::Threshold, &opts()).is_err());
}

#[test]
fn canonical_distance_examples() {
    let linf = preset("linf").unwrap();
    let z = linf.point(&[3], &[-2]);
    assert_eq!(canonical_key(&linf, &z).unwrap(), vec![q(3)]);
    let oct = preset("octagon").unwrap();
    let s = oct.ring().clone();
    let z = [s.from_ints(&[1, 1]), s.zero()];
    assert_eq!(canonical_distance(&oct, &z).unwrap(), s.from_ints(&[1, 1]));
    let zero = [s.zero(), s.zero()];
    assert_eq!(canonical_key(&oct, &zero).unwrap(), vec![q(0), q(0)]);
}

#[test]
fn monotone_and_symmetric() {
    let p = preset("octagon").unwrap();
    let pts = model_window(&p, q(1));
    let small = distance_set(&pts, &p, &q(2)).unwrap();
    let big = distance_set(&pts, &p, &q(3)).unwrap();
    for v in small.values() {
        assert!(big.contains(&v));
    }
    let neg: Vec<Point> = pts.iter().map(|x| [-&x[0], -&x[1]]).collect();
    assert_eq!(distance_set(&neg, &p, &q(3)).unwrap().values(), big.values());
    let t = [p.ring().from_ints(&[1, 2]), p.ring().elem(vec![qr(1, 3), q(0)])];
    let moved: Vec<Point> = pts.iter().map(|x| [&x[0] + &t[0], &x[1] + &t[1]]).collect();
    assert_eq!(distance_set(&moved, &p, &q(3)).unwrap().values(), big.values());
}

#[test]
fn linf_growth_is_linear() {
    let p = preset("linf").unwrap();
    let schedule: Vec<Q> = [64i64, 128, 256, 512, 1024].iter().map(|&n| q(n)).collect();
    let rep = growth_scan(&SetSource::Z2, &p, &schedule, Mode::Threshold, &opts()).unwrap();
    for r in &rep.rows {
        assert_eq!(r.count as f64, r.n_f64 + 1.0);
    }
    assert!((rep.exponent - 1.0).abs() <= 0.02, "{}", rep.exponent);
    let (a, b, res) = fit_loglog(&[1.0, 10.0, 100.0], &[3.0, 30.0, 300.0]);
    assert!((a - 1.0).abs() < 1e-12 && (b - 3f64.ln()).abs() < 1e-12 && res < 1e-12);
    assert!(growth_scan(&SetSource::Z2, &p, &[q(10), q(5)], Mode::Threshold, &opts()).is_err());
}

#[test]
fn octagon_distances_close_under_rescaling() {
    let p = preset("octagon").unwrap();
    let spec = ModelSetSpec::new(p.ring(), Some(q(10))).unwrap();
    let src = SetSource::ModelSet {
        spec: spec.clone(),
        radius: None,
    };
    let ds = compute(&src, &p, &q(20), Mode::Threshold, &opts()).unwrap();
    let rep = closure_check(&ds, &p, &spec).unwrap();
    assert_eq!(rep.failures, 0, "{:?}", rep.examples);
    assert!(rep.checked > 100);
    assert!((rep.c_prime_f64 - 20.0 * (1.0 + 2f64.sqrt())).abs() < 1e-4);
}

#[test]
fn parallel_and_sequential_agree() {
    let p = preset("hexpi").unwrap();
    let seq = DistOptions {
        exec: Exec::Sequential,
        ..opts()
    };
    let par = DistOptions {
        exec: Exec::Parallel,
        ..opts()
    };
    let a = compute(&SetSource::Z2, &p, &q(30), Mode::Threshold, &seq).unwrap();
    let b = compute(&SetSource::Z2, &p, &q(30), Mode::Threshold, &par).unwrap();
    assert_eq!(a.entries(), b.entries());
    let oct = preset("octagon").unwrap();
    let src = SetSource::ModelSet {
        spec: sqrt2_spec(),
        radius: None,
    };
    let a = compute(&src, &oct, &q(10), Mode::Threshold, &seq).unwrap();
    let b = compute(&src, &oct, &q(10), Mode::Threshold, &par).unwrap();
    assert_eq!(a.entries(), b.entries());
}

#[test]
fn density_floor() {
    let p = preset("octagon").unwrap();
    let spec = ModelSetSpec::new(p.ring(), Some(q(10))).unwrap();
    let s = p.sandwich().unwrap();
    let delta = polydist::exactnum::rational::to_f64(&s.delta);
    let k1 = spec.k1().to_f64();
    let src = SetSource::ModelSet { spec, radius: None };
    for n in [8i64, 16, 32] {
        let count = ball_count(&src, &p, &qr(n, 2), Exec::default()).unwrap();
        // Every box of side 2 K1 holds a point, and the box of half side delta N / (2 sqrt2) sits in the ball.
        let side = delta * n as f64 / 2f64.sqrt();
        let floor = (side / (2.0 * k1)).floor().powi(2);
        assert!(count as f64 >= floor, "N = {n}: {count} < {floor}");
        assert!(count as f64 >= 0.5 * (n * n) as f64);
    }
}

#[test]
fn budget_is_enforced() {
    let p = preset("linf").unwrap();
    let tight = DistOptions {
        max_pairs: 100,
        ..opts()
    };
    assert!(matches!(
        compute(&SetSource::Z2, &p, &q(100), Mode::Threshold, &tight),
        Err(polydist::Error::Budget(_))
    ));
    let oct = preset("octagon").unwrap();
    let pts = vec![p.point(&[1], &[2])];
    assert!(distance_set(&pts, &oct, &q(3)).is_err());
}

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trace_census::counting::{
    error_series, geometric_estimate, CountSeries, CounterRegistry, LatticeCounter, NaiveCounter, SweepCounter,
    TraceGeometry,
};
use trace_census::{CubicPoly, Field, FieldElement};

fn field(a: i64, b: i64, c: i64) -> Field {
    Field::new(CubicPoly::new(a, b, c)).unwrap()
}

fn assert_oracle_agrees(k: &Field, max_a: i64) {
    let g = TraceGeometry::new(k).unwrap();
    for a in 1..=max_a {
        let s = SweepCounter.count(&g, a).unwrap();
        let n = NaiveCounter.count(&g, a).unwrap();
        assert_eq!(s, n, "trace {a} in {}", k.poly());
    }
}

#[test]
fn sweep_matches_naive_k257() {
    assert_oracle_agrees(&field(2, -3, -1), 300);
}

#[test]
fn sweep_matches_naive_k49() {
    assert_oracle_agrees(&field(-1, -2, 1), 300);
}

#[test]
fn sweep_matches_naive_with_trace_generator_three() {
    let k = field(0, -3, 1);
    assert_eq!(k.kappa(), 3);
    assert_oracle_agrees(&k, 150);
    let g = TraceGeometry::new(&k).unwrap();
    assert_eq!(SweepCounter.count(&g, 4).unwrap(), 0);
}

#[test]
fn small_traces_k257() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    assert_eq!(SweepCounter.count(&g, 0).unwrap(), 0);
    assert_eq!(SweepCounter.count(&g, -5).unwrap(), 0);
    // the totally positive integers of trace 15 in the reference field
    assert_eq!(SweepCounter.count(&g, 15).unwrap(), NaiveCounter.count(&g, 15).unwrap());
    let n1 = SweepCounter.count(&g, 1).unwrap();
    assert_eq!(n1, NaiveCounter.count(&g, 1).unwrap());
}

#[test]
fn naive_counter_has_a_cost_guard() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    assert!(NaiveCounter.count(&g, 10_001).is_err());
}

#[test]
fn area_matches_estimate() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    for a in [1, 10, 100, 1000] {
        let area = g.triangle(a).unwrap().area();
        let r = a as f64 * a as f64 / (2.0 * 257f64.sqrt());
        assert!(((area - r) / r).abs() < 1e-9, "a = {a}: {area} vs {r}");
        assert_eq!(geometric_estimate(&k, a), r);
    }
}

#[test]
fn triangles_scale_linearly() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    let t1 = g.triangle(1).unwrap();
    for a in [2i64, 10, 97] {
        let ta = g.triangle(a).unwrap();
        for (v, w) in t1.vertices().iter().zip(ta.vertices()) {
            for axis in 0..2 {
                let scaled = v[axis].scale(&num_rational::BigRational::from_integer(a.into()));
                assert!(scaled.contains(w[axis].lo()) || w[axis].contains(scaled.lo()));
                assert!((scaled.mid_f64() - w[axis].mid_f64()).abs() < 1e-12 * a as f64);
            }
        }
    }
}

#[test]
fn no_lattice_point_lies_on_a_boundary() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let a: i64 = rng.random_range(1..=1000);
        let c1: i64 = rng.random_range(-2000..=2000);
        let c2: i64 = rng.random_range(-2000..=2000);
        for i in 0..3 {
            g.positive_at(c1, c2, a, i).unwrap();
        }
    }
    assert!(k.certified_sign(&FieldElement::zero(), 0).is_err());
}

#[test]
fn counts_do_not_depend_on_the_trace_basis() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    let [b1, b2, b3] = *g.betas();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let (p, q) = loop {
            let m: [i128; 4] = std::array::from_fn(|_| rng.random_range(-3..=3));
            if (m[0] * m[3] - m[1] * m[2]).abs() == 1 {
                break ([m[0], m[1]], [m[2], m[3]]);
            }
        };
        let n1 = b1.scale(p[0]).add(&b2.scale(p[1]));
        let n2 = b1.scale(q[0]).add(&b2.scale(q[1]));
        let n3 = b3.add(&b1.scale(rng.random_range(-4..=4))).add(&b2.scale(rng.random_range(-4..=4)));
        let h = TraceGeometry::with_basis(&k, [n1, n2, n3]).unwrap();
        for a in (1..=200).step_by(7) {
            assert_eq!(SweepCounter.count(&g, a).unwrap(), SweepCounter.count(&h, a).unwrap());
            assert_eq!(SweepCounter.count(&h, a).unwrap(), NaiveCounter.count(&h, a).unwrap());
        }
    }
}

#[test]
fn registry_selects_by_name() {
    let r = CounterRegistry::default();
    assert_eq!(r.names(), vec!["sweep", "naive"]);
    assert_eq!(r.get("naive").unwrap().name(), "naive");
    assert!(r.get("fast").is_err());
}

#[test]
fn series_csv_round_trip() {
    let k = field(0, -3, 1);
    let g = TraceGeometry::new(&k).unwrap();
    let s = error_series(&g, &SweepCounter, 40).unwrap();
    assert_eq!(s.len(), 40);
    for a in 1..=40usize {
        if a % 3 != 0 {
            assert_eq!(s.errors()[a - 1], 0.0);
        } else {
            assert_eq!(s.errors()[a - 1], s.counts()[a - 1] as f64 - s.estimates()[a - 1]);
        }
    }
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("a,N_a,r_a,E_a\n1,0,0,0\n"));
    let back = CountSeries::read_csv(&buf[..]).unwrap();
    assert_eq!(back.counts(), s.counts());
    for (x, y) in back.errors().iter().zip(s.errors()) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(CountSeries::read_csv(&b"a,N,r,E\n"[..]).is_err());
}

#[test]
fn series_of_length_one() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    let s = error_series(&g, &SweepCounter, 1).unwrap();
    assert_eq!(s.errors()[0], s.counts()[0] as f64 - 1.0 / (2.0 * 257f64.sqrt()));
}

#[test]
fn cumulative_counts_track_the_area() {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).unwrap();
    let s = error_series(&g, &SweepCounter, 100).unwrap();
    let n: f64 = s.counts().iter().map(|n| *n as f64).sum();
    let r: f64 = s.estimates().iter().sum();
    let envelope: f64 = s.errors().iter().map(|e| e.abs()).sum();
    assert!((n - r).abs() <= envelope + 1e-9);
    assert!(((n - r) / r).abs() < 0.05, "{n} vs {r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sweep_matches_naive_at_random_traces(a in 300i64..3000) {
        let k = field(2, -3, -1);
        let g = TraceGeometry::new(&k).unwrap();
        prop_assert_eq!(SweepCounter.count(&g, a).unwrap(), NaiveCounter.count(&g, a).unwrap());
    }
}

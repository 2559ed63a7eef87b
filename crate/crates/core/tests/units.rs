use std::collections::HashSet;

use proptest::prelude::*;
use trace_census::units::{
    find_units, find_units_auto, good_characters, good_mu_for, regulator_of, totally_positive_gens, SignCharacter,
};
use trace_census::{CubicPoly, Field};

fn field(a: i64, b: i64, c: i64) -> Field {
    Field::new(CubicPoly::new(a, b, c)).unwrap()
}

#[test]
fn k257_regulator_matches_fixture() {
    let k = field(2, -3, -1);
    let us = find_units_auto(&k).unwrap();
    assert!((us.regulator() - 1.9745938707807071).abs() < 1e-12, "{}", us.regulator());
    assert!(us.regulator_error() < 1e-12);
}

#[test]
fn regulators_of_small_fields() {
    for ((a, b, c), r) in [((-1, -2, 1), 0.525454682), ((0, -3, 1), 0.849287)] {
        let k = field(a, b, c);
        let us = find_units_auto(&k).unwrap();
        eprintln!("{a} {b} {c}: R = {}", us.regulator());
        assert!((us.regulator() - r).abs() < 1e-5, "{}", us.regulator());
    }
}

#[test]
fn good_characters_of_reference_fields() {
    let k = field(2, -3, -1);
    let us = find_units_auto(&k).unwrap();
    let good = good_characters(&us);
    let nontrivial: Vec<String> = good.iter().filter(|v| !v.is_trivial()).map(|v| v.to_string()).collect();
    assert_eq!(nontrivial, vec!["011".to_string()]);

    let k = field(-1, -2, 1);
    let us = find_units_auto(&k).unwrap();
    assert!(good_characters(&us).iter().all(|v| v.is_trivial()));
}

#[test]
fn squared_unit_doubles_regulator() {
    let k = field(2, -3, -1);
    let us = find_units_auto(&k).unwrap();
    let [e1, e2] = *us.fundamental();
    let r = regulator_of(&k, &[k.mul(&e1, &e1), e2]).unwrap();
    assert!((r - 2.0 * us.regulator()).abs() < 1e-10);
}

#[test]
fn totally_positive_units_are_generated() {
    let k = field(2, -3, -1);
    let us = find_units(&k, 6.0).unwrap();
    let tp = totally_positive_gens(&k, &us).unwrap();
    for u in tp.units() {
        assert!(k.is_totally_positive(u).unwrap());
    }
    let e = tp.exponents();
    for w in us.found_units() {
        for w in [*w, w.neg()] {
            if !k.is_totally_positive(&w).unwrap() {
                continue;
            }
            let (sign, a, b) = us.exponents_of(&k, &w).unwrap();
            // (a, b) must lie in the lattice spanned by the columns of e
            let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
            let x = a * e[1][1] - b * e[0][1];
            let y = -a * e[1][0] + b * e[0][0];
            assert!(x % det == 0 && y % det == 0, "{w} = {sign}·ε^({a},{b}) outside U");
        }
    }
}

#[test]
fn dual_lattice_pairs_to_identity() {
    for (a, b, c) in [(2, -3, -1), (-1, -2, 1), (0, -3, 1)] {
        let k = field(a, b, c);
        let us = find_units_auto(&k).unwrap();
        let tp = totally_positive_gens(&k, &us).unwrap();
        for l in 0..2 {
            for m in 0..2 {
                let d = tp.dual()[l][0] * tp.lambda()[m][0] + tp.dual()[l][1] * tp.lambda()[m][1];
                let want = if l == m { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn good_mu_have_distinct_components() {
    for (a, b, c) in [(2, -3, -1), (-1, -2, 1), (0, -3, 1)] {
        let k = field(a, b, c);
        let us = find_units_auto(&k).unwrap();
        let tp = totally_positive_gens(&k, &us).unwrap();
        for bits in 0..8 {
            let v = SignCharacter::from_bits(bits);
            for mu in good_mu_for(&v, &tp, &us, 20.0).unwrap() {
                if mu.coords == [0, 0] {
                    assert!(v.is_good(&us));
                    continue;
                }
                let m = mu.components();
                assert!((m[0] - m[1]).abs() > 1e-9 && (m[1] - m[2]).abs() > 1e-9 && (m[0] - m[2]).abs() > 1e-9);
            }
        }
    }
}

#[test]
fn good_set_is_a_subgroup() {
    let k = field(2, -3, -1);
    let us = find_units_auto(&k).unwrap();
    let tp = totally_positive_gens(&k, &us).unwrap();
    let radius = 8.0;
    let mut good = HashSet::new();
    for bits in 0..8 {
        let v = SignCharacter::from_bits(bits);
        for mu in good_mu_for(&v, &tp, &us, radius).unwrap() {
            good.insert((mu.coords, v));
        }
    }
    assert!(good.len() > 10);
    assert!(good.contains(&([0, 0], SignCharacter::TRIVIAL)));
    for (c1, v1) in &good {
        for (c2, v2) in &good {
            let sum = [c1[0] + c2[0], c1[1] + c2[1]];
            let v = v1.xor(v2);
            let mu = [
                sum[0] as f64 * tp.dual()[0][0] + sum[1] as f64 * tp.dual()[1][0],
                sum[0] as f64 * tp.dual()[0][1] + sum[1] as f64 * tp.dual()[1][1],
            ];
            if mu[0].hypot(mu[1]) <= radius - 1e-9 {
                assert!(good.contains(&(sum, v)), "{sum:?} {v} missing");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regulator_is_unimodular_invariant(a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, d in -3i64..=3) {
        prop_assume!((a * d - b * c).abs() == 1);
        let k = field(2, -3, -1);
        let us = find_units_auto(&k).unwrap();
        let [e1, e2] = *us.fundamental();
        let prod = |x: i64, y: i64| k.mul(&k.unit_pow(&e1, x).unwrap(), &k.unit_pow(&e2, y).unwrap());
        let r = regulator_of(&k, &[prod(a, b), prod(c, d)]).unwrap();
        prop_assert!((r - us.regulator()).abs() < 1e-10);
    }

    #[test]
    fn signature_is_a_homomorphism(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4, d in -4i64..=4, s in any::<bool>()) {
        let k = field(2, -3, -1);
        let us = find_units_auto(&k).unwrap();
        let [e1, e2] = *us.fundamental();
        let prod = |x: i64, y: i64| k.mul(&k.unit_pow(&e1, x).unwrap(), &k.unit_pow(&e2, y).unwrap());
        let (u, w) = (prod(a, b), prod(c, d));
        let w = if s { w.neg() } else { w };
        let lhs = k.signature(&k.mul(&u, &w)).unwrap();
        prop_assert_eq!(lhs, k.signature(&u).unwrap() ^ k.signature(&w).unwrap());
        let sig = us.signatures();
        let expect = (if a & 1 == 1 { sig[1] } else { 0 }) ^ (if b & 1 == 1 { sig[2] } else { 0 });
        prop_assert_eq!(k.signature(&u).unwrap(), expect);
    }
}

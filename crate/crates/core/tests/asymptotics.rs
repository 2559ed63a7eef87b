use proptest::prelude::*;
use trace_census::asymptotics::{
    compare_report, fit_coefficients, log_grid, main_coefficient, weighted_sum, write_report, AsymptoticsError,
    WeightedSumTable,
};
use trace_census::lseries::{l_value, LValue};
use trace_census::units::{find_units_auto, SignCharacter};
use trace_census::{CubicPoly, Field};

#[test]
fn exact_model_is_recovered() {
    let xs = log_grid(100, 100_000, 20).unwrap();
    let values: Vec<f64> = xs.iter().map(|x| 7.0 * (*x as f64).ln().powi(4)).collect();
    let table = WeightedSumTable {
        k: 3,
        normalized: values.iter().zip(&xs).map(|(v, x)| v / (*x as f64).ln().powi(4)).collect(),
        xs,
        values,
        below_theorem_range: false,
    };
    let fit = fit_coefficients(&table, 2).unwrap();
    assert!((fit.coefficients[0] - 7.0).abs() < 1e-9);
    assert!(fit.coefficients[1].abs() < 1e-7 && fit.coefficients[2].abs() < 1e-6);
    assert!(fit.residual_norm < 1e-9);
    assert!(!fit.ill_conditioned);
}

#[test]
fn fit_preconditions() {
    let table = WeightedSumTable {
        k: 3,
        xs: vec![100, 200, 400],
        values: vec![1.0, 2.0, 3.0],
        normalized: vec![0.0; 3],
        below_theorem_range: false,
    };
    assert!(matches!(fit_coefficients(&table, 2), Err(AsymptoticsError::TooFewPoints { .. })));
    assert!(matches!(fit_coefficients(&table, 0), Err(AsymptoticsError::NarrowGrid { .. })));
}

#[test]
fn small_weights_are_flagged() {
    let e = vec![0.5; 200];
    let t = WeightedSumTable::new(&e, &[10, 100, 200], 2).unwrap();
    assert!(t.below_theorem_range);
    assert!(!WeightedSumTable::new(&e, &[10], 3).unwrap().below_theorem_range);
}

#[test]
fn toy_profile_converges_to_analytic_coefficient() {
    // E_n = c/n gives S(X) = c·log^{k+1}X/(k+1) + lower order terms
    let c = 0.8;
    let k = 3;
    let e: Vec<f64> = (1..=1_000_000).map(|n| c / n as f64).collect();
    let exact = c / (k as f64 + 1.0);
    let mut last = f64::MAX;
    for xmax in [10_000u64, 100_000, 1_000_000] {
        let xs = log_grid(100, xmax, 20).unwrap();
        let t = WeightedSumTable::new(&e, &xs, k).unwrap();
        let fit = fit_coefficients(&t, 2).unwrap();
        let err = (fit.coefficients[0] - exact).abs();
        assert!(err < last, "error grew to {err} at {xmax}");
        last = err;
    }
    assert!(last / exact < 1e-3, "{last}");
}

#[test]
fn coefficient_scales_with_weight() {
    let k = Field::new(CubicPoly::new(2, -3, -1)).unwrap();
    let us = find_units_auto(&k).unwrap();
    let v: SignCharacter = "011".parse().unwrap();
    let lv = l_value(&k, &us, &v, 5000).unwrap();
    let c3 = main_coefficient(257, &us, 3, &[lv]).unwrap();
    let c5 = main_coefficient(257, &us, 5, &[lv]).unwrap();
    assert!((c3.value / c5.value - 6.0 / 4.0).abs() < 1e-12);
    assert!(((c3.value - 0.041983745) / 0.041983745).abs() < 1e-3);
    let propagated = c3.value / us.regulator() * us.regulator_error() + c3.prefactor() * lv.error_estimate;
    assert!(c3.error >= propagated);
    assert!(main_coefficient(257, &us, 3, &[]).is_err());
    assert!(main_coefficient(257, &us, 3, &[lv, lv]).is_err());
}

#[test]
fn empty_good_set_gives_zero() {
    let k = Field::new(CubicPoly::new(-1, -2, 1)).unwrap();
    let us = find_units_auto(&k).unwrap();
    let c = main_coefficient(49, &us, 3, &[]).unwrap();
    assert_eq!(c.value, 0.0);
    let bogus = LValue {
        character: "011".parse().unwrap(),
        value: 1.0,
        error_estimate: 0.0,
        cutoff: 1,
        smoothed: [1.0, 1.0],
    };
    assert!(main_coefficient(49, &us, 3, &[bogus]).is_err());

    let e = vec![0.25; 1000];
    let t = WeightedSumTable::new(&e, &log_grid(100, 1000, 20).unwrap(), 3).unwrap();
    let rows = compare_report(&t, c.value, None);
    assert!(rows.iter().all(|r| r.predicted_leading == 0.0 && r.predicted_three_term.is_none()));
}

#[test]
fn report_is_deterministic() {
    let e: Vec<f64> = (1..=5000).map(|n| ((n * 7919) % 13) as f64 / 13.0 - 0.5).collect();
    let t = WeightedSumTable::new(&e, &log_grid(100, 5000, 20).unwrap(), 3).unwrap();
    let render = || {
        let mut buf = Vec::new();
        write_report(&mut buf, 3, &compare_report(&t, 0.04, Some([-0.08, -0.36]))).unwrap();
        buf
    };
    let a = render();
    assert_eq!(a, render());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("X,S(X),S/log^4X,predicted_leading,predicted_3term\n100,"));
}

proptest! {
    #[test]
    fn weighted_sum_is_linear(
        e1 in prop::collection::vec(-50.0f64..50.0, 1..400),
        seed in any::<u64>(),
        k in 0u32..6,
    ) {
        let e2: Vec<f64> = e1.iter().enumerate().map(|(i, _)| (((seed >> (i % 60)) & 0xff) as f64 - 128.0) / 7.0).collect();
        let sum: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| a + b).collect();
        let x = e1.len() as u64;
        let (s1, s2, s) = (weighted_sum(&e1, x, k).unwrap(), weighted_sum(&e2, x, k).unwrap(), weighted_sum(&sum, x, k).unwrap());
        let scale: f64 = e1.iter().zip(&e2).enumerate()
            .map(|(i, (a, b))| (a.abs() + b.abs()) * ((x as f64) / (i + 1) as f64).ln().powi(k as i32))
            .sum();
        prop_assert!((s - s1 - s2).abs() <= 1e-9 * scale.max(1e-300) + 1e-12);
    }
}

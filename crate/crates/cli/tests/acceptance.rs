//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any fails.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trace_census::asymptotics::{fit_coefficients, log_grid, main_coefficient, weighted_sum, WeightedSumTable};
use trace_census::counting::{error_series, CounterRegistry, TraceGeometry};
use trace_census::lseries::l_value;
use trace_census::units::{find_units_auto, good_characters, good_mu_for, regulator_of, totally_positive_gens, SignCharacter};
use trace_census::{CubicPoly, Field, FieldElement};
use trace_census_cli::{run, Cli};

/// Regulator of K_257 from mpmath at 40 digits, using the units
/// -3 + 2α + α² and -1 + α and the two largest real roots.
const REGULATOR_257: f64 = 1.974593870780707163855999;
const LEADING_257: f64 = 0.041983745;
/// Reference three-term curve C + c1/log X + c2/log² X.
const THREE_TERM: [f64; 3] = [0.041983745, -0.07792862, -0.35634540];

type Outcome = Result<String, String>;

fn field(a: i64, b: i64, c: i64) -> Field {
    Field::new(CubicPoly::new(a, b, c)).unwrap()
}

fn fields_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fields")
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn field_bootstrap() -> Outcome {
    let path = fields_dir().join("k257.field");
    let cli = Cli::try_parse_from(["trace-census", "--field", path.to_str().unwrap(), "info"]).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    run(cli, &mut buf).map_err(|e| format!("{e:#}"))?;
    let text = String::from_utf8(buf).unwrap();
    let traces: Vec<&str> = text.lines().filter_map(|l| l.split("Tr = ").nth(1)).collect();
    let k = field(2, -3, -1);
    let tb = k.trace_basis();
    let exact: Vec<i128> = (0..3).map(|j| k.trace(&tb.beta(j))).collect();
    check(
        text.contains("D = 257, κ = 1") && traces == ["0", "0", "1"] && exact == [0, 0, 1],
        format!("D = {}, κ = {}, traces {:?}", k.discriminant(), k.kappa(), exact),
    )
}

fn good_pair_census() -> Outcome {
    let count = |k: &Field| -> Result<Vec<SignCharacter>, String> {
        let us = find_units_auto(k).map_err(|e| e.to_string())?;
        Ok(good_characters(&us).into_iter().filter(|v| !v.is_trivial()).collect())
    };
    let g257 = count(&field(2, -3, -1))?;
    let g49 = count(&field(-1, -2, 1))?;
    check(
        g257.len() == 1 && g49.is_empty(),
        format!("K_257: {} nontrivial good ({:?}), K_49: {}", g257.len(), g257.iter().map(|v| v.to_string()).collect::<Vec<_>>(), g49.len()),
    )
}

fn oracle_equivalence() -> Outcome {
    let registry = CounterRegistry::default();
    let (sweep, naive) = (registry.get("sweep").unwrap(), registry.get("naive").unwrap());
    for (name, k) in [("K_257", field(2, -3, -1)), ("K_49", field(-1, -2, 1))] {
        let g = TraceGeometry::new(&k).map_err(|e| e.to_string())?;
        for a in 1..=300 {
            let (s, n) = (sweep.count(&g, a).unwrap(), naive.count(&g, a).unwrap());
            if s != n {
                return Err(format!("{name}, a = {a}: sweep {s} vs naive {n}"));
            }
        }
    }
    Ok("sweep = naive for a <= 300 on K_257 and K_49".into())
}

fn geometry() -> Outcome {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for a in [1i64, 10, 100, 1000] {
        let area = g.triangle(a).map_err(|e| e.to_string())?.area();
        let expect = (a * a) as f64 / (2.0 * 257f64.sqrt());
        worst = worst.max(((area - expect) / expect).abs());
    }
    check(worst < 1e-9, format!("max relative area deviation {worst:.2e}"))
}

fn main_coefficient_check() -> Outcome {
    let k = field(2, -3, -1);
    let us = find_units_auto(&k).map_err(|e| e.to_string())?;
    let dr = (us.regulator() - REGULATOR_257).abs();
    if dr > 1e-12 {
        return Err(format!("regulator {} differs from fixture by {dr:.2e}", us.regulator()));
    }
    let v: SignCharacter = "011".parse().unwrap();
    let lv = l_value(&k, &us, &v, 100_000).map_err(|e| e.to_string())?;
    let c = main_coefficient(k.discriminant(), &us, 3, &[lv.clone()]).map_err(|e| e.to_string())?;
    let rel = ((c.value - LEADING_257) / LEADING_257).abs();
    check(
        rel < 1e-3,
        format!("R = {:.13}, L(1,v) = {:.12}, C = {:.10} (relative deviation {rel:.2e})", us.regulator(), lv.value, c.value),
    )
}

fn reproduction() -> Outcome {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).map_err(|e| e.to_string())?;
    let registry = CounterRegistry::default();
    let xmax = 100_000u64;
    let series = error_series(&g, registry.get("sweep").unwrap(), xmax as usize).map_err(|e| e.to_string())?;
    let s = weighted_sum(series.errors(), xmax, 3).unwrap();
    let l = (xmax as f64).ln();
    let normalized = s / l.powi(4);
    let three = THREE_TERM[0] + THREE_TERM[1] / l + THREE_TERM[2] / (l * l);
    let rel_norm = ((normalized - three) / three).abs();
    let xs = log_grid(1000, xmax, 20).unwrap();
    let table = WeightedSumTable::new(series.errors(), &xs, 3).unwrap();
    let fit = fit_coefficients(&table, 2).map_err(|e| e.to_string())?;
    let rel_fit = ((fit.coefficients[0] - LEADING_257) / LEADING_257).abs();
    check(
        rel_norm < 0.05 && rel_fit < 0.10,
        format!(
            "S/log^4X at 1e5 = {normalized:.7} vs three-term {three:.7} ({:.2}%); fitted leading {:.7} ({:.2}%)",
            100.0 * rel_norm,
            fit.coefficients[0],
            100.0 * rel_fit
        ),
    )
}

fn property_suites() -> Outcome {
    let k = field(2, -3, -1);
    let g = TraceGeometry::new(&k).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    for _ in 0..10_000 {
        let a: i64 = rng.random_range(1..=1000);
        let (c1, c2): (i64, i64) = (rng.random_range(-2000..=2000), rng.random_range(-2000..=2000));
        for i in 0..3 {
            g.positive_at(c1, c2, a, i).map_err(|e| format!("probe ({c1}, {c2}, {a}): {e}"))?;
        }
    }

    let us = find_units_auto(&k).map_err(|e| e.to_string())?;
    let [e1, e2] = *us.fundamental();
    let prod = |x: i64, y: i64| k.mul(&k.unit_pow(&e1, x).unwrap(), &k.unit_pow(&e2, y).unwrap());
    for _ in 0..200 {
        let m: [i64; 4] = std::array::from_fn(|_| rng.random_range(-4..=4));
        let (u, w) = (prod(m[0], m[1]), prod(m[2], m[3]));
        let w: FieldElement = if rng.random() { w.neg() } else { w };
        let lhs = k.signature(&k.mul(&u, &w)).unwrap();
        if lhs != k.signature(&u).unwrap() ^ k.signature(&w).unwrap() {
            return Err(format!("signature is not multiplicative at {m:?}"));
        }
        if (m[0] * m[3] - m[1] * m[2]).abs() == 1 {
            let r = regulator_of(&k, &[u, prod(m[2], m[3])]).unwrap();
            if (r - us.regulator()).abs() > 1e-10 {
                return Err(format!("regulator changed under {m:?}: {r}"));
            }
        }
    }
    let r = regulator_of(&k, &[prod(2, 1), prod(1, 1)]).unwrap();
    if (r - us.regulator()).abs() > 1e-10 {
        return Err(format!("regulator changed under a unimodular change: {r}"));
    }

    let tp = totally_positive_gens(&k, &us).unwrap();
    let radius = 6.0;
    let mut good = HashSet::new();
    for bits in 0..8 {
        let v = SignCharacter::from_bits(bits);
        for mu in good_mu_for(&v, &tp, &us, radius).unwrap() {
            good.insert((mu.coords, v));
        }
    }
    for (c1, v1) in &good {
        for (c2, v2) in &good {
            let s = [c1[0] + c2[0], c1[1] + c2[1]];
            let d = tp.dual();
            let mu = [
                s[0] as f64 * d[0][0] + s[1] as f64 * d[1][0],
                s[0] as f64 * d[0][1] + s[1] as f64 * d[1][1],
            ];
            if mu[0].hypot(mu[1]) <= radius - 1e-9 && !good.contains(&(s, v1.xor(v2))) {
                return Err(format!("good set not closed at {s:?}"));
            }
        }
    }

    let v: SignCharacter = "011".parse().unwrap();
    let mut stability = Vec::new();
    for b in [10_000u64, 20_000, 40_000] {
        let lv = l_value(&k, &us, &v, b).map_err(|e| e.to_string())?;
        let d = (lv.smoothed[0] - lv.smoothed[1]).abs() * b as f64;
        if d > 1.0 {
            return Err(format!("|value(B) - value(2B)|·B = {d:.3e} at B = {b}"));
        }
        stability.push(format!("{d:.1e}"));
    }

    for _ in 0..200 {
        let n = rng.random_range(1..500usize);
        let kk = rng.random_range(0..6u32);
        let e1: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let e2: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let sum: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| a + b).collect();
        let x = n as u64;
        let (s1, s2, s) = (
            weighted_sum(&e1, x, kk).unwrap(),
            weighted_sum(&e2, x, kk).unwrap(),
            weighted_sum(&sum, x, kk).unwrap(),
        );
        let scale: f64 = (1..=n)
            .map(|i| (e1[i - 1].abs() + e2[i - 1].abs()) * (x as f64 / i as f64).ln().powi(kk as i32))
            .sum();
        if (s - s1 - s2).abs() > 1e-9 * scale.max(1.0) {
            return Err(format!("weighted_sum not linear at n = {n}, k = {kk}"));
        }
    }

    Ok(format!(
        "10^4 probes certified; homomorphism, closure ({} pairs), unimodular invariance, linearity hold; |ΔL|·B = {}",
        good.len(),
        stability.join(", ")
    ))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 7] = [
        ("field bootstrap", Duration::from_secs(1), field_bootstrap),
        ("good-pair census", Duration::from_secs(10), good_pair_census),
        ("oracle equivalence", Duration::from_secs(120), oracle_equivalence),
        ("geometry", Duration::from_secs(60), geometry),
        ("main coefficient", Duration::from_secs(600), main_coefficient_check),
        ("desk-scale reproduction", Duration::from_secs(1800), reproduction),
        ("property suites", Duration::from_secs(600), property_suites),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {limit:?}")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {detail} [{:.2}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

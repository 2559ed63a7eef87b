use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trace_census::asymptotics::{
    compare_report, fit_coefficients, log_grid, main_coefficient, write_report, Fit, MainCoefficient,
    WeightedSumTable, MIN_THEOREM_K,
};
use trace_census::counting::{error_series, geometric_estimate, CountSeries, CounterRegistry, TraceGeometry};
use trace_census::field::DEFAULT_ROOT_PRECISION;
use trace_census::format::sig12;
use trace_census::lseries::{l_value, LValue};
use trace_census::units::{
    find_units, find_units_auto, good_characters, good_mu_for, totally_positive_gens, SignCharacter, UnitSystem,
};
use trace_census::{Field, FieldSpec};

use crate::config::{parse_grid, parse_pair, PipelineConfig};
use crate::{Cli, Command, PRECISION_ENV};

fn stage<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().with_context(|| format!("stage {name}"))
}

/// Root precision from the environment, or the library default.
pub fn root_precision() -> Result<u32> {
    match std::env::var(PRECISION_ENV) {
        Ok(s) => {
            let p: u32 = s
                .trim()
                .parse()
                .with_context(|| format!("{PRECISION_ENV} must be a number of bits, got {s:?}"))?;
            if p < 64 {
                bail!("{PRECISION_ENV} must be at least 64 bits, got {p}");
            }
            Ok(p)
        }
        Err(_) => Ok(DEFAULT_ROOT_PRECISION),
    }
}

pub fn load_field(path: Option<&Path>) -> Result<Field> {
    stage("field", || {
        let path = path.ok_or_else(|| anyhow!("no field given; pass --field <file>"))?;
        let spec = FieldSpec::from_path(path)?;
        Ok(spec.build(root_precision()?)?)
    })
}

fn load_units(field: &Field) -> Result<UnitSystem> {
    stage("units", || Ok(find_units_auto(field)?))
}

pub fn dispatch(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    let field_path = cli.field.as_deref();
    match &cli.command {
        Command::Info => info(&load_field(field_path)?, out),
        Command::Units { bound } => units(&load_field(field_path)?, *bound, out),
        Command::GoodPairs { radius } => good_pairs(&load_field(field_path)?, *radius, out),
        Command::Count { trace, counter } => count(&load_field(field_path)?, *trace, counter, out),
        Command::Series { xmax, out: path, counter } => {
            let field = load_field(field_path)?;
            let series = compute_series(&field, *xmax, counter)?;
            match path {
                Some(p) => write_series(&series, p),
                None => stage("series", || Ok(series.write_csv(&mut *out)?)),
            }
        }
        Command::Lvalue { character, cutoff } => {
            let field = load_field(field_path)?;
            let us = load_units(&field)?;
            let lv = stage("lvalue", || {
                let v: SignCharacter = character.parse().map_err(|e: String| anyhow!(e))?;
                Ok(l_value(&field, &us, &v, *cutoff)?)
            })?;
            writeln!(out, "{lv}")?;
            Ok(())
        }
        Command::Coeff { k, cutoff } => {
            let field = load_field(field_path)?;
            let us = load_units(&field)?;
            let c = coefficient(&field, &us, *k, *cutoff)?;
            write_coefficient(&c, out)
        }
        Command::Fit {
            degree,
            xmin,
            xmax,
            k,
            grid,
            series,
        } => {
            let field = load_field(field_path)?;
            let series = obtain_series(&field, series.as_deref(), *xmax)?;
            let fit = stage("fit", || {
                let xs = log_grid(*xmin, *xmax, parse_grid(grid)?)?;
                let table = WeightedSumTable::new(series.errors(), &xs, *k)?;
                if table.below_theorem_range {
                    writeln!(out, "warning: k = {k} is below {MIN_THEOREM_K}, outside the range of the asymptotic formula")?;
                }
                Ok(fit_coefficients(&table, *degree)?)
            })?;
            write_fit(&fit, *k, out)
        }
        Command::Report {
            grid,
            xmin,
            xmax,
            k,
            cutoff,
            sub_leading,
            series,
            out: path,
        } => {
            let field = load_field(field_path)?;
            let us = load_units(&field)?;
            let c = coefficient(&field, &us, *k, *cutoff)?;
            let series = obtain_series(&field, series.as_deref(), *xmax)?;
            stage("report", || {
                let sub = sub_leading.as_deref().map(parse_pair).transpose()?;
                let xs = log_grid(*xmin, *xmax, parse_grid(grid)?)?;
                let table = WeightedSumTable::new(series.errors(), &xs, *k)?;
                let rows = compare_report(&table, c.value, sub);
                match path {
                    Some(p) => {
                        let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
                        let mut w = BufWriter::new(f);
                        write_report(&mut w, *k, &rows)?;
                        w.flush()?;
                    }
                    None => write_report(&mut *out, *k, &rows)?,
                }
                Ok(())
            })
        }
        Command::Pipeline {
            config,
            xmax,
            k,
            cutoff,
            out: out_dir,
        } => {
            let mut cfg = stage("config", || match config {
                Some(p) => PipelineConfig::from_path(p),
                None => Ok(PipelineConfig::default()),
            })?;
            if let Some(p) = field_path {
                cfg.field = Some(p.to_path_buf());
            }
            if let Some(x) = xmax {
                cfg.xmax = *x;
            }
            if let Some(k) = k {
                cfg.k = *k;
            }
            if let Some(b) = cutoff {
                cfg.cutoff = *b;
            }
            if let Some(o) = out_dir {
                cfg.out = o.clone();
            }
            pipeline(&cfg, out)
        }
        Command::Verify { max_trace, probes } => verify(&load_field(field_path)?, *max_trace, *probes, cli.seed, out),
    }
}

pub fn info(field: &Field, out: &mut dyn Write) -> Result<()> {
    let tb = field.trace_basis();
    writeln!(out, "polynomial: {}", field.poly())?;
    writeln!(out, "D = {}, κ = {}", field.discriminant(), field.kappa())?;
    writeln!(out, "trace basis (integral-basis coordinates):")?;
    for j in 0..3 {
        let b = tb.beta(j);
        writeln!(out, "  β{} = {}  Tr = {}", j + 1, b, field.trace(&b))?;
    }
    let e = field.embed_f64(&field.alpha());
    writeln!(out, "embeddings of α: {}, {}, {}", sig12(e[0]), sig12(e[1]), sig12(e[2]))?;
    Ok(())
}

fn units(field: &Field, bound: Option<f64>, out: &mut dyn Write) -> Result<()> {
    let us = stage("units", || {
        Ok(match bound {
            Some(b) => find_units(field, b)?,
            None => find_units_auto(field)?,
        })
    })?;
    for (l, e) in us.fundamental().iter().enumerate() {
        let logs = us.logs()[l];
        writeln!(
            out,
            "ε{} = {}  log|ε^(i)| = {}, {}, {}",
            l + 1,
            e,
            sig12(logs[0]),
            sig12(logs[1]),
            sig12(logs[2])
        )?;
    }
    writeln!(out, "regulator R = {} ± {:.1e}", sig12(us.regulator()), us.regulator_error())?;
    writeln!(out, "signatures (1 = negative):")?;
    for (name, row) in ["-1", "ε1", "ε2"].iter().zip(us.signature_matrix()) {
        writeln!(out, "  {name:>3}: {} {} {}", row[0], row[1], row[2])?;
    }
    Ok(())
}

fn good_pairs(field: &Field, radius: f64, out: &mut dyn Write) -> Result<()> {
    let us = load_units(field)?;
    stage("good-pairs", || {
        let tp = totally_positive_gens(field, &us)?;
        let good = good_characters(&us);
        let names: Vec<String> = good.iter().map(|v| v.to_string()).collect();
        writeln!(out, "good characters (μ = 0): {}", names.join(", "))?;
        let nontrivial: Vec<String> = good.iter().filter(|v| !v.is_trivial()).map(|v| v.to_string()).collect();
        if nontrivial.is_empty() {
            writeln!(out, "good nontrivial characters: none")?;
        } else {
            writeln!(out, "good nontrivial characters: {}", nontrivial.join(", "))?;
        }
        writeln!(out, "[O_K^x : U] = {}", tp.index())?;
        for bits in 0..8u8 {
            let v = SignCharacter::from_bits(bits);
            let mus = good_mu_for(&v, &tp, &us, radius)?;
            if mus.is_empty() {
                continue;
            }
            writeln!(out, "v = {v}: {} good μ with |μ| <= {radius}", mus.len())?;
            for mu in mus.iter().take(6) {
                writeln!(
                    out,
                    "  μ = {}·μ1* + {}·μ2* = ({}, {})",
                    mu.coords[0],
                    mu.coords[1],
                    sig12(mu.mu[0]),
                    sig12(mu.mu[1])
                )?;
            }
        }
        Ok(())
    })
}

fn count(field: &Field, a: i64, counter: &str, out: &mut dyn Write) -> Result<()> {
    stage("count", || {
        let registry = CounterRegistry::default();
        let c = registry.get(counter)?;
        let geom = TraceGeometry::new(field)?;
        let n = c.count(&geom, a)?;
        let r = if a % field.kappa() as i64 == 0 {
            geometric_estimate(field, a)
        } else {
            0.0
        };
        writeln!(out, "N_{a} = {n}  (r_{a} = {}, E_{a} = {})", sig12(r), sig12(n as f64 - r))?;
        Ok(())
    })
}

pub fn compute_series(field: &Field, xmax: usize, counter: &str) -> Result<CountSeries> {
    stage("series", || {
        if xmax == 0 {
            bail!("xmax must be positive");
        }
        let registry = CounterRegistry::default();
        let geom = TraceGeometry::new(field)?;
        Ok(error_series(&geom, registry.get(counter)?, xmax)?)
    })
}

fn write_series(series: &CountSeries, path: &Path) -> Result<()> {
    stage("series", || {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        series.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    })
}

fn obtain_series(field: &Field, path: Option<&Path>, xmax: u64) -> Result<CountSeries> {
    match path {
        Some(p) => stage("series", || {
            let f = File::open(p).with_context(|| format!("file not found: {}", p.display()))?;
            let s = CountSeries::read_csv(BufReader::new(f))?;
            if (s.len() as u64) < xmax {
                bail!("{} covers a <= {}, need {xmax}", p.display(), s.len());
            }
            Ok(s)
        }),
        None => compute_series(field, xmax as usize, "sweep"),
    }
}

/// L-values of every good nontrivial character and the resulting coefficient.
pub fn coefficient(field: &Field, us: &UnitSystem, k: u32, cutoff: u64) -> Result<MainCoefficient> {
    let lvals: Vec<LValue> = stage("lvalue", || {
        good_characters(us)
            .iter()
            .filter(|v| !v.is_trivial())
            .map(|v| Ok(l_value(field, us, v, cutoff)?))
            .collect()
    })?;
    stage("coeff", || Ok(main_coefficient(field.discriminant(), us, k, &lvals)?))
}

fn write_coefficient(c: &MainCoefficient, out: &mut dyn Write) -> Result<()> {
    for lv in &c.l_values {
        writeln!(out, "v = {}: {lv}", lv.character)?;
    }
    if c.k < MIN_THEOREM_K {
        writeln!(out, "warning: k = {} is below {MIN_THEOREM_K}", c.k)?;
    }
    writeln!(
        out,
        "C = 3√D/(8π²(k+1)R)·ΣL(1,v) = {} ± {:.1e}  (k = {}, D = {}, R = {})",
        sig12(c.value),
        c.error,
        c.k,
        c.discriminant,
        sig12(c.regulator)
    )?;
    Ok(())
}

fn write_fit(fit: &Fit, k: u32, out: &mut dyn Write) -> Result<()> {
    for (j, c) in fit.coefficients.iter().enumerate() {
        writeln!(out, "log^{} X: {}", k as usize + 1 - j, sig12(*c))?;
    }
    writeln!(out, "residual norm: {}", sig12(fit.residual_norm))?;
    if fit.ill_conditioned {
        writeln!(out, "warning: ill-conditioned design (condition number {:.3e})", fit.condition)?;
    }
    Ok(())
}

/// Runs every stage and writes `series.csv`, `report.csv` and `summary.txt`
/// into the output directory.
pub fn pipeline(cfg: &PipelineConfig, out: &mut dyn Write) -> Result<()> {
    let field = load_field(cfg.field.as_deref())?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("stage output: creating {}", cfg.out.display()))?;
    let us = load_units(&field)?;
    let good = stage("good-pairs", || {
        totally_positive_gens(&field, &us)?;
        Ok(good_characters(&us)
            .into_iter()
            .filter(|v| !v.is_trivial())
            .collect::<Vec<_>>())
    })?;
    let series = compute_series(&field, cfg.xmax, &cfg.counter)?;
    write_series(&series, &cfg.out.join("series.csv"))?;
    let coeff = coefficient(&field, &us, cfg.k, cfg.cutoff)?;

    let mut summary = Vec::new();
    let s = &mut summary;
    writeln!(s, "field: {}", field.poly())?;
    writeln!(s, "D = {}, κ = {}", field.discriminant(), field.kappa())?;
    writeln!(s, "regulator R = {} ± {:.1e}", sig12(us.regulator()), us.regulator_error())?;
    writeln!(s, "series: X = {}, counter {}", cfg.xmax, cfg.counter)?;
    if good.is_empty() {
        writeln!(s, "good nontrivial characters: none; predicted leading coefficient 0")?;
    } else {
        let names: Vec<String> = good.iter().map(|v| v.to_string()).collect();
        writeln!(s, "good nontrivial characters: {}", names.join(", "))?;
        for lv in &coeff.l_values {
            writeln!(s, "v = {}: {lv}", lv.character)?;
        }
        writeln!(
            s,
            "predicted leading coefficient (k = {}): {} ± {:.1e}",
            cfg.k,
            sig12(coeff.value),
            coeff.error
        )?;
    }

    stage("report", || {
        let xmax = cfg.xmax as u64;
        let mut xs = log_grid(cfg.fit_xmin.min(xmax), xmax, cfg.per_decade)?;
        if xs.last() != Some(&xmax) {
            xs.push(xmax);
        }
        let table = WeightedSumTable::new(series.errors(), &xs, cfg.k)?;
        let rows = compare_report(&table, coeff.value, cfg.sub_leading);
        let f = File::create(cfg.out.join("report.csv")).context("creating report.csv")?;
        let mut w = BufWriter::new(f);
        write_report(&mut w, cfg.k, &rows)?;
        w.flush()?;

        if table.below_theorem_range {
            writeln!(s, "warning: k = {} is below {MIN_THEOREM_K}", cfg.k)?;
        }
        if let (Some(x), Some(q)) = (table.xs.last(), table.normalized.last()) {
            writeln!(s, "S(X)/log^{}X at X = {x}: {}", cfg.k + 1, sig12(*q))?;
        }
        match fit_coefficients(&table.window(cfg.fit_xmin, xmax), cfg.degree) {
            Ok(fit) => {
                let coeffs: Vec<String> = fit.coefficients.iter().map(|c| sig12(*c)).collect();
                writeln!(
                    s,
                    "fitted coefficients (degree {}, X in [{}, {xmax}], highest power first): {}",
                    cfg.degree,
                    cfg.fit_xmin,
                    coeffs.join(", ")
                )?;
                if fit.ill_conditioned {
                    writeln!(s, "warning: ill-conditioned fit (condition number {:.3e})", fit.condition)?;
                }
                let fitted = fit.coefficients[0];
                if coeff.value != 0.0 {
                    writeln!(
                        s,
                        "leading coefficient comparison: predicted {} vs fitted {} (relative difference {:.2}%)",
                        sig12(coeff.value),
                        sig12(fitted),
                        100.0 * (fitted - coeff.value).abs() / coeff.value.abs()
                    )?;
                } else {
                    writeln!(
                        s,
                        "leading coefficient comparison: predicted 0 vs fitted {}",
                        sig12(fitted)
                    )?;
                }
            }
            Err(e) => writeln!(s, "fit skipped: {e}")?,
        }
        Ok(())
    })?;

    std::fs::write(cfg.out.join("summary.txt"), &summary).context("stage output: writing summary.txt")?;
    out.write_all(&summary)?;
    Ok(())
}

/// Every registered counter against the box-scan oracle, plus random exact
/// sign probes that must never meet a vanishing embedding.
pub fn verify(field: &Field, max_trace: i64, probes: usize, seed: u64, out: &mut dyn Write) -> Result<()> {
    stage("verify", || {
        let registry = CounterRegistry::default();
        let geom = TraceGeometry::new(field)?;
        let oracle = registry.get("naive")?;
        let mut failures = 0;
        for c in registry.iter().filter(|c| c.name() != oracle.name()) {
            let mut mismatches = Vec::new();
            for a in 1..=max_trace {
                let (x, y) = (c.count(&geom, a)?, oracle.count(&geom, a)?);
                if x != y {
                    mismatches.push(format!("a = {a}: {x} vs {y}"));
                }
            }
            if mismatches.is_empty() {
                writeln!(out, "PASS {}: agrees with {} for a <= {max_trace}", c.name(), oracle.name())?;
            } else {
                failures += 1;
                writeln!(out, "FAIL {}: {}", c.name(), mismatches.join("; "))?;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kappa = geom.kappa();
        for _ in 0..probes {
            let m = rng.random_range(1..=1000 / kappa.max(1)).max(1);
            let c1 = rng.random_range(-2000..=2000);
            let c2 = rng.random_range(-2000..=2000);
            for i in 0..3 {
                geom.positive_at(c1, c2, m, i)
                    .with_context(|| format!("sign of ({c1}, {c2}, {m}) at embedding {i}"))?;
            }
        }
        writeln!(out, "PASS boundary: {probes} random probes certified (seed {seed})")?;
        if failures > 0 {
            bail!("{failures} counter(s) disagree with the oracle");
        }
        Ok(())
    })
}

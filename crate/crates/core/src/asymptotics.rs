//! Weighted error sums `S(X) = Σ_{n≤X} E_n log^k(X/n)`, the predicted
//! leading coefficient, least-squares log-polynomial fits and reports.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::format::sig12;
use crate::lseries::LValue;
use crate::sum::CompensatedSum;
use crate::units::{good_characters, SignCharacter, UnitSystem};

/// Smallest weight exponent covered by the asymptotic formula.
pub const MIN_THEOREM_K: u32 = 3;

/// Design matrices with a larger condition number are flagged.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("X = {x} exceeds the series range {len}")]
    OutOfRange { x: u64, len: usize },
    #[error("X must be at least 1")]
    ZeroX,
    #[error("L-values {given:?} do not match the good nontrivial characters {expected:?}")]
    CharacterMismatch {
        given: Vec<SignCharacter>,
        expected: Vec<SignCharacter>,
    },
    #[error("fit of degree {degree} needs at least {needed} grid points, got {got}")]
    TooFewPoints { degree: usize, needed: usize, got: usize },
    #[error("fit grid must span at least one decade (got {xmin}..{xmax})")]
    NarrowGrid { xmin: u64, xmax: u64 },
    #[error("grid bounds must satisfy 1 <= xmin <= xmax (got {xmin}..{xmax})")]
    BadGrid { xmin: u64, xmax: u64 },
}

/// `Σ_{n≤X} E_n (log(X/n))^k`; `errors[n−1]` holds `E_n`.
pub fn weighted_sum(errors: &[f64], x: u64, k: u32) -> Result<f64, AsymptoticsError> {
    if x == 0 {
        return Err(AsymptoticsError::ZeroX);
    }
    if x as usize > errors.len() {
        return Err(AsymptoticsError::OutOfRange { x, len: errors.len() });
    }
    let lx = (x as f64).ln();
    let mut s = CompensatedSum::new();
    for (i, e) in errors[..x as usize].iter().enumerate() {
        if *e != 0.0 {
            s.add(e * (lx - ((i + 1) as f64).ln()).powi(k as i32));
        }
    }
    Ok(s.value())
}

/// `X` values from `xmin` to `xmax`, `per_decade` per factor of ten,
/// rounded to integers and deduplicated.
pub fn log_grid(xmin: u64, xmax: u64, per_decade: u32) -> Result<Vec<u64>, AsymptoticsError> {
    if xmin == 0 || xmin > xmax || per_decade == 0 {
        return Err(AsymptoticsError::BadGrid { xmin, xmax });
    }
    let mut out: Vec<u64> = Vec::new();
    let mut j = 0u32;
    loop {
        let x = (xmin as f64 * 10f64.powf(j as f64 / per_decade as f64)).round() as u64;
        if x > xmax {
            break;
        }
        if out.last() != Some(&x) {
            out.push(x);
        }
        j += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSumTable {
    pub k: u32,
    pub xs: Vec<u64>,
    pub values: Vec<f64>,
    /// `S(X) / log^{k+1} X`.
    pub normalized: Vec<f64>,
    /// Set when `k` is below [`MIN_THEOREM_K`].
    pub below_theorem_range: bool,
}

impl WeightedSumTable {
    pub fn new(errors: &[f64], xs: &[u64], k: u32) -> Result<Self, AsymptoticsError> {
        let values = xs
            .iter()
            .map(|x| weighted_sum(errors, *x, k))
            .collect::<Result<Vec<_>, _>>()?;
        let normalized = xs
            .iter()
            .zip(&values)
            .map(|(x, s)| s / (*x as f64).ln().powi(k as i32 + 1))
            .collect();
        Ok(Self {
            k,
            xs: xs.to_vec(),
            values,
            normalized,
            below_theorem_range: k < MIN_THEOREM_K,
        })
    }

    /// Restriction to `xmin ≤ X ≤ xmax`.
    pub fn window(&self, xmin: u64, xmax: u64) -> Self {
        let keep: Vec<usize> = (0..self.xs.len())
            .filter(|i| (xmin..=xmax).contains(&self.xs[*i]))
            .collect();
        Self {
            k: self.k,
            xs: keep.iter().map(|i| self.xs[*i]).collect(),
            values: keep.iter().map(|i| self.values[*i]).collect(),
            normalized: keep.iter().map(|i| self.normalized[*i]).collect(),
            below_theorem_range: self.below_theorem_range,
        }
    }
}

/// `C = 3√D / (8π²(k+1)R) · Σ L(1, v)` over the good nontrivial `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct MainCoefficient {
    pub value: f64,
    pub error: f64,
    pub k: u32,
    pub discriminant: i128,
    pub regulator: f64,
    pub l_values: Vec<LValue>,
}

impl MainCoefficient {
    /// `3√D / (8π²(k+1)R)`.
    pub fn prefactor(&self) -> f64 {
        prefactor(self.discriminant, self.regulator, self.k)
    }
}

fn prefactor(discriminant: i128, regulator: f64, k: u32) -> f64 {
    3.0 * (discriminant as f64).sqrt() / (8.0 * PI * PI * (k as f64 + 1.0) * regulator)
}

/// Requires one L-value for each good nontrivial character, in any order.
pub fn main_coefficient(
    discriminant: i128,
    us: &UnitSystem,
    k: u32,
    l_values: &[LValue],
) -> Result<MainCoefficient, AsymptoticsError> {
    let expected: Vec<SignCharacter> = good_characters(us).into_iter().filter(|v| !v.is_trivial()).collect();
    let mut given: Vec<SignCharacter> = l_values.iter().map(|l| l.character).collect();
    given.sort();
    if given != expected {
        return Err(AsymptoticsError::CharacterMismatch { given, expected });
    }
    let r = us.regulator();
    let pre = prefactor(discriminant, r, k);
    let total: f64 = l_values.iter().map(|l| l.value).sum();
    let value = pre * total;
    let error = (value / r).abs() * us.regulator_error()
        + pre * l_values.iter().map(|l| l.error_estimate).sum::<f64>()
        + 4.0 * f64::EPSILON * value.abs();
    let mut l_values = l_values.to_vec();
    l_values.sort_by_key(|l| l.character);
    Ok(MainCoefficient {
        value,
        error,
        k,
        discriminant,
        regulator: r,
        l_values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    /// Coefficients of `log^{k+1}X, log^k X, …`, highest power first.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    pub condition: f64,
    pub ill_conditioned: bool,
}

/// Least-squares fit of `S(X)` against `log^{k+1−j} X`, `j = 0..=degree`.
pub fn fit_coefficients(table: &WeightedSumTable, degree: usize) -> Result<Fit, AsymptoticsError> {
    let n = table.xs.len();
    if n < degree + 2 {
        return Err(AsymptoticsError::TooFewPoints {
            degree,
            needed: degree + 2,
            got: n,
        });
    }
    let (xmin, xmax) = (table.xs[0], table.xs[n - 1]);
    if (xmax as f64) < 10.0 * xmin as f64 * (1.0 - 1e-12) {
        return Err(AsymptoticsError::NarrowGrid { xmin, xmax });
    }
    let top = table.k as i32 + 1;
    let design = DMatrix::from_fn(n, degree + 1, |r, c| (table.xs[r] as f64).ln().powi(top - c as i32));
    let rhs = DVector::from_column_slice(&table.values);
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let solution = svd
        .solve(&rhs, smax * f64::EPSILON * n as f64)
        .expect("SVD computed with both factors");
    let residual_norm = (&design * &solution - &rhs).norm();
    Ok(Fit {
        coefficients: solution.iter().copied().collect(),
        residual_norm,
        condition,
        ill_conditioned: condition > CONDITION_LIMIT,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub x: u64,
    pub s: f64,
    pub normalized: f64,
    pub predicted_leading: f64,
    pub predicted_three_term: Option<f64>,
}

/// Rows comparing `S/log^{k+1}X` with the leading coefficient and, when
/// sub-leading coefficients `[c_1, c_2]` are supplied, with
/// `C + c_1/log X + c_2/log² X`.
pub fn compare_report(table: &WeightedSumTable, leading: f64, sub_leading: Option<[f64; 2]>) -> Vec<ReportRow> {
    table
        .xs
        .iter()
        .zip(table.values.iter().zip(&table.normalized))
        .map(|(x, (s, q))| {
            let l = (*x as f64).ln();
            ReportRow {
                x: *x,
                s: *s,
                normalized: *q,
                predicted_leading: leading,
                predicted_three_term: sub_leading.map(|c| leading + c[0] / l + c[1] / (l * l)),
            }
        })
        .collect()
}

pub fn write_report<W: Write>(mut w: W, k: u32, rows: &[ReportRow]) -> std::io::Result<()> {
    let three = rows.iter().any(|r| r.predicted_three_term.is_some());
    write!(w, "X,S(X),S/log^{}X,predicted_leading", k + 1)?;
    if three {
        write!(w, ",predicted_3term")?;
    }
    writeln!(w)?;
    for r in rows {
        write!(w, "{},{},{},{}", r.x, sig12(r.s), sig12(r.normalized), sig12(r.predicted_leading))?;
        if let Some(p) = r.predicted_three_term {
            write!(w, ",{}", sig12(p))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_weights() {
        let e = [0.3, -1.2, 2.5];
        assert_eq!(weighted_sum(&e, 1, 3).unwrap(), 0.0);
        assert!((weighted_sum(&e, 3, 0).unwrap() - 1.6).abs() < 1e-15);
        assert!(weighted_sum(&e, 4, 3).is_err());
        assert!(weighted_sum(&e, 0, 3).is_err());
    }

    #[test]
    fn grid_is_log_spaced() {
        let g = log_grid(100, 100_000, 20).unwrap();
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&100_000));
        assert_eq!(g.len(), 61);
        assert_eq!(g[20], 1000);
    }
}

use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::registry::LatticeCounter;
use super::{geometric_estimate, CountError, TraceGeometry};
use crate::format::sig12;

pub const CSV_HEADER: &str = "a,N_a,r_a,E_a";

/// `N_a`, `r_a` and `E_a = N_a − r_a` for `a = 1..=X`. At traces that are not
/// multiples of `κ` both `N_a` and the stored `r_a` are 0, so `E_a = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    counts: Vec<u64>,
    estimates: Vec<f64>,
    errors: Vec<f64>,
}

impl CountSeries {
    pub fn from_parts(counts: Vec<u64>, estimates: Vec<f64>) -> Self {
        assert_eq!(counts.len(), estimates.len());
        let errors = counts.iter().zip(&estimates).map(|(n, r)| *n as f64 - r).collect();
        Self {
            counts,
            estimates,
            errors,
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `N_a`, with `N_a = 0` for `a ≤ 0` or beyond the range.
    pub fn count(&self, a: i64) -> u64 {
        if a <= 0 {
            return 0;
        }
        self.counts.get(a as usize - 1).copied().unwrap_or(0)
    }

    /// Index `a − 1` holds the value for trace `a`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for (i, ((n, r), e)) in self.counts.iter().zip(&self.estimates).zip(&self.errors).enumerate() {
            writeln!(w, "{},{},{},{}", i + 1, n, sig12(*r), sig12(*e))?;
        }
        Ok(())
    }

    /// Reads a series written by [`CountSeries::write_csv`]. `E_a` is taken
    /// from the file, after checking it against `N_a − r_a`.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, CountError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| CountError::Parse("empty file".into()))?
            .map_err(|e| CountError::Parse(e.to_string()))?;
        if header.trim() != CSV_HEADER {
            return Err(CountError::Parse(format!("expected header {CSV_HEADER:?}, got {header:?}")));
        }
        let mut s = Self {
            counts: Vec::new(),
            estimates: Vec::new(),
            errors: Vec::new(),
        };
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| CountError::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| CountError::Parse(format!("line {}: {what}: {line:?}", lineno + 2));
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let a: usize = f[0].parse().map_err(|_| bad("bad trace"))?;
            if a != s.counts.len() + 1 {
                return Err(bad("traces must run 1, 2, 3, ..."));
            }
            let n: u64 = f[1].parse().map_err(|_| bad("bad count"))?;
            let r: f64 = f[2].parse().map_err(|_| bad("bad estimate"))?;
            let e: f64 = f[3].parse().map_err(|_| bad("bad error term"))?;
            if (n as f64 - r - e).abs() > 1e-9 * (1.0 + r.abs()) {
                return Err(bad("E_a differs from N_a - r_a"));
            }
            s.counts.push(n);
            s.estimates.push(r);
            s.errors.push(e);
        }
        Ok(s)
    }
}

/// `N_a` for `a = 1..=X` with the chosen counter, evaluated in parallel; the
/// result does not depend on the schedule.
pub fn error_series(
    geom: &TraceGeometry<'_>,
    counter: &dyn LatticeCounter,
    x: usize,
) -> Result<CountSeries, CountError> {
    let kappa = geom.kappa();
    let counts: Vec<u64> = (1..=x as i64)
        .into_par_iter()
        .map(|a| counter.count(geom, a))
        .collect::<Result<_, _>>()?;
    let estimates = (1..=x as i64)
        .map(|a| {
            if a % kappa == 0 {
                geometric_estimate(geom.field(), a)
            } else {
                0.0
            }
        })
        .collect();
    Ok(CountSeries::from_parts(counts, estimates))
}

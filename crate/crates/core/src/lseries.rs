//! Principal ideals of bounded norm, one generator each, and the smoothed
//! evaluation of `L(1, v) = Σ v(β) N(β)^{-1}` over nonzero principal ideals.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};
use crate::lattice::{hnf3, BoxEnumerator};
use crate::sum::CompensatedSum;
use crate::units::{SignCharacter, UnitSystem};

/// Largest accepted cutoff `B`.
pub const MAX_CUTOFF: u64 = 100_000_000;

/// The smoothed sums run over `N ≤ TRUNCATION · B`; the dropped tail is
/// below `e^{-35}` relative.
pub const TRUNCATION: u64 = 35;

/// Half-width of the boundary band of the fundamental domain in unit-lattice
/// coordinates. Double-precision log-coordinates are accurate to ~1e-12, so
/// only elements inside the band can be misplaced; those are deduplicated by
/// comparing the ideals they generate.
const BAND: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LError {
    #[error("L(s, v0) has a pole at s = 1; choose a nontrivial character")]
    TrivialCharacter,
    #[error("character {0} is not trivial on units, so it is not defined on principal ideals")]
    NotGood(SignCharacter),
    #[error("cutoff {0} exceeds the memory guard {MAX_CUTOFF}")]
    CutoffTooLarge(u64),
    #[error("cutoff must be positive")]
    ZeroCutoff,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One nonzero principal ideal with a chosen generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrincipalIdeal {
    pub generator: FieldElement,
    pub norm: u64,
    /// Bit `i` set when the generator is negative at embedding `i`.
    pub signature: u8,
}

impl PrincipalIdeal {
    pub fn sign_value(&self, v: &SignCharacter) -> i8 {
        v.eval_signature(self.signature)
    }
}

/// Canonical form of the ideal `zO_K`.
pub fn ideal_key(field: &Field, z: &FieldElement) -> [[i128; 3]; 3] {
    let m = field.mult_matrix(z);
    let rows = std::array::from_fn(|i| std::array::from_fn(|k| m[k][i]));
    hnf3(&rows)
}

/// Fundamental-domain search for the unit action on log space.
struct DomainScan<'a> {
    field: &'a Field,
    /// Maps normalized log-vectors to unit-lattice coordinates.
    inv: [[f64; 2]; 2],
    logs: [[f64; 3]; 2],
    max_norm: u64,
    grid: [usize; 2],
}

struct CellOutput<A> {
    acc: A,
    band: Vec<PrincipalIdeal>,
}

impl<'a> DomainScan<'a> {
    fn new(field: &'a Field, us: &UnitSystem, max_norm: u64) -> Self {
        let logs = *us.logs();
        let lam = [[logs[0][0], logs[0][1]], [logs[1][0], logs[1][1]]];
        let det = lam[0][0] * lam[1][1] - lam[0][1] * lam[1][0];
        // (s, t) = ℓ · inv where ℓ = s·lam[0] + t·lam[1]
        let inv = [
            [lam[1][1] / det, -lam[0][1] / det],
            [-lam[1][0] / det, lam[0][0] / det],
        ];
        // The box over a cell of side 1/g in direction l costs about
        // g·e^{P_l/g}, where P_l is the positive part of λ(ε_l); g ≈ P_l is optimal.
        let grid = std::array::from_fn(|l| {
            let p: f64 = logs[l].iter().filter(|x| **x > 0.0).sum();
            (p.round() as usize).clamp(1, 16)
        });
        Self {
            field,
            inv,
            logs,
            max_norm,
            grid,
        }
    }

    fn coordinates(&self, y: &[f64; 3], norm: u64) -> [f64; 2] {
        let t = (norm as f64).ln() / 3.0;
        let l = [y[0].abs().ln() - t, y[1].abs().ln() - t];
        [
            l[0] * self.inv[0][0] + l[1] * self.inv[1][0],
            l[0] * self.inv[0][1] + l[1] * self.inv[1][1],
        ]
    }

    /// Cell of the extended domain `[−δ, 1+δ]²` holding `(s, t)`, if any.
    fn cell_of(&self, st: &[f64; 2]) -> Option<[usize; 2]> {
        let mut cell = [0; 2];
        for l in 0..2 {
            if !(-BAND..=1.0 + BAND).contains(&st[l]) {
                return None;
            }
            let g = self.grid[l];
            cell[l] = (((st[l] + BAND) / (1.0 + 2.0 * BAND) * g as f64).floor() as usize).min(g - 1);
        }
        Some(cell)
    }

    fn cell_bounds(&self, cell: [usize; 2]) -> [f64; 3] {
        let width = 1.0 + 2.0 * BAND;
        let range = |l: usize| {
            let g = self.grid[l] as f64;
            let lo = -BAND + width * cell[l] as f64 / g;
            [lo - BAND, lo + width / g + BAND]
        };
        let (rs, rt) = (range(0), range(1));
        let cube = (self.max_norm as f64).cbrt();
        std::array::from_fn(|i| {
            let mut best = f64::NEG_INFINITY;
            for s in rs {
                for t in rt {
                    best = best.max(s * self.logs[0][i] + t * self.logs[1][i]);
                }
            }
            cube * best.exp() * (1.0 + 1e-6)
        })
    }

    fn signature(&self, z: &FieldElement, y: &[f64; 3]) -> Result<u8, FieldError> {
        let mut sig = 0u8;
        for (i, yi) in y.iter().enumerate() {
            let negative = if yi.abs() > 1e-6 {
                *yi < 0.0
            } else {
                self.field.certified_sign(z, i)? < 0
            };
            if negative {
                sig |= 1 << i;
            }
        }
        Ok(sig)
    }

    fn scan_cell<A, F>(&self, cell: [usize; 2], mut acc: A, fold: &F) -> Result<CellOutput<A>, FieldError>
    where
        F: Fn(&mut A, &PrincipalIdeal),
    {
        let bounds = self.cell_bounds(cell);
        let en = BoxEnumerator::new(self.field.embeddings(), bounds);
        let (lo, hi) = en.outer_range();
        let cap = self.max_norm as f64 * (1.0 + 1e-9) + 0.5;
        let mut band = Vec::new();
        let mut err = None;
        for d3 in lo..=hi {
            en.for_each_in_slice(d3, |c, y| {
                if err.is_some() {
                    return;
                }
                let nf = (y[0] * y[1] * y[2]).abs();
                if nf > cap || nf < 0.5 {
                    return;
                }
                let z = FieldElement::new(c.map(|x| x as i128));
                if z.sign_normalized() != z {
                    return;
                }
                let norm = self.field.norm(&z).unsigned_abs() as u64;
                if norm == 0 || norm > self.max_norm {
                    return;
                }
                let st = self.coordinates(&y, norm);
                if self.cell_of(&st) != Some(cell) {
                    return;
                }
                let signature = match self.signature(&z, &y) {
                    Ok(s) => s,
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                };
                let ideal = PrincipalIdeal {
                    generator: z,
                    norm,
                    signature,
                };
                let interior = st.iter().all(|x| (2.0 * BAND..=1.0 - 2.0 * BAND).contains(x));
                if interior {
                    fold(&mut acc, &ideal);
                } else {
                    band.push(ideal);
                }
            });
        }
        match err {
            Some(e) => Err(e),
            None => Ok(CellOutput { acc, band }),
        }
    }

    /// Folds every principal ideal of norm `≤ max_norm` exactly once. Cells
    /// run in parallel; partial results merge in cell order and boundary
    /// ideals are folded last in canonical order, so the outcome does not
    /// depend on the thread count.
    fn run<A, I, F, M>(&self, init: I, fold: F, merge: M) -> Result<A, FieldError>
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &PrincipalIdeal) + Sync,
        M: Fn(A, A) -> A,
    {
        let cells: Vec<[usize; 2]> = (0..self.grid[0])
            .flat_map(|i| (0..self.grid[1]).map(move |j| [i, j]))
            .collect();
        let outputs: Vec<CellOutput<A>> = cells
            .par_iter()
            .map(|cell| self.scan_cell(*cell, init(), &fold))
            .collect::<Result<_, _>>()?;
        let mut band = BTreeMap::new();
        let mut total = init();
        for out in outputs {
            total = merge(total, out.acc);
            for ideal in out.band {
                let key = ideal_key(self.field, &ideal.generator);
                band.entry(key)
                    .and_modify(|kept: &mut PrincipalIdeal| {
                        if generator_rank(&ideal.generator) < generator_rank(&kept.generator) {
                            *kept = ideal;
                        }
                    })
                    .or_insert(ideal);
            }
        }
        let mut tail = init();
        for ideal in band.values() {
            fold(&mut tail, ideal);
        }
        Ok(merge(total, tail))
    }
}

/// Preference among generators of one boundary ideal: smallest coordinates.
fn generator_rank(z: &FieldElement) -> (i128, FieldElement) {
    (z.coords.iter().map(|c| c.abs()).sum(), *z)
}

fn check_cutoff(bound: u64) -> Result<(), LError> {
    if bound == 0 {
        return Err(LError::ZeroCutoff);
    }
    if bound > MAX_CUTOFF {
        return Err(LError::CutoffTooLarge(bound));
    }
    Ok(())
}

/// Every nonzero principal ideal of norm `≤ bound`, one generator each
/// (sign-normalized, log-vector in the fundamental parallelogram of the
/// unit lattice), sorted by norm and then generator.
pub fn enumerate_principal(field: &Field, us: &UnitSystem, bound: u64) -> Result<Vec<PrincipalIdeal>, LError> {
    check_cutoff(bound)?;
    let scan = DomainScan::new(field, us, bound);
    let mut all = scan.run(
        Vec::new,
        |acc: &mut Vec<PrincipalIdeal>, p| acc.push(*p),
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    all.sort_by(|a, b| a.norm.cmp(&b.norm).then(a.generator.cmp(&b.generator)));
    Ok(all)
}

/// Number of principal ideals of each norm `1..=bound` (index 0 unused).
pub fn ideal_counts_by_norm(field: &Field, us: &UnitSystem, bound: u64) -> Result<Vec<u64>, LError> {
    check_cutoff(bound)?;
    let scan = DomainScan::new(field, us, bound);
    let n = bound as usize + 1;
    Ok(scan.run(
        || vec![0u64; n],
        |acc: &mut Vec<u64>, p| acc[p.norm as usize] += 1,
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )?)
}

/// `L(1, v)` estimated by smoothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LValue {
    pub character: SignCharacter,
    pub value: f64,
    pub error_estimate: f64,
    pub cutoff: u64,
    /// Smoothed sums at `B` and `2B`.
    pub smoothed: [f64; 2],
}

impl std::fmt::Display for LValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "L(1,v) = {:.12} ± {:.3e} (B={})",
            self.value, self.error_estimate, self.cutoff
        )
    }
}

/// `Σ v(β) N(β)^{-1} e^{-N(β)/B}` over `N ≤ 35B`, at `B` and `2B`, from one
/// enumeration up to `70B`.
pub fn smoothed_sums(field: &Field, us: &UnitSystem, v: &SignCharacter, cutoff: u64) -> Result<[f64; 2], LError> {
    check_cutoff(cutoff)?;
    let max_norm = 2 * TRUNCATION * cutoff;
    let scan = DomainScan::new(field, us, max_norm);
    let b = [cutoff as f64, 2.0 * cutoff as f64];
    let limit = [TRUNCATION * cutoff, max_norm];
    let sums = scan.run(
        || [CompensatedSum::new(), CompensatedSum::new()],
        |acc: &mut [CompensatedSum; 2], p| {
            let sign = p.sign_value(v) as f64;
            let n = p.norm as f64;
            for j in 0..2 {
                if p.norm <= limit[j] {
                    acc[j].add(sign * (-n / b[j]).exp() / n);
                }
            }
        },
        |mut a, b| {
            a[0].merge(&b[0]);
            a[1].merge(&b[1]);
            a
        },
    )?;
    Ok([sums[0].value(), sums[1].value()])
}

/// `L(1, v)` for a good nontrivial `v`: the smoothed sums at `B` and `2B`
/// carry a first-order error `c/B`, removed by `2S(2B) − S(B)`; the reported
/// error is `|S(B) − S(2B)|`.
pub fn l_value(field: &Field, us: &UnitSystem, v: &SignCharacter, cutoff: u64) -> Result<LValue, LError> {
    if v.is_trivial() {
        return Err(LError::TrivialCharacter);
    }
    if !v.is_good(us) {
        return Err(LError::NotGood(*v));
    }
    let smoothed = smoothed_sums(field, us, v, cutoff)?;
    Ok(LValue {
        character: *v,
        value: 2.0 * smoothed[1] - smoothed[0],
        error_estimate: (smoothed[0] - smoothed[1]).abs(),
        cutoff,
        smoothed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::CubicPoly;
    use crate::units::find_units_auto;

    #[test]
    fn rejects_bad_requests() {
        let k = Field::new(CubicPoly::new(2, -3, -1)).unwrap();
        let us = find_units_auto(&k).unwrap();
        assert_eq!(l_value(&k, &us, &SignCharacter::TRIVIAL, 10), Err(LError::TrivialCharacter));
        let bad = SignCharacter::new([1, 0, 0]);
        assert_eq!(l_value(&k, &us, &bad, 10), Err(LError::NotGood(bad)));
        assert!(enumerate_principal(&k, &us, MAX_CUTOFF + 1).is_err());
    }

    #[test]
    fn unit_ideal_appears_once() {
        let k = Field::new(CubicPoly::new(2, -3, -1)).unwrap();
        let us = find_units_auto(&k).unwrap();
        let ideals = enumerate_principal(&k, &us, 5).unwrap();
        assert_eq!(ideals.iter().filter(|p| p.norm == 1).count(), 1);
        assert_eq!(ideals[0].generator, k.one());
        assert!(ideals.iter().any(|p| p.norm == 3));
    }
}

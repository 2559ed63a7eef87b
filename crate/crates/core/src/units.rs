//! Unit group of a totally real cubic field: fundamental units, regulator,
//! GF(2) signatures, totally positive generators, sign characters and the
//! goodness test for pairs `(μ, v)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};
use crate::lattice::{gauss_reduce, BoxEnumerator};

/// Largest search radius tried by [`find_units_auto`].
pub const MAX_UNIT_BOUND: f64 = 40.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("bound too small: {found} independent unit(s) with all |z^(i)| <= e^{bound}")]
    BoundTooSmall { bound: f64, found: usize },
    #[error("bound too small to certify the unit lattice: reduced basis needs radius {needed:.3} > {bound}")]
    Incomplete { bound: f64, needed: f64 },
    #[error("internal error: found units generate a lattice that is not {q}-saturated")]
    NotSaturated { q: u32 },
    #[error("internal error: {0}")]
    Inconsistent(String),
    #[error("coordinate overflow during unit arithmetic")]
    Overflow,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Fundamental units `ε_1, ε_2` with their log-embeddings and signatures.
#[derive(Debug, Clone)]
pub struct UnitSystem {
    fundamental: [FieldElement; 2],
    /// `logs[l][i] = log|ε_l^{(i)}|`.
    logs: [[f64; 3]; 2],
    regulator: f64,
    regulator_error: f64,
    /// Signatures of `−1, ε_1, ε_2`; bit `i` set when negative at embedding `i`.
    signatures: [u8; 3],
    bound: f64,
    found: Vec<FieldElement>,
}

impl UnitSystem {
    pub fn fundamental(&self) -> &[FieldElement; 2] {
        &self.fundamental
    }

    pub fn logs(&self) -> &[[f64; 3]; 2] {
        &self.logs
    }

    pub fn regulator(&self) -> f64 {
        self.regulator
    }

    pub fn regulator_error(&self) -> f64 {
        self.regulator_error
    }

    /// Rows: `−1, ε_1, ε_2`.
    pub fn signature_matrix(&self) -> [[u8; 3]; 3] {
        self.signatures.map(|s| std::array::from_fn(|i| (s >> i) & 1))
    }

    pub fn signatures(&self) -> [u8; 3] {
        self.signatures
    }

    pub fn search_bound(&self) -> f64 {
        self.bound
    }

    /// Units met during the search (one of each `±u`, excluding `±1`).
    pub fn found_units(&self) -> &[FieldElement] {
        &self.found
    }

    /// Writes a unit `w` as `sign · ε_1^a · ε_2^b`, verified exactly.
    pub fn exponents_of(&self, field: &Field, w: &FieldElement) -> Option<(i8, i64, i64)> {
        let lw = precise_logs(field, w).ok()?;
        let (x, y) = solve2(&self.logs, &lw);
        let (a, b) = (x.round() as i64, y.round() as i64);
        let p = field.checked_mul(
            &field.unit_pow(&self.fundamental[0], a)?,
            &field.unit_pow(&self.fundamental[1], b)?,
        )?;
        if p == *w {
            Some((1, a, b))
        } else if p.neg() == *w {
            Some((-1, a, b))
        } else {
            None
        }
    }
}

/// `log|z^{(i)}|` to about double precision, using certified enclosures so
/// that cancellation in large coordinates does not matter.
pub fn precise_logs(field: &Field, z: &FieldElement) -> Result<[f64; 3], FieldError> {
    if z.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let mut prec = 64;
        loop {
            let iv = field.embed(z, i, prec);
            if iv.sign().is_some() {
                let (lo, hi) = (iv.lo_f64().abs(), iv.hi_f64().abs());
                let small = lo.min(hi);
                if small > 0.0 && (hi - lo).abs() / small < 1e-17 {
                    *o = iv.mid_f64().abs().ln();
                    break;
                }
            }
            prec += 64;
            if prec > 20_000 {
                return Err(FieldError::PrecisionCap(prec));
            }
        }
    }
    Ok(out)
}

/// Solves `x·a[0] + y·a[1] = v` on the first two coordinates.
fn solve2(a: &[[f64; 3]; 2], v: &[f64; 3]) -> (f64, f64) {
    let det = a[0][0] * a[1][1] - a[1][0] * a[0][1];
    let x = (v[0] * a[1][1] - a[1][0] * v[1]) / det;
    let y = (a[0][0] * v[1] - v[0] * a[0][1]) / det;
    (x, y)
}

fn norm_sq3(v: &[f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

/// `|det|` of the log-embedding matrix (first two embeddings) of two units.
pub fn regulator_of(field: &Field, units: &[FieldElement; 2]) -> Result<f64, FieldError> {
    let l0 = precise_logs(field, &units[0])?;
    let l1 = precise_logs(field, &units[1])?;
    Ok((l0[0] * l1[1] - l0[1] * l1[0]).abs())
}

#[derive(Debug, Clone, Copy)]
struct Gen {
    unit: FieldElement,
    log: [f64; 3],
}

impl Gen {
    fn norm_sq(&self) -> f64 {
        norm_sq3(&self.log)
    }
}

/// Enumerates units with every `|z^{(i)}| ≤ e^bound`, one of each `±u`,
/// excluding `±1`. Log space is covered by unit cells, each searched as a box.
pub fn enumerate_units(field: &Field, bound: f64) -> Vec<FieldElement> {
    let emb = field.embeddings();
    let cap = bound.exp() * (1.0 + 1e-9);
    let lo = (-bound).floor() as i64;
    let hi = bound.ceil() as i64;
    let mut found = BTreeSet::new();
    for g1 in lo..hi {
        for g2 in lo..hi {
            let x3_hi = -(g1 + g2) as f64;
            let x3_lo = x3_hi - 2.0;
            if x3_hi < -bound || x3_lo > bound {
                continue;
            }
            let y = [
                ((g1 + 1) as f64).min(bound).exp(),
                ((g2 + 1) as f64).min(bound).exp(),
                x3_hi.min(bound).exp(),
            ];
            let en = BoxEnumerator::new(emb, y.map(|v| v * (1.0 + 1e-7)));
            let (a, b) = en.outer_range();
            for d3 in a..=b {
                en.for_each_in_slice(d3, |c, y| {
                    if y.iter().any(|v| v.abs() > cap) {
                        return;
                    }
                    let n = y[0] * y[1] * y[2];
                    if (n.abs() - 1.0).abs() > 1e-6 {
                        return;
                    }
                    let z = FieldElement::new(c.map(|x| x as i128));
                    if field.norm(&z).abs() != 1 {
                        return;
                    }
                    let z = if y[0] < 0.0 { z.neg() } else { z };
                    if z != field.one() {
                        found.insert(z);
                    }
                });
            }
        }
    }
    found.into_iter().collect()
}

fn is_torsion(field: &Field, g: &Gen) -> Result<bool, UnitError> {
    if g.norm_sq() > 1e-14 {
        return Ok(false);
    }
    if g.unit == field.one() || g.unit == field.one().neg() {
        Ok(true)
    } else {
        Err(UnitError::Inconsistent(format!("unit {} has log-vector ~0 but is not ±1", g.unit)))
    }
}

/// `g · b^{-q}` with the log-vector updated additively.
fn shift(field: &Field, g: &Gen, b: &Gen, q: i64) -> Result<Gen, UnitError> {
    if q == 0 {
        return Ok(*g);
    }
    let p = field.unit_pow(&b.unit, -q).ok_or(UnitError::Overflow)?;
    let unit = field.checked_mul(&g.unit, &p).ok_or(UnitError::Overflow)?;
    let qf = q as f64;
    Ok(Gen {
        unit,
        log: std::array::from_fn(|i| g.log[i] - qf * b.log[i]),
    })
}

fn gauss_pair(field: &Field, basis: &mut [Gen]) -> Result<(), UnitError> {
    let planar = [[basis[0].log[0], basis[0].log[1]], [basis[1].log[0], basis[1].log[1]]];
    let norm = |v: &[f64; 2]| v[0] * v[0] + v[1] * v[1] + (v[0] + v[1]) * (v[0] + v[1]);
    let (_, t) = gauss_reduce(planar, norm);
    let combine = |row: [i64; 2]| -> Result<Gen, UnitError> {
        let p0 = field.unit_pow(&basis[0].unit, row[0]).ok_or(UnitError::Overflow)?;
        let p1 = field.unit_pow(&basis[1].unit, row[1]).ok_or(UnitError::Overflow)?;
        let unit = field.checked_mul(&p0, &p1).ok_or(UnitError::Overflow)?;
        let (a, b) = (row[0] as f64, row[1] as f64);
        Ok(Gen {
            unit,
            log: std::array::from_fn(|i| a * basis[0].log[i] + b * basis[1].log[i]),
        })
    };
    let n0 = combine(t[0])?;
    let n1 = combine(t[1])?;
    basis[0] = n0;
    basis[1] = n1;
    Ok(())
}

fn insert_generator(field: &Field, basis: &mut Vec<Gen>, mut g: Gen) -> Result<(), UnitError> {
    for _ in 0..10_000 {
        if is_torsion(field, &g)? {
            return Ok(());
        }
        match basis.len() {
            0 => {
                basis.push(g);
                return Ok(());
            }
            1 => {
                let b = basis[0];
                let cross = b.log[0] * g.log[1] - b.log[1] * g.log[0];
                if cross.abs() > 1e-9 * (b.norm_sq() * g.norm_sq()).sqrt() {
                    basis.push(g);
                    return gauss_pair(field, basis);
                }
                let q = ((b.log[0] * g.log[0] + b.log[1] * g.log[1] + b.log[2] * g.log[2]) / b.norm_sq()).round();
                let r = shift(field, &g, &b, q as i64)?;
                if is_torsion(field, &r)? {
                    return Ok(());
                }
                if r.norm_sq() < b.norm_sq() {
                    basis[0] = r;
                    g = b;
                } else {
                    g = r;
                }
            }
            _ => {
                let a = [basis[0].log, basis[1].log];
                let (x, y) = solve2(&a, &g.log);
                let r = shift(field, &g, &basis[0], x.round() as i64)?;
                let r = shift(field, &r, &basis[1], y.round() as i64)?;
                if is_torsion(field, &r)? {
                    return Ok(());
                }
                // r is a lattice vector outside the span: the basis is not saturated
                let old = basis[1];
                basis[1] = r;
                if basis[0].norm_sq() > basis[1].norm_sq() {
                    basis.swap(0, 1);
                }
                gauss_pair(field, basis)?;
                g = old;
            }
        }
    }
    Err(UnitError::Inconsistent("unit lattice reduction did not terminate".into()))
}

/// Unit search with every `|z^{(i)}| ≤ e^bound`; reduces the lattice of
/// log-vectors to a Gauss-reduced basis and certifies completeness: when
/// both reduced vectors have sup-norm at most `bound`, every unit realizing
/// the successive minima was enumerated, so the basis is fundamental.
pub fn find_units(field: &Field, bound: f64) -> Result<UnitSystem, UnitError> {
    let found = enumerate_units(field, bound);
    let mut gens: Vec<Gen> = found
        .iter()
        .map(|u| Ok(Gen { unit: *u, log: precise_logs(field, u)? }))
        .collect::<Result<_, FieldError>>()?;
    gens.sort_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()).then(a.unit.cmp(&b.unit)));
    let mut basis = Vec::new();
    for g in gens {
        insert_generator(field, &mut basis, g)?;
    }
    if basis.len() < 2 {
        return Err(UnitError::BoundTooSmall {
            bound,
            found: basis.len(),
        });
    }

    let mut eps = [basis[0].unit, basis[1].unit];
    for e in eps.iter_mut() {
        if field.certified_sign(e, 0)? < 0 {
            *e = e.neg();
        }
    }
    let mut logs = [precise_logs(field, &eps[0])?, precise_logs(field, &eps[1])?];
    if logs[0][0] * logs[1][1] - logs[0][1] * logs[1][0] < 0.0 {
        eps[1] = field.unit_inverse(&eps[1]).ok_or(UnitError::Overflow)?;
        if field.certified_sign(&eps[1], 0)? < 0 {
            eps[1] = eps[1].neg();
        }
        logs[1] = logs[1].map(|x| -x);
    }
    let needed = logs
        .iter()
        .flat_map(|l| l.iter().map(|x| x.abs()))
        .fold(0.0f64, f64::max);
    if needed > bound {
        return Err(UnitError::Incomplete { bound, needed });
    }

    let regulator = (logs[0][0] * logs[1][1] - logs[0][1] * logs[1][0]).abs();
    let size: f64 = logs.iter().flat_map(|l| l.iter().map(|x| x.abs())).sum();
    let regulator_error = 8.0 * f64::EPSILON * size * size.max(1.0) + f64::EPSILON * regulator;
    let signatures = [
        field.signature(&field.one().neg())?,
        field.signature(&eps[0])?,
        field.signature(&eps[1])?,
    ];
    let us = UnitSystem {
        fundamental: eps,
        logs,
        regulator,
        regulator_error,
        signatures,
        bound,
        found,
    };
    check_saturation(field, &us)?;
    Ok(us)
}

/// Grows the search radius 2, 4, …, 40 until [`find_units`] succeeds.
pub fn find_units_auto(field: &Field) -> Result<UnitSystem, UnitError> {
    let mut last = None;
    let mut bound = 2.0;
    while bound <= MAX_UNIT_BOUND {
        match find_units(field, bound) {
            Ok(us) => return Ok(us),
            Err(e @ (UnitError::BoundTooSmall { .. } | UnitError::Incomplete { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
        bound += 2.0;
    }
    Err(last.unwrap_or(UnitError::BoundTooSmall {
        bound: MAX_UNIT_BOUND,
        found: 0,
    }))
}

/// Tests `±ε_1^a ε_2^b` for `q`-th roots, `q ∈ {2, 3, 5, 7}`.
fn check_saturation(field: &Field, us: &UnitSystem) -> Result<(), UnitError> {
    let emb = field.embeddings();
    let inv = invert3(emb);
    for q in [2u32, 3, 5, 7] {
        for a in 0..q as i64 {
            for b in 0..q as i64 {
                if a == 0 && b == 0 {
                    continue;
                }
                let u = field
                    .checked_mul(
                        &field.unit_pow(&us.fundamental[0], a).ok_or(UnitError::Overflow)?,
                        &field.unit_pow(&us.fundamental[1], b).ok_or(UnitError::Overflow)?,
                    )
                    .ok_or(UnitError::Overflow)?;
                let logs: [f64; 3] = std::array::from_fn(|i| a as f64 * us.logs[0][i] + b as f64 * us.logs[1][i]);
                let sig = field.signature(&u)?;
                for sign in [1i8, -1] {
                    let target_sig = if sign < 0 { sig ^ 0b111 } else { sig };
                    if q == 2 && target_sig != 0 {
                        continue;
                    }
                    let w: [f64; 3] = std::array::from_fn(|i| {
                        let m = (logs[i] / q as f64).exp();
                        if (target_sig >> i) & 1 == 1 {
                            -m
                        } else {
                            m
                        }
                    });
                    let c: [f64; 3] = std::array::from_fn(|r| (0..3).map(|i| inv[r][i] * w[i]).sum());
                    if c.iter().any(|x| (x - x.round()).abs() > 1e-4) {
                        continue;
                    }
                    let root = FieldElement::new(c.map(|x| x.round() as i128));
                    let target = if sign < 0 { u.neg() } else { u };
                    if field.unit_pow(&root, q as i64) == Some(target) {
                        return Err(UnitError::NotSaturated { q });
                    }
                }
            }
        }
    }
    Ok(())
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let rows: Vec<usize> = (0..3).filter(|x| *x != c).collect();
            let cols: Vec<usize> = (0..3).filter(|x| *x != r).collect();
            let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
            (if (r + c) % 2 == 0 { minor } else { -minor }) / det
        })
    })
}

/// Totally positive `u_1, u_2` generating `U` together with `−1`, plus the
/// lattices `Λ_U` and `Λ_U*`.
#[derive(Debug, Clone)]
pub struct TotallyPositiveGens {
    units: [FieldElement; 2],
    /// Column `l` = exponents of `u_l` over `(ε_1, ε_2)`.
    exponents: [[i64; 2]; 2],
    /// Whether `u_l` carries a factor `−1`.
    negated: [bool; 2],
    /// `lambda[l] = λ_l`.
    lambda: [[f64; 2]; 2],
    /// `dual[l] = μ*_l` with `⟨μ*_l, λ_m⟩ = δ_lm`.
    dual: [[f64; 2]; 2],
}

impl TotallyPositiveGens {
    pub fn units(&self) -> &[FieldElement; 2] {
        &self.units
    }

    pub fn exponents(&self) -> [[i64; 2]; 2] {
        self.exponents
    }

    pub fn negated(&self) -> [bool; 2] {
        self.negated
    }

    pub fn lambda(&self) -> &[[f64; 2]; 2] {
        &self.lambda
    }

    pub fn dual(&self) -> &[[f64; 2]; 2] {
        &self.dual
    }

    /// `[O_K^× : U]`.
    pub fn index(&self) -> i64 {
        let e = self.exponents;
        (e[0][0] * e[1][1] - e[0][1] * e[1][0]).abs()
    }
}

/// `λ(u) = (log|u^{(1)}| − log|u^{(3)}|, log|u^{(2)}| − log|u^{(3)}|)`.
pub fn lambda_of_logs(logs: &[f64; 3]) -> [f64; 2] {
    [logs[0] - logs[2], logs[1] - logs[2]]
}

pub fn totally_positive_gens(field: &Field, us: &UnitSystem) -> Result<TotallyPositiveGens, UnitError> {
    let [s0, s1, s2] = us.signatures;
    let in_kernel = |b: i64, c: i64| {
        let s = (if b & 1 == 1 { s1 } else { 0 }) ^ (if c & 1 == 1 { s2 } else { 0 });
        s == 0 || s == s0
    };
    let kernel: Vec<(i64, i64)> = [(0, 0), (1, 0), (0, 1), (1, 1)]
        .into_iter()
        .filter(|(b, c)| in_kernel(*b, *c))
        .collect();
    // columns are exponent vectors
    let cols: [[i64; 2]; 2] = match kernel.len() {
        4 => [[1, 0], [0, 1]],
        2 => match kernel[1] {
            (1, 0) => [[1, 0], [0, 2]],
            (0, 1) => [[2, 0], [0, 1]],
            _ => [[1, 1], [0, 2]],
        },
        1 => [[2, 0], [0, 2]],
        _ => return Err(UnitError::Inconsistent("signature kernel is not a subgroup".into())),
    };
    let mut units = [FieldElement::zero(); 2];
    let mut negated = [false; 2];
    let mut lambda = [[0.0; 2]; 2];
    let le = [lambda_of_logs(&us.logs[0]), lambda_of_logs(&us.logs[1])];
    for l in 0..2 {
        let [b, c] = cols[l];
        let u = field
            .checked_mul(
                &field.unit_pow(&us.fundamental[0], b).ok_or(UnitError::Overflow)?,
                &field.unit_pow(&us.fundamental[1], c).ok_or(UnitError::Overflow)?,
            )
            .ok_or(UnitError::Overflow)?;
        let sig = field.signature(&u)?;
        let (u, neg) = if sig == 0 {
            (u, false)
        } else if sig == s0 {
            (u.neg(), true)
        } else {
            return Err(UnitError::Inconsistent("kernel element is not totally positive".into()));
        };
        units[l] = u;
        negated[l] = neg;
        lambda[l] = std::array::from_fn(|i| b as f64 * le[0][i] + c as f64 * le[1][i]);
    }
    let exponents = [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]];
    // dual basis: rows of the inverse of the matrix whose columns are λ_l
    let det = lambda[0][0] * lambda[1][1] - lambda[1][0] * lambda[0][1];
    let dual = [
        [lambda[1][1] / det, -lambda[1][0] / det],
        [-lambda[0][1] / det, lambda[0][0] / det],
    ];
    Ok(TotallyPositiveGens {
        units,
        exponents,
        negated,
        lambda,
        dual,
    })
}

/// `v(α) = Π sgn(α^{(i)})^{e_i}`; bit `i` of `bits` is `e_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SignCharacter {
    bits: u8,
}

impl SignCharacter {
    pub const TRIVIAL: SignCharacter = SignCharacter { bits: 0 };

    pub fn new(e: [u8; 3]) -> Self {
        Self {
            bits: (e[0] & 1) | ((e[1] & 1) << 1) | ((e[2] & 1) << 2),
        }
    }

    pub fn from_bits(bits: u8) -> Self {
        Self { bits: bits & 0b111 }
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn exponents(&self) -> [u8; 3] {
        std::array::from_fn(|i| (self.bits >> i) & 1)
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }

    /// Value on an element with the given signature.
    pub fn eval_signature(&self, signature: u8) -> i8 {
        if (self.bits & signature).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn eval(&self, field: &Field, z: &FieldElement) -> Result<i8, FieldError> {
        Ok(self.eval_signature(field.signature(z)?))
    }

    pub fn xor(&self, other: &SignCharacter) -> SignCharacter {
        SignCharacter::from_bits(self.bits ^ other.bits)
    }

    /// `(0, v)` is good: `v` is trivial on every unit.
    pub fn is_good(&self, us: &UnitSystem) -> bool {
        us.signatures.iter().all(|s| self.eval_signature(*s) == 1)
    }
}

impl fmt::Display for SignCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.exponents();
        write!(f, "{}{}{}", e[0], e[1], e[2])
    }
}

impl FromStr for SignCharacter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.len() != 3 || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(format!("sign character must be three binary digits e1e2e3, got {s:?}"));
        }
        let e: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
        Ok(SignCharacter::new([e[0], e[1], e[2]]))
    }
}

/// All `v` with `(0, v)` good: even weight and trivial on `ε_1, ε_2`.
pub fn good_characters(us: &UnitSystem) -> Vec<SignCharacter> {
    (0u8..8).map(SignCharacter::from_bits).filter(|v| v.is_good(us)).collect()
}

/// A point `μ = n_1 μ*_1 + n_2 μ*_2` of `Λ_U*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualVector {
    pub coords: [i64; 2],
    pub mu: [f64; 2],
}

impl DualVector {
    /// `(μ_1, μ_2, μ_3 = −μ_1 − μ_2)`.
    pub fn components(&self) -> [f64; 3] {
        [self.mu[0], self.mu[1], -self.mu[0] - self.mu[1]]
    }

    pub fn norm(&self) -> f64 {
        self.mu[0].hypot(self.mu[1])
    }
}

/// Every `μ ∈ Λ_U*` with `|μ| ≤ radius` such that `(μ, v)` is good.
///
/// For each fundamental unit `ε`, `⟨μ, λ(ε)⟩` is a half-integer because `ε²`
/// is totally positive; it is rounded to the nearest half-integer (tolerance
/// 0.25) and cross-checked against the exact value from the exponents of
/// `u_1, u_2`.
pub fn good_mu_for(
    v: &SignCharacter,
    tp: &TotallyPositiveGens,
    us: &UnitSystem,
    radius: f64,
) -> Result<Vec<DualVector>, UnitError> {
    if v.weight() % 2 == 1 {
        // v(−1) = −1 while λ(−1) = 0
        return Ok(Vec::new());
    }
    let le = [lambda_of_logs(&us.logs[0]), lambda_of_logs(&us.logs[1])];
    let e = tp.exponents;
    let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
    // 2·B^{-1}·det / det: rows of adj(B); exact ⟨μ, λ(ε_l)⟩ = Σ_m n_m adj[m][l] / det
    let adj = [[e[1][1], -e[0][1]], [-e[1][0], e[0][0]]];
    let reach: [i64; 2] = std::array::from_fn(|l| {
        let len = tp.lambda[l][0].hypot(tp.lambda[l][1]);
        (radius * len).floor() as i64
    });
    let mut out = Vec::new();
    for n1 in -reach[0]..=reach[0] {
        for n2 in -reach[1]..=reach[1] {
            let mu = [
                n1 as f64 * tp.dual[0][0] + n2 as f64 * tp.dual[1][0],
                n1 as f64 * tp.dual[0][1] + n2 as f64 * tp.dual[1][1],
            ];
            if mu[0].hypot(mu[1]) > radius {
                continue;
            }
            let mut good = true;
            for l in 0..2 {
                let h = mu[0] * le[l][0] + mu[1] * le[l][1];
                let twice = (2.0 * h).round();
                if (2.0 * h - twice).abs() > 0.5 {
                    return Err(UnitError::Inconsistent(format!("<mu, lambda> = {h} is not a half-integer")));
                }
                let exact_num = 2 * (n1 * adj[0][l] + n2 * adj[1][l]);
                if exact_num % det != 0 || exact_num / det != twice as i64 {
                    return Err(UnitError::Inconsistent(format!(
                        "half-integer rounding {twice} disagrees with exact value {exact_num}/{det}"
                    )));
                }
                let character = if (twice as i64).rem_euclid(2) == 0 { 1 } else { -1 };
                if character * v.eval_signature(us.signatures[l + 1]) != 1 {
                    good = false;
                    break;
                }
            }
            if good {
                out.push(DualVector { coords: [n1, n2], mu });
            }
        }
    }
    out.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.coords.cmp(&b.coords)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::CubicPoly;

    #[test]
    fn character_parsing_round_trips() {
        let v: SignCharacter = "011".parse().unwrap();
        assert_eq!(v.exponents(), [0, 1, 1]);
        assert_eq!(v.to_string(), "011");
        assert!("0111".parse::<SignCharacter>().is_err());
        assert!("012".parse::<SignCharacter>().is_err());
    }

    #[test]
    fn tiny_bound_is_rejected() {
        let k = Field::new(CubicPoly::new(2, -3, -1)).unwrap();
        assert!(matches!(find_units(&k, 0.1), Err(UnitError::BoundTooSmall { .. })));
    }

    #[test]
    fn k257_contains_alpha() {
        let k = Field::new(CubicPoly::new(2, -3, -1)).unwrap();
        let us = find_units(&k, 10.0).unwrap();
        assert!(us.found_units().contains(&k.alpha()));
        assert!(us.exponents_of(&k, &k.alpha()).is_some());
    }
}

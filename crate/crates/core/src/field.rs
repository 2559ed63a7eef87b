//! Exact arithmetic in a totally real cubic field.
//!
//! Elements are integer coordinate triples over an integral basis
//! `ω_1, ω_2, ω_3`. Trace and norm are computed from the integer
//! multiplication table; signs of real embeddings are certified by exact
//! evaluation over dyadic root-isolating intervals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::interval::RationalInterval;
use crate::poly::{CubicPoly, RootInterval};

/// Root intervals are cached at this many bits unless overridden.
pub const DEFAULT_ROOT_PRECISION: u32 = 256;

/// Precision of the integer fast path used by [`Field::certified_sign`].
const FAST_PREC: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("polynomial {poly} is reducible over the rationals (root {root})")]
    Reducible { poly: CubicPoly, root: i64 },
    #[error("polynomial {poly} is not totally real (discriminant {disc})")]
    NotTotallyReal { poly: CubicPoly, disc: i128 },
    #[error("supplied basis is singular")]
    SingularBasis,
    #[error("supplied basis has a non-integral multiplication table")]
    NonIntegralBasis,
    #[error("supplied basis does not span an order containing 1 and the root")]
    NotAnOrder,
    #[error("trace-form discriminant {gram} disagrees with det(basis)^2 * disc(poly) = {expected}")]
    DiscriminantMismatch { gram: String, expected: String },
    #[error("sign requested for the zero element")]
    ZeroElement,
    #[error("embedding index {0} out of range (expected 0..3)")]
    BadEmbedding(usize),
    #[error("precision cap of {0} bits exceeded while certifying a sign")]
    PrecisionCap(u32),
    #[error("integer overflow in field arithmetic")]
    Overflow,
}

/// Integer coordinates over the integral basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement {
    pub coords: [i128; 3],
}

impl FieldElement {
    pub const fn new(coords: [i128; 3]) -> Self {
        Self { coords }
    }

    pub const fn zero() -> Self {
        Self { coords: [0; 3] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0; 3]
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.map(|c| -c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new([
            self.coords[0] + other.coords[0],
            self.coords[1] + other.coords[1],
            self.coords[2] + other.coords[2],
        ])
    }

    pub fn scale(&self, k: i128) -> Self {
        Self::new(self.coords.map(|c| c * k))
    }

    /// The representative of `±self` whose first nonzero coordinate is positive.
    pub fn sign_normalized(&self) -> Self {
        match self.coords.iter().find(|c| **c != 0) {
            Some(c) if *c < 0 => self.neg(),
            _ => *self,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

/// `ω_j = (1/denominator) Σ_k numerators[j][k] α^k` with an integer
/// multiplication table `ω_i ω_j = Σ_k mult[i][j][k] ω_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralBasis {
    numerators: [[i128; 3]; 3],
    denominator: i128,
    mult: [[[i128; 3]; 3]; 3],
    one: [i128; 3],
    alpha: [i128; 3],
}

impl IntegralBasis {
    pub fn numerators(&self) -> &[[i128; 3]; 3] {
        &self.numerators
    }

    pub fn denominator(&self) -> i128 {
        self.denominator
    }

    pub fn mult_table(&self) -> &[[[i128; 3]; 3]; 3] {
        &self.mult
    }

    /// Basis matrix as exact rationals (rows are `ω_j` in the power basis).
    pub fn matrix(&self) -> [[BigRational; 3]; 3] {
        let d = BigInt::from(self.denominator);
        std::array::from_fn(|j| {
            std::array::from_fn(|k| BigRational::new(BigInt::from(self.numerators[j][k]), d.clone()))
        })
    }
}

/// `β_1, β_2` span the trace-zero sublattice and `Tr β_3 = κ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceBasis {
    /// Column `j` holds the integral-basis coordinates of `β_{j+1}`.
    change: [[i128; 3]; 3],
    kappa: i128,
}

impl TraceBasis {
    pub fn kappa(&self) -> i128 {
        self.kappa
    }

    pub fn change_matrix(&self) -> &[[i128; 3]; 3] {
        &self.change
    }

    pub fn beta(&self, j: usize) -> FieldElement {
        FieldElement::new([self.change[0][j], self.change[1][j], self.change[2][j]])
    }

    /// `c1·β_1 + c2·β_2 + m·β_3`.
    pub fn element(&self, c1: i128, c2: i128, m: i128) -> FieldElement {
        let u = &self.change;
        FieldElement::new(std::array::from_fn(|r| u[r][0] * c1 + u[r][1] * c2 + u[r][2] * m))
    }
}

#[derive(Debug, Clone)]
pub struct Field {
    poly: CubicPoly,
    basis: IntegralBasis,
    disc: i128,
    traces: [i128; 3],
    norm_form: Vec<([usize; 3], i128)>,
    /// Cached isolating intervals, largest root first.
    roots: [RootInterval; 3],
    fast_roots: [i128; 3],
    embeddings: [[f64; 3]; 3],
    trace_basis: TraceBasis,
}

impl Field {
    /// Builds the field over the power basis, taking `D = Δ(p)`.
    pub fn new(poly: CubicPoly) -> Result<Self, FieldError> {
        Self::build(poly, None, DEFAULT_ROOT_PRECISION)
    }

    /// `basis` rows are `ω_1, ω_2, ω_3` as coefficients of `1, α, α²`.
    pub fn build(
        poly: CubicPoly,
        basis: Option<&[[BigRational; 3]; 3]>,
        root_precision: u32,
    ) -> Result<Self, FieldError> {
        if let Some(root) = poly.rational_root() {
            return Err(FieldError::Reducible { poly, root });
        }
        let pdisc = poly.discriminant();
        if pdisc <= 0 {
            return Err(FieldError::NotTotallyReal { poly, disc: pdisc });
        }
        let identity = identity_rational();
        let basis = integral_basis(&poly, basis.unwrap_or(&identity))?;

        let power_traces = [3i128, -(poly.a as i128), (poly.a as i128).pow(2) - 2 * poly.b as i128];
        let mut traces = [0i128; 3];
        for (j, t) in traces.iter_mut().enumerate() {
            let num: i128 = (0..3).map(|k| basis.numerators[j][k] * power_traces[k]).sum();
            if num % basis.denominator != 0 {
                return Err(FieldError::NonIntegralBasis);
            }
            *t = num / basis.denominator;
        }

        let gram: [[i128; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| basis.mult[i][j][k] * traces[k]).sum()));
        let disc = det3_i128(&gram);
        let pmat = basis.matrix();
        let det_p = det3_rational(&pmat);
        let expected = &det_p * &det_p * BigRational::from_integer(BigInt::from(pdisc));
        if BigRational::from_integer(BigInt::from(disc)) != expected {
            return Err(FieldError::DiscriminantMismatch {
                gram: disc.to_string(),
                expected: expected.to_string(),
            });
        }

        let isolated = poly.isolate_roots();
        debug_assert_eq!(isolated.len(), 3);
        let prec = root_precision.max(FAST_PREC + 8);
        let roots: [RootInterval; 3] = std::array::from_fn(|i| isolated[i].refined(prec));
        let fast_roots = std::array::from_fn(|i| {
            roots[i].at_precision(FAST_PREC).lower_numerator().to_i128().expect("root fits in i128")
        });

        let norm_form = norm_form(&basis.mult);
        let mut field = Field {
            poly,
            basis,
            disc,
            traces,
            norm_form,
            roots,
            fast_roots,
            embeddings: [[0.0; 3]; 3],
            trace_basis: TraceBasis {
                change: [[0; 3]; 3],
                kappa: 0,
            },
        };
        field.embeddings = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut e = [0i128; 3];
                e[j] = 1;
                field.embed(&FieldElement::new(e), i, 80).mid_f64()
            })
        });
        field.trace_basis = field.reduced_trace_basis();
        Ok(field)
    }

    pub fn poly(&self) -> CubicPoly {
        self.poly
    }

    pub fn basis(&self) -> &IntegralBasis {
        &self.basis
    }

    /// Field discriminant `D` (trace-form Gram determinant).
    pub fn discriminant(&self) -> i128 {
        self.disc
    }

    pub fn kappa(&self) -> i128 {
        self.trace_basis.kappa
    }

    pub fn trace_basis(&self) -> &TraceBasis {
        &self.trace_basis
    }

    /// `embeddings()[i][j] = ω_j^{(i)}` in double precision.
    pub fn embeddings(&self) -> &[[f64; 3]; 3] {
        &self.embeddings
    }

    pub fn root_interval(&self, i: usize) -> &RootInterval {
        &self.roots[i]
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::new(self.basis.one)
    }

    /// The defining root `α`.
    pub fn alpha(&self) -> FieldElement {
        FieldElement::new(self.basis.alpha)
    }

    pub fn from_integer(&self, n: i128) -> FieldElement {
        self.one().scale(n)
    }

    /// `Σ_k coeffs[k] α^k`, if that element lies in the order.
    pub fn from_power_basis(&self, coeffs: [i128; 3]) -> Option<FieldElement> {
        let powers = [self.one(), self.alpha(), self.mul(&self.alpha(), &self.alpha())];
        let mut out = FieldElement::zero();
        for (k, c) in coeffs.iter().enumerate() {
            out = out.add(&powers[k].scale(*c));
        }
        Some(out)
    }

    pub fn trace(&self, z: &FieldElement) -> i128 {
        (0..3).map(|j| z.coords[j] * self.traces[j]).sum()
    }

    /// Traces of the integral basis elements.
    pub fn basis_traces(&self) -> [i128; 3] {
        self.traces
    }

    pub fn checked_norm(&self, z: &FieldElement) -> Option<i128> {
        let c = &z.coords;
        let mut acc: i128 = 0;
        for (idx, coef) in &self.norm_form {
            let term = coef
                .checked_mul(c[idx[0]])?
                .checked_mul(c[idx[1]])?
                .checked_mul(c[idx[2]])?;
            acc = acc.checked_add(term)?;
        }
        Some(acc)
    }

    /// Exact norm from the multiplication table.
    pub fn norm(&self, z: &FieldElement) -> i128 {
        if let Some(n) = self.checked_norm(z) {
            return n;
        }
        let c: Vec<BigInt> = z.coords.iter().map(|x| BigInt::from(*x)).collect();
        let mut acc = BigInt::zero();
        for (idx, coef) in &self.norm_form {
            acc += BigInt::from(*coef) * &c[idx[0]] * &c[idx[1]] * &c[idx[2]];
        }
        acc.to_i128().expect("norm exceeds i128")
    }

    /// Norm form as `(monomial exponents, coefficient)` terms; used by hot loops.
    pub fn norm_form(&self) -> &[([usize; 3], i128)] {
        &self.norm_form
    }

    pub fn checked_mul(&self, z: &FieldElement, w: &FieldElement) -> Option<FieldElement> {
        let mut out = [0i128; 3];
        for i in 0..3 {
            if z.coords[i] == 0 {
                continue;
            }
            for j in 0..3 {
                if w.coords[j] == 0 {
                    continue;
                }
                let zw = z.coords[i].checked_mul(w.coords[j])?;
                for (k, o) in out.iter_mut().enumerate() {
                    let m = self.basis.mult[i][j][k];
                    if m != 0 {
                        *o = o.checked_add(zw.checked_mul(m)?)?;
                    }
                }
            }
        }
        Some(FieldElement::new(out))
    }

    pub fn mul(&self, z: &FieldElement, w: &FieldElement) -> FieldElement {
        self.checked_mul(z, w).expect("coordinate overflow in field multiplication")
    }

    /// Matrix of multiplication by `z`: column `i` holds the coordinates of `z·ω_i`.
    pub fn mult_matrix(&self, z: &FieldElement) -> [[i128; 3]; 3] {
        std::array::from_fn(|k| {
            std::array::from_fn(|i| (0..3).map(|j| z.coords[j] * self.basis.mult[j][i][k]).sum())
        })
    }

    /// Inverse of a unit (`|N(u)| = 1`), `None` otherwise or on overflow.
    pub fn unit_inverse(&self, u: &FieldElement) -> Option<FieldElement> {
        let m = self.mult_matrix(u);
        let det = det3_i128_checked(&m)?;
        if det.abs() != 1 {
            return None;
        }
        let adj = adjugate3(&m)?;
        let one = self.basis.one;
        let mut out = [0i128; 3];
        for (r, o) in out.iter_mut().enumerate() {
            let mut s: i128 = 0;
            for (c, oc) in one.iter().enumerate() {
                s = s.checked_add(adj[r][c].checked_mul(*oc)?)?;
            }
            *o = s * det;
        }
        Some(FieldElement::new(out))
    }

    /// `u^n` for a unit `u`; negative exponents use the exact inverse.
    pub fn unit_pow(&self, u: &FieldElement, n: i64) -> Option<FieldElement> {
        let base = if n < 0 { self.unit_inverse(u)? } else { *u };
        let mut e = n.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.checked_mul(&acc, &sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = self.checked_mul(&sq, &sq)?;
            }
        }
        Some(acc)
    }

    /// Numerators of `z` in the power basis; the common denominator is
    /// `basis().denominator()`.
    pub fn power_numerators(&self, z: &FieldElement) -> [i128; 3] {
        std::array::from_fn(|k| (0..3).map(|j| z.coords[j] * self.basis.numerators[j][k]).sum())
    }

    /// Double-precision embeddings `z^{(i)}`.
    pub fn embed_f64(&self, z: &FieldElement) -> [f64; 3] {
        std::array::from_fn(|i| (0..3).map(|j| z.coords[j] as f64 * self.embeddings[i][j]).sum())
    }

    /// Certified enclosure of `z^{(i)}` of width at most `2^-prec`.
    ///
    /// Successive calls with growing `prec` return nested intervals.
    pub fn embed(&self, z: &FieldElement, i: usize, prec: u32) -> RationalInterval {
        assert!(i < 3, "embedding index out of range");
        let q = self.power_numerators(z);
        let mut k = prec.saturating_add(16).max(64);
        loop {
            let iv = self.range_at(&q, i, k);
            if iv.width_at_most_pow2(prec) {
                return iv;
            }
            k += (k / 2).max(16);
        }
    }

    /// Exact range of `z(x)` for `x` in the `k`-bit isolating interval of root `i`.
    fn range_at(&self, q: &[i128; 3], i: usize, k: u32) -> RationalInterval {
        let root = self.roots[i].at_precision(k);
        let lo = root.lower_numerator().clone();
        let hi = &lo + 1;
        let s = BigInt::one() << k as usize;
        let (q0, q1, q2) = (BigInt::from(q[0]), BigInt::from(q[1]), BigInt::from(q[2]));
        let eval = |n: &BigInt| BigRational::from_integer(&q0 * &s * &s + &q1 * n * &s + &q2 * n * n);
        let mut min = eval(&lo);
        let mut max = min.clone();
        let at_hi = eval(&hi);
        if at_hi < min {
            min = at_hi.clone();
        }
        if at_hi > max {
            max = at_hi;
        }
        if !q2.is_zero() {
            // vertex at n* = -q1·2^k / (2 q2)
            let vertex = BigRational::new(-&q1 * &s, &q2 * 2);
            if vertex > BigRational::from_integer(lo.clone()) && vertex < BigRational::from_integer(hi) {
                let v = BigRational::from_integer(&q0 * &s * &s)
                    - BigRational::new(&q1 * &q1 * &s * &s, &q2 * 4);
                if v < min {
                    min = v.clone();
                }
                if v > max {
                    max = v;
                }
            }
        }
        let scale = BigRational::new(BigInt::one(), BigInt::from(self.basis.denominator) * &s * &s);
        RationalInterval::new(min * &scale, max * &scale)
    }

    /// Exact sign of `z^{(i)}`.
    ///
    /// Refinement stops at `64 + ⌈log₂ Π_{j≠i} |z^{(j)}|⌉` bits: `|N(z)| ≥ 1`
    /// bounds `|z^{(i)}|` away from zero by that amount.
    pub fn certified_sign(&self, z: &FieldElement, i: usize) -> Result<i8, FieldError> {
        if i >= 3 {
            return Err(FieldError::BadEmbedding(i));
        }
        if z.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let q = self.power_numerators(z);
        if let Some(s) = self.fast_sign(&q, i) {
            return Ok(s);
        }
        let mut log_bound = 0.0f64;
        for j in (0..3).filter(|j| *j != i) {
            let mag = self.range_at(&q, j, 64).magnitude().to_f64().unwrap_or(f64::MAX);
            log_bound += mag.max(1.0).log2();
        }
        let cap = 64 + log_bound.ceil() as u32;
        let mut k = 64;
        loop {
            let iv = self.range_at(&q, i, k);
            if let Some(s) = iv.sign() {
                return Ok(s);
            }
            if iv.width_at_most_pow2(cap) {
                return Err(FieldError::PrecisionCap(cap));
            }
            k *= 2;
        }
    }

    /// Sign via 40-bit root intervals in `i128`; `None` when undecided or on overflow.
    fn fast_sign(&self, q: &[i128; 3], i: usize) -> Option<i8> {
        let lo = self.fast_roots[i];
        let hi = lo + 1;
        let s: i128 = 1 << FAST_PREC;
        let eval = |n: i128| -> Option<i128> {
            q[0].checked_mul(s)?
                .checked_mul(s)?
                .checked_add(q[1].checked_mul(n)?.checked_mul(s)?)?
                .checked_add(q[2].checked_mul(n)?.checked_mul(n)?)
        };
        let g_lo = eval(lo)?.signum();
        let g_hi = eval(hi)?.signum();
        if g_lo == 0 || g_lo != g_hi {
            return None;
        }
        if q[2] != 0 {
            let t = q[1].checked_mul(s)?.checked_neg()?;
            let den = 2 * q[2];
            let (a, b) = (lo.checked_mul(den)?, hi.checked_mul(den)?);
            let inside = if den > 0 { a < t && t < b } else { b < t && t < a };
            if inside {
                let disc = 4i128.checked_mul(q[0])?.checked_mul(q[2])?.checked_sub(q[1].checked_mul(q[1])?)?;
                let vs = disc.signum() * q[2].signum();
                if vs != g_lo {
                    return None;
                }
            }
        }
        Some(g_lo as i8)
    }

    /// Bit `i` is set when `z^{(i)} < 0`.
    pub fn signature(&self, z: &FieldElement) -> Result<u8, FieldError> {
        let mut bits = 0u8;
        for i in 0..3 {
            if self.certified_sign(z, i)? < 0 {
                bits |= 1 << i;
            }
        }
        Ok(bits)
    }

    pub fn is_totally_positive(&self, z: &FieldElement) -> Result<bool, FieldError> {
        Ok(self.signature(z)? == 0)
    }

    /// `Tr(z·w)`.
    pub fn trace_form(&self, z: &FieldElement, w: &FieldElement) -> i128 {
        self.trace(&self.mul(z, w))
    }

    fn reduced_trace_basis(&self) -> TraceBasis {
        let mut t = self.traces;
        let mut cols: [[i128; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        for i in 0..2 {
            while t[i] != 0 {
                let q = Integer::div_floor(&t[2], &t[i]);
                t[2] -= q * t[i];
                for r in 0..3 {
                    cols[2][r] -= q * cols[i][r];
                }
                t.swap(2, i);
                cols.swap(2, i);
            }
        }
        if t[2] < 0 {
            t[2] = -t[2];
            cols[2] = cols[2].map(|x| -x);
        }
        let kappa = t[2];
        let mut b1 = FieldElement::new(cols[0]);
        let mut b2 = FieldElement::new(cols[1]);
        // Gauss reduction of the trace-zero plane under Tr(x²).
        loop {
            if self.trace_form(&b1, &b1) > self.trace_form(&b2, &b2) {
                std::mem::swap(&mut b1, &mut b2);
            }
            let q11 = self.trace_form(&b1, &b1);
            let q12 = self.trace_form(&b1, &b2);
            let mu = Integer::div_floor(&(2 * q12 + q11), &(2 * q11));
            if mu == 0 {
                break;
            }
            b2 = b2.add(&b1.scale(-mu));
        }
        // Center β_3 against the trace-zero plane.
        let b3 = FieldElement::new(cols[2]);
        let (g11, g12, g22) = (
            self.trace_form(&b1, &b1),
            self.trace_form(&b1, &b2),
            self.trace_form(&b2, &b2),
        );
        let (r1, r2) = (self.trace_form(&b3, &b1), self.trace_form(&b3, &b2));
        let det = g11 * g22 - g12 * g12;
        let x1 = round_div(r1 * g22 - r2 * g12, det);
        let x2 = round_div(g11 * r2 - g12 * r1, det);
        let b3 = b3.add(&b1.scale(-x1)).add(&b2.scale(-x2));
        let change = std::array::from_fn(|r| [b1.coords[r], b2.coords[r], b3.coords[r]]);
        TraceBasis { change, kappa }
    }
}

fn round_div(num: i128, den: i128) -> i128 {
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    Integer::div_floor(&(2 * num + den), &(2 * den))
}

fn identity_rational() -> [[BigRational; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { BigRational::one() } else { BigRational::zero() })
    })
}

/// Multiplies two power-basis vectors modulo the defining polynomial.
fn power_mul(p: &CubicPoly, x: &[BigRational; 3], y: &[BigRational; 3]) -> [BigRational; 3] {
    let mut prod = vec![BigRational::zero(); 5];
    for i in 0..3 {
        for j in 0..3 {
            prod[i + j] += &x[i] * &y[j];
        }
    }
    let (a, b, c) = (
        BigRational::from_integer(BigInt::from(p.a)),
        BigRational::from_integer(BigInt::from(p.b)),
        BigRational::from_integer(BigInt::from(p.c)),
    );
    for d in [4usize, 3] {
        let co = std::mem::take(&mut prod[d]);
        prod[d - 1] -= &a * &co;
        prod[d - 2] -= &b * &co;
        prod[d - 3] -= &c * &co;
    }
    [prod[0].clone(), prod[1].clone(), prod[2].clone()]
}

fn to_basis_coords(v: &[BigRational; 3], inv: &[[BigRational; 3]; 3]) -> Option<[i128; 3]> {
    let mut out = [0i128; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let x: BigRational = (0..3).map(|k| &v[k] * &inv[k][j]).sum();
        if !x.is_integer() {
            return None;
        }
        *o = x.to_integer().to_i128()?;
    }
    Some(out)
}

fn integral_basis(poly: &CubicPoly, rows: &[[BigRational; 3]; 3]) -> Result<IntegralBasis, FieldError> {
    let inv = inverse3_rational(rows).ok_or(FieldError::SingularBasis)?;
    let mut mult = [[[0i128; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let prod = power_mul(poly, &rows[i], &rows[j]);
            mult[i][j] = to_basis_coords(&prod, &inv).ok_or(FieldError::NonIntegralBasis)?;
        }
    }
    let unit = |k: usize| -> [BigRational; 3] {
        std::array::from_fn(|t| if t == k { BigRational::one() } else { BigRational::zero() })
    };
    let one = to_basis_coords(&unit(0), &inv).ok_or(FieldError::NotAnOrder)?;
    let alpha = to_basis_coords(&unit(1), &inv).ok_or(FieldError::NotAnOrder)?;
    let mut den = BigInt::one();
    for row in rows {
        for x in row {
            den = den.lcm(x.denom());
        }
    }
    let numerators = std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            (&rows[j][k] * BigRational::from_integer(den.clone()))
                .to_integer()
                .to_i128()
                .expect("basis numerator fits in i128")
        })
    });
    Ok(IntegralBasis {
        numerators,
        denominator: den.to_i128().expect("basis denominator fits in i128"),
        mult,
        one,
        alpha,
    })
}

/// Norm form coefficients: `N(c) = Σ coef · c_i c_j c_k` over `i ≤ j ≤ k`.
fn norm_form(mult: &[[[i128; 3]; 3]; 3]) -> Vec<([usize; 3], i128)> {
    // A_j[k][i] = mult[j][i][k]; det(Σ c_j A_j) expands into mixed determinants.
    let a = |j: usize, k: usize, i: usize| mult[j][i][k];
    let mut terms: Vec<([usize; 3], i128)> = Vec::new();
    for j0 in 0..3 {
        for j1 in 0..3 {
            for j2 in 0..3 {
                let m: [[i128; 3]; 3] = [
                    std::array::from_fn(|i| a(j0, 0, i)),
                    std::array::from_fn(|i| a(j1, 1, i)),
                    std::array::from_fn(|i| a(j2, 2, i)),
                ];
                let d = det3_i128(&m);
                if d == 0 {
                    continue;
                }
                let mut key = [j0, j1, j2];
                key.sort_unstable();
                match terms.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, c)) => *c += d,
                    None => terms.push((key, d)),
                }
            }
        }
    }
    terms.retain(|(_, c)| *c != 0);
    terms.sort();
    terms
}

pub(crate) fn det3_i128(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn det3_i128_checked(m: &[[i128; 3]; 3]) -> Option<i128> {
    let minor = |a: usize, b: usize, c: usize, d: usize| -> Option<i128> {
        m[1][a].checked_mul(m[2][b])?.checked_sub(m[1][c].checked_mul(m[2][d])?)
    };
    let t0 = m[0][0].checked_mul(minor(1, 2, 2, 1)?)?;
    let t1 = m[0][1].checked_mul(minor(0, 2, 2, 0)?)?;
    let t2 = m[0][2].checked_mul(minor(0, 1, 1, 0)?)?;
    t0.checked_sub(t1)?.checked_add(t2)
}

fn adjugate3(m: &[[i128; 3]; 3]) -> Option<[[i128; 3]; 3]> {
    let mut adj = [[0i128; 3]; 3];
    for (r, row) in adj.iter_mut().enumerate() {
        for (c, out) in row.iter_mut().enumerate() {
            // cofactor of m[c][r]
            let rows: Vec<usize> = (0..3).filter(|x| *x != c).collect();
            let cols: Vec<usize> = (0..3).filter(|x| *x != r).collect();
            let minor = m[rows[0]][cols[0]]
                .checked_mul(m[rows[1]][cols[1]])?
                .checked_sub(m[rows[0]][cols[1]].checked_mul(m[rows[1]][cols[0]])?)?;
            *out = if (r + c) % 2 == 0 { minor } else { -minor };
        }
    }
    Some(adj)
}

pub(crate) fn det3_rational(m: &[[BigRational; 3]; 3]) -> BigRational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

pub(crate) fn inverse3_rational(m: &[[BigRational; 3]; 3]) -> Option<[[BigRational; 3]; 3]> {
    let det = det3_rational(m);
    if det.is_zero() {
        return None;
    }
    Some(std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let rows: Vec<usize> = (0..3).filter(|x| *x != c).collect();
            let cols: Vec<usize> = (0..3).filter(|x| *x != r).collect();
            let minor = &m[rows[0]][cols[0]] * &m[rows[1]][cols[1]] - &m[rows[0]][cols[1]] * &m[rows[1]][cols[0]];
            let cof = if (r + c) % 2 == 0 { minor } else { -minor };
            cof / &det
        })
    }))
}

//! Totally positive integers of trace `a`: lattice points strictly inside the
//! triangle `T_a = {(c_1, c_2) : c_1β_1 + c_2β_2 + (a/κ)β_3 ≫ 0}`.

mod naive;
mod registry;
mod series;
mod sweep;

use thiserror::Error;

use crate::field::{det3_i128, Field, FieldElement, FieldError};
use crate::interval::RationalInterval;

pub use naive::{NaiveCounter, NAIVE_MAX_TRACE};
pub use registry::{CounterRegistry, LatticeCounter};
pub use series::{error_series, CountSeries, CSV_HEADER};
pub use sweep::SweepCounter;

/// Precision used for the certified vertex and coefficient intervals.
const VERTEX_PRECISION: u32 = 160;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("trace {a} exceeds the cost guard {max} of the {counter} counter")]
    TooLarge { counter: &'static str, a: i64, max: i64 },
    #[error("unknown counter {0:?}")]
    UnknownCounter(String),
    #[error("coordinates overflow at trace {0}")]
    Overflow(i64),
    #[error("not a trace basis: {0}")]
    BadBasis(String),
    #[error("malformed series: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `κ·a²/(2√D)`, the area of `T_a`.
pub fn geometric_estimate(field: &Field, a: i64) -> f64 {
    if a <= 0 {
        return 0.0;
    }
    let a = a as f64;
    field.kappa() as f64 * a * a / (2.0 * (field.discriminant() as f64).sqrt())
}

/// Per-field data shared by every counter: the trace basis, its embeddings
/// and the sweep parametrization.
#[derive(Debug, Clone)]
pub struct TraceGeometry<'f> {
    field: &'f Field,
    betas: [FieldElement; 3],
    kappa: i64,
    /// `emb[i][j] = β_{j+1}^{(i)}` rounded to double.
    emb: [[f64; 3]; 3],
    /// Certified enclosures of the same numbers.
    coefficients: [[RationalInterval; 3]; 3],
    /// Coordinate swept column by column (0 for `c_1`, 1 for `c_2`).
    sweep_axis: usize,
    unit_vertices: [[f64; 2]; 3],
}

impl<'f> TraceGeometry<'f> {
    pub fn new(field: &'f Field) -> Result<Self, CountError> {
        let tb = field.trace_basis();
        Self::with_basis(field, [tb.beta(0), tb.beta(1), tb.beta(2)])
    }

    /// Uses any basis with traces `(0, 0, κ)` spanning `O_K`.
    pub fn with_basis(field: &'f Field, betas: [FieldElement; 3]) -> Result<Self, CountError> {
        let kappa = field.kappa();
        let traces = betas.map(|b| field.trace(&b));
        if traces != [0, 0, kappa] {
            return Err(CountError::BadBasis(format!("traces {traces:?}, expected [0, 0, {kappa}]")));
        }
        let m: [[i128; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|j| betas[j].coords[r]));
        if det3_i128(&m).abs() != 1 {
            return Err(CountError::BadBasis("change of basis is not unimodular".into()));
        }
        let coefficients: [[RationalInterval; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| field.embed(&betas[j], i, VERTEX_PRECISION)));
        let emb = std::array::from_fn(|i| std::array::from_fn(|j| coefficients[i][j].mid_f64()));
        let mut geom = Self {
            field,
            betas,
            kappa: kappa as i64,
            emb,
            coefficients,
            sweep_axis: 0,
            unit_vertices: [[0.0; 2]; 3],
        };
        let t1 = geom.triangle(geom.kappa)?;
        let v = t1.vertices_f64();
        geom.unit_vertices = v.map(|p| [p[0] / geom.kappa as f64, p[1] / geom.kappa as f64]);
        let extent = |axis: usize| {
            let xs = v.map(|p| p[axis]);
            xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min)
        };
        // fewer columns means less work per trace
        geom.sweep_axis = if extent(1) < extent(0) { 1 } else { 0 };
        Ok(geom)
    }

    pub fn field(&self) -> &'f Field {
        self.field
    }

    pub fn betas(&self) -> &[FieldElement; 3] {
        &self.betas
    }

    pub fn kappa(&self) -> i64 {
        self.kappa
    }

    pub fn embeddings(&self) -> &[[f64; 3]; 3] {
        &self.emb
    }

    pub fn sweep_axis(&self) -> usize {
        self.sweep_axis
    }

    /// `c_1β_1 + c_2β_2 + mβ_3`.
    pub fn element(&self, c1: i64, c2: i64, m: i64) -> FieldElement {
        let b = &self.betas;
        let (c1, c2, m) = (c1 as i128, c2 as i128, m as i128);
        FieldElement::new(std::array::from_fn(|r| {
            c1 * b[0].coords[r] + c2 * b[1].coords[r] + m * b[2].coords[r]
        }))
    }

    /// Exact test of `L_i(c_1, c_2) > 0`; the element is never zero when `m ≠ 0`.
    pub fn positive_at(&self, c1: i64, c2: i64, m: i64, i: usize) -> Result<bool, FieldError> {
        Ok(self.field.certified_sign(&self.element(c1, c2, m), i)? > 0)
    }

    /// Vertices of `T_1` scaled to trace `a`, in double precision.
    pub fn scaled_vertices(&self, a: i64) -> [[f64; 2]; 3] {
        let s = a as f64;
        self.unit_vertices.map(|p| [s * p[0], s * p[1]])
    }

    /// The triangle for trace `a`, with vertices solved directly at `m = a/κ`.
    /// Non-multiples of `κ` give the (lattice-point free) real triangle anyway.
    pub fn triangle(&self, a: i64) -> Result<Triangle, CountError> {
        let c = &self.coefficients;
        let m = RationalInterval::point(num_rational::BigRational::new(a.into(), self.kappa.into()));
        // vertex k solves L_i = L_j = 0 for the two other embeddings
        let mut vertices: Vec<[RationalInterval; 2]> = Vec::with_capacity(3);
        for k in 0..3 {
            let (i, j) = match k {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let det = &(&c[i][0] * &c[j][1]) - &(&c[i][1] * &c[j][0]);
            let ri = -&(&c[i][2] * &m);
            let rj = -&(&c[j][2] * &m);
            let x = &(&ri * &c[j][1]) - &(&rj * &c[i][1]);
            let y = &(&c[i][0] * &rj) - &(&c[j][0] * &ri);
            let x = x.checked_div(&det).ok_or(FieldError::SingularBasis)?;
            let y = y.checked_div(&det).ok_or(FieldError::SingularBasis)?;
            vertices.push([x, y]);
        }
        let vertices: [[RationalInterval; 2]; 3] = vertices.try_into().expect("three vertices");
        Ok(Triangle {
            a,
            coefficients: self.coefficients.clone(),
            vertices,
        })
    }
}

/// `T_a` with certified linear-form coefficients and vertices.
#[derive(Debug, Clone)]
pub struct Triangle {
    a: i64,
    /// `coefficients[i][j]` encloses `β_{j+1}^{(i)}`.
    coefficients: [[RationalInterval; 3]; 3],
    vertices: [[RationalInterval; 2]; 3],
}

impl Triangle {
    pub fn trace(&self) -> i64 {
        self.a
    }

    pub fn coefficients(&self) -> &[[RationalInterval; 3]; 3] {
        &self.coefficients
    }

    pub fn vertices(&self) -> &[[RationalInterval; 2]; 3] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> [[f64; 2]; 3] {
        std::array::from_fn(|k| [self.vertices[k][0].mid_f64(), self.vertices[k][1].mid_f64()])
    }

    /// Shoelace area from the vertex midpoints.
    pub fn area(&self) -> f64 {
        let v = self.vertices_f64();
        0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs()
    }

    /// Integer box `[lo, hi]` containing the triangle along `axis`.
    pub fn integer_range(&self, axis: usize) -> (i64, i64) {
        let lo = self
            .vertices
            .iter()
            .map(|v| v[axis].lo_f64())
            .fold(f64::MAX, f64::min);
        let hi = self
            .vertices
            .iter()
            .map(|v| v[axis].hi_f64())
            .fold(f64::MIN, f64::max);
        (lo.floor() as i64 - 1, hi.ceil() as i64 + 1)
    }
}

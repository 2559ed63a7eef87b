//! Plain-text field descriptions:
//!
//! ```text
//! # x^3 + 2x^2 - 3x - 1
//! poly = 1, 2, -3, -1
//! basis = 1,0,0; 0,1,0; 0,0,1
//! ```
//!
//! `poly` lists the monic coefficients from degree 3 down. The optional
//! `basis` gives the integral basis as rows of rationals `p/q`, each row the
//! coefficients of `1, α, α²`; without it the power basis is assumed to be
//! the full ring of integers.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::poly::CubicPoly;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing required key `poly`")]
    MissingPoly,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub poly: CubicPoly,
    pub basis: Option<[[BigRational; 3]; 3]>,
}

impl FieldSpec {
    pub fn from_path(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                SpecError::NotFound(path.display().to_string())
            } else {
                SpecError::Io {
                    path: path.display().to_string(),
                    source: e,
                }
            }
        })?;
        text.parse()
    }

    pub fn build(&self, root_precision: u32) -> Result<Field, FieldError> {
        Field::build(self.poly, self.basis.as_ref(), root_precision)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for FieldSpec {
    type Err = SpecError;

    fn from_str(text: &str) -> Result<Self, SpecError> {
        let mut poly = None;
        let mut basis = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| SpecError::Syntax { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {content:?}")))?;
            match key.trim() {
                "poly" => {
                    if poly.is_some() {
                        return Err(err("duplicate key `poly`".into()));
                    }
                    let c: Vec<i64> = value
                        .split(',')
                        .map(|t| t.trim().parse::<i64>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| err(format!("bad coefficient: {e}")))?;
                    if c.len() != 4 || c[0] != 1 {
                        return Err(err("poly must list 4 coefficients of a monic cubic, leading 1".into()));
                    }
                    poly = Some(CubicPoly::new(c[1], c[2], c[3]));
                }
                "basis" => {
                    if basis.is_some() {
                        return Err(err("duplicate key `basis`".into()));
                    }
                    let rows: Vec<&str> = value.split(';').collect();
                    if rows.len() != 3 {
                        return Err(err("basis needs 3 rows separated by `;`".into()));
                    }
                    let mut m: Vec<[BigRational; 3]> = Vec::new();
                    for row in rows {
                        let entries: Vec<BigRational> = row
                            .split(',')
                            .map(|t| parse_rational(t).ok_or_else(|| err(format!("bad rational {:?}", t.trim()))))
                            .collect::<Result<_, _>>()?;
                        let entries: [BigRational; 3] = entries
                            .try_into()
                            .map_err(|_| err("each basis row needs 3 entries".into()))?;
                        m.push(entries);
                    }
                    basis = Some(m.try_into().expect("three rows"));
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(FieldSpec {
            poly: poly.ok_or(SpecError::MissingPoly)?,
            basis,
        })
    }
}

use super::registry::LatticeCounter;
use super::{CountError, TraceGeometry};

/// Largest trace the box scan accepts.
pub const NAIVE_MAX_TRACE: i64 = 10_000;

/// Scans the integer bounding box of the certified vertices and tests all
/// three signs of every point exactly.
#[derive(Debug, Default, Clone, Copy)]
pub struct NaiveCounter;

impl LatticeCounter for NaiveCounter {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn description(&self) -> &'static str {
        "bounding-box scan with exact sign tests (oracle)"
    }

    fn max_trace(&self) -> Option<i64> {
        Some(NAIVE_MAX_TRACE)
    }

    fn count(&self, geom: &TraceGeometry<'_>, a: i64) -> Result<u64, CountError> {
        if a > NAIVE_MAX_TRACE {
            return Err(CountError::TooLarge {
                counter: self.name(),
                a,
                max: NAIVE_MAX_TRACE,
            });
        }
        if a <= 0 || a % geom.kappa() != 0 {
            return Ok(0);
        }
        let m = a / geom.kappa();
        let t = geom.triangle(a)?;
        let (x0, x1) = t.integer_range(0);
        let (y0, y1) = t.integer_range(1);
        let mut total = 0;
        for c1 in x0..=x1 {
            for c2 in y0..=y1 {
                let mut inside = true;
                for i in 0..3 {
                    if !geom.positive_at(c1, c2, m, i)? {
                        inside = false;
                        break;
                    }
                }
                total += inside as u64;
            }
        }
        Ok(total)
    }
}

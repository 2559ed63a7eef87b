use super::registry::LatticeCounter;
use super::{CountError, TraceGeometry};

/// Column sweep: for each integer on the sweep axis, the three half-planes
/// cut an open interval for the other coordinate. Endpoints are computed in
/// floating point; any endpoint within rounding distance of an integer is
/// settled by an exact sign test.
#[derive(Debug, Default, Clone, Copy)]
pub struct SweepCounter;

impl LatticeCounter for SweepCounter {
    fn name(&self) -> &'static str {
        "sweep"
    }

    fn description(&self) -> &'static str {
        "column sweep with certified endpoint resolution"
    }

    fn count(&self, geom: &TraceGeometry<'_>, a: i64) -> Result<u64, CountError> {
        if a <= 0 || a % geom.kappa() != 0 {
            return Ok(0);
        }
        let m = a / geom.kappa();
        let ax = geom.sweep_axis();
        let emb = geom.embeddings();
        let mf = m as f64;
        let mut slope = [0.0; 3];
        let mut offset = [0.0; 3];
        let mut lower = [false; 3];
        for i in 0..3 {
            let q = emb[i][1 - ax];
            slope[i] = -emb[i][ax] / q;
            offset[i] = -emb[i][2] * mf / q;
            lower[i] = q > 0.0;
        }
        let v = geom.scaled_vertices(a);
        let smin = v.iter().map(|p| p[ax]).fold(f64::MAX, f64::min);
        let smax = v.iter().map(|p| p[ax]).fold(f64::MIN, f64::max);
        let (s_lo, s_hi) = (smin.floor() as i64 - 1, smax.ceil() as i64 + 1);
        if s_hi.unsigned_abs() > 1 << 52 || s_lo.unsigned_abs() > 1 << 52 {
            return Err(CountError::Overflow(a));
        }

        let point = |s: i64, t: i64| if ax == 0 { (s, t) } else { (t, s) };
        let mut total = 0u64;
        for s in s_lo..=s_hi {
            let sf = s as f64;
            let mut lo = i64::MIN;
            let mut hi = i64::MAX;
            for i in 0..3 {
                let ls = slope[i] * sf;
                let b = ls + offset[i];
                let tol = 1e-12 * (ls.abs() + offset[i].abs()) + 1e-9;
                let n = b.round();
                if (b - n).abs() <= tol {
                    let n = n as i64;
                    let (c1, c2) = point(s, n);
                    let inside = geom.positive_at(c1, c2, m, i)?;
                    if lower[i] {
                        lo = lo.max(if inside { n } else { n + 1 });
                    } else {
                        hi = hi.min(if inside { n } else { n - 1 });
                    }
                } else if lower[i] {
                    lo = lo.max(b.floor() as i64 + 1);
                } else {
                    hi = hi.min(b.floor() as i64);
                }
            }
            if hi >= lo {
                total += (hi - lo + 1) as u64;
            }
        }
        Ok(total)
    }
}

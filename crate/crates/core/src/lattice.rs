//! Small-dimension lattice tools: LLL in dimension 3, enumeration of lattice
//! points in an axis-aligned box of embedding space, Hermite normal forms and
//! Gauss reduction in the plane.

use num_integer::Integer;

/// Columns of a 3×3 matrix, `cols[j][i]` = entry `(i, j)`.
pub type Cols3 = [[f64; 3]; 3];

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// LLL-reduces the column basis `b` (δ = 0.99). Returns the reduced basis and
/// the integer transform `t` with `reduced[j] = Σ_k t[j][k]·b[k]`.
pub fn lll3(b: &Cols3) -> (Cols3, [[i64; 3]; 3]) {
    let mut basis = *b;
    let mut t: [[i64; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let delta = 0.99;
    let mut k = 1usize;
    let mut guard = 0;
    while k < 3 {
        guard += 1;
        assert!(guard < 100_000, "LLL failed to converge");
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(&basis);
            let q = mu[k][j].round();
            if q != 0.0 {
                for i in 0..3 {
                    basis[k][i] -= q * basis[j][i];
                }
                let qi = q as i64;
                for i in 0..3 {
                    t[k][i] -= qi * t[j][i];
                }
            }
        }
        let (gs, mu) = gram_schmidt(&basis);
        let lhs = dot(&gs[k], &gs[k]);
        let rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * dot(&gs[k - 1], &gs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            t.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (basis, t)
}

fn gram_schmidt(b: &Cols3) -> (Cols3, [[f64; 3]; 3]) {
    let mut gs = *b;
    let mut mu = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..i {
            mu[i][j] = dot(&b[i], &gs[j]) / dot(&gs[j], &gs[j]);
            for c in 0..3 {
                gs[i][c] -= mu[i][j] * gs[j][c];
            }
        }
        mu[i][i] = 1.0;
    }
    (gs, mu)
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let rows: Vec<usize> = (0..3).filter(|x| *x != c).collect();
            let cols: Vec<usize> = (0..3).filter(|x| *x != r).collect();
            let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
            inv[r][c] = if (r + c) % 2 == 0 { minor } else { -minor } / det;
        }
    }
    inv
}

/// Enumerates integer vectors `c` with `|Σ_j emb[i][j]·c_j| ≤ bounds[i]` for
/// every row `i`.
///
/// The box is scaled to the unit cube and the scaled basis is LLL-reduced;
/// the outermost reduced coordinate is bounded through the inverse matrix,
/// the middle one by solving the two-dimensional slice exactly, and the
/// innermost one by intersecting slabs. Points within about `1e-9` relative
/// of the boundary may or may not be reported; callers filter exactly.
#[derive(Debug, Clone)]
pub struct BoxEnumerator {
    /// Reduced scaled basis, rows = embeddings, cols = reduced coordinates.
    scaled: [[f64; 3]; 3],
    /// Reduced basis in unscaled embedding space, same layout.
    unscaled: [[f64; 3]; 3],
    /// `c = transform · d` maps reduced coordinates to original ones.
    transform: [[i64; 3]; 3],
    outer: (i64, i64),
}

const SLACK: f64 = 1e-9;

impl BoxEnumerator {
    pub fn new(emb: &[[f64; 3]; 3], bounds: [f64; 3]) -> Self {
        assert!(bounds.iter().all(|b| *b > 0.0), "box bounds must be positive");
        // columns of the scaled embedding matrix
        let cols: Cols3 = std::array::from_fn(|j| std::array::from_fn(|i| emb[i][j] / bounds[i]));
        let (reduced, t) = lll3(&cols);
        let scaled: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| reduced[j][i]));
        let unscaled = std::array::from_fn(|i| std::array::from_fn(|j| scaled[i][j] * bounds[i]));
        // transform[r][j]: original coordinate r of reduced basis vector j
        let transform = std::array::from_fn(|r| std::array::from_fn(|j| t[j][r]));
        let inv = invert3(&scaled);
        let reach: f64 = inv[2].iter().map(|x| x.abs()).sum::<f64>() * (1.0 + SLACK);
        let outer = ((-reach).ceil() as i64, reach.floor() as i64);
        Self {
            scaled,
            unscaled,
            transform,
            outer,
        }
    }

    /// Inclusive range of the outermost reduced coordinate.
    pub fn outer_range(&self) -> (i64, i64) {
        self.outer
    }

    pub fn to_original(&self, d: [i64; 3]) -> [i64; 3] {
        std::array::from_fn(|r| (0..3).map(|j| self.transform[r][j] * d[j]).sum())
    }

    /// Visits every candidate with outermost reduced coordinate `d3`, passing
    /// the original coordinates and the double-precision embedding.
    pub fn for_each_in_slice<F: FnMut([i64; 3], [f64; 3])>(&self, d3: i64, mut f: F) {
        let s = &self.scaled;
        let d3f = d3 as f64;
        let lo: [f64; 3] = std::array::from_fn(|i| -1.0 - SLACK - s[i][2] * d3f);
        let hi: [f64; 3] = std::array::from_fn(|i| 1.0 + SLACK - s[i][2] * d3f);
        let Some((d2_lo, d2_hi)) = self.middle_range(&lo, &hi) else {
            return;
        };
        for d2 in d2_lo..=d2_hi {
            let d2f = d2 as f64;
            let mut a = f64::NEG_INFINITY;
            let mut b = f64::INFINITY;
            let mut feasible = true;
            for i in 0..3 {
                let rest = s[i][1] * d2f;
                let (l, h) = (lo[i] - rest, hi[i] - rest);
                let m = s[i][0];
                if m.abs() < 1e-300 {
                    if l > 0.0 || h < 0.0 {
                        feasible = false;
                    }
                    continue;
                }
                let (x, y) = if m > 0.0 { (l / m, h / m) } else { (h / m, l / m) };
                a = a.max(x);
                b = b.min(y);
            }
            if !feasible || a > b {
                continue;
            }
            let (first, last) = (a.ceil() as i64, b.floor() as i64);
            if first > last {
                continue;
            }
            let u = &self.unscaled;
            let base: [f64; 3] = std::array::from_fn(|i| u[i][1] * d2f + u[i][2] * d3f);
            let t = &self.transform;
            let cbase: [i64; 3] = std::array::from_fn(|r| t[r][1] * d2 + t[r][2] * d3);
            for d1 in first..=last {
                let d1f = d1 as f64;
                let y = [base[0] + u[0][0] * d1f, base[1] + u[1][0] * d1f, base[2] + u[2][0] * d1f];
                let c = [cbase[0] + t[0][0] * d1, cbase[1] + t[1][0] * d1, cbase[2] + t[2][0] * d1];
                f(c, y);
            }
        }
    }

    /// Range of `d2` over the polygon `lo ≤ s[·][0]·d1 + s[·][1]·d2 ≤ hi`.
    fn middle_range(&self, lo: &[f64; 3], hi: &[f64; 3]) -> Option<(i64, i64)> {
        let s = &self.scaled;
        let lines: Vec<(f64, f64, f64)> = (0..3)
            .flat_map(|i| [(s[i][0], s[i][1], lo[i]), (s[i][0], s[i][1], hi[i])])
            .collect();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for p in 0..lines.len() {
            for q in (p + 1)..lines.len() {
                let (a1, b1, c1) = lines[p];
                let (a2, b2, c2) = lines[q];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-14 * (a1.abs() + b1.abs()) * (a2.abs() + b2.abs()) {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                let ok = (0..3).all(|i| {
                    let v = s[i][0] * x + s[i][1] * y;
                    let tol = 1e-9 * (1.0 + lo[i].abs() + hi[i].abs());
                    v >= lo[i] - tol && v <= hi[i] + tol
                });
                if ok {
                    min = min.min(y);
                    max = max.max(y);
                }
            }
        }
        if min > max {
            return None;
        }
        let pad = 1e-9 * (1.0 + min.abs().max(max.abs()));
        Some(((min - pad).ceil() as i64, (max + pad).floor() as i64))
    }
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`:
/// upper triangular, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`. Two full-rank matrices span the same lattice iff their forms
/// are equal.
pub fn hnf3(m: &[[i128; 3]; 3]) -> [[i128; 3]; 3] {
    let mut rows = *m;
    let mut pivot_row = 0;
    for col in 0..3 {
        // Euclid on column `col` among rows pivot_row..3
        loop {
            let nonzero: Vec<usize> = (pivot_row..3).filter(|r| rows[*r][col] != 0).collect();
            if nonzero.len() <= 1 {
                if let Some(&r) = nonzero.first() {
                    rows.swap(pivot_row, r);
                }
                break;
            }
            let &best = nonzero.iter().min_by_key(|r| rows[**r][col].abs()).unwrap();
            for &r in &nonzero {
                if r != best {
                    let q = Integer::div_floor(&rows[r][col], &rows[best][col]);
                    for c in 0..3 {
                        rows[r][c] -= q * rows[best][c];
                    }
                }
            }
        }
        if rows[pivot_row][col] == 0 {
            continue;
        }
        if rows[pivot_row][col] < 0 {
            rows[pivot_row] = rows[pivot_row].map(|x| -x);
        }
        let p = rows[pivot_row][col];
        for r in 0..pivot_row {
            let q = Integer::div_floor(&rows[r][col], &p);
            for c in 0..3 {
                rows[r][c] -= q * rows[pivot_row][c];
            }
        }
        pivot_row += 1;
        if pivot_row == 3 {
            break;
        }
    }
    rows
}

/// Lagrange–Gauss reduction of a planar basis under the Euclidean norm of
/// `embed(v)`; returns the integer transform applied (rows = new vectors in
/// terms of the old ones).
pub fn gauss_reduce<F: Fn(&[f64; 2]) -> f64>(mut basis: [[f64; 2]; 2], norm_sq: F) -> ([[f64; 2]; 2], [[i64; 2]; 2]) {
    let mut t = [[1i64, 0], [0, 1]];
    for _ in 0..10_000 {
        if norm_sq(&basis[0]) > norm_sq(&basis[1]) {
            basis.swap(0, 1);
            t.swap(0, 1);
        }
        let n0 = norm_sq(&basis[0]);
        let sum = [basis[0][0] + basis[1][0], basis[0][1] + basis[1][1]];
        let cross = (norm_sq(&sum) - n0 - norm_sq(&basis[1])) / 2.0;
        let q = (cross / n0).round();
        if q == 0.0 {
            break;
        }
        basis[1] = [basis[1][0] - q * basis[0][0], basis[1][1] - q * basis[0][1]];
        let qi = q as i64;
        t[1] = [t[1][0] - qi * t[0][0], t[1][1] - qi * t[0][1]];
    }
    (basis, t)
}

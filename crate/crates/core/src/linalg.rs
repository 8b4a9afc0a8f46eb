//! Exact dense linear algebra over Gaussian rationals.
//!
//! Everything here is deterministic: row reduction always pivots on the
//! first nonzero entry in column order, so ranks, solutions, nullspace bases
//! and quotient representatives are reproducible bit for bit. No numerical
//! tolerances exist anywhere; a pivot is a pivot because it is exactly
//! nonzero.

use crate::scalar::GaussianRational;

/// Dense matrix as rows of Gaussian rationals. All rows must share a length.
pub type Mat = Vec<Vec<GaussianRational>>;

pub fn mat_zero(rows: usize, cols: usize) -> Mat {
    vec![vec![GaussianRational::zero(); cols]; rows]
}

pub fn mat_identity(n: usize) -> Mat {
    let mut m = mat_zero(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = GaussianRational::one();
    }
    m
}

pub fn mat_shape(m: &Mat) -> (usize, usize) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    debug_assert!(m.iter().all(|r| r.len() == cols), "ragged matrix");
    (rows, cols)
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(mat_shape(a), mat_shape(b), "shape mismatch in mat_add");
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(mat_shape(a), mat_shape(b), "shape mismatch in mat_sub");
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mat_neg(a: &Mat) -> Mat {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

pub fn mat_scale(a: &Mat, c: &GaussianRational) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = mat_shape(a);
    let (br, bc) = mat_shape(b);
    assert_eq!(ac, br, "inner dimension mismatch in mat_mul");
    let mut out = mat_zero(ar, bc);
    for i in 0..ar {
        for k in 0..ac {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..bc {
                out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
            }
        }
    }
    out
}

pub fn mat_transpose(a: &Mat) -> Mat {
    let (r, c) = mat_shape(a);
    let mut out = mat_zero(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j].clone();
        }
    }
    out
}

pub fn mat_conj(a: &Mat) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x.conj()).collect()).collect()
}

/// Conjugate transpose.
pub fn mat_star(a: &Mat) -> Mat {
    mat_transpose(&mat_conj(a))
}

pub fn mat_is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

pub fn mat_is_hermitian(a: &Mat) -> bool {
    let (r, c) = mat_shape(a);
    r == c && *a == mat_star(a)
}

pub fn mat_is_symmetric(a: &Mat) -> bool {
    let (r, c) = mat_shape(a);
    r == c && *a == mat_transpose(a)
}

pub fn mat_vec(a: &Mat, v: &[GaussianRational]) -> Vec<GaussianRational> {
    let (r, c) = mat_shape(a);
    assert_eq!(c, v.len(), "dimension mismatch in mat_vec");
    (0..r)
        .map(|i| {
            let mut acc = GaussianRational::zero();
            for j in 0..c {
                acc = &acc + &(&a[i][j] * &v[j]);
            }
            acc
        })
        .collect()
}

/// Row-major flattening, the fixed vectorization used by all span tests.
pub fn vectorize(a: &Mat) -> Vec<GaussianRational> {
    a.iter().flat_map(|r| r.iter().cloned()).collect()
}

/// In-place reduced row echelon form; returns the pivot column indices in
/// increasing order. Pivot choice: first row with a nonzero entry in the
/// leftmost unfinished column.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let (rows, cols) = mat_shape(m);
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("pivot is nonzero");
        for j in col..cols {
            m[row][j] = &m[row][j] * &inv;
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in col..cols {
                    let delta = &factor * &m[row][j];
                    m[i][j] = &m[i][j] - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut copy = m.clone();
    rref(&mut copy).len()
}

/// One exact solution of `a x = b` with free variables set to zero, or
/// `None` when the system is inconsistent.
pub fn solve_canonical(a: &Mat, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
    let (rows, cols) = mat_shape(a);
    assert_eq!(rows, b.len(), "right-hand side length mismatch");
    let mut aug: Mat = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut row = r.clone();
            row.push(v.clone());
            row
        })
        .collect();
    if rows == 0 {
        return Some(vec![GaussianRational::zero(); cols]);
    }
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut x = vec![GaussianRational::zero(); cols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = aug[row][cols].clone();
    }
    Some(x)
}

/// Deterministic nullspace basis of `a` (one vector per free column of the
/// reduced echelon form, in column order).
pub fn nullspace(a: &Mat) -> Vec<Vec<GaussianRational>> {
    let (_, cols) = mat_shape(a);
    let mut m = a.clone();
    let pivots = if m.is_empty() { Vec::new() } else { rref(&mut m) };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![GaussianRational::zero(); cols];
        v[free] = GaussianRational::one();
        for (row, &col) in pivots.iter().enumerate() {
            v[col] = -&m[row][free];
        }
        basis.push(v);
    }
    basis
}

/// Exact inverse; `None` when singular.
pub fn mat_inverse(a: &Mat) -> Option<Mat> {
    let (n, c) = mat_shape(a);
    assert_eq!(n, c, "inverse of a non-square matrix");
    let mut aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            for j in 0..n {
                row.push(if i == j {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                });
            }
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Coefficients expressing `v` in the given generators, or `None` when `v`
/// lies outside their span. Free coefficients are zero.
pub fn span_solve(
    gens: &[Vec<GaussianRational>],
    v: &[GaussianRational],
) -> Option<Vec<GaussianRational>> {
    let dim = v.len();
    assert!(gens.iter().all(|g| g.len() == dim), "generator length mismatch");
    // Columns are the generators.
    let a: Mat = (0..dim)
        .map(|i| gens.iter().map(|g| g[i].clone()).collect())
        .collect();
    solve_canonical(&a, v)
}

pub fn span_contains(gens: &[Vec<GaussianRational>], v: &[GaussianRational]) -> bool {
    span_solve(gens, v).is_some()
}

/// Echelonized span with remembered pivot coordinates; used to produce
/// deterministic representatives of quotient classes.
pub struct SpanReducer {
    /// Echelon basis rows (leading coordinate of each row is its pivot).
    rows: Vec<Vec<GaussianRational>>,
    pivots: Vec<usize>,
}

impl SpanReducer {
    pub fn new(gens: &[Vec<GaussianRational>]) -> Self {
        let mut m: Mat = gens.to_vec();
        let pivots = if m.is_empty() { Vec::new() } else { rref(&mut m) };
        m.truncate(pivots.len());
        SpanReducer { rows: m, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// The representative of `v` modulo the span: the unique vector in
    /// `v + span` whose pivot coordinates vanish.
    pub fn reduce(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let factor = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                let delta = &factor * r;
                *o = &*o - &delta;
            }
        }
        out
    }

    pub fn contains(&self, v: &[GaussianRational]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(s: &str) -> GaussianRational {
        GaussianRational::parse(s).unwrap()
    }

    fn m(rows: &[&[&str]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|s| gr(s)).collect()).collect()
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = m(&[&["1", "2i"], &["1/2", "3"]]);
        let inv = mat_inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), mat_identity(2));
        assert_eq!(mat_mul(&inv, &a), mat_identity(2));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let a = m(&[&["1", "2"], &["2", "4"]]);
        assert!(mat_inverse(&a).is_none());
        assert_eq!(rank(&a), 1);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let a = m(&[&["1", "2", "3"], &["2", "4", "6"]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_canonical_finds_the_zero_free_solution() {
        // x + y = 2 with y free: canonical solution (2, 0).
        let a = m(&[&["1", "1"]]);
        let x = solve_canonical(&a, &[gr("2")]).unwrap();
        assert_eq!(x, vec![gr("2"), gr("0")]);
        // Inconsistent system.
        let a = m(&[&["1", "1"], &["1", "1"]]);
        assert!(solve_canonical(&a, &[gr("1"), gr("2")]).is_none());
    }

    #[test]
    fn span_membership_and_certificates() {
        let g1 = vec![gr("1"), gr("0"), gr("1")];
        let g2 = vec![gr("0"), gr("1"), gr("1i")];
        let gens = vec![g1, g2];
        let v = vec![gr("2"), gr("3i"), gr("-1")];
        let c = span_solve(&gens, &v).unwrap();
        assert_eq!(c, vec![gr("2"), gr("3i")]);
        let outside = vec![gr("0"), gr("0"), gr("1")];
        assert!(!span_contains(&gens, &outside));
    }

    #[test]
    fn quotient_representatives_vanish_on_pivots() {
        let gens = vec![vec![gr("1"), gr("2"), gr("0")]];
        let red = SpanReducer::new(&gens);
        assert_eq!(red.dim(), 1);
        let r = red.reduce(&[gr("3"), gr("1"), gr("5")]);
        assert!(r[0].is_zero());
        assert_eq!(r[1], gr("-5"));
        assert_eq!(r[2], gr("5"));
        assert!(red.contains(&[gr("-2"), gr("-4"), gr("0")]));
    }
}

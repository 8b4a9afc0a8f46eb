//! Matrices of truncated series sharing one space, grading and order.
//!
//! Inverses are computed by Neumann summation, which is exact to the
//! truncation order whenever the correction term vanishes to degree one;
//! `exp` and `log_unipotent` likewise terminate because their arguments are
//! required to vanish to degree one, so every power eventually truncates to
//! zero. With the `parallel` feature, entry products of `mul` are computed
//! on a rayon pool (see `crate::par`); `mul_sequential` is always available
//! and produces identical results.

use super::{Grading, TruncatedSeries, Var, VarSpace};
use crate::error::{Error, Result};
use crate::linalg::{mat_inverse, Mat};
use crate::scalar::GaussianRational;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rectangular matrix of series; all entries share space, grading and order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    space: VarSpace,
    grading: Grading,
    order: u32,
    entries: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn zero(rows: usize, cols: usize, space: VarSpace, grading: Grading, order: u32) -> Self {
        let entries = vec![TruncatedSeries::zero(space, grading, order); rows * cols];
        SeriesMatrix { rows, cols, space, grading, order, entries }
    }

    pub fn identity(n: usize, space: VarSpace, grading: Grading, order: u32) -> Self {
        let mut m = Self::zero(n, n, space, grading, order);
        for i in 0..n {
            m.set(i, i, TruncatedSeries::one(space, grading, order));
        }
        m
    }

    /// Build from a closure producing each entry.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        space: VarSpace,
        grading: Grading,
        order: u32,
        mut f: impl FnMut(usize, usize) -> TruncatedSeries,
    ) -> Self {
        let mut m = Self::zero(rows, cols, space, grading, order);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Embed a constant matrix as a matrix of constant series.
    pub fn from_scalar_matrix(a: &Mat, space: VarSpace, grading: Grading, order: u32) -> Self {
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        Self::from_fn(rows, cols, space, grading, order, |i, j| {
            TruncatedSeries::constant(space, grading, order, a[i][j].clone())
        })
    }

    /// Build from nested vectors; every row must have equal length and every
    /// entry must agree on space, grading and order.
    pub fn from_entries(rows: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Dimension("matrix needs at least one entry".to_string()));
        }
        let nrows = rows.len();
        let ncols = rows[0].len();
        let proto = &rows[0][0];
        let (space, grading, order) = (proto.space(), proto.grading(), proto.order());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::Dimension("ragged matrix rows".to_string()));
            }
            for e in row {
                if e.space() != space || e.grading() != grading || e.order() != order {
                    return Err(Error::Dimension(
                        "matrix entries disagree on space, grading or order".to_string(),
                    ));
                }
                entries.push(e.clone());
            }
        }
        Ok(SeriesMatrix { rows: nrows, cols: ncols, space, grading, order, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn at(&self, i: usize, j: usize) -> &TruncatedSeries {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.entries[i * self.cols + j]
    }

    /// Replace an entry; it must match the matrix space and grading, and its
    /// order may not be lower than the matrix order (it is truncated down).
    pub fn set(&mut self, i: usize, j: usize, s: TruncatedSeries) {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        assert_eq!(s.space(), self.space, "variable space mismatch");
        assert_eq!(s.grading(), self.grading, "grading mismatch");
        assert!(s.order() >= self.order, "entry order below matrix order");
        self.entries[i * self.cols + j] =
            if s.order() > self.order { s.truncate(self.order) } else { s };
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TruncatedSeries::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn assert_same_shape(&self, other: &Self) {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        assert_eq!(self.cols, other.cols, "column count mismatch");
        assert_eq!(self.space, other.space, "variable space mismatch");
        assert_eq!(self.grading, other.grading, "grading mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_shape(other);
        let order = self.order.min(other.order);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        SeriesMatrix { rows: self.rows, cols: self.cols, space: self.space, grading: self.grading, order, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_entries(TruncatedSeries::neg)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.map_entries(|e| e.scale(c))
    }

    /// Multiply every entry by one series.
    pub fn scale_series(&self, s: &TruncatedSeries) -> Self {
        let order = self.order.min(s.order());
        let entries = self.entries.iter().map(|e| e.mul(s)).collect();
        SeriesMatrix { rows: self.rows, cols: self.cols, space: self.space, grading: self.grading, order, entries }
    }

    pub fn map_entries(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        let entries: Vec<TruncatedSeries> = self.entries.iter().map(f).collect();
        let order = entries.iter().map(TruncatedSeries::order).min().unwrap_or(self.order);
        assert!(
            entries.iter().all(|e| e.order() == order
                && e.space() == self.space
                && e.grading() == self.grading),
            "entry map produced inconsistent series"
        );
        SeriesMatrix { rows: self.rows, cols: self.cols, space: self.space, grading: self.grading, order, entries }
    }

    fn product_entry(&self, other: &Self, i: usize, j: usize, order: u32) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(self.space, self.grading, order);
        for k in 0..self.cols {
            acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
        }
        acc
    }

    /// Matrix product; runs entry computations on the rayon pool when the
    /// `parallel` feature is enabled, and sequentially otherwise.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        assert_eq!(self.space, other.space, "variable space mismatch");
        assert_eq!(self.grading, other.grading, "grading mismatch");
        #[cfg(feature = "parallel")]
        {
            let order = self.order.min(other.order);
            let entries: Vec<TruncatedSeries> = crate::par::install(|| {
                (0..self.rows * other.cols)
                    .into_par_iter()
                    .map(|idx| self.product_entry(other, idx / other.cols, idx % other.cols, order))
                    .collect()
            });
            SeriesMatrix { rows: self.rows, cols: other.cols, space: self.space, grading: self.grading, order, entries }
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.mul_sequential(other)
        }
    }

    /// Matrix product computed on the calling thread; identical results to
    /// `mul`.
    pub fn mul_sequential(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        assert_eq!(self.space, other.space, "variable space mismatch");
        assert_eq!(self.grading, other.grading, "grading mismatch");
        let order = self.order.min(other.order);
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                entries.push(self.product_entry(other, i, j, order));
            }
        }
        SeriesMatrix { rows: self.rows, cols: other.cols, space: self.space, grading: self.grading, order, entries }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.space, self.grading, self.order, |i, j| {
            self.at(j, i).clone()
        })
    }

    /// Entry-wise formal conjugate.
    pub fn conjugate(&self) -> Self {
        self.map_entries(TruncatedSeries::conjugate)
    }

    pub fn conj_transpose(&self) -> Self {
        self.transpose().conjugate()
    }

    pub fn is_hermitian_series(&self) -> bool {
        self.is_square() && *self == self.conj_transpose()
    }

    pub fn is_symmetric_series(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    /// Entry-wise partial derivative; the order drops by the variable weight.
    pub fn differentiate(&self, v: Var) -> Self {
        let order = self.order.saturating_sub(self.space.weight_at(self.space.index_of(v), self.grading));
        let entries = self.entries.iter().map(|e| e.differentiate(v)).collect();
        SeriesMatrix { rows: self.rows, cols: self.cols, space: self.space, grading: self.grading, order, entries }
    }

    pub fn truncate(&self, order: u32) -> Self {
        self.map_entries(|e| e.truncate(order))
    }

    /// Reinterpret at a higher order; the caller asserts exactness there.
    pub fn assert_exact_to(&self, order: u32) -> Self {
        self.map_entries(|e| e.assert_exact_to(order))
    }

    pub fn set_vars_zero(&self, selected: impl Fn(Var) -> bool + Copy) -> Self {
        self.map_entries(|e| e.set_vars_zero(selected))
    }

    /// Constant terms as a scalar matrix.
    pub fn eval_zero(&self) -> Mat {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).constant_term()).collect())
            .collect()
    }

    /// Contiguous sub-block `rows r0..r1`, `cols c0..c1` (half-open).
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Self::from_fn(r1 - r0, c1 - c0, self.space, self.grading, self.order, |i, j| {
            self.at(r0 + i, c0 + j).clone()
        })
    }

    /// Assemble from a grid of blocks with conformal shapes.
    pub fn from_blocks(blocks: &[Vec<&SeriesMatrix>]) -> Result<Self> {
        if blocks.is_empty() || blocks[0].is_empty() {
            return Err(Error::Dimension("block grid is empty".to_string()));
        }
        let proto = blocks[0][0];
        let (space, grading) = (proto.space, proto.grading);
        let order = blocks
            .iter()
            .flatten()
            .map(|b| b.order)
            .min()
            .expect("nonempty grid");
        let col_widths: Vec<usize> = blocks[0].iter().map(|b| b.cols).collect();
        let mut total_rows = 0;
        for row in blocks {
            if row.len() != col_widths.len() {
                return Err(Error::Dimension("ragged block grid".to_string()));
            }
            let h = row[0].rows;
            for (b, &w) in row.iter().zip(&col_widths) {
                if b.rows != h || b.cols != w {
                    return Err(Error::Dimension("block shapes are not conformal".to_string()));
                }
                if b.space != space || b.grading != grading {
                    return Err(Error::Dimension(
                        "blocks disagree on space or grading".to_string(),
                    ));
                }
            }
            total_rows += h;
        }
        let total_cols: usize = col_widths.iter().sum();
        let mut out = Self::zero(total_rows, total_cols, space, grading, order);
        let mut row_off = 0;
        for row in blocks {
            let h = row[0].rows;
            let mut col_off = 0;
            for b in row {
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        let e = b.at(i, j);
                        let e = if e.order() > order { e.truncate(order) } else { e.clone() };
                        out.set(row_off + i, col_off + j, e);
                    }
                }
                col_off += b.cols;
            }
            row_off += h;
        }
        Ok(out)
    }

    /// Minimal degree among all entries' terms; `None` for the zero matrix.
    pub fn min_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(TruncatedSeries::min_degree).min()
    }

    /// Inverse of `Id - N` where `N` vanishes to degree one, via the
    /// geometric series `Id + N + N^2 + ...`.
    pub fn neumann_inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("only square matrices invert".to_string()));
        }
        let id = Self::identity(self.rows, self.space, self.grading, self.order);
        let n = id.sub(self);
        if n.min_degree() == Some(0) {
            return Err(Error::Precondition(
                "geometric inversion needs a correction vanishing to degree one".to_string(),
            ));
        }
        let mut acc = id.clone();
        let mut pow = id;
        for _ in 0..=self.order {
            pow = pow.mul(&n);
            if pow.is_zero() {
                return Ok(acc);
            }
            acc = acc.add(&pow);
        }
        if pow.mul(&n).is_zero() {
            Ok(acc)
        } else {
            Err(Error::Precondition(
                "geometric inversion did not terminate".to_string(),
            ))
        }
    }

    /// Inverse of a matrix whose constant term is invertible. Requires a
    /// grading in which every variable has positive weight (the total
    /// grading, or no zeta directions), so the correction vanishes to
    /// degree one.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("only square matrices invert".to_string()));
        }
        let m0 = self.eval_zero();
        let m0_inv = mat_inverse(&m0).ok_or_else(|| {
            Error::Singular("constant term of the matrix is singular".to_string())
        })?;
        let m0_inv = Self::from_scalar_matrix(&m0_inv, self.space, self.grading, self.order);
        let normalized = m0_inv.mul(self);
        Ok(normalized.neumann_inverse()?.mul(&m0_inv))
    }

    /// Matrix exponential of an argument vanishing to degree one (so the
    /// series terminates within the truncation order).
    pub fn exp(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("only square matrices exponentiate".to_string()));
        }
        if self.min_degree() == Some(0) {
            return Err(Error::Precondition(
                "matrix exponential needs an argument vanishing to degree one".to_string(),
            ));
        }
        let id = Self::identity(self.rows, self.space, self.grading, self.order);
        let mut acc = id.clone();
        let mut pow = id;
        let mut k: i64 = 0;
        loop {
            k += 1;
            pow = pow.mul(self);
            if pow.is_zero() {
                return Ok(acc);
            }
            let inv_k = GaussianRational::from_ratio(1, k);
            pow = pow.scale(&inv_k);
            acc = acc.add(&pow);
            // Each power raises the minimal degree, so k is bounded.
            if k as u32 > self.order + 1 {
                return Err(Error::Precondition(
                    "matrix exponential did not terminate".to_string(),
                ));
            }
        }
    }

    /// Logarithm of `Id + N` with `N` vanishing to degree one.
    pub fn log_unipotent(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("only square matrices have logarithms".to_string()));
        }
        let id = Self::identity(self.rows, self.space, self.grading, self.order);
        let n = self.sub(&id);
        if n.min_degree() == Some(0) {
            return Err(Error::NotUnipotent);
        }
        let mut acc = Self::zero(self.rows, self.rows, self.space, self.grading, self.order);
        let mut pow = id;
        let mut k: i64 = 0;
        loop {
            k += 1;
            pow = pow.mul(&n);
            if pow.is_zero() {
                return Ok(acc);
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&pow.scale(&GaussianRational::from_ratio(sign, k)));
            if k as u32 > self.order + 1 {
                return Err(Error::NotUnipotent);
            }
        }
    }
}

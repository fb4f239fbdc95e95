//! Dense matrices over the prime field or `f64`, with the handful of solves the
//! crate needs.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;

use crate::field::Fp;

/// Relative SVD cutoff used by the floating rank.
pub const RANK_TOLERANCE: f64 = 1e-8;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    /// Exact arithmetic: zero tests and ranks carry no tolerance.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn inv(self) -> Option<Self>;
    /// Pivot score; any nonzero value is acceptable for exact types.
    fn magnitude(self) -> f64;
    /// Treated as zero relative to `scale` during elimination.
    fn negligible(self, scale: f64) -> bool;

    fn rank(m: &Matrix<Self>) -> usize;
    /// Minimum-norm solution of `a x = b` when `a` has full row rank.
    fn solve_min_norm(a: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>>;
}

impl Scalar for Fp {
    const EXACT: bool = true;

    fn zero() -> Self {
        Fp::ZERO
    }
    fn one() -> Self {
        Fp::ONE
    }
    fn from_i64(v: i64) -> Self {
        Fp::from_i64(v)
    }
    fn inv(self) -> Option<Self> {
        Fp::inv(self)
    }
    fn magnitude(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
    fn negligible(self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn rank(m: &Matrix<Self>) -> usize {
        let mut work = m.clone();
        eliminate(&mut work, 0.0)
    }

    // Over a finite field "minimum norm" means the canonical right inverse
    // a^T (a a^T)^{-1}; it is singular with probability about rows/p.
    fn solve_min_norm(a: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        if a.rows() == 0 {
            return Some(vec![Fp::ZERO; a.cols()]);
        }
        if a.rows() == a.cols() {
            return solve_square(a, b);
        }
        if a.rows() > a.cols() {
            return None;
        }
        let at = a.transpose();
        let y = solve_square(&a.mul(&at), b)?;
        Some(at.mul_vec(&y))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn inv(self) -> Option<Self> {
        (self != 0.0).then(|| 1.0 / self)
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn negligible(self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale
    }

    fn rank(m: &Matrix<Self>) -> usize {
        rank_with_tolerance(m, RANK_TOLERANCE)
    }

    fn solve_min_norm(a: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        if a.rows() == 0 {
            return Some(vec![0.0; a.cols()]);
        }
        if a.rows() > a.cols() {
            return None;
        }
        let svd = a.to_nalgebra().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smax == 0.0 || smin <= 1e-12 * smax {
            return None;
        }
        let rhs = nalgebra::DVector::from_column_slice(b);
        let x = svd.solve(&rhs, 0.0).ok()?;
        Some(x.iter().copied().collect())
    }
}

/// Number of singular values above `rel * sigma_max`.
pub fn rank_with_tolerance(m: &Matrix<f64>, rel: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let sv = m.to_nalgebra().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * smax).count()
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == T::zero() {
                    continue;
                }
                let src = rhs.row(l);
                let dst = out.row_mut(i);
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length differs");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<T>) -> Self {
        assert!(self.rows == 0 || other.rows == 0 || self.cols == other.cols);
        let cols = if self.rows == 0 { other.cols } else { self.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols, data }
    }

    pub fn rank(&self) -> usize {
        T::rank(self)
    }

    pub fn determinant(&self) -> Option<T> {
        if self.rows != self.cols {
            return None;
        }
        let mut a = self.clone();
        let n = self.rows;
        let scale = a.max_magnitude();
        let mut det = T::one();
        for c in 0..n {
            let p = pivot_row(&a, c, c)?;
            if a[(p, c)].negligible(scale) {
                return Some(T::zero());
            }
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let d = a[(c, c)];
            det = det * d;
            let dinv = d.inv()?;
            for r in c + 1..n {
                let f = a[(r, c)] * dinv;
                if f != T::zero() {
                    for j in c..n {
                        let v = a[(c, j)];
                        a[(r, j)] -= f * v;
                    }
                }
            }
        }
        Some(det)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Matrix<f64> {
    /// Induced infinity norm (maximum absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

fn pivot_row<T: Scalar>(a: &Matrix<T>, col: usize, from: usize) -> Option<usize> {
    let mut best = None;
    let mut best_mag = -1.0;
    for r in from..a.rows() {
        let m = a[(r, col)].magnitude();
        if m > best_mag {
            best_mag = m;
            best = Some(r);
            if T::EXACT && m > 0.0 {
                break;
            }
        }
    }
    best
}

/// In-place row echelon reduction; returns the rank. Entries at or below
/// `scale`-relative noise are treated as zero.
fn eliminate<T: Scalar>(a: &mut Matrix<T>, scale: f64) -> usize {
    let (rows, cols) = a.shape();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = pivot_row(a, c, rank) else { break };
        if a[(p, c)].negligible(scale) {
            continue;
        }
        a.swap_rows(p, rank);
        let inv = a[(rank, c)].inv().expect("nonzero pivot");
        let pivot: Vec<T> = a.row(rank)[c..].to_vec();
        for r in rank + 1..rows {
            let f = a[(r, c)] * inv;
            if f == T::zero() {
                continue;
            }
            let row = &mut a.row_mut(r)[c..];
            for (x, &p) in row.iter_mut().zip(&pivot) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Gaussian elimination with partial pivoting; `None` for a singular system.
pub fn solve_square<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return None;
    }
    let scale = a.max_magnitude();
    let mut m = Matrix::from_fn(n, n + 1, |i, j| if j < n { a[(i, j)] } else { b[i] });
    for c in 0..n {
        let p = pivot_row(&m, c, c)?;
        if m[(p, c)].negligible(scale) {
            return None;
        }
        m.swap_rows(p, c);
        let inv = m[(c, c)].inv()?;
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = m[(r, c)] * inv;
            if f == T::zero() {
                continue;
            }
            for j in c..=n {
                let v = m[(c, j)];
                m[(r, j)] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| m[(i, n)] * m[(i, i)].inv().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(rows: &[&[i64]]) -> Matrix<Fp> {
        Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&v| Fp::from_i64(v)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn exact_rank_of_dependent_rows() {
        let m = fp(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(Matrix::<Fp>::zeros(0, 4).rank(), 0);
        assert_eq!(Matrix::<Fp>::identity(5).rank(), 5);
    }

    #[test]
    fn float_rank_uses_relative_cutoff() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-12]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(rank_with_tolerance(&m, 1e-14), 2);
    }

    #[test]
    fn square_solve_reproduces_rhs() {
        let a = fp(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let b: Vec<Fp> = [1, 2, 3].iter().map(|&v| Fp::from_i64(v)).collect();
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(solve_square(&fp(&[&[1, 2], &[2, 4]]), &b[..2]).is_none());
    }

    #[test]
    fn min_norm_float_is_orthogonal_to_kernel() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 2.0]]);
        let x = f64::solve_min_norm(&a, &[9.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12 && (x[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn determinant_sign_and_value() {
        let a = fp(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.determinant(), Some(Fp::from_i64(-1)));
        let b = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert!((b.determinant().unwrap() - 5.0).abs() < 1e-12);
    }
}

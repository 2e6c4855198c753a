//! Dense matrices over an exact field, with the linear algebra the rest of
//! the crate leans on: reduced row echelon form, rank, kernels, affine
//! solution sets, inverses and block assembly.
//!
//! Everything is generic over the scalar type; the crate instantiates it
//! with [`crate::Scalar`] (cyclotomic rationals) and, in tests, with plain
//! `BigRational`. Pivoting is deterministic (first nonzero), so identical
//! inputs give identical reduced forms on every platform.

use std::fmt;
use std::ops::{Add, Div, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimal field interface used by the algorithms here.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Neg<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
{
}

/// Row-major dense matrix. Zero-sized dimensions are legal and show up
/// naturally (graded pieces of dimension zero).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { rows, cols, entries }
    }

    pub fn column(entries: Vec<T>) -> Self {
        Matrix { rows: entries.len(), cols: 1, entries }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut t = T::zero();
        for i in 0..self.rows {
            t = t + self[(i, i)].clone();
        }
        t
    }

    pub fn pow(&self, mut e: usize) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Copies `block` into self with top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<T>) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<T> {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Assembles a matrix from a grid of blocks; row heights and column
    /// widths must be consistent across the grid.
    pub fn from_blocks(grid: &[Vec<Matrix<T>>]) -> Matrix<T> {
        let heights: Vec<usize> = grid.iter().map(|row| row[0].rows).collect();
        let widths: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        let mut out = Matrix::zeros(heights.iter().sum(), widths.iter().sum());
        let mut r0 = 0;
        for (bi, row) in grid.iter().enumerate() {
            assert_eq!(row.len(), widths.len(), "ragged block grid");
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                assert_eq!(b.rows, heights[bi], "block height mismatch");
                assert_eq!(b.cols, widths[bj], "block width mismatch");
                out.set_block(r0, c0, b);
                c0 += b.cols;
            }
            r0 += heights[bi];
        }
        out
    }

    pub fn hstack(blocks: &[&Matrix<T>]) -> Matrix<T> {
        let row = blocks.iter().map(|b| (*b).clone()).collect();
        Self::from_blocks(&[row])
    }

    pub fn vstack(blocks: &[&Matrix<T>]) -> Matrix<T> {
        let grid: Vec<Vec<Matrix<T>>> = blocks.iter().map(|b| vec![(*b).clone()]).collect();
        Self::from_blocks(&grid)
    }

    pub fn kron(&self, other: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)].clone()
                * other[(i % other.rows, j % other.cols)].clone()
        })
    }

    /// In-place Gauss-Jordan reduction; returns the pivot columns.
    /// Pivot choice is the first row with a nonzero entry, so the result is
    /// deterministic for exact scalars.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.entries.swap(p * self.cols + j, row * self.cols + j);
                }
            }
            let inv = T::one() / self[(row, col)].clone();
            for j in col..self.cols {
                let v = self[(row, j)].clone() * inv.clone();
                self[(row, j)] = v;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let factor = self[(r, col)].clone();
                for j in col..self.cols {
                    let v = self[(r, j)].clone() - factor.clone() * self[(row, j)].clone();
                    self[(r, j)] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel, as columns in echelon-canonical form:
    /// each free column gets 1, the other free columns 0.
    pub fn kernel_basis(&self) -> Vec<Matrix<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        let mut pivot_of_col = vec![None; self.cols];
        for (r, c) in pivots.iter().copied().enumerate() {
            pivot_of_col[c] = Some(r);
        }
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = Matrix::zeros(self.cols, 1);
            v[(free, 0)] = T::one();
            for (c, pr) in pivot_of_col.iter().enumerate() {
                if let Some(r) = pr {
                    v[(c, 0)] = -m[(*r, free)].clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        if !self.is_square() {
            return Err(Error::Dim("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Matrix::identity(n));
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::Singular);
        }
        Ok(aug.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

/// Exact solution set of A x = b: empty, or a particular solution plus a
/// kernel basis.
#[derive(Clone, Debug, PartialEq)]
pub enum AffineSolutionSet<T> {
    Empty,
    Solutions { particular: Matrix<T>, kernel: Vec<Matrix<T>> },
}

impl<T: Field> AffineSolutionSet<T> {
    pub fn unique(&self) -> Option<&Matrix<T>> {
        match self {
            AffineSolutionSet::Solutions { particular, kernel } if kernel.is_empty() => {
                Some(particular)
            }
            _ => None,
        }
    }
}

/// Solves A x = b for a column vector b.
pub fn solve_linear<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Result<AffineSolutionSet<T>> {
    if b.cols != 1 {
        return Err(Error::Dim("right-hand side must be a column vector".into()));
    }
    if a.rows != b.rows {
        return Err(Error::Dim(format!(
            "matrix has {} rows but right-hand side has {}",
            a.rows, b.rows
        )));
    }
    let mut aug = Matrix::zeros(a.rows, a.cols + 1);
    aug.set_block(0, 0, a);
    aug.set_block(0, a.cols, b);
    let pivots = aug.rref();
    if pivots.contains(&a.cols) {
        return Ok(AffineSolutionSet::Empty);
    }
    let mut particular = Matrix::zeros(a.cols, 1);
    for (r, c) in pivots.iter().copied().enumerate() {
        particular[(c, 0)] = aug[(r, a.cols)].clone();
    }
    let kernel = a.kernel_basis();
    Ok(AffineSolutionSet::Solutions { particular, kernel })
}

/// Basis of ker(M - zeta I) as columns of one matrix (possibly 0 columns).
pub fn eigenspace<T: Field>(m: &Matrix<T>, zeta: &T) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(Error::Dim("eigenspace of a non-square matrix".into()));
    }
    let shifted = m - &Matrix::identity(m.rows).scale(zeta);
    let basis = shifted.kernel_basis();
    let mut out = Matrix::zeros(m.rows, basis.len());
    for (j, v) in basis.iter().enumerate() {
        out.set_block(0, j, v);
    }
    Ok(out)
}

pub fn commutator<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    &(a * b) - &(b * a)
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: Field> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }
}

impl<T: Field> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + rhs[(i, j)].clone())
    }
}

impl<T: Field> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - rhs[(i, j)].clone())
    }
}

impl<T: Field> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:?}", self.entries[i * self.cols + j]))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

//! Linear systems in matrix-valued unknowns.
//!
//! Several constructions in this crate (solving the moment-map relations for
//! the backward maps, transporting one ADHM datum to another, the recursion
//! behind the slice isomorphism) boil down to: a handful of unknown matrices,
//! equations that are affine-linear in them, solve exactly. [`VarTable`]
//! allocates scalar variables for unknown matrix blocks; [`LinMat`] is a
//! matrix whose entries are affine-linear expressions in those variables.
//! Multiplying two expressions that both contain variables is a programming
//! error and panics.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{AffineSolutionSet, Matrix, solve_linear};
use crate::scalar::Scalar;

pub type Mat = Matrix<Scalar>;

/// Registry of scalar unknowns grouped into named matrix blocks.
#[derive(Debug, Default)]
pub struct VarTable {
    n_vars: usize,
    blocks: Vec<BlockRef>,
}

#[derive(Clone, Copy, Debug)]
pub struct BlockRef {
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alloc(&mut self, rows: usize, cols: usize) -> BlockRef {
        let b = BlockRef { offset: self.n_vars, rows, cols };
        self.n_vars += rows * cols;
        self.blocks.push(b);
        b
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Extracts the block's value from a flat solution vector.
    pub fn value(&self, block: BlockRef, solution: &[Scalar]) -> Mat {
        Matrix::from_fn(block.rows, block.cols, |i, j| {
            solution[block.offset + i * block.cols + j].clone()
        })
    }
}

/// Affine-linear expression over scalar unknowns.
#[derive(Clone, Debug)]
pub struct LinExpr {
    pub constant: Scalar,
    pub terms: BTreeMap<usize, Scalar>,
}

impl LinExpr {
    pub fn constant(c: Scalar) -> Self {
        LinExpr { constant: c, terms: BTreeMap::new() }
    }

    pub fn var(v: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, Scalar::from_int(1));
        LinExpr { constant: Scalar::zero(), terms }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign(&mut self, other: &LinExpr) {
        self.constant = &self.constant + &other.constant;
        for (v, c) in &other.terms {
            let entry = self.terms.entry(*v).or_insert_with(Scalar::zero);
            *entry = &*entry + c;
            if entry.is_zero() {
                self.terms.remove(v);
            }
        }
    }

    fn scale(&self, c: &Scalar) -> LinExpr {
        if c.is_zero() {
            return LinExpr::constant(Scalar::zero());
        }
        LinExpr {
            constant: &self.constant * c,
            terms: self.terms.iter().map(|(v, x)| (*v, x * c)).collect(),
        }
    }

    fn mul(&self, other: &LinExpr) -> LinExpr {
        if self.is_constant() {
            return other.scale(&self.constant);
        }
        if other.is_constant() {
            return self.scale(&other.constant);
        }
        panic!("nonlinear term: product of two variable-bearing expressions");
    }
}

/// Matrix of affine-linear expressions.
#[derive(Clone, Debug)]
pub struct LinMat {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<LinExpr>,
}

impl LinMat {
    pub fn from_const(m: &Mat) -> Self {
        LinMat {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().cloned().map(LinExpr::constant).collect(),
        }
    }

    pub fn from_var(block: BlockRef) -> Self {
        LinMat {
            rows: block.rows,
            cols: block.cols,
            entries: (0..block.rows * block.cols).map(|k| LinExpr::var(block.offset + k)).collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        LinMat {
            rows,
            cols,
            entries: vec![LinExpr::constant(Scalar::zero()); rows * cols],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &LinExpr {
        &self.entries[i * self.cols + j]
    }

    pub fn add(&self, other: &LinMat) -> LinMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            e.add_assign(o);
        }
        out
    }

    pub fn sub(&self, other: &LinMat) -> LinMat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LinMat {
        let minus_one = Scalar::from_int(-1);
        LinMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(&minus_one)).collect(),
        }
    }

    pub fn mul(&self, other: &LinMat) -> LinMat {
        assert_eq!(self.cols, other.rows, "LinMat product shape mismatch");
        let mut out = LinMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_constant() && a.constant.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.mul(other.at(k, j));
                    out.entries[i * other.cols + j].add_assign(&prod);
                }
            }
        }
        out
    }

    pub fn mul_const_left(m: &Mat, x: &LinMat) -> LinMat {
        LinMat::from_const(m).mul(x)
    }

    pub fn mul_const_right(x: &LinMat, m: &Mat) -> LinMat {
        x.mul(&LinMat::from_const(m))
    }

    /// Evaluates with the given variable assignment.
    pub fn eval(&self, solution: &[Scalar]) -> Mat {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            let e = self.at(i, j);
            let mut acc = e.constant.clone();
            for (v, c) in &e.terms {
                acc = &acc + &(c * &solution[*v]);
            }
            acc
        })
    }
}

/// Accumulates equations `expr = 0` and solves them exactly.
#[derive(Debug, Default)]
pub struct EquationSet {
    rows: Vec<LinExpr>,
}

impl EquationSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the equation `entry = 0` for every entry of `m`.
    pub fn require_zero(&mut self, m: &LinMat) {
        for e in &m.entries {
            if e.is_constant() && e.constant.is_zero() {
                continue;
            }
            self.rows.push(e.clone());
        }
    }

    /// Adds `lhs = rhs` entrywise.
    pub fn require_eq(&mut self, lhs: &LinMat, rhs: &Mat) {
        self.require_zero(&lhs.sub(&LinMat::from_const(rhs)));
    }

    pub fn n_equations(&self) -> usize {
        self.rows.len()
    }

    /// Solves the accumulated system for all `n_vars` variables.
    pub fn solve(&self, n_vars: usize) -> Result<AffineSolutionSet<Scalar>> {
        // Constant rows must vanish identically or the system is inconsistent.
        for e in &self.rows {
            if e.is_constant() && !e.constant.is_zero() {
                return Ok(AffineSolutionSet::Empty);
            }
        }
        let rows: Vec<&LinExpr> = self.rows.iter().filter(|e| !e.is_constant()).collect();
        let mut a = Matrix::zeros(rows.len(), n_vars);
        let mut b = Matrix::zeros(rows.len(), 1);
        for (i, e) in rows.iter().enumerate() {
            for (v, c) in &e.terms {
                a[(i, *v)] = c.clone();
            }
            b[(i, 0)] = -&e.constant;
        }
        solve_linear(&a, &b)
    }

    /// Solves and demands a unique solution.
    pub fn solve_unique(&self, n_vars: usize) -> Result<Vec<Scalar>> {
        match self.solve(n_vars)? {
            AffineSolutionSet::Empty => {
                Err(Error::Inconsistent("no solution".into()))
            }
            AffineSolutionSet::Solutions { particular, kernel } => {
                if !kernel.is_empty() {
                    return Err(Error::Inconsistent(format!(
                        "solution not unique: kernel of dimension {}",
                        kernel.len()
                    )));
                }
                Ok(particular.entries)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{SplitMix64, random_matrix};

    #[test]
    fn recover_unknown_matrix_product() {
        // Solve G * A = B for G given A invertible.
        let mut rng = SplitMix64::new(5);
        let a = crate::rng::random_invertible(&mut rng, 3, 3);
        let g_true = crate::rng::random_invertible(&mut rng, 3, 3);
        let b = &g_true * &a;
        let mut vars = VarTable::new();
        let g = vars.alloc(3, 3);
        let mut eqs = EquationSet::new();
        eqs.require_eq(&LinMat::mul_const_right(&LinMat::from_var(g), &a), &b);
        let sol = eqs.solve_unique(vars.n_vars()).unwrap();
        assert_eq!(vars.value(g, &sol), g_true);
    }

    #[test]
    fn kernel_offsets_satisfy_system() {
        let mut rng = SplitMix64::new(9);
        let a = random_matrix(&mut rng, 2, 4, 3, 1);
        let mut vars = VarTable::new();
        let x = vars.alloc(4, 1);
        let mut eqs = EquationSet::new();
        eqs.require_zero(&LinMat::mul_const_left(&a, &LinMat::from_var(x)));
        match eqs.solve(vars.n_vars()).unwrap() {
            AffineSolutionSet::Solutions { particular, kernel } => {
                assert!(particular.is_zero_matrix());
                assert_eq!(kernel.len(), 4 - a.rank());
            }
            _ => panic!("homogeneous system cannot be empty"),
        }
    }

    #[test]
    #[should_panic(expected = "nonlinear")]
    fn nonlinear_products_panic() {
        let mut vars = VarTable::new();
        let x = vars.alloc(1, 1);
        let y = vars.alloc(1, 1);
        let _ = LinMat::from_var(x).mul(&LinMat::from_var(y));
    }
}

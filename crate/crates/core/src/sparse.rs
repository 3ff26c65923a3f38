//! Compressed sparse row storage and a sparse Cholesky factorization.

use faer::linalg::solvers::SolveCore;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Side};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("sparse factorization failed: {0}")]
    Backend(String),
}

/// Square or rectangular CSR matrix with sorted, duplicate-free columns per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries. The sort is stable, so duplicates are added in
    /// insertion order and the result is bit-reproducible.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> CsrMatrix {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n_rows && c < n_cols, "entry ({r}, {c}) outside {n_rows}x{n_cols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n_rows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }

    /// Principal or rectangular block selected by index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (j, &c) in cols.iter().enumerate() {
            col_map[c] = j;
        }
        let mut trip = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_map[c] != usize::MAX {
                    trip.push((i, col_map[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(rows.len(), cols.len(), trip)
    }

    /// Adds `value` to existing or new diagonal entries.
    pub fn add_diagonal(&self, entries: &[(usize, f64)]) -> CsrMatrix {
        let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + entries.len());
        for r in 0..self.n_rows {
            trip.extend(self.row(r).map(|(c, v)| (r, c, v)));
        }
        trip.extend(entries.iter().map(|&(i, v)| (i, i, v)));
        CsrMatrix::from_triplets(self.n_rows, self.n_cols, trip)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                d[(r, c)] = v;
            }
        }
        d
    }

    /// Largest `|A - A^T|` entry relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst / self.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Symbolic analysis (fill-reducing ordering and elimination structure) that
/// can be reused for matrices with the same sparsity pattern.
#[derive(Debug, Clone)]
pub struct CholeskySymbolic {
    inner: SymbolicLlt<usize>,
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

/// Sparse `L L^T` factorization of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    llt: Llt<usize, f64>,
    symbolic: CholeskySymbolic,
}

fn csc_view(a: &CsrMatrix) -> SparseColMatRef<'_, usize, f64> {
    // symmetric: CSR of A is CSC of A^T = A
    let sym = SymbolicSparseColMatRef::new_checked(a.n_rows, a.n_cols, &a.row_ptr, None, &a.col_idx);
    SparseColMatRef::new(sym, &a.values)
}

impl SparseCholesky {
    pub fn analyze(a: &CsrMatrix) -> Result<CholeskySymbolic, FactorError> {
        assert_eq!(a.n_rows, a.n_cols, "Cholesky needs a square matrix");
        let inner = SymbolicLlt::try_new(csc_view(a).symbolic(), Side::Lower)
            .map_err(|e| FactorError::Backend(format!("{e:?}")))?;
        Ok(CholeskySymbolic {
            inner,
            n: a.n_rows,
            row_ptr: a.row_ptr.clone(),
            col_idx: a.col_idx.clone(),
        })
    }

    pub fn factor(a: &CsrMatrix) -> Result<SparseCholesky, FactorError> {
        let symbolic = Self::analyze(a)?;
        Self::factor_with(a, symbolic)
    }

    /// Numeric factorization reusing a symbolic analysis. Falls back to a fresh
    /// analysis when the pattern differs.
    pub fn factor_with(a: &CsrMatrix, symbolic: CholeskySymbolic) -> Result<SparseCholesky, FactorError> {
        let symbolic = if symbolic.n == a.n_rows && symbolic.row_ptr == a.row_ptr && symbolic.col_idx == a.col_idx {
            symbolic
        } else {
            Self::analyze(a)?
        };
        if a.n_rows == 0 {
            return Err(FactorError::Backend("empty matrix".into()));
        }
        let llt = Llt::try_new_with_symbolic(symbolic.inner.clone(), csc_view(a), Side::Lower)
            .map_err(|_| FactorError::NotPositiveDefinite)?;
        Ok(SparseCholesky { llt, symbolic })
    }

    pub fn symbolic(&self) -> &CholeskySymbolic {
        &self.symbolic
    }

    pub fn dim(&self) -> usize {
        self.symbolic.n
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        assert_eq!(rhs.len(), self.symbolic.n);
        let n = rhs.len();
        let view = MatMut::from_column_major_slice_mut(rhs, n, 1);
        self.llt.solve_in_place_with_conj(Conj::No, view);
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn cholesky_solves_laplacian() {
        let a = laplacian_1d(50);
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).cos()).collect();
        let b = a.mul_vec(&x);
        let chol = SparseCholesky::factor(&a).unwrap();
        let y = chol.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10);
        }
        let again = SparseCholesky::factor_with(&a, chol.symbolic().clone()).unwrap();
        assert_eq!(again.solve(&b), y);
    }

    #[test]
    fn indefinite_matrix_fails() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, -1.0)]);
        assert_eq!(
            SparseCholesky::factor(&a).unwrap_err(),
            FactorError::NotPositiveDefinite
        );
    }

    #[test]
    fn submatrix_and_bilinear() {
        let a = laplacian_1d(4);
        let b = a.submatrix(&[1, 2], &[1, 2]);
        assert_eq!(b.to_dense(), DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
        assert_eq!(a.bilinear(&[1.0; 4], &[1.0; 4]), 2.0);
        assert_eq!(a.asymmetry(), 0.0);
    }
}

//! Generalized inverse of a singular subdomain stiffness with known kernel.
//!
//! With `R` orthonormal and `K R = 0`, the regularized matrix
//! `M = K + rho R R^T` has inverse `K^+ + R R^T / rho`. `M` itself is dense, so
//! the sparse factor is taken of `A = K + rho E E^T` instead, where `E` selects
//! six fixing dofs with `E^T R` nonsingular. Then `P A^{-1} P = K^+` for
//! `P = I - R R^T`, and `M^{-1} v = P A^{-1} P v + R R^T v / rho`.

use crate::sparse::{CholeskySymbolic, CsrMatrix, FactorError, SparseCholesky};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct PseudoInverse {
    chol: SparseCholesky,
    kernel: DMatrix<f64>,
    rho: f64,
    fixing: Vec<usize>,
}

/// Six rows of `R` picked by greedy pivoting on the residual row norm, so the
/// selected `6 x 6` block is well conditioned.
pub fn fixing_dofs(kernel: &DMatrix<f64>) -> Vec<usize> {
    let n = kernel.nrows();
    let l = kernel.ncols();
    let mut rows: Vec<DVector<f64>> = (0..n).map(|i| kernel.row(i).transpose()).collect();
    let mut chosen = Vec::with_capacity(l);
    for _ in 0..l.min(n) {
        let mut best = (0usize, -1.0);
        for (i, r) in rows.iter().enumerate() {
            let nr = r.norm_squared();
            // strict comparison keeps the lowest index on ties
            if nr > best.1 && !chosen.contains(&i) {
                best = (i, nr);
            }
        }
        let q = rows[best.0].clone() / best.1.sqrt();
        for r in rows.iter_mut() {
            let dot = r.dot(&q);
            r.axpy(-dot, &q, 1.0);
        }
        chosen.push(best.0);
    }
    chosen.sort_unstable();
    chosen
}

impl PseudoInverse {
    /// Factors `K + rho E E^T`, `rho = trace(K)/n`. A cached symbolic analysis
    /// is reused when the pattern matches.
    pub fn new(
        k: &CsrMatrix,
        kernel: &DMatrix<f64>,
        fixing: &[usize],
        symbolic: Option<CholeskySymbolic>,
    ) -> Result<PseudoInverse, FactorError> {
        let n = k.n_rows();
        assert_eq!(kernel.nrows(), n);
        let rho = k.trace() / n as f64;
        if !(rho > 0.0) {
            return Err(FactorError::NotPositiveDefinite);
        }
        let a = k.add_diagonal(&fixing.iter().map(|&i| (i, rho)).collect::<Vec<_>>());
        let chol = match symbolic {
            Some(s) => SparseCholesky::factor_with(&a, s)?,
            None => SparseCholesky::factor(&a)?,
        };
        Ok(PseudoInverse {
            chol,
            kernel: kernel.clone(),
            rho,
            fixing: fixing.to_vec(),
        })
    }

    pub fn symbolic(&self) -> &CholeskySymbolic {
        self.chol.symbolic()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn fixing(&self) -> &[usize] {
        &self.fixing
    }

    fn project(&self, v: &mut [f64]) -> DVector<f64> {
        let coef = self.kernel.tr_mul(&DVector::from_column_slice(v));
        let corr = &self.kernel * &coef;
        for (x, c) in v.iter_mut().zip(corr.iter()) {
            *x -= c;
        }
        coef
    }

    /// `(K + rho R R^T)^{-1} v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut x = v.to_vec();
        let coef = self.project(&mut x);
        self.chol.solve_in_place(&mut x);
        self.project(&mut x);
        let kern = &self.kernel * (coef / self.rho);
        for (xi, k) in x.iter_mut().zip(kern.iter()) {
            *xi += k;
        }
        x
    }
}

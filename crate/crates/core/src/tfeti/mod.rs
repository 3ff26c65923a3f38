//! Total FETI: every subdomain is floating, gluing and Dirichlet conditions are
//! both Lagrange multiplier constraints `B u = 0`, and the dual problem is
//! solved by projected preconditioned conjugate gradients.

mod constraints;
mod kernel;
mod pcgp;
mod pinv;
mod precond;

pub use constraints::{build_constraints, ConstraintForm, ConstraintMatrix, RowKind};
pub use kernel::rigid_body_modes;
pub use pcgp::{pcgp_solve, PcgpOptions, PcgpReport};
pub use pinv::{fixing_dofs, PseudoInverse};
pub use precond::{Preconditioner, SchurComplement};

use crate::mesh::{Decomposition, Mesh};
use crate::sparse::{CholeskySymbolic, CsrMatrix, FactorError};
use nalgebra::{DMatrix, DVector};
use precond::PrimalBlocks;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TfetiError {
    #[error("constraint group of node {node}, component {component} lost all rows")]
    RankDeficiency { node: usize, component: usize },
    #[error("factorization failed in subdomain {subdomain}: {source}")]
    Factorization { subdomain: usize, source: FactorError },
    #[error("coarse matrix N N^T is singular")]
    CoarseSingular,
    #[error("PCGP did not converge in {iterations} iterations (projected residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("PCGP breakdown at iteration {iteration}: p^T F p = {curvature:e}")]
    Breakdown { iteration: usize, curvature: f64 },
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Data that depends only on the decomposition: constraints, kernels, fixing
/// dofs, the coarse operator, and cached symbolic factorizations.
#[derive(Debug, Clone)]
pub struct TfetiLayout {
    pub constraints: ConstraintMatrix,
    /// `(offset, size)` of each subdomain block in the torn vector.
    pub blocks: Vec<(usize, usize)>,
    pub kernels: Vec<DMatrix<f64>>,
    fixing: Vec<Vec<usize>>,
    /// Local dofs of nodes carrying any constraint entry.
    boundary_masks: Vec<Vec<bool>>,
    /// `N = -R^T B^T`, dense `l x m`.
    pub n_matrix: DMatrix<f64>,
    coarse: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    symbolic: Vec<Option<CholeskySymbolic>>,
}

impl TfetiLayout {
    pub fn new(mesh: &Mesh, decomp: &Decomposition) -> Result<TfetiLayout, TfetiError> {
        Self::with_form(mesh, decomp, ConstraintForm::Orthonormal)
    }

    pub fn with_form(mesh: &Mesh, decomp: &Decomposition, form: ConstraintForm) -> Result<TfetiLayout, TfetiError> {
        let constraints = build_constraints(mesh, decomp, form)?;
        let blocks: Vec<(usize, usize)> = decomp.subdomains.iter().map(|s| (s.dof_offset, s.n_dofs())).collect();
        let kernels: Vec<DMatrix<f64>> = decomp
            .subdomains
            .iter()
            .map(|s| rigid_body_modes(&s.local_coords(mesh)))
            .collect();
        let fixing = kernels.iter().map(fixing_dofs).collect();

        let touched = constraints.touched_columns();
        let boundary_masks = blocks
            .iter()
            .map(|&(off, n)| {
                (0..n)
                    .map(|d| {
                        let node = off + d - d % 3;
                        touched[node] || touched[node + 1] || touched[node + 2]
                    })
                    .collect()
            })
            .collect();

        let l = 6 * blocks.len();
        let m = constraints.n_rows();
        let mut n_matrix = DMatrix::zeros(l, m);
        for (i, row) in constraints.rows.iter().enumerate() {
            for &(c, v) in row {
                let p = blocks.partition_point(|&(off, _)| off <= c) - 1;
                let local = c - blocks[p].0;
                for j in 0..6 {
                    n_matrix[(6 * p + j, i)] -= v * kernels[p][(local, j)];
                }
            }
        }
        let coarse = nalgebra::Cholesky::new(&n_matrix * n_matrix.transpose()).ok_or(TfetiError::CoarseSingular)?;
        Ok(TfetiLayout {
            constraints,
            symbolic: vec![None; blocks.len()],
            blocks,
            kernels,
            fixing,
            boundary_masks,
            n_matrix,
            coarse,
        })
    }

    pub fn n_subdomains(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_multipliers(&self) -> usize {
        self.constraints.n_rows()
    }

    pub fn n_torn(&self) -> usize {
        self.constraints.n_cols()
    }

    /// `(N N^T)^{-1} x`.
    pub fn coarse_solve(&self, x: &DVector<f64>) -> DVector<f64> {
        self.coarse.solve(x)
    }

    /// `P_N w = w - N^T (N N^T)^{-1} N w`.
    pub fn project(&self, w: &[f64]) -> Vec<f64> {
        let nw = &self.n_matrix * DVector::from_column_slice(w);
        let corr = self.n_matrix.tr_mul(&self.coarse.solve(&nw));
        w.iter().zip(corr.iter()).map(|(a, b)| a - b).collect()
    }

    /// `R^T x` stacked over subdomains.
    pub fn kernel_transpose_apply(&self, x: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(6 * self.blocks.len());
        for (p, &(off, n)) in self.blocks.iter().enumerate() {
            let c = self.kernels[p].tr_mul(&DVector::from_column_slice(&x[off..off + n]));
            out.rows_mut(6 * p, 6).copy_from(&c);
        }
        out
    }

    /// `R alpha`.
    pub fn kernel_apply(&self, alpha: &DVector<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.n_torn()];
        for (p, &(off, n)) in self.blocks.iter().enumerate() {
            let v = &self.kernels[p] * alpha.rows(6 * p, 6);
            out[off..off + n].copy_from_slice(v.as_slice());
        }
        out
    }

    fn split<'v>(&self, x: &'v [f64]) -> Vec<&'v [f64]> {
        self.blocks.iter().map(|&(off, n)| &x[off..off + n]).collect()
    }

    fn join(&self, parts: Vec<Vec<f64>>) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_torn());
        for p in parts {
            out.extend(p);
        }
        out
    }

    /// Factors the subdomain stiffnesses and assembles `d` and `e`.
    pub fn assemble_dual(&mut self, stiffness: &[CsrMatrix], f: &[f64]) -> Result<DualSystem<'_>, TfetiError> {
        assert_eq!(stiffness.len(), self.blocks.len());
        assert_eq!(f.len(), self.n_torn());
        let items: Vec<usize> = (0..self.blocks.len()).collect();
        let pinv = par_map(&items, |&p| {
            PseudoInverse::new(
                &stiffness[p],
                &self.kernels[p],
                &self.fixing[p],
                self.symbolic[p].clone(),
            )
            .map_err(|source| TfetiError::Factorization { subdomain: p, source })
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        for (slot, pi) in self.symbolic.iter_mut().zip(&pinv) {
            *slot = Some(pi.symbolic().clone());
        }
        let layout: &TfetiLayout = self;
        let mut sys = DualSystem {
            layout,
            stiffness: stiffness.to_vec(),
            pinv,
            f: f.to_vec(),
            d: Vec::new(),
            e: -layout.kernel_transpose_apply(f),
        };
        let kf = sys.pinv_apply(f);
        sys.d = layout.constraints.apply(&kf);
        Ok(sys)
    }
}

/// Dual problem `min 1/2 l^T F l - l^T d` subject to `N l = e`.
#[derive(Debug, Clone)]
pub struct DualSystem<'a> {
    pub layout: &'a TfetiLayout,
    pub stiffness: Vec<CsrMatrix>,
    pub pinv: Vec<PseudoInverse>,
    pub f: Vec<f64>,
    /// `B K^+ f`.
    pub d: Vec<f64>,
    /// `-R^T f`.
    pub e: DVector<f64>,
}

impl DualSystem<'_> {
    /// Block-diagonal `K^+ x`.
    pub fn pinv_apply(&self, x: &[f64]) -> Vec<f64> {
        let parts = self.layout.split(x);
        let items: Vec<(usize, &[f64])> = parts.into_iter().enumerate().collect();
        self.layout.join(par_map(&items, |&(p, v)| self.pinv[p].apply(v)))
    }

    /// Block-diagonal `K x`.
    pub fn stiffness_apply(&self, x: &[f64]) -> Vec<f64> {
        let parts = self.layout.split(x);
        let items: Vec<(usize, &[f64])> = parts.into_iter().enumerate().collect();
        self.layout
            .join(par_map(&items, |&(p, v)| self.stiffness[p].mul_vec(v)))
    }

    /// `F lambda = B K^+ B^T lambda`.
    pub fn apply_f(&self, lambda: &[f64]) -> Vec<f64> {
        let b = &self.layout.constraints;
        b.apply(&self.pinv_apply(&b.apply_transpose(lambda)))
    }

    /// `N^T (N N^T)^{-1} e`, the particular solution of `N lambda = e` in the
    /// range of `N^T`.
    pub fn lambda_im(&self) -> Vec<f64> {
        let t = self.layout.coarse_solve(&self.e);
        self.layout.n_matrix.tr_mul(&t).as_slice().to_vec()
    }

    /// `alpha = (N N^T)^{-1} N (d - F lambda)`.
    pub fn alpha(&self, lambda: &[f64]) -> DVector<f64> {
        let fl = self.apply_f(lambda);
        let r: Vec<f64> = self.d.iter().zip(&fl).map(|(a, b)| a - b).collect();
        self.layout
            .coarse_solve(&(&self.layout.n_matrix * DVector::from_column_slice(&r)))
    }

    /// `u = K^+ (f - B^T lambda) + R alpha`.
    pub fn recover_primal(&self, lambda: &[f64], alpha: &DVector<f64>) -> Vec<f64> {
        let bt = self.layout.constraints.apply_transpose(lambda);
        let rhs: Vec<f64> = self.f.iter().zip(&bt).map(|(a, b)| a - b).collect();
        let mut u = self.pinv_apply(&rhs);
        for (ui, r) in u.iter_mut().zip(self.layout.kernel_apply(alpha)) {
            *ui += r;
        }
        u
    }

    pub(crate) fn primal_blocks(&self, kind: Preconditioner) -> Result<PrimalBlocks, TfetiError> {
        PrimalBlocks::build(kind, &self.stiffness, &self.layout.boundary_masks)
            .map_err(|(subdomain, source)| TfetiError::Factorization { subdomain, source })
    }

    /// `B X B^T mu` with the block operator of the chosen preconditioner.
    pub(crate) fn precondition(&self, blocks: &PrimalBlocks, w: &[f64]) -> Vec<f64> {
        if matches!(blocks, PrimalBlocks::Identity) {
            return w.to_vec();
        }
        let b = &self.layout.constraints;
        let x = b.apply_transpose(w);
        let parts = self.layout.split(&x);
        let items: Vec<(usize, &[f64])> = parts.into_iter().enumerate().collect();
        let y = self
            .layout
            .join(par_map(&items, |&(p, v)| blocks.apply(p, &self.stiffness[p], v)));
        b.apply(&y)
    }
}

/// Result of one TFETI linear solve.
#[derive(Debug, Clone)]
pub struct TfetiSolution {
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    pub alpha: DVector<f64>,
    pub report: PcgpReport,
}

/// Solves `K u = f` subject to `B u = 0` on the torn layout.
pub fn solve(
    layout: &mut TfetiLayout,
    stiffness: &[CsrMatrix],
    f: &[f64],
    opts: &PcgpOptions,
) -> Result<TfetiSolution, TfetiError> {
    let sys = layout.assemble_dual(stiffness, f)?;
    let (lambda, alpha, report) = pcgp_solve(&sys, opts)?;
    let u = sys.recover_primal(&lambda, &alpha);
    Ok(TfetiSolution {
        u,
        lambda,
        alpha,
        report,
    })
}

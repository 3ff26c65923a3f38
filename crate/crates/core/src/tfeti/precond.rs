//! Dual preconditioners `B K B^T` (lumped) and `B S B^T` (Dirichlet), where `S`
//! is the Schur complement of each subdomain stiffness onto its boundary dofs.

use super::par_map;
use crate::sparse::{CsrMatrix, FactorError, SparseCholesky};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    Lumped,
    #[default]
    Dirichlet,
    None,
}

impl Preconditioner {
    pub fn parse(s: &str) -> Option<Preconditioner> {
        match s {
            "lumped" => Some(Preconditioner::Lumped),
            "dirichlet" => Some(Preconditioner::Dirichlet),
            "none" => Some(Preconditioner::None),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preconditioner::Lumped => "lumped",
            Preconditioner::Dirichlet => "dirichlet",
            Preconditioner::None => "none",
        }
    }
}

/// Schur complement `S = K_bb - K_bi K_ii^{-1} K_ib` applied on demand.
#[derive(Debug, Clone)]
pub struct SchurComplement {
    boundary: Vec<usize>,
    interior: Vec<usize>,
    k_bb: CsrMatrix,
    k_bi: CsrMatrix,
    k_ib: CsrMatrix,
    k_ii: Option<SparseCholesky>,
}

impl SchurComplement {
    /// `boundary` and `interior` partition the local dofs.
    pub fn new(k: &CsrMatrix, boundary: Vec<usize>, interior: Vec<usize>) -> Result<SchurComplement, FactorError> {
        let k_ii = if interior.is_empty() {
            None
        } else {
            Some(SparseCholesky::factor(&k.submatrix(&interior, &interior))?)
        };
        Ok(SchurComplement {
            k_bb: k.submatrix(&boundary, &boundary),
            k_bi: k.submatrix(&boundary, &interior),
            k_ib: k.submatrix(&interior, &boundary),
            k_ii,
            boundary,
            interior,
        })
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn apply(&self, x_b: &[f64]) -> Vec<f64> {
        let mut y = self.k_bb.mul_vec(x_b);
        if let Some(chol) = &self.k_ii {
            let t = chol.solve(&self.k_ib.mul_vec(x_b));
            for (yi, c) in y.iter_mut().zip(self.k_bi.mul_vec(&t)) {
                *yi -= c;
            }
        }
        y
    }
}

/// Per-subdomain primal operator used between `B^T` and `B`.
#[derive(Debug, Clone)]
pub(crate) enum PrimalBlocks {
    Lumped,
    Dirichlet(Vec<SchurComplement>),
    Identity,
}

impl PrimalBlocks {
    pub(crate) fn build(
        kind: Preconditioner,
        stiffness: &[CsrMatrix],
        boundary_masks: &[Vec<bool>],
    ) -> Result<PrimalBlocks, (usize, FactorError)> {
        Ok(match kind {
            Preconditioner::Lumped => PrimalBlocks::Lumped,
            Preconditioner::None => PrimalBlocks::Identity,
            Preconditioner::Dirichlet => {
                let items: Vec<(usize, &CsrMatrix)> = stiffness.iter().enumerate().collect();
                let schur = par_map(&items, |&(p, k)| {
                    let (b, i): (Vec<usize>, Vec<usize>) = (0..k.n_rows()).partition(|&d| boundary_masks[p][d]);
                    SchurComplement::new(k, b, i).map_err(|e| (p, e))
                });
                PrimalBlocks::Dirichlet(schur.into_iter().collect::<Result<_, _>>()?)
            }
        })
    }

    /// Applies the block operator to the slice of subdomain `p`.
    pub(crate) fn apply(&self, p: usize, k: &CsrMatrix, x: &[f64]) -> Vec<f64> {
        match self {
            PrimalBlocks::Lumped => k.mul_vec(x),
            PrimalBlocks::Identity => x.to_vec(),
            PrimalBlocks::Dirichlet(schur) => {
                let s = &schur[p];
                let xb: Vec<f64> = s.boundary.iter().map(|&d| x[d]).collect();
                let mut y = vec![0.0; x.len()];
                for (&d, v) in s.boundary.iter().zip(s.apply(&xb)) {
                    y[d] = v;
                }
                y
            }
        }
    }
}

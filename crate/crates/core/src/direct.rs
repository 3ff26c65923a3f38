//! Monolithic sparse solve of the glued problem with Dirichlet dofs removed.
//! Serves as the `direct` linear solver and as the reference for TFETI.

use crate::mesh::{Decomposition, Mesh};
use crate::sparse::{CholeskySymbolic, CsrMatrix, FactorError, SparseCholesky};

#[derive(Debug, Clone)]
pub struct DirectSolver {
    /// Global dof -> reduced index, `usize::MAX` for constrained dofs.
    reduced: Vec<usize>,
    n_free: usize,
    symbolic: Option<CholeskySymbolic>,
}

impl DirectSolver {
    pub fn new(mesh: &Mesh) -> DirectSolver {
        let mut reduced = vec![usize::MAX; 3 * mesh.n_nodes()];
        let mut n_free = 0;
        for (g, flags) in mesh.dirichlet.iter().enumerate() {
            for k in 0..3 {
                if !flags[k] {
                    reduced[3 * g + k] = n_free;
                    n_free += 1;
                }
            }
        }
        DirectSolver {
            reduced,
            n_free,
            symbolic: None,
        }
    }

    /// Sums the subdomain blocks into the global matrix restricted to free dofs.
    pub fn assemble(&self, decomp: &Decomposition, stiffness: &[CsrMatrix]) -> CsrMatrix {
        let mut trip = Vec::with_capacity(stiffness.iter().map(|k| k.nnz()).sum());
        for (sub, k) in decomp.subdomains.iter().zip(stiffness) {
            let global = |d: usize| self.reduced[3 * sub.nodes[d / 3] + d % 3];
            for r in 0..k.n_rows() {
                let gr = global(r);
                if gr == usize::MAX {
                    continue;
                }
                for (c, v) in k.row(r) {
                    let gc = global(c);
                    if gc != usize::MAX {
                        trip.push((gr, gc, v));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.n_free, self.n_free, trip)
    }

    /// Solves for the torn increment; `f` is a torn load vector whose copies
    /// are summed.
    pub fn solve(
        &mut self,
        decomp: &Decomposition,
        stiffness: &[CsrMatrix],
        f: &[f64],
    ) -> Result<Vec<f64>, FactorError> {
        let k = self.assemble(decomp, stiffness);
        let chol = match self.symbolic.take() {
            Some(s) => SparseCholesky::factor_with(&k, s)?,
            None => SparseCholesky::factor(&k)?,
        };
        self.symbolic = Some(chol.symbolic().clone());
        let fg = decomp.glue_sum(f);
        let mut rhs = vec![0.0; self.n_free];
        for (g, &i) in self.reduced.iter().enumerate() {
            if i != usize::MAX {
                rhs[i] = fg[g];
            }
        }
        chol.solve_in_place(&mut rhs);
        let mut u = vec![0.0; fg.len()];
        for (g, &i) in self.reduced.iter().enumerate() {
            if i != usize::MAX {
                u[g] = rhs[i];
            }
        }
        Ok(decomp.tear(&u))
    }
}

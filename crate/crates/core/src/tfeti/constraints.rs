//! The constraint matrix `B = [B_G; B_U]` over the torn displacement vector.

use super::TfetiError;
use crate::mesh::{Decomposition, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Gluing,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintForm {
    /// Rows of each node-component group orthonormalized, dependent rows dropped.
    #[default]
    Orthonormal,
    /// Every copy pair glued by `e_i - e_j`, every constrained copy fixed by
    /// `e_i`. Generally rank deficient; kept for cross-checks.
    Redundant,
}

/// Sparse rows over the torn vector, sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub kinds: Vec<RowKind>,
    n_cols: usize,
}

impl ConstraintMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// `B x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `B^T lambda`.
    pub fn apply_transpose(&self, lambda: &[f64]) -> Vec<f64> {
        assert_eq!(lambda.len(), self.rows.len());
        let mut x = vec![0.0; self.n_cols];
        for (row, &l) in self.rows.iter().zip(lambda) {
            for &(c, v) in row {
                x[c] += v * l;
            }
        }
        x
    }

    /// Columns (torn dofs) touched by any row.
    pub fn touched_columns(&self) -> Vec<bool> {
        let mut t = vec![false; self.n_cols];
        for row in &self.rows {
            for &(c, _) in row {
                t[c] = true;
            }
        }
        t
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.rows.len(), self.n_cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                d[(i, c)] = v;
            }
        }
        d
    }
}

const DEPENDENCE_TOL: f64 = 1e-10;

/// Modified Gram-Schmidt on short dense rows, run twice per row. Rows whose
/// remainder falls below the tolerance are dropped.
fn orthonormalize(rows: Vec<(Vec<f64>, RowKind)>) -> Vec<(Vec<f64>, RowKind)> {
    let mut out: Vec<(Vec<f64>, RowKind)> = Vec::with_capacity(rows.len());
    for (mut v, kind) in rows {
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for (q, _) in &out {
                let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > DEPENDENCE_TOL * norm0 {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push((v, kind));
        }
    }
    out
}

/// Gluing rows for every shared node and Dirichlet rows for every constrained
/// copy, grouped by (node, component) in ascending order.
pub fn build_constraints(
    mesh: &Mesh,
    decomp: &Decomposition,
    form: ConstraintForm,
) -> Result<ConstraintMatrix, TfetiError> {
    let mut rows = Vec::new();
    let mut kinds = Vec::new();
    for (node, copies) in decomp.node_copies.iter().enumerate() {
        let dofs: Vec<usize> = copies
            .iter()
            .map(|&(p, a)| decomp.subdomains[p].dof_offset + 3 * a)
            .collect();
        let q = dofs.len();
        for comp in 0..3 {
            let mut group: Vec<(Vec<f64>, RowKind)> = Vec::new();
            for i in 0..q {
                for j in i + 1..q {
                    let mut v = vec![0.0; q];
                    v[i] = 1.0;
                    v[j] = -1.0;
                    group.push((v, RowKind::Gluing));
                }
            }
            if mesh.dirichlet[node][comp] {
                for i in 0..q {
                    let mut v = vec![0.0; q];
                    v[i] = 1.0;
                    group.push((v, RowKind::Dirichlet));
                }
            }
            if group.is_empty() {
                continue;
            }
            let group = match form {
                ConstraintForm::Redundant => group,
                ConstraintForm::Orthonormal => {
                    let kept = orthonormalize(group);
                    if kept.is_empty() {
                        return Err(TfetiError::RankDeficiency { node, component: comp });
                    }
                    kept
                }
            };
            for (v, kind) in group {
                let mut row: Vec<(usize, f64)> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0.0)
                    .map(|(i, &x)| (dofs[i] + comp, x))
                    .collect();
                row.sort_by_key(|&(c, _)| c);
                rows.push(row);
                kinds.push(kind);
            }
        }
    }
    Ok(ConstraintMatrix {
        rows,
        kinds,
        n_cols: decomp.n_torn_dofs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_box_mesh, partition, BoxFace, FaceConstraint};

    fn clamped_box(div: [usize; 3]) -> Mesh {
        generate_box_mesh(
            [1.0; 3],
            div,
            &[FaceConstraint {
                face: BoxFace::XMin,
                components: [true; 3],
            }],
            &[],
        )
        .unwrap()
    }

    fn gram_error(b: &ConstraintMatrix) -> f64 {
        let d = b.to_dense();
        let g = &d * d.transpose();
        (g - nalgebra::DMatrix::identity(b.n_rows(), b.n_rows())).abs().max()
    }

    #[test]
    fn single_subdomain_has_only_dirichlet_rows() {
        let mut mesh = clamped_box([1, 1, 1]);
        mesh.dirichlet = vec![[false; 3]; mesh.n_nodes()];
        mesh.dirichlet[0] = [true; 3];
        let d = partition(&mesh, 1).unwrap();
        let b = build_constraints(&mesh, &d, ConstraintForm::Orthonormal).unwrap();
        assert_eq!(b.n_rows(), 3);
        assert!(b.kinds.iter().all(|&k| k == RowKind::Dirichlet));
        assert_eq!(gram_error(&b), 0.0);
    }

    #[test]
    fn two_copies_give_scaled_difference_rows() {
        let mesh = clamped_box([2, 2, 2]);
        let d = partition(&mesh, 2).unwrap();
        let b = build_constraints(&mesh, &d, ConstraintForm::Orthonormal).unwrap();
        let h = 1.0 / 2f64.sqrt();
        for (row, kind) in b.rows.iter().zip(&b.kinds) {
            if *kind == RowKind::Gluing && row.len() == 2 {
                let mut vals: Vec<f64> = row.iter().map(|&(_, v)| v).collect();
                vals.sort_by(f64::total_cmp);
                assert!((vals[0] + h).abs() < 1e-15 && (vals[1] - h).abs() < 1e-15);
            }
        }
        assert!(gram_error(&b) < 1e-12);
    }

    #[test]
    fn multi_copy_nodes_get_q_minus_one_rows() {
        let mut mesh = clamped_box([2, 2, 2]);
        mesh.dirichlet = vec![[false; 3]; mesh.n_nodes()];
        mesh.dirichlet[0] = [true; 3];
        let d = partition(&mesh, 8).unwrap();
        let b = build_constraints(&mesh, &d, ConstraintForm::Orthonormal).unwrap();
        let gluing_expected: usize = d.node_copies.iter().map(|c| 3 * c.len().saturating_sub(1)).sum();
        let gluing = b.kinds.iter().filter(|&&k| k == RowKind::Gluing).count();
        assert_eq!(gluing, gluing_expected);
        assert!(gram_error(&b) < 1e-12);
    }

    #[test]
    fn redundant_form_spans_the_same_rows() {
        let mesh = clamped_box([2, 2, 2]);
        let d = partition(&mesh, 4).unwrap();
        let orth = build_constraints(&mesh, &d, ConstraintForm::Orthonormal)
            .unwrap()
            .to_dense();
        let red = build_constraints(&mesh, &d, ConstraintForm::Redundant)
            .unwrap()
            .to_dense();
        // each redundant row lies in the orthonormal row space
        let proj = &red - &red * orth.transpose() * &orth;
        assert!(proj.abs().max() < 1e-12);
        assert_eq!(red.rank(1e-10), orth.nrows());
    }
}

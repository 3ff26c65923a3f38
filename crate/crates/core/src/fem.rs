//! Linear (P1) tetrahedra: strain-displacement matrices and per-subdomain
//! assembly of the tangent stiffness and the Newton right-hand side.

use crate::material::{hooke_matrix, stress_update, Mat6, MaterialParams, PlasticState, ReturnMapResult, StrainVoigt};
use crate::mesh::{Mesh, Subdomain};
use crate::sparse::CsrMatrix;
use nalgebra::{Matrix3, SMatrix, SVector};
use thiserror::Error;

pub type BMatrix = SMatrix<f64, 6, 12>;
pub type ElementVector = SVector<f64, 12>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("element {element} is degenerate (volume {volume:e})")]
    DegenerateElement { element: usize, volume: f64 },
}

/// Constant strain-displacement matrix `G_T` and volume of one tet.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    pub b_matrix: BMatrix,
    pub volume: f64,
}

impl ElementGeometry {
    pub fn strain(&self, u: &ElementVector) -> StrainVoigt {
        StrainVoigt(self.b_matrix * u)
    }
}

/// Builds `G_T` from the constant gradients of the barycentric shape functions.
/// Rows follow the strain Voigt order `(e11, e22, e33, 2e12, 2e23, 2e13)`.
pub fn element_geometry(coords: &[[f64; 3]; 4]) -> Result<ElementGeometry, FemError> {
    let col = |a: usize| {
        nalgebra::Vector3::new(
            coords[a][0] - coords[0][0],
            coords[a][1] - coords[0][1],
            coords[a][2] - coords[0][2],
        )
    };
    let jac = Matrix3::from_columns(&[col(1), col(2), col(3)]);
    let det = jac.determinant();
    let volume = det / 6.0;

    let mut diag2: f64 = 0.0;
    for k in 0..3 {
        let lo = coords.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = coords.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        diag2 += (hi - lo).powi(2);
    }
    let vol_tol = 1e-12 * diag2.powf(1.5);
    if !(volume.abs() > vol_tol) {
        return Err(FemError::DegenerateElement { element: 0, volume });
    }
    let inv = jac
        .try_inverse()
        .ok_or(FemError::DegenerateElement { element: 0, volume })?;

    // gradient of N_a, a = 1..3, is row a-1 of J^{-1}; N_0 = 1 - N_1 - N_2 - N_3
    let mut grads = [[0.0; 3]; 4];
    for a in 1..4 {
        for k in 0..3 {
            grads[a][k] = inv[(a - 1, k)];
            grads[0][k] -= inv[(a - 1, k)];
        }
    }
    let mut b = BMatrix::zeros();
    for (a, g) in grads.iter().enumerate() {
        let c = 3 * a;
        b[(0, c)] = g[0];
        b[(1, c + 1)] = g[1];
        b[(2, c + 2)] = g[2];
        b[(3, c)] = g[1];
        b[(3, c + 1)] = g[0];
        b[(4, c + 1)] = g[2];
        b[(4, c + 2)] = g[1];
        b[(5, c)] = g[2];
        b[(5, c + 2)] = g[0];
    }
    Ok(ElementGeometry {
        b_matrix: b,
        volume: volume.abs(),
    })
}

/// Geometry of the tets of one subdomain in local numbering.
#[derive(Debug, Clone)]
pub struct SubdomainMesh {
    pub n_nodes: usize,
    pub tets: Vec<[usize; 4]>,
    /// Global tet id of each local tet.
    pub global_tets: Vec<usize>,
    pub elements: Vec<ElementGeometry>,
}

impl SubdomainMesh {
    pub fn new(mesh: &Mesh, sub: &Subdomain) -> Result<SubdomainMesh, FemError> {
        let elements = sub
            .tets
            .iter()
            .map(|&t| {
                element_geometry(&mesh.tet_coords(t)).map_err(|e| match e {
                    FemError::DegenerateElement { volume, .. } => FemError::DegenerateElement { element: t, volume },
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SubdomainMesh {
            n_nodes: sub.n_nodes(),
            tets: sub.local_tets.clone(),
            global_tets: sub.tets.clone(),
            elements,
        })
    }

    /// The whole mesh as a single subdomain in global numbering.
    pub fn monolithic(mesh: &Mesh) -> Result<SubdomainMesh, FemError> {
        let sub = Subdomain {
            nodes: (0..mesh.n_nodes()).collect(),
            tets: (0..mesh.n_tets()).collect(),
            local_tets: mesh.tets.clone(),
            dof_offset: 0,
        };
        SubdomainMesh::new(mesh, &sub)
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.n_nodes
    }

    pub fn gather(&self, e: usize, u: &[f64]) -> ElementVector {
        let tet = &self.tets[e];
        ElementVector::from_fn(|i, _| u[3 * tet[i / 3] + i % 3])
    }

    pub fn element_strain(&self, e: usize, u: &[f64]) -> StrainVoigt {
        self.elements[e].strain(&self.gather(e, u))
    }

    fn scatter_add(&self, e: usize, local: &ElementVector, out: &mut [f64]) {
        let tet = &self.tets[e];
        for i in 0..12 {
            out[3 * tet[i / 3] + i % 3] += local[i];
        }
    }

    fn push_block(&self, e: usize, block: &SMatrix<f64, 12, 12>, trip: &mut Vec<(usize, usize, f64)>) {
        let tet = &self.tets[e];
        for i in 0..12 {
            let r = 3 * tet[i / 3] + i % 3;
            for j in 0..12 {
                trip.push((r, 3 * tet[j / 3] + j % 3, block[(i, j)]));
            }
        }
    }
}

/// Local meshes of every subdomain of a decomposition.
pub fn subdomain_meshes(mesh: &Mesh, decomp: &crate::mesh::Decomposition) -> Result<Vec<SubdomainMesh>, FemError> {
    decomp.subdomains.iter().map(|s| SubdomainMesh::new(mesh, s)).collect()
}

/// Output of one subdomain assembly pass.
#[derive(Debug, Clone)]
pub struct SubdomainSystem {
    pub stiffness: CsrMatrix,
    /// `df - F(du)`: load increment minus the internal force of the iterate.
    pub rhs: Vec<f64>,
    pub element_increments: Vec<ReturnMapResult>,
    /// Elements whose trial stress lies outside the yield surface.
    pub plastic_count: usize,
}

fn element_stiffness(geom: &ElementGeometry, d: &Mat6) -> SMatrix<f64, 12, 12> {
    let b = &geom.b_matrix;
    (b.transpose() * d * b) * geom.volume
}

/// Tangent stiffness, residual and element increments at the iterate `du`.
///
/// `states` holds the converged history of each local tet at the start of the
/// time step.
pub fn assemble_subdomain(
    sub: &SubdomainMesh,
    du: &[f64],
    df: &[f64],
    states: &[PlasticState],
    params: &MaterialParams,
) -> SubdomainSystem {
    assert_eq!(du.len(), sub.n_dofs());
    assert_eq!(df.len(), sub.n_dofs());
    assert_eq!(states.len(), sub.tets.len());
    let mut rhs = df.to_vec();
    let mut trip = Vec::with_capacity(144 * sub.tets.len());
    let mut increments = Vec::with_capacity(sub.tets.len());
    let mut plastic_count = 0;
    for (e, geom) in sub.elements.iter().enumerate() {
        let deps = sub.element_strain(e, du);
        let (update, tangent) = stress_update(&states[e], &deps, params);
        plastic_count += update.plastic as usize;
        let force = geom.b_matrix.transpose() * update.delta_sigma.0 * geom.volume;
        sub.scatter_add(e, &(-force), &mut rhs);
        sub.push_block(e, &element_stiffness(geom, &tangent.0), &mut trip);
        increments.push(update);
    }
    SubdomainSystem {
        stiffness: CsrMatrix::from_triplets(sub.n_dofs(), sub.n_dofs(), trip),
        rhs,
        element_increments: increments,
        plastic_count,
    }
}

/// Elastic stiffness `sum |T| G^T C G`.
pub fn assemble_elastic_stiffness(sub: &SubdomainMesh, params: &MaterialParams) -> CsrMatrix {
    let c = hooke_matrix(params);
    let mut trip = Vec::with_capacity(144 * sub.tets.len());
    for (e, geom) in sub.elements.iter().enumerate() {
        sub.push_block(e, &element_stiffness(geom, &c), &mut trip);
    }
    CsrMatrix::from_triplets(sub.n_dofs(), sub.n_dofs(), trip)
}

/// Internal force `sum |T| G^T T_k(G u)` of the increment `du`.
pub fn internal_force(sub: &SubdomainMesh, du: &[f64], states: &[PlasticState], params: &MaterialParams) -> Vec<f64> {
    let mut f = vec![0.0; sub.n_dofs()];
    for (e, geom) in sub.elements.iter().enumerate() {
        let deps = sub.element_strain(e, du);
        let update = crate::material::return_mapping(&states[e], &deps, params);
        let force = geom.b_matrix.transpose() * update.delta_sigma.0 * geom.volume;
        sub.scatter_add(e, &force, &mut f);
    }
    f
}

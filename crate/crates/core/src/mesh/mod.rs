//! Tetrahedral meshes with boundary data, generators, text IO and partitioning.

mod generate;
mod io;
mod partition;

pub use generate::{
    generate_box_mesh, generate_plate_with_hole, mesh_preset, BoxFace, FaceConstraint, FaceTraction, MESH_PRESETS,
};
pub use io::{read_mesh, read_mesh_str, write_mesh, write_mesh_string};
pub use partition::{partition, Decomposition, InterfacePair, Subdomain};

use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("degenerate box: dimension {axis} has length {length}")]
    DegenerateBox { axis: usize, length: f64 },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("mesh invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot split {tets} elements into {requested} subdomains")]
    TooManySubdomains { requested: usize, tets: usize },
    #[error("unknown mesh preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Triangle on the Neumann boundary with a constant traction per unit area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannFace {
    pub nodes: [usize; 3],
    pub traction: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 3]>,
    pub tets: Vec<[usize; 4]>,
    /// Per node, which displacement components are held at zero.
    pub dirichlet: Vec<[bool; 3]>,
    pub neumann: Vec<NeumannFace>,
}

pub fn signed_volume(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3], d: &[f64; 3]) -> f64 {
    let u = sub(b, a);
    let v = sub(c, a);
    let w = sub(d, a);
    (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0])) / 6.0
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn sorted_face(f: [usize; 3]) -> [usize; 3] {
    let mut f = f;
    f.sort_unstable();
    f
}

/// The four faces of a tet; each is oriented outward for a positively oriented tet.
pub fn tet_faces(t: &[usize; 4]) -> [[usize; 3]; 4] {
    [
        [t[1], t[2], t[3]],
        [t[0], t[3], t[2]],
        [t[0], t[1], t[3]],
        [t[0], t[2], t[1]],
    ]
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn tet_coords(&self, t: usize) -> [[f64; 3]; 4] {
        let tet = &self.tets[t];
        [
            self.nodes[tet[0]],
            self.nodes[tet[1]],
            self.nodes[tet[2]],
            self.nodes[tet[3]],
        ]
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let [a, b, c, d] = self.tet_coords(t);
        signed_volume(&a, &b, &c, &d)
    }

    pub fn tet_centroid(&self, t: usize) -> [f64; 3] {
        let x = self.tet_coords(t);
        let mut c = [0.0; 3];
        for p in &x {
            for k in 0..3 {
                c[k] += 0.25 * p[k];
            }
        }
        c
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.n_tets()).map(|t| self.tet_volume(t)).sum()
    }

    /// Diagonal length of the axis-aligned bounding box.
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.nodes {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (0..3).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }

    pub fn n_constrained_components(&self) -> usize {
        self.dirichlet.iter().flatten().filter(|&&f| f).count()
    }

    /// Map from sorted face to the tets that own it.
    pub(crate) fn face_map(&self) -> HashMap<[usize; 3], Vec<usize>> {
        let mut map: HashMap<[usize; 3], Vec<usize>> = HashMap::with_capacity(2 * self.tets.len());
        for (t, tet) in self.tets.iter().enumerate() {
            for f in tet_faces(tet) {
                map.entry(sorted_face(f)).or_default().push(t);
            }
        }
        map
    }

    /// Checks every structural invariant, naming the first one that fails.
    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.nodes.len();
        if self.dirichlet.len() != n {
            return Err(MeshError::InvariantViolation(format!(
                "dirichlet flags for {} nodes, mesh has {n}",
                self.dirichlet.len()
            )));
        }
        if self.tets.is_empty() {
            return Err(MeshError::InvariantViolation("mesh has no tetrahedra".into()));
        }
        for (t, tet) in self.tets.iter().enumerate() {
            if let Some(&bad) = tet.iter().find(|&&v| v >= n) {
                return Err(MeshError::InvariantViolation(format!(
                    "tet {t} references node {bad} of {n}"
                )));
            }
            let vol = self.tet_volume(t);
            if !(vol > 0.0) {
                return Err(MeshError::InvariantViolation(format!(
                    "tet {t} has nonpositive signed volume {vol:e}"
                )));
            }
        }
        if !self.nodes.iter().flatten().all(|x| x.is_finite()) {
            return Err(MeshError::InvariantViolation("non-finite node coordinate".into()));
        }
        let faces = self.face_map();
        for (i, face) in self.neumann.iter().enumerate() {
            let owners = faces.get(&sorted_face(face.nodes)).map_or(0, |v| v.len());
            if owners != 1 {
                return Err(MeshError::InvariantViolation(format!(
                    "neumann face {i} {:?} belongs to {owners} tets, expected exactly one",
                    face.nodes
                )));
            }
        }
        if self.n_constrained_components() == 0 {
            return Err(MeshError::InvariantViolation(
                "no constrained displacement component; rigid motion is unrestrained".into(),
            ));
        }
        Ok(())
    }

    /// Area of a triangle given by node indices.
    pub fn face_area(&self, f: &[usize; 3]) -> f64 {
        let a = self.nodes[f[0]];
        let u = sub(&self.nodes[f[1]], &a);
        let v = sub(&self.nodes[f[2]], &a);
        let c = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    }
}

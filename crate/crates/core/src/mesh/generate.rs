//! Structured tetrahedral meshes: an axis-aligned box and the eighth of a
//! perforated plate.
//!
//! Both are built from logically structured hexahedra split into 6 tets along
//! the cell's main diagonal (Kuhn split). The split is the same for every cell
//! so neighbouring cells agree on their shared faces.

use super::{sorted_face, tet_faces, Mesh, MeshError, NeumannFace};
use std::collections::HashSet;

/// One of the six faces of an axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxFace {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl BoxFace {
    fn axis(self) -> usize {
        match self {
            BoxFace::XMin | BoxFace::XMax => 0,
            BoxFace::YMin | BoxFace::YMax => 1,
            BoxFace::ZMin | BoxFace::ZMax => 2,
        }
    }

    fn is_max(self) -> bool {
        matches!(self, BoxFace::XMax | BoxFace::YMax | BoxFace::ZMax)
    }

    pub fn parse(s: &str) -> Option<BoxFace> {
        Some(match s {
            "xmin" => BoxFace::XMin,
            "xmax" => BoxFace::XMax,
            "ymin" => BoxFace::YMin,
            "ymax" => BoxFace::YMax,
            "zmin" => BoxFace::ZMin,
            "zmax" => BoxFace::ZMax,
            _ => return None,
        })
    }
}

/// Holds the flagged displacement components at zero on a box face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceConstraint {
    pub face: BoxFace,
    pub components: [bool; 3],
}

/// Constant traction per unit area on a box face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceTraction {
    pub face: BoxFace,
    pub traction: [f64; 3],
}

/// Kuhn split of the unit cube: one tet per axis permutation, each walking
/// from corner (0,0,0) to corner (1,1,1). Corners are encoded as bit triples.
const KUHN_PATHS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn kuhn_tets() -> [[[usize; 3]; 4]; 6] {
    let mut out = [[[0usize; 3]; 4]; 6];
    for (t, path) in KUHN_PATHS.iter().enumerate() {
        let mut corner = [0usize; 3];
        out[t][0] = corner;
        for (step, &axis) in path.iter().enumerate() {
            corner[axis] = 1;
            out[t][step + 1] = corner;
        }
    }
    out
}

/// Splits a logically structured block of hexahedra into tets. `index(i, j, k)`
/// maps lattice points to node ids.
fn split_block(cells: [usize; 3], index: impl Fn(usize, usize, usize) -> usize, nodes: &[[f64; 3]]) -> Vec<[usize; 4]> {
    let pattern = kuhn_tets();
    let mut tets = Vec::with_capacity(6 * cells[0] * cells[1] * cells[2]);
    for k in 0..cells[2] {
        for j in 0..cells[1] {
            for i in 0..cells[0] {
                for tet in &pattern {
                    let mut t = [0usize; 4];
                    for (v, c) in tet.iter().enumerate() {
                        t[v] = index(i + c[0], j + c[1], k + c[2]);
                    }
                    if super::signed_volume(&nodes[t[0]], &nodes[t[1]], &nodes[t[2]], &nodes[t[3]]) < 0.0 {
                        t.swap(2, 3);
                    }
                    tets.push(t);
                }
            }
        }
    }
    tets
}

/// Boundary triangles whose three nodes all satisfy `on_face`, oriented as in
/// the owning tet.
fn boundary_faces(tets: &[[usize; 4]], nodes: &[[f64; 3]], on_face: impl Fn(&[f64; 3]) -> bool) -> Vec<[usize; 3]> {
    let mut seen = HashSet::new();
    let mut faces = Vec::new();
    for tet in tets {
        for f in tet_faces(tet) {
            if f.iter().all(|&v| on_face(&nodes[v])) && seen.insert(sorted_face(f)) {
                faces.push(f);
            }
        }
    }
    faces
}

/// Structured box `[0, dims.0] x [0, dims.1] x [0, dims.2]`.
pub fn generate_box_mesh(
    dims: [f64; 3],
    divisions: [usize; 3],
    constraints: &[FaceConstraint],
    tractions: &[FaceTraction],
) -> Result<Mesh, MeshError> {
    for (axis, &length) in dims.iter().enumerate() {
        if !(length > 0.0 && length.is_finite()) {
            return Err(MeshError::DegenerateBox { axis, length });
        }
    }
    if divisions.iter().any(|&d| d == 0) {
        return Err(MeshError::InvalidGeometry(format!(
            "divisions {divisions:?} must be at least 1"
        )));
    }
    let [nx, ny, nz] = divisions;
    let index = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([
                    dims[0] * i as f64 / nx as f64,
                    dims[1] * j as f64 / ny as f64,
                    dims[2] * k as f64 / nz as f64,
                ]);
            }
        }
    }
    let tets = split_block(divisions, index, &nodes);
    let tol = 1e-12 * dims.iter().cloned().fold(0.0, f64::max);
    let on = |face: BoxFace, p: &[f64; 3]| {
        let target = if face.is_max() { dims[face.axis()] } else { 0.0 };
        (p[face.axis()] - target).abs() <= tol
    };

    let mut dirichlet = vec![[false; 3]; nodes.len()];
    for c in constraints {
        for (n, p) in nodes.iter().enumerate() {
            if on(c.face, p) {
                for k in 0..3 {
                    dirichlet[n][k] |= c.components[k];
                }
            }
        }
    }
    let mut neumann = Vec::new();
    for tr in tractions {
        for f in boundary_faces(&tets, &nodes, |p| on(tr.face, p)) {
            neumann.push(NeumannFace {
                nodes: f,
                traction: tr.traction,
            });
        }
    }
    Ok(Mesh {
        nodes,
        tets,
        dirichlet,
        neumann,
    })
}

/// Eighth of a perforated plate: the block `[0, lx] x [0, ly] x [0, lz]` minus
/// the quarter cylinder `x^2 + y^2 < r^2`.
///
/// Symmetry planes `x = 0`, `y = 0` and `z = 0` hold their normal displacement
/// component; the face `x = lx` carries the unit traction `(1, 0, 0)`. Nodes
/// on the hole lie exactly on the circle; faces between them are chords, so the
/// discrete hole is a polygon inscribed in the circle.
pub fn generate_plate_with_hole(outer: [f64; 3], hole_radius: f64, refinement: usize) -> Result<Mesh, MeshError> {
    let [lx, ly, lz] = outer;
    if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
        return Err(MeshError::InvalidGeometry(format!(
            "plate sizes {outer:?} must be positive"
        )));
    }
    if !(hole_radius > 0.0 && hole_radius < lx.min(ly)) {
        return Err(MeshError::InvalidGeometry(format!(
            "hole radius {hole_radius} must lie in (0, {})",
            lx.min(ly)
        )));
    }
    if refinement == 0 {
        return Err(MeshError::InvalidGeometry("refinement must be at least 1".into()));
    }
    let half = 2 * refinement; // angular cells per outer edge
    let n_ang = 2 * half;
    let n_rad = 4 * refinement;
    let n_z = refinement;
    // radial grading clusters cells at the hole
    let grading = 1.6;

    let index = |i: usize, j: usize, k: usize| i + (n_rad + 1) * (j + (n_ang + 1) * k);
    let mut nodes = Vec::with_capacity((n_rad + 1) * (n_ang + 1) * (n_z + 1));
    for k in 0..=n_z {
        let z = lz * k as f64 / n_z as f64;
        for j in 0..=n_ang {
            let outer_pt = if j <= half {
                [lx, ly * j as f64 / half as f64]
            } else {
                [lx * (n_ang - j) as f64 / half as f64, ly]
            };
            let r_out = (outer_pt[0] * outer_pt[0] + outer_pt[1] * outer_pt[1]).sqrt();
            let mut inner_pt = [hole_radius * outer_pt[0] / r_out, hole_radius * outer_pt[1] / r_out];
            // keep symmetry-plane nodes exactly on their planes
            if j == 0 {
                inner_pt = [hole_radius, 0.0];
            } else if j == n_ang {
                inner_pt = [0.0, hole_radius];
            }
            for i in 0..=n_rad {
                let s = (i as f64 / n_rad as f64).powf(grading);
                let x = if i == n_rad {
                    outer_pt[0]
                } else {
                    inner_pt[0] + s * (outer_pt[0] - inner_pt[0])
                };
                let y = if i == n_rad {
                    outer_pt[1]
                } else {
                    inner_pt[1] + s * (outer_pt[1] - inner_pt[1])
                };
                nodes.push([x, y, z]);
            }
        }
    }
    let tets = split_block([n_rad, n_ang, n_z], index, &nodes);

    let tol = 1e-12 * lx.max(ly).max(lz);
    let dirichlet = nodes
        .iter()
        .map(|p| [p[0].abs() <= tol, p[1].abs() <= tol, p[2].abs() <= tol])
        .collect();
    let neumann = boundary_faces(&tets, &nodes, |p| (p[0] - lx).abs() <= tol)
        .into_iter()
        .map(|f| NeumannFace {
            nodes: f,
            traction: [1.0, 0.0, 0.0],
        })
        .collect();
    let mesh = Mesh {
        nodes,
        tets,
        dirichlet,
        neumann,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Names accepted by [`mesh_preset`].
pub const MESH_PRESETS: [&str; 3] = ["box", "plate_eighth", "cube"];

/// Generator presets used by the benchmarks and the front ends.
///
/// - `box`: cantilever `4 x 1 x 1` with `(4n, n, n)` cells, clamped at `x = 0`,
///   unit traction along `z` on `x = 4`.
/// - `plate_eighth`: eighth of the perforated plate, `10 x 10 x 1` with a hole of radius 1.
/// - `cube`: unit cube with `(n, n, n)` cells, clamped at `x = 0`, unit traction along `x` on `x = 1`.
pub fn mesh_preset(name: &str, refinement: usize) -> Result<Mesh, MeshError> {
    if refinement == 0 {
        return Err(MeshError::InvalidGeometry("refinement must be at least 1".into()));
    }
    let n = refinement;
    let clamp = [FaceConstraint {
        face: BoxFace::XMin,
        components: [true; 3],
    }];
    match name {
        "box" => generate_box_mesh(
            [4.0, 1.0, 1.0],
            [4 * n, n, n],
            &clamp,
            &[FaceTraction {
                face: BoxFace::XMax,
                traction: [0.0, 0.0, 1.0],
            }],
        ),
        "plate_eighth" => generate_plate_with_hole([10.0, 10.0, 1.0], 1.0, n),
        "cube" => generate_box_mesh(
            [1.0; 3],
            [n; 3],
            &clamp,
            &[FaceTraction {
                face: BoxFace::XMax,
                traction: [1.0, 0.0, 0.0],
            }],
        ),
        _ => Err(MeshError::UnknownPreset(name.to_string())),
    }
}

//! Random interior node perturbation for randomized tests.

use elastoplast::mesh::{sorted_face, tet_faces, Mesh, MeshError};
use std::collections::HashMap;

/// Moves every node off the boundary by at most `fraction` of its shortest
/// incident edge. Boundary nodes keep their place so constraints and traction
/// faces stay on their planes. The amplitude is halved until all tets keep a
/// positive volume.
pub fn perturb_interior(mesh: &mut Mesh, fraction: f64, mut sample: impl FnMut() -> f64) -> Result<(), MeshError> {
    let mut face_count: HashMap<[usize; 3], usize> = HashMap::new();
    for t in &mesh.tets {
        for f in tet_faces(t) {
            *face_count.entry(sorted_face(f)).or_default() += 1;
        }
    }
    let mut on_boundary = vec![false; mesh.n_nodes()];
    for (f, &c) in &face_count {
        if c == 1 {
            for &v in f {
                on_boundary[v] = true;
            }
        }
    }
    let mut shortest = vec![f64::INFINITY; mesh.n_nodes()];
    for t in &mesh.tets {
        for i in 0..4 {
            for j in i + 1..4 {
                let (a, b) = (mesh.nodes[t[i]], mesh.nodes[t[j]]);
                let len = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                shortest[t[i]] = shortest[t[i]].min(len);
                shortest[t[j]] = shortest[t[j]].min(len);
            }
        }
    }
    // unit-cube samples scaled to the ball of radius 1
    let offsets: Vec<[f64; 3]> = (0..mesh.n_nodes())
        .map(|_| [sample(), sample(), sample()].map(|x| x / 3f64.sqrt()))
        .collect();
    let original = mesh.nodes.clone();
    let mut scale = fraction;
    for _ in 0..8 {
        for (n, p) in mesh.nodes.iter_mut().enumerate() {
            if on_boundary[n] {
                continue;
            }
            for k in 0..3 {
                p[k] = original[n][k] + scale * shortest[n] * offsets[n][k];
            }
        }
        if mesh.validate().is_ok() {
            return Ok(());
        }
        scale *= 0.5;
    }
    mesh.nodes = original;
    Err(MeshError::InvalidGeometry(
        "perturbation inverted elements at every amplitude".into(),
    ))
}

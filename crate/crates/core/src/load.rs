//! Time grid and load history. The external load at time `t` is
//! `amplitude(t)` times the reference load built from the mesh's Neumann
//! tractions and a constant body force density.

use crate::mesh::{sorted_face, Decomposition, Mesh};
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoadError {
    #[error("time grid must be strictly increasing (t[{index}] = {value})")]
    NonMonotoneGrid { index: usize, value: f64 },
    #[error("time grid needs at least two points")]
    TooShort,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude {
    /// `a * sin(2 pi t)`.
    Sine(f64),
    /// `a * t`.
    Linear(f64),
    Constant(f64),
}

impl Amplitude {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Amplitude::Sine(a) => a * (2.0 * PI * t).sin(),
            Amplitude::Linear(a) => a * t,
            Amplitude::Constant(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadProgram {
    time_grid: Vec<f64>,
    pub amplitude: Amplitude,
    /// Reference body force density, scaled by the same amplitude.
    pub body_force: [f64; 3],
}

impl LoadProgram {
    pub fn new(time_grid: Vec<f64>, amplitude: Amplitude, body_force: [f64; 3]) -> Result<LoadProgram, LoadError> {
        if time_grid.len() < 2 {
            return Err(LoadError::TooShort);
        }
        for i in 1..time_grid.len() {
            if !(time_grid[i] > time_grid[i - 1]) {
                return Err(LoadError::NonMonotoneGrid {
                    index: i,
                    value: time_grid[i],
                });
            }
        }
        Ok(LoadProgram {
            time_grid,
            amplitude,
            body_force,
        })
    }

    /// `steps` equidistant intervals on `[t0, t_end]`.
    pub fn equidistant(t0: f64, t_end: f64, steps: usize, amplitude: Amplitude) -> Result<LoadProgram, LoadError> {
        if steps == 0 {
            return Err(LoadError::TooShort);
        }
        let dt = (t_end - t0) / steps as f64;
        let grid = (0..=steps)
            .map(|k| if k == steps { t_end } else { t0 + k as f64 * dt })
            .collect();
        LoadProgram::new(grid, amplitude, [0.0; 3])
    }

    /// Sinusoidal loading `400 sin(2 pi t)` on `[0, 1/4]`.
    pub fn plate_benchmark(steps: usize) -> LoadProgram {
        LoadProgram::equidistant(0.0, 0.25, steps, Amplitude::Sine(400.0)).expect("valid grid")
    }

    pub fn time_grid(&self) -> &[f64] {
        &self.time_grid
    }

    pub fn n_steps(&self) -> usize {
        self.time_grid.len() - 1
    }

    pub fn scale(&self, k: usize) -> f64 {
        self.amplitude.at(self.time_grid[k])
    }
}

/// Reference load in the torn layout: each Neumann face contributes
/// `area / 3 * traction` to its three nodes inside the subdomain that owns the
/// adjacent tet; each tet contributes `volume / 4 * body_force` to its nodes.
pub fn reference_load(mesh: &Mesh, decomp: &Decomposition, body_force: [f64; 3]) -> Vec<f64> {
    let mut f = vec![0.0; decomp.n_torn_dofs];
    let local_of = |p: usize, g: usize| -> usize {
        let sub = &decomp.subdomains[p];
        sub.dof_offset + 3 * sub.nodes.binary_search(&g).expect("node belongs to subdomain")
    };
    if body_force.iter().any(|&b| b != 0.0) {
        for (t, tet) in mesh.tets.iter().enumerate() {
            let p = decomp.subdomain_of_tet[t];
            let w = mesh.tet_volume(t) / 4.0;
            for &g in tet {
                let off = local_of(p, g);
                for k in 0..3 {
                    f[off + k] += w * body_force[k];
                }
            }
        }
    }
    if !mesh.neumann.is_empty() {
        let mut owner: HashMap<[usize; 3], usize> = HashMap::new();
        for (t, tet) in mesh.tets.iter().enumerate() {
            for face in crate::mesh::tet_faces(tet) {
                owner.insert(sorted_face(face), t);
            }
        }
        for face in &mesh.neumann {
            let p = decomp.subdomain_of_tet[owner[&sorted_face(face.nodes)]];
            let w = mesh.face_area(&face.nodes) / 3.0;
            for &g in &face.nodes {
                let off = local_of(p, g);
                for k in 0..3 {
                    f[off + k] += w * face.traction[k];
                }
            }
        }
    }
    f
}

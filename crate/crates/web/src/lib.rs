//! Browser demo: three operations exposed through wasm-bindgen.
//!
//! - `uniaxial_response`: stress path of one material point under cyclic uniaxial strain.
//! - `solve_box`: the cantilever benchmark with plastic flags and Newton history.
//! - `pcgp_histories`: PCGP residual histories of one elastic solve for each preconditioner.
//!
//! Timing is off, so results do not depend on a clock.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Flat `(strain, stress, kappa)` triples along `0 -> +max -> -max -> +max`.
#[wasm_bindgen]
pub fn uniaxial_response(
    young: f64,
    poisson: f64,
    sigma_y: f64,
    hardening: f64,
    max_strain: f64,
    points_per_leg: usize,
) -> Result<Vec<f64>, JsError> {
    demo::uniaxial_response(young, poisson, sigma_y, hardening, max_strain, points_per_leg).map_err(js)
}

#[wasm_bindgen]
pub struct BoxSolution(demo::BoxSolution);

#[wasm_bindgen]
impl BoxSolution {
    /// Node coordinates, three per node.
    #[wasm_bindgen(getter)]
    pub fn nodes(&self) -> Vec<f64> {
        self.0.nodes.clone()
    }

    /// Node displacements, three per node.
    #[wasm_bindgen(getter)]
    pub fn displacement(&self) -> Vec<f64> {
        self.0.displacement.clone()
    }

    /// Four node indices per tet.
    #[wasm_bindgen(getter)]
    pub fn tets(&self) -> Vec<u32> {
        self.0.tets.clone()
    }

    /// 1 for tets that yielded in the last step.
    #[wasm_bindgen(getter)]
    pub fn plastic(&self) -> Vec<u8> {
        self.0.plastic.clone()
    }

    /// Frobenius norm of the stress deviator per tet.
    #[wasm_bindgen(getter)]
    pub fn von_mises(&self) -> Vec<f64> {
        self.0.von_mises.clone()
    }

    /// Stopping criterion of every Newton iteration in order.
    #[wasm_bindgen(getter)]
    pub fn criteria(&self) -> Vec<f64> {
        self.0.criteria.clone()
    }

    /// Time step of every entry in `criteria`.
    #[wasm_bindgen(getter)]
    pub fn criterion_steps(&self) -> Vec<u32> {
        self.0.criterion_steps.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn pcgp_iterations(&self) -> u32 {
        self.0.pcgp_iterations
    }
}

/// Cantilever `4 x 1 x 1` clamped at `x = 0`, pulled along `z` at `x = 4` by
/// `amplitude sin(2 pi t)` on `[0, 1/4]`.
#[wasm_bindgen]
pub fn solve_box(
    refinement: usize,
    amplitude: f64,
    steps: usize,
    subdomains: usize,
    preconditioner: &str,
) -> Result<BoxSolution, JsError> {
    demo::solve_box(refinement, amplitude, steps, subdomains, preconditioner)
        .map(BoxSolution)
        .map_err(js)
}

#[wasm_bindgen]
pub struct PcgpHistories(demo::PcgpHistories);

#[wasm_bindgen]
impl PcgpHistories {
    #[wasm_bindgen(getter)]
    pub fn dirichlet(&self) -> Vec<f64> {
        self.0.dirichlet.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn lumped(&self) -> Vec<f64> {
        self.0.lumped.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn none(&self) -> Vec<f64> {
        self.0.none.clone()
    }
}

/// Relative residual histories for the elastic cantilever problem.
#[wasm_bindgen]
pub fn pcgp_histories(refinement: usize, subdomains: usize, eps: f64) -> Result<PcgpHistories, JsError> {
    demo::pcgp_histories(refinement, subdomains, eps)
        .map(PcgpHistories)
        .map_err(js)
}

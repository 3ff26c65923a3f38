//! Projected preconditioned conjugate gradients on the dual problem.

use super::{dot, norm, DualSystem, Preconditioner, TfetiError};
use nalgebra::DVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgpOptions {
    pub preconditioner: Preconditioner,
    /// Relative tolerance on the projected residual.
    pub eps: f64,
    /// Iteration cap; `None` means ten times the number of multipliers.
    pub max_iterations: Option<usize>,
}

impl Default for PcgpOptions {
    fn default() -> Self {
        PcgpOptions {
            preconditioner: Preconditioner::default(),
            eps: 1e-7,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcgpReport {
    pub iterations: usize,
    /// `||w^j||` for `j = 0, 1, ...`; the last entry passed the stopping test.
    pub residual_history: Vec<f64>,
    /// `||r^0||`, the reference of the relative test.
    pub initial_residual: f64,
    pub preconditioner: Preconditioner,
}

/// Returns `(lambda, alpha, report)`. The stopping test
/// `||P r|| <= eps ||r^0||` runs before each update, so a consistent start
/// takes zero iterations.
pub fn pcgp_solve(
    sys: &DualSystem<'_>,
    opts: &PcgpOptions,
) -> Result<(Vec<f64>, DVector<f64>, PcgpReport), TfetiError> {
    let layout = sys.layout;
    let m = layout.n_multipliers();
    let max_it = opts.max_iterations.unwrap_or(10 * m.max(1));
    let blocks = sys.primal_blocks(opts.preconditioner)?;

    let mut lambda = sys.lambda_im();
    let fl = sys.apply_f(&lambda);
    let mut r: Vec<f64> = sys.d.iter().zip(&fl).map(|(a, b)| a - b).collect();
    let r0 = norm(&r);
    let mut history = Vec::new();
    let mut p: Vec<f64> = Vec::new();
    let mut yw_prev = 0.0;
    let mut j = 0;
    loop {
        let w = layout.project(&r);
        let wn = norm(&w);
        history.push(wn);
        if wn <= opts.eps * r0 {
            break;
        }
        if j >= max_it {
            return Err(TfetiError::MaxIterations {
                iterations: j,
                residual: wn,
            });
        }
        let z = sys.precondition(&blocks, &w);
        let y = layout.project(&z);
        let yw = dot(&y, &w);
        if j == 0 {
            p = y;
        } else {
            let beta = yw / yw_prev;
            for (pi, yi) in p.iter_mut().zip(&y) {
                *pi = yi + beta * *pi;
            }
        }
        yw_prev = yw;
        let fp = sys.apply_f(&p);
        let pfp = dot(&p, &fp);
        if !(pfp > 0.0) {
            return Err(TfetiError::Breakdown {
                iteration: j + 1,
                curvature: pfp,
            });
        }
        let gamma = yw / pfp;
        for i in 0..m {
            lambda[i] += gamma * p[i];
            r[i] -= gamma * fp[i];
        }
        j += 1;
    }
    let alpha = sys.alpha(&lambda);
    Ok((
        lambda,
        alpha,
        PcgpReport {
            iterations: j,
            residual_history: history,
            initial_residual: r0,
            preconditioner: opts.preconditioner,
        },
    ))
}

//! Independent oracles shared by the integration tests. They work on 3x3
//! tensors and avoid the library's Voigt machinery.

#![allow(dead_code)]

use elastoplast::material::{MaterialParams, PlasticState, StrainVoigt, StressVoigt};
use nalgebra::Matrix3;
use rand::Rng;

pub fn strain_tensor(e: &StrainVoigt) -> Matrix3<f64> {
    let v = &e.0;
    Matrix3::new(
        v[0],
        v[3] / 2.0,
        v[5] / 2.0,
        v[3] / 2.0,
        v[1],
        v[4] / 2.0,
        v[5] / 2.0,
        v[4] / 2.0,
        v[2],
    )
}

pub fn stress_tensor(s: &StressVoigt) -> Matrix3<f64> {
    let v = &s.0;
    Matrix3::new(v[0], v[3], v[5], v[3], v[1], v[4], v[5], v[4], v[2])
}

pub fn stress_voigt(t: &Matrix3<f64>) -> StressVoigt {
    StressVoigt::from_slice([t[(0, 0)], t[(1, 1)], t[(2, 2)], t[(0, 1)], t[(1, 2)], t[(0, 2)]])
}

pub fn dev(t: &Matrix3<f64>) -> Matrix3<f64> {
    t - Matrix3::identity() * (t.trace() / 3.0)
}

pub fn hooke(e: &Matrix3<f64>, p: &MaterialParams) -> Matrix3<f64> {
    Matrix3::identity() * (p.lambda * e.trace()) + e * (2.0 * p.mu)
}

pub fn von_mises(t: &Matrix3<f64>, kappa: f64, p: &MaterialParams) -> f64 {
    (1.5f64).sqrt() * dev(t).norm() - (p.sigma_y + p.hardening_modulus * kappa)
}

/// One-step KKT solution in tensor form:
/// `sigma = sigma_k + C (deps - deps_p)`, `deps_p = dgamma sqrt(3/2) dev sigma / |dev sigma|`,
/// `kappa = kappa_k + dgamma`, `dgamma >= 0`, `Phi(sigma, kappa) <= 0`, `dgamma Phi = 0`.
///
/// The plastic multiplier is found by bisection on the consistency condition.
pub struct KktSolution {
    pub sigma: Matrix3<f64>,
    pub kappa: f64,
    pub dgamma: f64,
}

pub fn kkt_oracle(sigma_k: &Matrix3<f64>, kappa_k: f64, deps: &Matrix3<f64>, p: &MaterialParams) -> KktSolution {
    let trial = sigma_k + hooke(deps, p);
    if von_mises(&trial, kappa_k, p) <= 0.0 {
        return KktSolution {
            sigma: trial,
            kappa: kappa_k,
            dgamma: 0.0,
        };
    }
    // Direction of the trial deviator; the caller verifies the tensor flow
    // rule at the solution, which confirms the choice.
    let n = dev(&trial) / dev(&trial).norm();
    let stress = |g: f64| trial - n * (2.0 * p.mu * (1.5f64).sqrt() * g);
    // beyond this multiplier the deviator changes sign
    let (mut lo, mut hi) = (0.0, dev(&trial).norm() / (2.0 * p.mu * (1.5f64).sqrt()));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if von_mises(&stress(mid), kappa_k + mid, p) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let g = 0.5 * (lo + hi);
    KktSolution {
        sigma: stress(g),
        kappa: kappa_k + g,
        dgamma: g,
    }
}

/// Random state strictly inside the yield surface.
pub fn admissible_state(rng: &mut impl Rng, p: &MaterialParams) -> PlasticState {
    let kappa = if rng.gen_bool(0.3) {
        0.0
    } else {
        rng.gen_range(0.0..0.02)
    };
    let mut s = [0.0; 6];
    for x in s.iter_mut() {
        *x = rng.gen_range(-1.0..1.0) * p.sigma_y;
    }
    let t = stress_tensor(&StressVoigt::from_slice(s));
    let d = dev(&t);
    let limit = p.yield_stress(kappa) / ((1.5f64).sqrt() * d.norm());
    let t = t - d + d * (limit.min(1.0) * rng.gen_range(0.0..0.999));
    let sigma = stress_voigt(&t);
    PlasticState {
        sigma,
        kappa,
        eps: StrainVoigt::zeros(),
    }
}

/// Random strain increment reaching up to a few times the yield strain.
pub fn random_strain(rng: &mut impl Rng, p: &MaterialParams) -> StrainVoigt {
    let scale = p.sigma_y / p.mu * rng.gen_range(0.0..3.0);
    let mut e = [0.0; 6];
    for x in e.iter_mut() {
        *x = rng.gen_range(-1.0..1.0) * scale;
    }
    StrainVoigt::from_slice(e)
}

pub fn random_params(rng: &mut impl Rng) -> MaterialParams {
    let young = rng.gen_range(1e3..3e5);
    let nu = rng.gen_range(0.05..0.45);
    let sigma_y = young * rng.gen_range(1e-3..5e-3);
    let h = young * rng.gen_range(1e-3..0.2);
    MaterialParams::from_young_poisson(young, nu, sigma_y, h).unwrap()
}

//! Voigt-form tensor algebra and the time-discretized von Mises constitutive law
//! with linear isotropic hardening.
//!
//! Stresses and strains live in different Voigt conventions:
//!
//! ```text
//! stress  (s11, s22, s33, s12, s23, s13)
//! strain  (e11, e22, e33, 2 e12, 2 e23, 2 e13)
//! ```
//!
//! so that `sigma . eps` equals the tensor Frobenius pairing. The two are kept
//! apart by the [`StressVoigt`] and [`StrainVoigt`] newtypes.

use nalgebra::{Matrix6, Vector6};
use std::ops::{Add, AddAssign, Mul, Sub};
use thiserror::Error;

pub type Mat6 = Matrix6<f64>;
pub type Vec6 = Vector6<f64>;

const SQRT_2_3: f64 = 0.816_496_580_927_726;
const SQRT_3_2: f64 = 1.224_744_871_391_589;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("invalid material parameter {name} = {value}: must be strictly positive")]
    InvalidParams { name: &'static str, value: f64 },
    #[error("flow direction undefined: deviator norm {norm:e} is below threshold")]
    ZeroDeviator { norm: f64 },
}

/// Lamé constants, initial yield stress and linear hardening modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub lambda: f64,
    pub mu: f64,
    pub sigma_y: f64,
    pub hardening_modulus: f64,
}

impl MaterialParams {
    pub fn new(lambda: f64, mu: f64, sigma_y: f64, hardening_modulus: f64) -> Result<Self, MaterialError> {
        let params = Self {
            lambda,
            mu,
            sigma_y,
            hardening_modulus,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds the Lamé constants from Young's modulus and Poisson's ratio.
    pub fn from_young_poisson(
        young: f64,
        poisson: f64,
        sigma_y: f64,
        hardening_modulus: f64,
    ) -> Result<Self, MaterialError> {
        let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
        let mu = young / (2.0 * (1.0 + poisson));
        Self::new(lambda, mu, sigma_y, hardening_modulus)
    }

    /// Steel-like constants of the plate-with-hole benchmark:
    /// E = 206900, nu = 0.29, sigma_y = 450, H_m = 10000.
    pub fn plate_benchmark() -> Self {
        Self::from_young_poisson(206_900.0, 0.29, 450.0, 10_000.0).expect("benchmark constants are valid")
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let fields = [
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("sigma_y", self.sigma_y),
            ("hardening_modulus", self.hardening_modulus),
        ];
        for (name, value) in fields {
            // NaN fails this comparison too
            if !(value > 0.0 && value.is_finite()) {
                return Err(MaterialError::InvalidParams { name, value });
            }
        }
        Ok(())
    }

    /// 3 mu / (3 mu + H_m), the plastic reduction factor of the corrector.
    #[inline]
    pub fn plastic_factor(&self) -> f64 {
        3.0 * self.mu / (3.0 * self.mu + self.hardening_modulus)
    }

    /// Current yield stress sigma_y + H_m kappa.
    #[inline]
    pub fn yield_stress(&self, kappa: f64) -> f64 {
        self.sigma_y + self.hardening_modulus * kappa
    }
}

/// Stress in Voigt form `(s11, s22, s33, s12, s23, s13)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressVoigt(pub Vec6);

/// Strain in Voigt form `(e11, e22, e33, 2 e12, 2 e23, 2 e13)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StrainVoigt(pub Vec6);

impl StressVoigt {
    pub fn zeros() -> Self {
        Self(Vec6::zeros())
    }

    pub fn from_slice(v: [f64; 6]) -> Self {
        Self(Vec6::from_row_slice(&v))
    }

    /// The sigma-norm `sqrt(tau^T P tau)`, i.e. the Frobenius norm of the tensor.
    pub fn norm(&self) -> f64 {
        let t = &self.0;
        (t[0] * t[0] + t[1] * t[1] + t[2] * t[2] + 2.0 * (t[3] * t[3] + t[4] * t[4] + t[5] * t[5])).sqrt()
    }

    /// Deviatoric part, equal to `E_sigma tau`.
    pub fn deviator(&self) -> StressVoigt {
        let t = &self.0;
        let mean = (t[0] + t[1] + t[2]) / 3.0;
        StressVoigt(Vec6::new(t[0] - mean, t[1] - mean, t[2] - mean, t[3], t[4], t[5]))
    }

    /// Duality pairing with a strain.
    pub fn dot(&self, eps: &StrainVoigt) -> f64 {
        self.0.dot(&eps.0)
    }
}

impl StrainVoigt {
    pub fn zeros() -> Self {
        Self(Vec6::zeros())
    }

    pub fn from_slice(v: [f64; 6]) -> Self {
        Self(Vec6::from_row_slice(&v))
    }
}

macro_rules! voigt_arith {
    ($t:ident) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                $t(self.0 + rhs.0)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                $t(self.0 - rhs.0)
            }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, rhs: $t) {
                self.0 += rhs.0;
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, rhs: f64) -> $t {
                $t(self.0 * rhs)
            }
        }
    };
}
voigt_arith!(StressVoigt);
voigt_arith!(StrainVoigt);

/// History variables of one element carried between time steps.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlasticState {
    pub sigma: StressVoigt,
    pub kappa: f64,
    pub eps: StrainVoigt,
}

impl PlasticState {
    pub fn virgin() -> Self {
        Self::default()
    }

    /// Applies a converged increment.
    pub fn advance(&self, delta_eps: &StrainVoigt, update: &ReturnMapResult) -> PlasticState {
        PlasticState {
            sigma: self.sigma + update.delta_sigma,
            kappa: self.kappa + update.delta_kappa,
            eps: self.eps + *delta_eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnMapResult {
    pub delta_sigma: StressVoigt,
    pub delta_kappa: f64,
    pub plastic: bool,
    pub trial_stress: StressVoigt,
}

/// Symmetric 6x6 generalized derivative of the stress operator, mapping a
/// strain increment to a stress increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentMatrix(pub Mat6);

impl TangentMatrix {
    pub fn apply(&self, eps: &StrainVoigt) -> StressVoigt {
        StressVoigt(self.0 * eps.0)
    }
}

/// Isotropic Hooke matrix `C` acting on engineering-shear strains.
pub fn hooke_matrix(params: &MaterialParams) -> Mat6 {
    let (l, m) = (params.lambda, params.mu);
    let mut c = Mat6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            c[(i, j)] = l;
        }
        c[(i, i)] = l + 2.0 * m;
        c[(i + 3, i + 3)] = m;
    }
    c
}

/// Deviatoric projectors for the two Voigt conventions and the metric `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviatoricMatrices {
    /// Deviator acting on a strain vector, returning tensor components.
    pub e_eps: Mat6,
    /// `P E_eps`, the deviator of a stress vector.
    pub e_sigma: Mat6,
    /// `diag(1, 1, 1, 2, 2, 2)`.
    pub p: Mat6,
}

pub fn deviatoric_matrices() -> DeviatoricMatrices {
    let mut e_eps = Mat6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            e_eps[(i, j)] = if i == j { 2.0 / 3.0 } else { -1.0 / 3.0 };
        }
        e_eps[(i + 3, i + 3)] = 0.5;
    }
    let p = Mat6::from_diagonal(&Vec6::new(1.0, 1.0, 1.0, 2.0, 2.0, 2.0));
    let e_sigma = p * e_eps;
    DeviatoricMatrices { e_eps, e_sigma, p }
}

/// Von Mises yield function `sqrt(3/2) |dev tau| - (sigma_y + H_m kappa)`.
pub fn yield_function(tau: &StressVoigt, kappa: f64, params: &MaterialParams) -> f64 {
    SQRT_3_2 * tau.deviator().norm() - params.yield_stress(kappa)
}

/// Unit (sigma-norm) deviatoric direction of `tau`.
pub fn flow_direction(tau: &StressVoigt) -> Result<StressVoigt, MaterialError> {
    let dev = tau.deviator();
    let norm = dev.norm();
    if norm <= 1e-14 * tau.norm().max(1.0) {
        return Err(MaterialError::ZeroDeviator { norm });
    }
    Ok(dev * (1.0 / norm))
}

/// Elastic predictor / plastic corrector for one element and one strain increment.
///
/// The yield boundary `Phi(trial) = 0` is classified as elastic.
pub fn return_mapping(state: &PlasticState, delta_eps: &StrainVoigt, params: &MaterialParams) -> ReturnMapResult {
    let c_eps = StressVoigt(hooke_matrix(params) * delta_eps.0);
    let trial = state.sigma + c_eps;
    let phi = yield_function(&trial, state.kappa, params);
    if phi <= 0.0 {
        return ReturnMapResult {
            delta_sigma: c_eps,
            delta_kappa: 0.0,
            plastic: false,
            trial_stress: trial,
        };
    }
    // phi > 0 implies a nonzero deviator
    let n = flow_direction(&trial).expect("positive yield value implies a nonzero deviator");
    let corr = params.plastic_factor() * SQRT_2_3 * phi;
    ReturnMapResult {
        delta_sigma: c_eps - n * corr,
        delta_kappa: phi / (3.0 * params.mu + params.hardening_modulus),
        plastic: true,
        trial_stress: trial,
    }
}

/// Generalized (Clarke) derivative of the stress operator at `delta_eps`.
pub fn consistent_tangent(state: &PlasticState, delta_eps: &StrainVoigt, params: &MaterialParams) -> TangentMatrix {
    let c = hooke_matrix(params);
    let trial = state.sigma + StressVoigt(c * delta_eps.0);
    tangent_at_trial(&trial, state.kappa, params, &c)
}

fn tangent_at_trial(trial: &StressVoigt, kappa: f64, params: &MaterialParams, c: &Mat6) -> TangentMatrix {
    if yield_function(trial, kappa, params) <= 0.0 {
        return TangentMatrix(*c);
    }
    let dev_norm = trial.deviator().norm();
    let n = flow_direction(trial)
        .expect("positive yield value implies a nonzero deviator")
        .0;
    let e_eps = deviatoric_matrices().e_eps;
    let a = 2.0 * params.mu * params.plastic_factor();
    let b = a * SQRT_2_3 * params.yield_stress(kappa) / dev_norm;
    TangentMatrix(c - e_eps * a - (n * n.transpose() - e_eps) * b)
}

/// Return mapping and tangent in one pass, as used by assembly.
pub fn stress_update(
    state: &PlasticState,
    delta_eps: &StrainVoigt,
    params: &MaterialParams,
) -> (ReturnMapResult, TangentMatrix) {
    let c = hooke_matrix(params);
    let update = return_mapping(state, delta_eps, params);
    let tangent = if update.plastic {
        tangent_at_trial(&update.trial_stress, state.kappa, params, &c)
    } else {
        TangentMatrix(c)
    };
    (update, tangent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_params() -> MaterialParams {
        MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn hooke_matrix_unit_lame() {
        let c = hooke_matrix(&unit_params());
        let expected = [[3.0, 1.0, 1.0], [1.0, 3.0, 1.0], [1.0, 1.0, 3.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c[(i, j)], expected[i][j]);
            }
            assert_eq!(c[(i + 3, i + 3)], 1.0);
        }
    }

    #[test]
    fn hooke_volumetric_response() {
        let p = MaterialParams::new(2.5, 0.7, 1.0, 1.0).unwrap();
        let s = hooke_matrix(&p) * Vec6::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        let k = 3.0 * p.lambda + 2.0 * p.mu;
        assert_eq!(s, Vec6::new(k, k, k, 0.0, 0.0, 0.0));
    }

    #[test]
    fn benchmark_shear_modulus_from_formula() {
        let p = MaterialParams::plate_benchmark();
        assert!((p.lambda - 110_743.8).abs() < 0.1);
        assert!((p.mu - 206_900.0 / 2.58).abs() < 1e-9);
        assert!((p.mu - 80_193.8).abs() < 0.1);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(MaterialParams::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(MaterialParams::new(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(MaterialParams::new(1.0, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn deviator_matches_e_sigma() {
        let m = deviatoric_matrices();
        let tau = StressVoigt::from_slice([3.0, -1.0, 0.5, 0.2, -0.7, 1.1]);
        assert!((m.e_sigma * tau.0 - tau.deviator().0).norm() < 1e-14);
        let hydro = Vec6::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        assert!((m.e_sigma * hydro).norm() < 1e-15);
        let once = m.e_sigma * tau.0;
        assert!((m.e_sigma * once - once).norm() < 1e-14);
    }

    #[test]
    fn yield_function_simple_states() {
        let p = MaterialParams::plate_benchmark();
        assert_eq!(yield_function(&StressVoigt::zeros(), 0.0, &p), -450.0);
        let s = 700.0;
        let phi = yield_function(&StressVoigt::from_slice([s, 0.0, 0.0, 0.0, 0.0, 0.0]), 0.0, &p);
        assert!((phi - (s - 450.0)).abs() < 1e-10);
        let t = 100.0;
        let phi = yield_function(&StressVoigt::from_slice([0.0, 0.0, 0.0, t, 0.0, 0.0]), 0.0, &p);
        assert!((phi - (3f64.sqrt() * t - 450.0)).abs() < 1e-10);
    }

    #[test]
    fn flow_direction_cases() {
        let n = flow_direction(&StressVoigt::from_slice([1.0, -1.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((n.0 - Vec6::new(r, -r, 0.0, 0.0, 0.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            flow_direction(&StressVoigt::from_slice([5.0, 5.0, 5.0, 0.0, 0.0, 0.0])),
            Err(MaterialError::ZeroDeviator { .. })
        ));
    }

    #[test]
    fn zero_increment_is_elastic() {
        let p = MaterialParams::plate_benchmark();
        let state = PlasticState {
            sigma: StressVoigt::from_slice([100.0, 20.0, 0.0, 30.0, 0.0, 0.0]),
            kappa: 0.001,
            eps: StrainVoigt::zeros(),
        };
        let r = return_mapping(&state, &StrainVoigt::zeros(), &p);
        assert!(!r.plastic);
        assert_eq!(r.delta_kappa, 0.0);
        assert_eq!(r.delta_sigma, StressVoigt::zeros());
    }

    #[test]
    fn plastic_step_returns_to_yield_surface() {
        let p = MaterialParams::plate_benchmark();
        let state = PlasticState::virgin();
        let deps = StrainVoigt::from_slice([0.01, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = return_mapping(&state, &deps, &p);
        assert!(r.plastic && r.delta_kappa > 0.0);
        let phi = yield_function(&(state.sigma + r.delta_sigma), r.delta_kappa, &p);
        assert!(phi.abs() < 1e-9 * p.sigma_y);
        let t = consistent_tangent(&state, &deps, &p);
        assert_eq!(t.0, t.0.transpose());
    }

    #[test]
    fn tangent_elastic_branch_is_hooke() {
        let p = MaterialParams::plate_benchmark();
        let deps = StrainVoigt::from_slice([1e-4, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let t = consistent_tangent(&PlasticState::virgin(), &deps, &p);
        assert_eq!(t.0, hooke_matrix(&p));
    }
}

//! Assembly against index-form references and the incremental potential.

use elastoplast::fem::{assemble_elastic_stiffness, assemble_subdomain, subdomain_meshes, SubdomainMesh};
use elastoplast::material::{MaterialParams, PlasticState, StrainVoigt, StressVoigt};
use elastoplast::mesh::{generate_box_mesh, mesh_preset, partition, Mesh};
use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_material() -> MaterialParams {
    MaterialParams::from_young_poisson(1.0, 0.3, 1e-3, 0.05).unwrap()
}

fn random_vec(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0) * scale).collect()
}

/// Plastic history obtained by pushing every element through a random
/// strain step; yields a mix of elastic and plastic elements.
fn plastic_states(sub: &SubdomainMesh, rng: &mut impl Rng, p: &MaterialParams) -> Vec<PlasticState> {
    let du = random_vec(rng, sub.n_dofs(), 4.0 * p.sigma_y / p.mu);
    (0..sub.tets.len())
        .map(|e| {
            let deps = sub.element_strain(e, &du);
            let r = elastoplast::material::return_mapping(&PlasticState::virgin(), &deps, p);
            PlasticState::virgin().advance(&deps, &r)
        })
        .collect()
}

/// Shape-function gradients from the 4x4 barycentric system `[1 x y z]`.
fn gradients(x: &[[f64; 3]; 4]) -> ([[f64; 3]; 4], f64) {
    let m = Matrix4::from_fn(|i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
    let inv = m.try_inverse().unwrap();
    let mut g = [[0.0; 3]; 4];
    for (a, ga) in g.iter_mut().enumerate() {
        for k in 0..3 {
            ga[k] = inv[(k + 1, a)];
        }
    }
    (g, m.determinant().abs() / 6.0)
}

/// Index-form elasticity `K_(a i)(b j) = V sum_kl dN_a/dx_k C_ikjl dN_b/dx_l`.
fn dense_reference(mesh: &Mesh, p: &MaterialParams) -> DMatrix<f64> {
    let n = 3 * mesh.n_nodes();
    let delta = |i: usize, j: usize| (i == j) as u8 as f64;
    let c = |i, j, k, l| {
        p.lambda * delta(i, j) * delta(k, l) + p.mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))
    };
    let mut kd = DMatrix::zeros(n, n);
    for (t, tet) in mesh.tets.iter().enumerate() {
        let (g, vol) = gradients(&mesh.tet_coords(t));
        for a in 0..4 {
            for b in 0..4 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut s = 0.0;
                        for k in 0..3 {
                            for l in 0..3 {
                                s += g[a][k] * c(i, k, j, l) * g[b][l];
                            }
                        }
                        kd[(3 * tet[a] + i, 3 * tet[b] + j)] += vol * s;
                    }
                }
            }
        }
    }
    kd
}

#[test]
fn elastic_stiffness_matches_index_form_assembly() {
    let mesh = generate_box_mesh([1.0; 3], [2, 2, 2], &[], &[]).unwrap();
    let p = unit_material();
    let sub = SubdomainMesh::monolithic(&mesh).unwrap();
    let k = assemble_elastic_stiffness(&sub, &p).to_dense();
    let reference = dense_reference(&mesh, &p);
    assert!((k - &reference).abs().max() <= 1e-12 * reference.abs().max());
}

#[test]
fn zero_iterate_on_virgin_body_is_the_elastic_system() {
    let mesh = mesh_preset("cube", 2).unwrap();
    let p = MaterialParams::plate_benchmark();
    let sub = SubdomainMesh::monolithic(&mesh).unwrap();
    let n = sub.n_dofs();
    let df: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
    let sys = assemble_subdomain(
        &sub,
        &vec![0.0; n],
        &df,
        &vec![PlasticState::virgin(); sub.tets.len()],
        &p,
    );
    assert_eq!(sys.rhs, df);
    assert_eq!(sys.plastic_count, 0);
    assert_eq!(
        sys.stiffness.to_dense(),
        assemble_elastic_stiffness(&sub, &p).to_dense()
    );
}

#[test]
fn unconstrained_tangent_has_six_rigid_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mesh = generate_box_mesh([1.0, 0.7, 0.5], [2, 2, 1], &[], &[]).unwrap();
    let p = unit_material();
    let sub = SubdomainMesh::monolithic(&mesh).unwrap();
    for _ in 0..3 {
        let states = plastic_states(&sub, &mut rng, &p);
        let du = random_vec(&mut rng, sub.n_dofs(), 2.0 * p.sigma_y / p.mu);
        let sys = assemble_subdomain(&sub, &du, &vec![0.0; sub.n_dofs()], &states, &p);
        assert!(sys.plastic_count > 0);
        let k = sys.stiffness.to_dense();
        let scale = k.abs().max();
        let eig = k.symmetric_eigen();
        let zero = eig.eigenvalues.iter().filter(|l| l.abs() < 1e-10 * scale).count();
        assert_eq!(zero, 6);
        assert!(eig.eigenvalues.iter().all(|&l| l > -1e-10 * scale));
    }
}

#[test]
fn tangent_is_spectrally_sandwiched_by_elastic_stiffness() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mesh = mesh_preset("cube", 2).unwrap();
    let p = unit_material();
    let sub = SubdomainMesh::monolithic(&mesh).unwrap();
    let ke = assemble_elastic_stiffness(&sub, &p);
    let lower = p.hardening_modulus / (3.0 * p.mu + p.hardening_modulus);
    for _ in 0..5 {
        let states = plastic_states(&sub, &mut rng, &p);
        let du = random_vec(&mut rng, sub.n_dofs(), 2.0 * p.sigma_y / p.mu);
        let k = assemble_subdomain(&sub, &du, &vec![0.0; sub.n_dofs()], &states, &p).stiffness;
        assert!(k.asymmetry() <= 1e-14 * k.to_dense().abs().max());
        for _ in 0..50 {
            let w = random_vec(&mut rng, sub.n_dofs(), 1.0);
            let (we, wk) = (ke.bilinear(&w, &w), k.bilinear(&w, &w));
            assert!(we - wk >= -1e-10 * we);
            assert!(wk - lower * we >= -1e-10 * we);
        }
    }
}

#[test]
fn single_subdomain_equals_monolithic_assembly() {
    let mesh = mesh_preset("plate_eighth", 1).unwrap();
    let p = MaterialParams::plate_benchmark();
    let d = partition(&mesh, 1).unwrap();
    let subs = subdomain_meshes(&mesh, &d).unwrap();
    let mono = SubdomainMesh::monolithic(&mesh).unwrap();
    assert_eq!(
        assemble_elastic_stiffness(&subs[0], &p).to_dense(),
        assemble_elastic_stiffness(&mono, &p).to_dense()
    );
}

#[test]
fn stiffness_couples_only_element_neighbours() {
    let mesh = mesh_preset("box", 1).unwrap();
    let sub = SubdomainMesh::monolithic(&mesh).unwrap();
    let k = assemble_elastic_stiffness(&sub, &unit_material()).to_dense();
    let mut share = vec![vec![false; mesh.n_nodes()]; mesh.n_nodes()];
    for t in &mesh.tets {
        for &a in t {
            for &b in t {
                share[a][b] = true;
            }
        }
    }
    for i in 0..k.nrows() {
        for j in 0..k.ncols() {
            if k[(i, j)] != 0.0 {
                assert!(share[i / 3][j / 3], "entry ({i}, {j})");
            }
        }
    }
}

/// Element potential of one increment: `1/2 de.C de - (Phi_trial^+)^2 / (2 (3 mu + H))`.
/// Its gradient in `de` is the stress increment of the return mapping.
fn element_potential(st: &PlasticState, de: &StrainVoigt, p: &MaterialParams) -> f64 {
    let c = elastoplast::material::hooke_matrix(p);
    let dsig = StressVoigt(c * de.0);
    let trial = st.sigma + dsig;
    let phi = (1.5f64).sqrt() * trial.deviator().norm() - p.yield_stress(st.kappa);
    0.5 * dsig.dot(de) - phi.max(0.0).powi(2) / (2.0 * (3.0 * p.mu + p.hardening_modulus))
}

#[test]
fn residual_is_the_negative_gradient_of_the_incremental_potential() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mesh = mesh_preset("cube", 2).unwrap();
    let p = unit_material();
    let sub = SubdomainMesh::monolithic(&mesh).unwrap();
    let n = sub.n_dofs();
    let potential = |du: &[f64], df: &[f64], states: &[PlasticState]| -> f64 {
        let internal: f64 = (0..sub.tets.len())
            .map(|e| sub.elements[e].volume * element_potential(&states[e], &sub.element_strain(e, du), &p))
            .sum();
        internal - df.iter().zip(du).map(|(a, b)| a * b).sum::<f64>()
    };
    for _ in 0..5 {
        let states = plastic_states(&sub, &mut rng, &p);
        let du = random_vec(&mut rng, n, 2.0 * p.sigma_y / p.mu);
        let df = random_vec(&mut rng, n, 1e-4);
        let sys = assemble_subdomain(&sub, &du, &df, &states, &p);
        assert!(sys.plastic_count > 0);
        let v = DVector::from_vec(random_vec(&mut rng, n, 1.0));
        let v = (v.clone() / v.norm()).data.as_vec().clone();
        let h = 1e-6 * p.sigma_y / p.mu;
        let plus: Vec<f64> = du.iter().zip(&v).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = du.iter().zip(&v).map(|(a, b)| a - h * b).collect();
        let fd = (potential(&plus, &df, &states) - potential(&minus, &df, &states)) / (2.0 * h);
        let analytic: f64 = -sys.rhs.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        let scale = sys.rhs.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((fd - analytic).abs() <= 1e-6 * scale, "fd {fd:e} analytic {analytic:e}");
    }
}

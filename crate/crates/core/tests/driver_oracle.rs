use elastoplast::direct::DirectSolver;
use elastoplast::driver::{global_displacement, run_time_loop, DriverError, LinearSolver, Problem, SolverConfig};
use elastoplast::fem::{assemble_elastic_stiffness, subdomain_meshes};
use elastoplast::load::{reference_load, Amplitude, LoadProgram};
use elastoplast::material::{MaterialParams, PlasticState};
use elastoplast::mesh::{mesh_preset, partition, Mesh, NeumannFace};
use nalgebra::{DMatrix, DVector};

fn material() -> MaterialParams {
    MaterialParams::plate_benchmark()
}

fn cfg(s: usize) -> SolverConfig {
    SolverConfig {
        subdomains: s,
        timing: false,
        ..SolverConfig::default()
    }
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d / b.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn first_newton_iteration_solves_the_elastic_problem() {
    let mesh = mesh_preset("box", 2).unwrap();
    let d = partition(&mesh, 4).unwrap();
    let df: Vec<f64> = reference_load(&mesh, &d, [0.0; 3]).iter().map(|x| 40.0 * x).collect();
    let mut problem = Problem::new(
        &mesh,
        &d,
        material(),
        SolverConfig {
            eps_pcgp: 1e-12,
            ..cfg(4)
        },
    )
    .unwrap();
    let virgin = vec![PlasticState::virgin(); mesh.n_tets()];
    let (delta, report, plastic) = problem.newton_step(&vec![0.0; df.len()], &df, &virgin).unwrap();
    assert_eq!(plastic, 0);
    assert!(report.unwrap().iterations > 0);
    let k: Vec<_> = subdomain_meshes(&mesh, &d)
        .unwrap()
        .iter()
        .map(|s| assemble_elastic_stiffness(s, &material()))
        .collect();
    let elastic = DirectSolver::new(&mesh).solve(&d, &k, &df).unwrap();
    assert!(rel(&delta, &elastic) < 1e-9);
}

#[test]
fn elastic_load_converges_in_two_iterations() {
    let mesh = mesh_preset("box", 2).unwrap();
    let d = partition(&mesh, 2).unwrap();
    let program = LoadProgram::equidistant(0.0, 1.0, 1, Amplitude::Linear(5.0)).unwrap();
    let (report, fields) = run_time_loop(&mesh, &d, material(), &program, cfg(2)).unwrap();
    let rows = &report.steps[0].iterations;
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].criterion, 1.0);
    assert!(rows[1].criterion <= 1e-6);
    assert!(fields.plastic.iter().all(|&p| !p));
}

/// Reference tet with the rigid motions removed by six constrained
/// components and a traction on the opposite face.
fn one_element() -> Mesh {
    Mesh {
        nodes: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        tets: vec![[0, 1, 2, 3]],
        dirichlet: vec![[true; 3], [false, true, true], [false, false, true], [false; 3]],
        neumann: vec![NeumannFace {
            nodes: [1, 2, 3],
            traction: [30.0, -10.0, 50.0],
        }],
    }
}

#[test]
fn one_element_correction_matches_dense_solve() {
    let mesh = one_element();
    mesh.validate().unwrap();
    let d = partition(&mesh, 1).unwrap();
    let df = reference_load(&mesh, &d, [0.0; 3]);
    let k = assemble_elastic_stiffness(&subdomain_meshes(&mesh, &d).unwrap()[0], &material()).to_dense();
    let free: Vec<usize> = (0..12).filter(|&i| !mesh.dirichlet[i / 3][i % 3]).collect();
    let kf = DMatrix::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let ff = DVector::from_iterator(free.len(), free.iter().map(|&i| df[i]));
    let uf = kf.lu().solve(&ff).unwrap();
    let mut expected = vec![0.0; 12];
    for (i, &g) in free.iter().enumerate() {
        expected[g] = uf[i];
    }
    for linear in [LinearSolver::Tfeti, LinearSolver::Direct] {
        let c = SolverConfig {
            linear_solver: linear,
            eps_pcgp: 1e-12,
            ..cfg(1)
        };
        let mut problem = Problem::new(&mesh, &d, material(), c).unwrap();
        let (delta, _, _) = problem
            .newton_step(&vec![0.0; 12], &df, &[PlasticState::virgin()])
            .unwrap();
        assert!(rel(&delta, &expected) < 1e-10, "{linear:?}");
    }
}

#[test]
fn zero_load_increments_take_one_iteration() {
    let mesh = mesh_preset("cube", 2).unwrap();
    let d = partition(&mesh, 2).unwrap();
    // constant amplitude: every increment is zero
    let program = LoadProgram::equidistant(0.0, 1.0, 3, Amplitude::Constant(7.0)).unwrap();
    let (report, fields) = run_time_loop(&mesh, &d, material(), &program, cfg(2)).unwrap();
    for s in &report.steps {
        assert_eq!(s.iterations.len(), 1);
        assert_eq!(s.iterations[0].criterion, 0.0);
    }
    assert!(fields.u.iter().all(|&x| x == 0.0));
    assert!(fields.states.iter().all(|s| *s == PlasticState::virgin()));
}

#[test]
fn kappa_is_monotone_and_accumulates_step_increments() {
    let mesh = mesh_preset("box", 2).unwrap();
    let d = partition(&mesh, 2).unwrap();
    let program = LoadProgram::equidistant(0.0, 0.25, 4, Amplitude::Sine(60.0)).unwrap();
    let mut problem = Problem::new(&mesh, &d, material(), cfg(2)).unwrap();
    let mut history: Vec<Vec<f64>> = vec![vec![0.0; mesh.n_tets()]];
    let (report, fields) = problem
        .run_time_loop(&program, |_, f| {
            history.push(f.states.iter().map(|s| s.kappa).collect())
        })
        .map_err(|(_, _, e)| e)
        .unwrap();
    assert!(fields.plastic.iter().any(|&p| p));
    let mut sum = vec![0.0; mesh.n_tets()];
    for w in history.windows(2) {
        for t in 0..mesh.n_tets() {
            let dk = w[1][t] - w[0][t];
            assert!(dk >= 0.0);
            sum[t] += dk;
        }
    }
    for t in 0..mesh.n_tets() {
        assert!((sum[t] - fields.states[t].kappa).abs() <= 1e-15 * fields.states[t].kappa.max(1e-300) + 1e-18);
    }
    for s in &report.steps {
        for it in &s.iterations {
            assert!(it.plastic_elements <= mesh.n_tets());
        }
    }
}

#[test]
fn direct_and_tfeti_agree_on_the_benchmark() {
    let mesh = mesh_preset("box", 3).unwrap();
    let program = LoadProgram::equidistant(0.0, 0.25, 2, Amplitude::Sine(50.0)).unwrap();
    let eps_pcgp = 1e-7;
    let mut runs = Vec::new();
    for (linear, s) in [(LinearSolver::Direct, 1), (LinearSolver::Tfeti, 4)] {
        let d = partition(&mesh, s).unwrap();
        let c = SolverConfig {
            linear_solver: linear,
            eps_pcgp,
            ..cfg(s)
        };
        let (report, fields) = run_time_loop(&mesh, &d, material(), &program, c).unwrap();
        let counts: Vec<usize> = report.steps.iter().map(|st| st.iterations.len()).collect();
        runs.push((counts, global_displacement(&d, &fields.u), fields.plastic));
    }
    assert_eq!(runs[0].0, runs[1].0);
    assert_eq!(runs[0].2, runs[1].2);
    let diff = rel(&runs[1].1, &runs[0].1);
    assert!(diff <= 10.0 * eps_pcgp, "relative difference {diff:e}");
}

#[test]
fn newton_failure_carries_the_history() {
    let mesh = mesh_preset("box", 2).unwrap();
    let d = partition(&mesh, 1).unwrap();
    let program = LoadProgram::equidistant(0.0, 0.25, 1, Amplitude::Sine(60.0)).unwrap();
    let c = SolverConfig {
        max_newton: 2,
        ..cfg(1)
    };
    match run_time_loop(&mesh, &d, material(), &program, c) {
        Err(DriverError::NoConvergence {
            step,
            max_newton,
            history,
        }) => {
            assert_eq!((step, max_newton), (1, 2));
            assert_eq!(history.len(), 2);
            assert!(history[1] > 1e-4);
        }
        other => panic!("expected NoConvergence, got {other:?}"),
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mesh = mesh_preset("cube", 1).unwrap();
    let d = partition(&mesh, 1).unwrap();
    for c in [
        SolverConfig {
            eps_newton: 0.0,
            ..cfg(1)
        },
        SolverConfig {
            eps_pcgp: 1.0,
            ..cfg(1)
        },
        SolverConfig {
            max_newton: 0,
            ..cfg(1)
        },
    ] {
        assert!(matches!(
            Problem::new(&mesh, &d, material(), c),
            Err(DriverError::InvalidConfig(_))
        ));
    }
}

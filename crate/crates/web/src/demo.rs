//! Plain-Rust bodies of the exported operations, testable off the browser.

use elastoplast::driver::{global_displacement, run_time_loop, SolverConfig};
use elastoplast::fem::{assemble_elastic_stiffness, subdomain_meshes};
use elastoplast::load::{reference_load, Amplitude, LoadProgram};
use elastoplast::material::{return_mapping, MaterialParams, PlasticState, StrainVoigt};
use elastoplast::mesh::{mesh_preset, partition};
use elastoplast::tfeti::{self, PcgpOptions, Preconditioner, TfetiLayout};

/// Uniaxial strain: only `eps_11` varies. Returns `(eps_11, sigma_11, kappa)`
/// triples, starting at the origin.
pub fn uniaxial_response(
    young: f64,
    poisson: f64,
    sigma_y: f64,
    hardening: f64,
    max_strain: f64,
    points_per_leg: usize,
) -> Result<Vec<f64>, String> {
    let p = MaterialParams::from_young_poisson(young, poisson, sigma_y, hardening).map_err(|e| e.to_string())?;
    if !(max_strain > 0.0 && max_strain.is_finite()) || points_per_leg == 0 {
        return Err("max_strain must be positive and points_per_leg at least 1".into());
    }
    let mut path = Vec::new();
    let n = points_per_leg as f64;
    for i in 1..=points_per_leg {
        path.push(max_strain * i as f64 / n);
    }
    for i in 1..=2 * points_per_leg {
        path.push(max_strain * (1.0 - i as f64 / n));
    }
    for i in 1..=2 * points_per_leg {
        path.push(-max_strain + max_strain * i as f64 / n);
    }
    let mut state = PlasticState::virgin();
    let mut eps = 0.0;
    let mut out = vec![0.0, 0.0, 0.0];
    for target in path {
        let de = StrainVoigt::from_slice([target - eps, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = return_mapping(&state, &de, &p);
        state = state.advance(&de, &r);
        eps = target;
        out.extend_from_slice(&[eps, state.sigma.0[0], state.kappa]);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BoxSolution {
    pub nodes: Vec<f64>,
    pub displacement: Vec<f64>,
    pub tets: Vec<u32>,
    pub plastic: Vec<u8>,
    pub von_mises: Vec<f64>,
    pub criteria: Vec<f64>,
    pub criterion_steps: Vec<u32>,
    pub pcgp_iterations: u32,
}

fn check_size(refinement: usize, subdomains: usize) -> Result<(), String> {
    // keeps the page responsive
    if !(1..=6).contains(&refinement) {
        return Err("refinement must lie in 1..=6".into());
    }
    if !(1..=16).contains(&subdomains) {
        return Err("subdomains must lie in 1..=16".into());
    }
    Ok(())
}

pub fn solve_box(
    refinement: usize,
    amplitude: f64,
    steps: usize,
    subdomains: usize,
    preconditioner: &str,
) -> Result<BoxSolution, String> {
    check_size(refinement, subdomains)?;
    if !(1..=64).contains(&steps) {
        return Err("steps must lie in 1..=64".into());
    }
    let pc = Preconditioner::parse(preconditioner).ok_or("preconditioner must be lumped, dirichlet or none")?;
    let mesh = mesh_preset("box", refinement).map_err(|e| e.to_string())?;
    let decomp = partition(&mesh, subdomains).map_err(|e| e.to_string())?;
    let program = LoadProgram::equidistant(0.0, 0.25, steps, Amplitude::Sine(amplitude)).map_err(|e| e.to_string())?;
    let cfg = SolverConfig {
        subdomains,
        preconditioner: pc,
        timing: false,
        ..SolverConfig::default()
    };
    let (report, fields) =
        run_time_loop(&mesh, &decomp, MaterialParams::plate_benchmark(), &program, cfg).map_err(|e| e.to_string())?;
    let mut criteria = Vec::new();
    let mut criterion_steps = Vec::new();
    for s in &report.steps {
        for it in &s.iterations {
            criteria.push(it.criterion);
            criterion_steps.push(s.step as u32);
        }
    }
    Ok(BoxSolution {
        nodes: mesh.nodes.iter().flatten().copied().collect(),
        displacement: global_displacement(&decomp, &fields.u),
        tets: mesh.tets.iter().flatten().map(|&v| v as u32).collect(),
        plastic: fields.plastic.iter().map(|&p| p as u8).collect(),
        von_mises: fields.states.iter().map(|s| s.sigma.deviator().norm()).collect(),
        criteria,
        criterion_steps,
        pcgp_iterations: report.total_pcgp() as u32,
    })
}

#[derive(Debug, Clone)]
pub struct PcgpHistories {
    pub dirichlet: Vec<f64>,
    pub lumped: Vec<f64>,
    pub none: Vec<f64>,
}

pub fn pcgp_histories(refinement: usize, subdomains: usize, eps: f64) -> Result<PcgpHistories, String> {
    check_size(refinement, subdomains)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err("eps must lie in (0, 1)".into());
    }
    let mesh = mesh_preset("box", refinement).map_err(|e| e.to_string())?;
    let decomp = partition(&mesh, subdomains).map_err(|e| e.to_string())?;
    let params = MaterialParams::plate_benchmark();
    let stiffness: Vec<_> = subdomain_meshes(&mesh, &decomp)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|s| assemble_elastic_stiffness(s, &params))
        .collect();
    let f = reference_load(&mesh, &decomp, [0.0; 3]);
    let mut layout = TfetiLayout::new(&mesh, &decomp).map_err(|e| e.to_string())?;
    let mut run = |pc| -> Result<Vec<f64>, String> {
        let opts = PcgpOptions {
            preconditioner: pc,
            eps,
            max_iterations: None,
        };
        let report = tfeti::solve(&mut layout, &stiffness, &f, &opts)
            .map_err(|e| e.to_string())?
            .report;
        let r0 = report.initial_residual;
        Ok(report.residual_history.iter().map(|r| r / r0).collect())
    };
    Ok(PcgpHistories {
        dirichlet: run(Preconditioner::Dirichlet)?,
        lumped: run(Preconditioner::Lumped)?,
        none: run(Preconditioner::None)?,
    })
}

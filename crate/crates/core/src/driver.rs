//! Implicit Euler in time with a semismooth Newton method per step.

use crate::direct::DirectSolver;
use crate::fem::{assemble_subdomain, subdomain_meshes, FemError, SubdomainMesh};
use crate::load::{reference_load, LoadProgram};
use crate::material::{return_mapping, MaterialParams, PlasticState};
use crate::mesh::{Decomposition, Mesh};
use crate::sparse::{CsrMatrix, FactorError};
use crate::tfeti::{self, par_map, PcgpOptions, PcgpReport, Preconditioner, TfetiError, TfetiLayout};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    #[default]
    Tfeti,
    Direct,
}

impl LinearSolver {
    pub fn parse(s: &str) -> Option<LinearSolver> {
        match s {
            "tfeti" => Some(LinearSolver::Tfeti),
            "direct" => Some(LinearSolver::Direct),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LinearSolver::Tfeti => "tfeti",
            LinearSolver::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub eps_newton: f64,
    pub eps_pcgp: f64,
    pub max_newton: usize,
    pub preconditioner: Preconditioner,
    pub linear_solver: LinearSolver,
    pub subdomains: usize,
    /// Measure wall time per Newton iteration. Off gives reproducible reports
    /// and avoids the clock on targets without one.
    pub timing: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps_newton: 1e-4,
            eps_pcgp: 1e-7,
            max_newton: 50,
            preconditioner: Preconditioner::Dirichlet,
            linear_solver: LinearSolver::Tfeti,
            subdomains: 1,
            timing: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), DriverError> {
        let bad = |name: &'static str, reason: &str| Err(DriverError::InvalidConfig(format!("{name}: {reason}")));
        if !(self.eps_newton > 0.0 && self.eps_newton < 1.0) {
            return bad("eps_newton", "must lie in (0, 1)");
        }
        if !(self.eps_pcgp > 0.0 && self.eps_pcgp < 1.0) {
            return bad("eps_pcgp", "must lie in (0, 1)");
        }
        if self.max_newton == 0 {
            return bad("max_newton", "must be at least 1");
        }
        if self.subdomains == 0 {
            return bad("subdomains", "must be at least 1");
        }
        Ok(())
    }

    fn pcgp(&self) -> PcgpOptions {
        PcgpOptions {
            preconditioner: self.preconditioner,
            eps: self.eps_pcgp,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearError {
    #[error(transparent)]
    Tfeti(#[from] TfetiError),
    #[error("direct solve: {0}")]
    Direct(#[from] FactorError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DriverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("linear solve failed at step {step}, Newton iteration {newton}: {source}")]
    LinearSolveFailure {
        step: usize,
        newton: usize,
        source: LinearError,
    },
    #[error("Newton did not converge in {max_newton} iterations at step {step}")]
    NoConvergence {
        step: usize,
        max_newton: usize,
        history: Vec<f64>,
    },
}

/// One row of the convergence history.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonIteration {
    pub criterion: f64,
    pub pcgp_iterations: usize,
    /// Elements whose trial stress at the assembled iterate lies outside the
    /// yield surface.
    pub plastic_elements: usize,
    pub pcgp_residuals: Vec<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// 1-based time index.
    pub step: usize,
    pub time: f64,
    pub iterations: Vec<NewtonIteration>,
    /// Plastic elements of the converged increment.
    pub plastic_elements: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    pub steps: Vec<StepReport>,
    /// Observed anomalies, e.g. a criterion increase after the plastic set settled.
    pub diagnostics: Vec<String>,
}

impl SolveReport {
    pub fn total_newton(&self) -> usize {
        self.steps.iter().map(|s| s.iterations.len()).sum()
    }

    pub fn total_pcgp(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| &s.iterations)
            .map(|i| i.pcgp_iterations)
            .sum()
    }
}

/// Converged fields after a time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    /// Torn displacement.
    pub u: Vec<f64>,
    /// Per global tet.
    pub states: Vec<PlasticState>,
    /// Per global tet: plastic in the last converged increment.
    pub plastic: Vec<bool>,
}

impl Fields {
    pub fn virgin(mesh: &Mesh, decomp: &Decomposition) -> Fields {
        Fields {
            u: vec![0.0; decomp.n_torn_dofs],
            states: vec![PlasticState::virgin(); mesh.n_tets()],
            plastic: vec![false; mesh.n_tets()],
        }
    }
}

enum Backend {
    Tfeti(Box<TfetiLayout>),
    Direct(DirectSolver),
}

/// Everything fixed over a run: geometry, decomposition, reference load and
/// the linear solver with its cached analyses.
pub struct Problem<'a> {
    pub mesh: &'a Mesh,
    pub decomp: &'a Decomposition,
    pub params: MaterialParams,
    pub cfg: SolverConfig,
    subs: Vec<SubdomainMesh>,
    backend: Backend,
}

fn timer(enabled: bool) -> impl FnOnce() -> f64 {
    #[cfg(not(target_arch = "wasm32"))]
    let start = enabled.then(std::time::Instant::now);
    #[cfg(target_arch = "wasm32")]
    let start: Option<()> = {
        let _ = enabled;
        None
    };
    move || {
        #[cfg(not(target_arch = "wasm32"))]
        {
            start.map_or(0.0, |s| s.elapsed().as_secs_f64())
        }
        #[cfg(target_arch = "wasm32")]
        {
            let _ = start;
            0.0
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl<'a> Problem<'a> {
    pub fn new(
        mesh: &'a Mesh,
        decomp: &'a Decomposition,
        params: MaterialParams,
        cfg: SolverConfig,
    ) -> Result<Problem<'a>, DriverError> {
        cfg.validate()?;
        let subs = subdomain_meshes(mesh, decomp)?;
        let backend = match cfg.linear_solver {
            LinearSolver::Tfeti => Backend::Tfeti(Box::new(TfetiLayout::new(mesh, decomp).map_err(|e| {
                DriverError::LinearSolveFailure {
                    step: 0,
                    newton: 0,
                    source: e.into(),
                }
            })?)),
            LinearSolver::Direct => Backend::Direct(DirectSolver::new(mesh)),
        };
        Ok(Problem {
            mesh,
            decomp,
            params,
            cfg,
            subs,
            backend,
        })
    }

    pub fn subdomain_meshes(&self) -> &[SubdomainMesh] {
        &self.subs
    }

    fn local_states(&self, states: &[PlasticState]) -> Vec<Vec<PlasticState>> {
        self.subs
            .iter()
            .map(|s| s.global_tets.iter().map(|&t| states[t]).collect())
            .collect()
    }

    fn slice<'v>(&self, p: usize, v: &'v [f64]) -> &'v [f64] {
        let s = &self.decomp.subdomains[p];
        &v[s.dof_offset..s.dof_offset + s.n_dofs()]
    }

    /// Solves `K(du) delta = df - F(du)` and returns the correction, the PCGP
    /// report (absent for the direct solver) and the plastic count at `du`.
    pub fn newton_step(
        &mut self,
        du: &[f64],
        df: &[f64],
        states: &[PlasticState],
    ) -> Result<(Vec<f64>, Option<PcgpReport>, usize), LinearError> {
        let local = self.local_states(states);
        let items: Vec<usize> = (0..self.subs.len()).collect();
        let systems = par_map(&items, |&p| {
            assemble_subdomain(
                &self.subs[p],
                self.slice(p, du),
                self.slice(p, df),
                &local[p],
                &self.params,
            )
        });
        let plastic = systems.iter().map(|s| s.plastic_count).sum();
        let mut rhs = Vec::with_capacity(du.len());
        let mut stiffness = Vec::with_capacity(systems.len());
        for s in systems {
            rhs.extend_from_slice(&s.rhs);
            stiffness.push(s.stiffness);
        }
        let (delta, report) = self.linear_solve(&stiffness, &rhs)?;
        Ok((delta, report, plastic))
    }

    fn linear_solve(
        &mut self,
        stiffness: &[CsrMatrix],
        rhs: &[f64],
    ) -> Result<(Vec<f64>, Option<PcgpReport>), LinearError> {
        match &mut self.backend {
            Backend::Tfeti(layout) => {
                let sol = tfeti::solve(layout, stiffness, rhs, &self.cfg.pcgp())?;
                Ok((sol.u, Some(sol.report)))
            }
            Backend::Direct(direct) => Ok((direct.solve(self.decomp, stiffness, rhs)?, None)),
        }
    }

    /// Semismooth Newton from `du = 0` for one time step with load increment
    /// `df`. `step` only labels errors.
    pub fn newton_solve(
        &mut self,
        step: usize,
        df: &[f64],
        states: &[PlasticState],
    ) -> Result<(Vec<f64>, Vec<NewtonIteration>), DriverError> {
        let mut du = vec![0.0; df.len()];
        let mut rows = Vec::new();
        for i in 0..self.cfg.max_newton {
            let stop = timer(self.cfg.timing);
            let (delta, report, plastic) =
                self.newton_step(&du, df, states)
                    .map_err(|source| DriverError::LinearSolveFailure {
                        step,
                        newton: i + 1,
                        source,
                    })?;
            let old_norm = norm(&du);
            for (a, d) in du.iter_mut().zip(&delta) {
                *a += d;
            }
            let denom = norm(&du) + old_norm;
            let criterion = if denom == 0.0 { 0.0 } else { norm(&delta) / denom };
            let (pcgp_iterations, pcgp_residuals) =
                report.map_or((0, Vec::new()), |r| (r.iterations, r.residual_history));
            rows.push(NewtonIteration {
                criterion,
                pcgp_iterations,
                plastic_elements: plastic,
                pcgp_residuals,
                seconds: stop(),
            });
            if criterion <= self.cfg.eps_newton {
                return Ok((du, rows));
            }
        }
        Err(DriverError::NoConvergence {
            step,
            max_newton: self.cfg.max_newton,
            history: rows.iter().map(|r| r.criterion).collect(),
        })
    }

    /// Return mapping at the converged increment; advances `fields`.
    pub fn update_fields(&self, fields: &mut Fields, du: &[f64]) {
        for (p, sub) in self.subs.iter().enumerate() {
            let dup = self.slice(p, du);
            for (e, &t) in sub.global_tets.iter().enumerate() {
                let deps = sub.element_strain(e, dup);
                let update = return_mapping(&fields.states[t], &deps, &self.params);
                fields.plastic[t] = update.plastic;
                fields.states[t] = fields.states[t].advance(&deps, &update);
            }
        }
        for (u, d) in fields.u.iter_mut().zip(du) {
            *u += d;
        }
    }

    /// Runs every step of `program`, calling `on_step` after each converged
    /// step. On failure the report of the completed steps is returned with the error.
    pub fn run_time_loop(
        &mut self,
        program: &LoadProgram,
        mut on_step: impl FnMut(&StepReport, &Fields),
    ) -> Result<(SolveReport, Fields), (SolveReport, Fields, DriverError)> {
        let f_ref = reference_load(self.mesh, self.decomp, program.body_force);
        let mut fields = Fields::virgin(self.mesh, self.decomp);
        let mut report = SolveReport::default();
        for k in 0..program.n_steps() {
            let ds = program.scale(k + 1) - program.scale(k);
            let df: Vec<f64> = f_ref.iter().map(|f| ds * f).collect();
            let (du, rows) = match self.newton_solve(k + 1, &df, &fields.states) {
                Ok(x) => x,
                Err(e) => return Err((report, fields, e)),
            };
            self.update_fields(&mut fields, &du);
            check_tail(k + 1, &rows, &mut report.diagnostics);
            let step = StepReport {
                step: k + 1,
                time: program.time_grid()[k + 1],
                iterations: rows,
                plastic_elements: fields.plastic.iter().filter(|&&p| p).count(),
            };
            on_step(&step, &fields);
            report.steps.push(step);
        }
        Ok((report, fields))
    }
}

/// Notes criterion increases once the plastic count has stopped changing.
fn check_tail(step: usize, rows: &[NewtonIteration], out: &mut Vec<String>) {
    for i in 2..rows.len() {
        let settled = rows[i].plastic_elements == rows[i - 1].plastic_elements;
        if settled && rows[i].criterion >= rows[i - 1].criterion && rows[i].criterion > 0.0 {
            out.push(format!(
                "step {step}: criterion rose from {:e} to {:e} at iteration {} with a settled plastic set",
                rows[i - 1].criterion,
                rows[i].criterion,
                i + 1
            ));
        }
    }
}

/// Global nodal displacement from the torn vector, averaging interface copies.
pub fn global_displacement(decomp: &Decomposition, u: &[f64]) -> Vec<f64> {
    decomp.glue_average(u)
}

/// Runs a full load program on a fresh problem.
pub fn run_time_loop(
    mesh: &Mesh,
    decomp: &Decomposition,
    params: MaterialParams,
    program: &LoadProgram,
    cfg: SolverConfig,
) -> Result<(SolveReport, Fields), DriverError> {
    let mut problem = Problem::new(mesh, decomp, params, cfg)?;
    problem.run_time_loop(program, |_, _| {}).map_err(|(_, _, e)| e)
}

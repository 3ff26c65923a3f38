//! Batch orchestration: mesh, partition, time loop and artifacts.

use crate::config::{ConfigError, RunConfig};
use crate::driver::{global_displacement, DriverError, Fields, Problem, SolveReport};
use crate::mesh::{partition, Decomposition, Mesh, MeshError};
use crate::output::{csv_rows, summary, write_fields, CSV_HEADER};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("solver: {0}")]
    Solver(#[from] DriverError),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    /// 1 for configuration and output problems, 2 for mesh problems, 3 for
    /// solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Mesh(_) => 2,
            RunError::Solver(_) => 3,
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub mesh: Mesh,
    pub decomp: Decomposition,
    pub report: SolveReport,
    pub fields: Fields,
}

pub const CSV_FILE: &str = "convergence.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

pub fn snapshot_name(step: usize) -> String {
    format!("fields_{step:04}.vtk")
}

/// Runs `cfg` and writes `convergence.csv`, `summary.txt` and, when enabled,
/// one `fields_NNNN.vtk` per converged step into the output directory.
/// The CSV is flushed after every step, so a failed run leaves the rows of
/// the completed steps behind.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let program = cfg.load.program().map_err(|e| ConfigError {
        key: "load".into(),
        reason: e.to_string(),
    })?;
    let mesh = cfg.mesh.load()?;
    mesh.validate()?;
    let decomp = partition(&mesh, cfg.solver.subdomains)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir)?;
    let mut csv = BufWriter::new(File::create(dir.join(CSV_FILE))?);
    writeln!(csv, "{CSV_HEADER}")?;
    csv.flush()?;

    let mut problem = Problem::new(&mesh, &decomp, cfg.material, cfg.solver.clone())?;
    let mut io_error = None;
    let result = problem.run_time_loop(&program, |step, fields| {
        if io_error.is_some() {
            return;
        }
        let written = (|| -> io::Result<()> {
            csv.write_all(csv_rows(step).as_bytes())?;
            csv.flush()?;
            if cfg.output.fields {
                write_snapshot(dir, &mesh, &decomp, fields, step.step, step.time)?;
            }
            Ok(())
        })();
        io_error = written.err();
    });
    drop(problem);
    if let Some(e) = io_error {
        return Err(e.into());
    }
    match result {
        Ok((report, fields)) => {
            fs::write(dir.join(SUMMARY_FILE), summary(&report, None))?;
            Ok(RunOutcome {
                mesh,
                decomp,
                report,
                fields,
            })
        }
        Err((report, _, err)) => {
            let mut text = summary(&report, Some(&err.to_string()));
            if let DriverError::NoConvergence { history, .. } = &err {
                for (i, c) in history.iter().enumerate() {
                    text.push_str(&format!("failed step criterion {}: {c:e}\n", i + 1));
                }
            }
            fs::write(dir.join(SUMMARY_FILE), text)?;
            Err(err.into())
        }
    }
}

fn write_snapshot(
    dir: &Path,
    mesh: &Mesh,
    decomp: &Decomposition,
    fields: &Fields,
    step: usize,
    time: f64,
) -> io::Result<()> {
    let u = global_displacement(decomp, &fields.u);
    let mut w = BufWriter::new(File::create(dir.join(snapshot_name(step)))?);
    write_fields(
        mesh,
        &u,
        &fields.states,
        &fields.plastic,
        &format!("step {step} t = {time}"),
        &mut w,
    )?;
    w.flush()
}

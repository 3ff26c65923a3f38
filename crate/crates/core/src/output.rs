//! Run artifacts: convergence CSV, legacy VTK snapshots and a text summary.

use crate::driver::{SolveReport, StepReport};
use crate::material::PlasticState;
use crate::mesh::Mesh;
use std::fmt::Write as _;
use std::io::{self, Write};

pub const CSV_HEADER: &str = "step,newton_iter,stopping_criterion,pcgp_iters,plastic_elements,seconds";

/// CSV rows of one time step, one per Newton iteration. Floats use the
/// shortest round-trip form, so equal reports give equal bytes.
pub fn csv_rows(step: &StepReport) -> String {
    let mut out = String::new();
    for (i, it) in step.iterations.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{:e},{},{},{:.6}",
            step.step,
            i + 1,
            it.criterion,
            it.pcgp_iterations,
            it.plastic_elements,
            it.seconds
        );
    }
    out
}

pub fn write_convergence_csv(report: &SolveReport, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in &report.steps {
        w.write_all(csv_rows(s).as_bytes())?;
    }
    Ok(())
}

/// Legacy ASCII VTK unstructured grid with point vectors `displacement` and
/// cell scalars `von_mises` (Frobenius norm of the stress deviator),
/// `kappa` and `plastic`.
///
/// `u` is the global nodal displacement, three entries per node.
pub fn write_fields(
    mesh: &Mesh,
    u: &[f64],
    states: &[PlasticState],
    plastic: &[bool],
    title: &str,
    mut w: impl Write,
) -> io::Result<()> {
    assert_eq!(u.len(), 3 * mesh.n_nodes());
    assert_eq!(states.len(), mesh.n_tets());
    assert_eq!(plastic.len(), mesh.n_tets());
    let n = mesh.n_nodes();
    let m = mesh.n_tets();
    // the title line must not break the header
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {n} double")?;
    for p in &mesh.nodes {
        writeln!(w, "{:e} {:e} {:e}", p[0], p[1], p[2])?;
    }
    writeln!(w, "CELLS {m} {}", 5 * m)?;
    for t in &mesh.tets {
        writeln!(w, "4 {} {} {} {}", t[0], t[1], t[2], t[3])?;
    }
    writeln!(w, "CELL_TYPES {m}")?;
    for _ in 0..m {
        // VTK_TETRA
        writeln!(w, "10")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    writeln!(w, "VECTORS displacement double")?;
    for d in u.chunks_exact(3) {
        writeln!(w, "{:e} {:e} {:e}", d[0], d[1], d[2])?;
    }
    writeln!(w, "CELL_DATA {m}")?;
    writeln!(w, "SCALARS von_mises double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for s in states {
        writeln!(w, "{:e}", s.sigma.deviator().norm())?;
    }
    writeln!(w, "SCALARS kappa double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for s in states {
        writeln!(w, "{:e}", s.kappa)?;
    }
    writeln!(w, "SCALARS plastic int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for &p in plastic {
        writeln!(w, "{}", p as u8)?;
    }
    Ok(())
}

/// Human-readable run summary.
pub fn summary(report: &SolveReport, failure: Option<&str>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "status: {}",
        if failure.is_some() { "failed" } else { "converged" }
    );
    if let Some(f) = failure {
        let _ = writeln!(out, "error: {f}");
    }
    let _ = writeln!(out, "completed_steps: {}", report.steps.len());
    let _ = writeln!(out, "newton_iterations: {}", report.total_newton());
    let _ = writeln!(out, "pcgp_iterations: {}", report.total_pcgp());
    if let Some(last) = report.steps.last() {
        let _ = writeln!(out, "final_time: {}", last.time);
        let _ = writeln!(out, "final_plastic_elements: {}", last.plastic_elements);
    }
    for s in &report.steps {
        let _ = writeln!(
            out,
            "step {}: t = {}, newton = {}, plastic = {}",
            s.step,
            s.time,
            s.iterations.len(),
            s.plastic_elements
        );
    }
    for d in &report.diagnostics {
        let _ = writeln!(out, "note: {d}");
    }
    out
}

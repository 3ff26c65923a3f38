use clap::{Args, Parser, Subcommand};
use elastoplast::config::{parse_config, RunConfig};
use elastoplast::driver::LinearSolver;
use elastoplast::mesh::{mesh_preset, partition, read_mesh, write_mesh, Mesh, MeshError, MESH_PRESETS};
use elastoplast::run::{run, RunError, CSV_FILE};
use elastoplast::tfeti::{Preconditioner, TfetiLayout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

mod jitter;

#[derive(Parser)]
#[command(
    name = "elastoplast",
    version,
    about = "Elastoplastic solids with TFETI domain decomposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the time loop described by a config file.
    Solve(SolveArgs),
    /// Mesh utilities.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Print statistics of a mesh file.
    Info {
        mesh: PathBuf,
        /// Also report the decomposition into this many subdomains.
        #[arg(long)]
        subdomains: Option<usize>,
    },
}

#[derive(Args)]
struct SolveArgs {
    config: PathBuf,
    #[arg(long)]
    subdomains: Option<usize>,
    #[arg(long, value_parser = ["lumped", "dirichlet", "none"])]
    precond: Option<String>,
    #[arg(long, value_parser = ["tfeti", "direct"])]
    linear: Option<String>,
    /// Number of equidistant time steps.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 seconds in the CSV so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Write a generator preset (box, plate_eighth, cube) to a mesh file.
    Gen {
        preset: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(short, long, default_value_t = 1)]
        refinement: usize,
        /// Randomly perturb interior nodes, for randomized tests.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    // usage errors share the config exit code; 2 is reserved for mesh errors
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Mesh(MeshCommand::Gen {
            preset,
            output,
            refinement,
            seed,
        }) => mesh_gen(&preset, &output, refinement, seed),
        Command::Info { mesh, subdomains } => info(&mesh, subdomains),
    };
    ExitCode::from(code)
}

fn solve(args: SolveArgs) -> u8 {
    let mut cfg = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config: {e}");
            return 1;
        }
    };
    apply_overrides(&mut cfg, &args);
    match run(&cfg) {
        Ok(outcome) => {
            for s in &outcome.report.steps {
                println!(
                    "step {:>3}  t = {:<10}  newton {:>2}  pcgp {:>5}  plastic {}",
                    s.step,
                    s.time,
                    s.iterations.len(),
                    s.iterations.iter().map(|i| i.pcgp_iterations).sum::<usize>(),
                    s.plastic_elements
                );
            }
            for d in &outcome.report.diagnostics {
                eprintln!("note: {d}");
            }
            println!("wrote {}", cfg.output.dir.join(CSV_FILE).display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, RunError::Solver(_)) {
                eprintln!("partial results in {}", cfg.output.dir.display());
            }
            e.exit_code() as u8
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, args: &SolveArgs) {
    if let Some(s) = args.subdomains {
        cfg.solver.subdomains = s;
    }
    if let Some(p) = args.precond.as_deref().and_then(Preconditioner::parse) {
        cfg.solver.preconditioner = p;
    }
    if let Some(l) = args.linear.as_deref().and_then(LinearSolver::parse) {
        cfg.solver.linear_solver = l;
    }
    if let Some(n) = args.steps {
        cfg.load.steps = n;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    if args.no_timing {
        cfg.solver.timing = false;
    }
}

fn mesh_gen(preset: &str, output: &PathBuf, refinement: usize, seed: Option<u64>) -> u8 {
    if !MESH_PRESETS.contains(&preset) {
        eprintln!(
            "error: unknown preset `{preset}`, expected one of {}",
            MESH_PRESETS.join(", ")
        );
        return 1;
    }
    let result = mesh_preset(preset, refinement).and_then(|mut mesh| {
        if let Some(seed) = seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            jitter::perturb_interior(&mut mesh, 0.2, || rng.gen_range(-1.0..1.0))?;
        }
        write_mesh(&mesh, output)?;
        Ok(mesh)
    });
    match result {
        Ok(mesh) => {
            println!(
                "wrote {} ({} nodes, {} tets)",
                output.display(),
                mesh.n_nodes(),
                mesh.n_tets()
            );
            0
        }
        Err(e) => {
            eprintln!("error: mesh: {e}");
            2
        }
    }
}

fn info(path: &PathBuf, subdomains: Option<usize>) -> u8 {
    let mesh = match read_mesh(path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: mesh: {e}");
            return 2;
        }
    };
    print_info(&mesh);
    if let Some(s) = subdomains {
        if let Err(e) = print_decomposition(&mesh, s) {
            eprintln!("error: mesh: {e}");
            return 2;
        }
    }
    0
}

fn print_info(mesh: &Mesh) {
    let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
    for p in &mesh.nodes {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut resultant = [0.0; 3];
    let mut area = 0.0;
    for f in &mesh.neumann {
        let a = mesh.face_area(&f.nodes);
        area += a;
        for k in 0..3 {
            resultant[k] += a * f.traction[k];
        }
    }
    let min_vol = (0..mesh.n_tets())
        .map(|t| mesh.tet_volume(t))
        .fold(f64::INFINITY, f64::min);
    println!("nodes:                  {}", mesh.n_nodes());
    println!("tets:                   {}", mesh.n_tets());
    println!("volume:                 {:.6}", mesh.total_volume());
    println!("smallest tet volume:    {min_vol:.3e}");
    println!("bounding box:           {lo:?} .. {hi:?}");
    println!("constrained components: {}", mesh.n_constrained_components());
    println!("traction faces:         {} (area {area:.6})", mesh.neumann.len());
    println!("traction resultant:     {resultant:?}");
}

fn print_decomposition(mesh: &Mesh, s: usize) -> Result<(), MeshError> {
    let d = partition(mesh, s)?;
    println!("subdomains:             {}", d.n_subdomains());
    for (p, sub) in d.subdomains.iter().enumerate() {
        println!("  {p:>3}: {} tets, {} nodes", sub.tets.len(), sub.n_nodes());
    }
    println!("interface pairs:        {}", d.interface_pairs.len());
    println!("torn dofs:              {}", d.n_torn_dofs);
    match TfetiLayout::new(mesh, &d) {
        Ok(layout) => println!("multipliers:            {}", layout.n_multipliers()),
        Err(e) => println!("multipliers:            unavailable ({e})"),
    }
    Ok(())
}

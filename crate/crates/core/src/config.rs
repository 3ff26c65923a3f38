//! Run configuration: a flat `key = value` text format with `[section]`
//! headers and `#` comments.
//!
//! ```text
//! benchmark = plate_eighth      # optional; fills mesh, material and load
//!
//! [mesh]
//! preset = plate_eighth         # or: file = plate.mesh
//! refinement = 1
//!
//! [material]
//! young = 206900
//! poisson = 0.29
//! sigma_y = 450
//! hardening = 10000
//!
//! [load]
//! amplitude = 400
//! shape = sine                  # sine: a sin(2 pi t), linear: a t, constant: a
//! t0 = 0
//! t_end = 0.25
//! steps = 1
//! body_force = 0 0 0
//!
//! [solver]
//! eps_newton = 1e-4
//! eps_pcgp = 1e-7
//! max_newton = 50
//! preconditioner = dirichlet    # lumped, dirichlet, none
//! linear = tfeti                # tfeti, direct
//! subdomains = 1
//!
//! [output]
//! dir = out
//! fields = true                 # per-step VTK snapshots
//! timing = true                 # false writes 0 seconds for reproducible logs
//! ```
//!
//! Keys a preset fills can still be set explicitly; later lines win.

use crate::driver::{LinearSolver, SolverConfig};
use crate::load::{Amplitude, LoadError, LoadProgram};
use crate::material::MaterialParams;
use crate::mesh::{mesh_preset, read_mesh, Mesh, MeshError, MESH_PRESETS};
use crate::tfeti::Preconditioner;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{key}: {reason}")]
pub struct ConfigError {
    /// `section.key`, or `line N` for syntax errors.
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
        ConfigError {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Preset { name: String, refinement: usize },
    File(PathBuf),
}

impl MeshSource {
    pub fn load(&self) -> Result<Mesh, MeshError> {
        match self {
            MeshSource::Preset { name, refinement } => mesh_preset(name, *refinement),
            MeshSource::File(path) => read_mesh(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeShape {
    Sine,
    Linear,
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadSpec {
    pub shape: AmplitudeShape,
    pub amplitude: f64,
    pub t0: f64,
    pub t_end: f64,
    pub steps: usize,
    pub body_force: [f64; 3],
}

impl LoadSpec {
    pub fn program(&self) -> Result<LoadProgram, LoadError> {
        let amp = match self.shape {
            AmplitudeShape::Sine => Amplitude::Sine(self.amplitude),
            AmplitudeShape::Linear => Amplitude::Linear(self.amplitude),
            AmplitudeShape::Constant => Amplitude::Constant(self.amplitude),
        };
        let mut p = LoadProgram::equidistant(self.t0, self.t_end, self.steps, amp)?;
        p.body_force = self.body_force;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub fields: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: MeshSource,
    pub material: MaterialParams,
    pub load: LoadSpec,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

/// Benchmark presets selectable with `benchmark = <name>`.
pub const BENCHMARKS: [&str; 2] = ["plate_eighth", "box"];

impl RunConfig {
    /// The perforated plate benchmark: `400 sin(2 pi t)` on `[0, 1/4]`.
    pub fn plate_eighth() -> RunConfig {
        RunConfig {
            mesh: MeshSource::Preset {
                name: "plate_eighth".into(),
                refinement: 1,
            },
            material: MaterialParams::plate_benchmark(),
            load: LoadSpec {
                shape: AmplitudeShape::Sine,
                amplitude: 400.0,
                t0: 0.0,
                t_end: 0.25,
                steps: 1,
                body_force: [0.0; 3],
            },
            solver: SolverConfig::default(),
            output: OutputConfig {
                dir: PathBuf::from("out"),
                fields: true,
            },
        }
    }

    /// Cantilever box, same material, `50 sin(2 pi t)` on `[0, 1/4]`.
    pub fn box_benchmark() -> RunConfig {
        let mut cfg = RunConfig::plate_eighth();
        cfg.mesh = MeshSource::Preset {
            name: "box".into(),
            refinement: 3,
        };
        cfg.load.amplitude = 50.0;
        cfg
    }

    pub fn benchmark(name: &str) -> Option<RunConfig> {
        match name {
            "plate_eighth" => Some(RunConfig::plate_eighth()),
            "box" => Some(RunConfig::box_benchmark()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let MeshSource::File(path) = &self.mesh {
            if !path.is_file() {
                return Err(ConfigError::new(
                    "mesh.file",
                    format!("{} does not exist", path.display()),
                ));
            }
        }
        if let MeshSource::Preset { name, refinement } = &self.mesh {
            if !MESH_PRESETS.contains(&name.as_str()) {
                return Err(ConfigError::new("mesh.preset", format!("unknown preset `{name}`")));
            }
            if *refinement == 0 {
                return Err(ConfigError::new("mesh.refinement", "must be at least 1"));
            }
        }
        let m = &self.material;
        if let Err(e) = MaterialParams::from_young_poisson(young(m), poisson(m), m.sigma_y, m.hardening_modulus) {
            return Err(ConfigError::new("material", e.to_string()));
        }
        let s = &self.solver;
        let checks: [(&str, bool, &str); 5] = [
            (
                "solver.eps_newton",
                s.eps_newton > 0.0 && s.eps_newton < 1.0,
                "must lie in (0, 1)",
            ),
            (
                "solver.eps_pcgp",
                s.eps_pcgp > 0.0 && s.eps_pcgp < 1.0,
                "must lie in (0, 1)",
            ),
            ("solver.max_newton", s.max_newton >= 1, "must be at least 1"),
            ("solver.subdomains", s.subdomains >= 1, "must be at least 1"),
            ("load.steps", self.load.steps >= 1, "must be at least 1"),
        ];
        for (key, ok, reason) in checks {
            if !ok {
                return Err(ConfigError::new(key, reason));
            }
        }
        if !(self.load.amplitude.is_finite() && self.load.body_force.iter().all(|x| x.is_finite())) {
            return Err(ConfigError::new("load", "values must be finite"));
        }
        self.load
            .program()
            .map_err(|e| ConfigError::new("load.t_end", e.to_string()))?;
        Ok(())
    }
}

fn young(m: &MaterialParams) -> f64 {
    m.mu * (3.0 * m.lambda + 2.0 * m.mu) / (m.lambda + m.mu)
}

fn poisson(m: &MaterialParams) -> f64 {
    m.lambda / (2.0 * (m.lambda + m.mu))
}

/// Reads and validates a config file. A relative `mesh.file` is resolved
/// against the config file's directory.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| ConfigError::new(path.display().to_string(), e.to_string()))?;
    let mut cfg = parse_config_str(&text)?;
    if let MeshSource::File(f) = &mut cfg.mesh {
        if f.is_relative() {
            if let Some(dir) = path.parent() {
                *f = dir.join(&*f);
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses config text without touching the file system; `validate` is left
/// to the caller when a mesh file is referenced.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries = Vec::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("line {}", i + 1);
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(at(), "unterminated section header"))?
                .trim();
            if !["mesh", "material", "load", "solver", "output"].contains(&name) {
                return Err(ConfigError::new(at(), format!("unknown section [{name}]")));
            }
            section = name.to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(at(), "expected `key = value`"))?;
        let key = if section.is_empty() {
            k.trim().to_string()
        } else {
            format!("{section}.{}", k.trim())
        };
        entries.push((key, v.trim().to_string()));
    }

    // the preset goes first so explicit keys override it
    let mut cfg = RunConfig::plate_eighth();
    if let Some((_, name)) = entries.iter().find(|(k, _)| k == "benchmark") {
        cfg = RunConfig::benchmark(name)
            .ok_or_else(|| ConfigError::new("benchmark", format!("unknown benchmark `{name}`")))?;
    }
    let (mut e, mut nu) = (young(&cfg.material), poisson(&cfg.material));
    let (mut sy, mut h) = (cfg.material.sigma_y, cfg.material.hardening_modulus);
    let mut refinement = None;
    for (key, value) in &entries {
        let num = || -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| ConfigError::new(key.clone(), format!("`{value}` is not a finite number")))
        };
        let int = || -> Result<usize, ConfigError> {
            value
                .parse::<usize>()
                .map_err(|_| ConfigError::new(key.clone(), format!("`{value}` is not a non-negative integer")))
        };
        let boolean = || -> Result<bool, ConfigError> {
            match value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(ConfigError::new(key.clone(), format!("`{value}` is not true or false"))),
            }
        };
        match key.as_str() {
            "benchmark" => {}
            "mesh.preset" => {
                cfg.mesh = MeshSource::Preset {
                    name: value.clone(),
                    refinement: 1,
                }
            }
            "mesh.file" => cfg.mesh = MeshSource::File(PathBuf::from(value)),
            "mesh.refinement" => refinement = Some(int()?),
            "material.young" => e = num()?,
            "material.poisson" => nu = num()?,
            "material.sigma_y" => sy = num()?,
            "material.hardening" => h = num()?,
            "load.amplitude" => cfg.load.amplitude = num()?,
            "load.shape" => {
                cfg.load.shape = match value.as_str() {
                    "sine" => AmplitudeShape::Sine,
                    "linear" => AmplitudeShape::Linear,
                    "constant" => AmplitudeShape::Constant,
                    _ => return Err(ConfigError::new(key.clone(), "expected sine, linear or constant")),
                }
            }
            "load.t0" => cfg.load.t0 = num()?,
            "load.t_end" => cfg.load.t_end = num()?,
            "load.steps" => cfg.load.steps = int()?,
            "load.body_force" => {
                let parts: Vec<f64> = value.split_whitespace().filter_map(|x| x.parse().ok()).collect();
                if parts.len() != 3 || value.split_whitespace().count() != 3 {
                    return Err(ConfigError::new(key.clone(), "expected three numbers"));
                }
                cfg.load.body_force = [parts[0], parts[1], parts[2]];
            }
            "solver.eps_newton" => cfg.solver.eps_newton = num()?,
            "solver.eps_pcgp" => cfg.solver.eps_pcgp = num()?,
            "solver.max_newton" => cfg.solver.max_newton = int()?,
            "solver.preconditioner" => {
                cfg.solver.preconditioner = Preconditioner::parse(value)
                    .ok_or_else(|| ConfigError::new(key.clone(), "expected lumped, dirichlet or none"))?
            }
            "solver.linear" => {
                cfg.solver.linear_solver = LinearSolver::parse(value)
                    .ok_or_else(|| ConfigError::new(key.clone(), "expected tfeti or direct"))?
            }
            "solver.subdomains" => cfg.solver.subdomains = int()?,
            "output.dir" => cfg.output.dir = PathBuf::from(value),
            "output.fields" => cfg.output.fields = boolean()?,
            "output.timing" => cfg.solver.timing = boolean()?,
            _ => return Err(ConfigError::new(key.clone(), "unknown key")),
        }
    }
    if let Some(r) = refinement {
        match &mut cfg.mesh {
            MeshSource::Preset { refinement, .. } => *refinement = r,
            MeshSource::File(_) => return Err(ConfigError::new("mesh.refinement", "only applies to presets")),
        }
    }
    cfg.material = MaterialParams::from_young_poisson(e, nu, sy, h)
        .map_err(|err| ConfigError::new("material", err.to_string()))?;
    if !matches!(cfg.mesh, MeshSource::File(_)) {
        cfg.validate()?;
    }
    Ok(cfg)
}

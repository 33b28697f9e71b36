//! Command dispatch for the `t2ta` binary.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::assignment::{solve_lap, AssignmentMatrix, MatrixKind};
use crate::simulation::experiments::{
    angle_grid, motivating_example, optimizer_trace, realization_demo,
};
use crate::simulation::montecarlo::{mc_sweep, Method};
use crate::simulation::scenario::generate_scenario;

use super::config::{parse_config, Config, ConfigError};
use super::table::{self, TableError};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for configuration, input and output errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Motivating,
    RealizationDemo,
    OptimizerTrace,
    McSweep,
    LapSolve,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Motivating,
        Command::RealizationDemo,
        Command::OptimizerTrace,
        Command::McSweep,
        Command::LapSolve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Motivating => "motivating",
            Command::RealizationDemo => "realization-demo",
            Command::OptimizerTrace => "optimizer-trace",
            Command::McSweep => "mc-sweep",
            Command::LapSolve => "lap-solve",
        }
    }

    /// Stem of the CSV and JSON files the command writes.
    pub fn output_stem(self) -> &'static str {
        match self {
            Command::Motivating => "motivating",
            Command::RealizationDemo => "realization",
            Command::OptimizerTrace => "trace",
            Command::McSweep => "sweep",
            Command::LapSolve => "assignment",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid overrides from the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOverrides {
    pub runs: Option<usize>,
    pub methods: Option<Vec<Method>>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub c_step: Option<f64>,
}

/// One invocation. Without `config_path` every setting takes its default.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub sweep: SweepOverrides,
}

impl RunManifest {
    pub fn new(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config_path: None,
            output_dir: output_dir.into(),
            seed_override: None,
            sweep: SweepOverrides::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: TableError },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

/// Files written by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub summary: String,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    command: &'a str,
    seed: Option<u64>,
    config_sha256: String,
    wall_time_s: f64,
    csv: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Loads the configuration and applies the command-line overrides.
pub fn resolve_config(manifest: &RunManifest) -> Result<Config, ConfigError> {
    let mut cfg = match &manifest.config_path {
        Some(path) => parse_config(path)?,
        None => Config::default(),
    };
    let o = &manifest.sweep;
    if let Some(runs) = o.runs {
        cfg.sweep.runs = runs;
    }
    if let Some(methods) = &o.methods {
        cfg.sweep.methods = methods.clone();
    }
    if o.c_min.is_some() || o.c_max.is_some() || o.c_step.is_some() {
        let s = &mut cfg.sweep;
        s.c_min = o.c_min.unwrap_or(s.c_min);
        s.c_max = o.c_max.unwrap_or(s.c_max);
        s.c_step = o.c_step.unwrap_or(s.c_step);
        s.c_grid = None;
    }
    if let Some(seed) = manifest.seed_override {
        cfg.sweep.seed = seed;
        cfg.trace.seed = seed;
        cfg.realization.seeds = [seed, seed.wrapping_add(1)];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| RunError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Runs one command, writing `<stem>.csv` and `<stem>.json` into the
/// output directory.
pub fn run_command(manifest: &RunManifest) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let cfg = resolve_config(manifest)?;
    let dir = &manifest.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let stem = manifest.command.output_stem();
    let csv_path = dir.join(format!("{stem}.csv"));
    let meta_path = dir.join(format!("{stem}.json"));
    let out_err = |source| RunError::Output {
        path: csv_path.clone(),
        source,
    };

    let (seed, summary) = match manifest.command {
        Command::Motivating => {
            let rows = motivating_example(&angle_grid(cfg.motivating.step_deg))?;
            table::write_motivating(create(&csv_path)?, &rows).map_err(out_err)?;
            let best = rows
                .iter()
                .min_by(|a, b| a.trace_p.total_cmp(&b.trace_p))
                .expect("non-empty grid");
            let summary = format!(
                "{} angles; smallest fused trace {:.4} at {} deg",
                rows.len(),
                best.trace_p,
                best.alpha_deg
            );
            (None, summary)
        }
        Command::RealizationDemo => {
            let seeds = cfg.realization.seeds;
            let demo = realization_demo((seeds[0], seeds[1]))?;
            table::write_realization(create(&csv_path)?, &demo).map_err(out_err)?;
            let verdict = |k: usize| {
                if demo.assignments[k].is_identity() {
                    "correct"
                } else {
                    "incorrect"
                }
            };
            let summary = format!(
                "realization 1 (seed {}): {}; realization 2 (seed {}): {}",
                seeds[0],
                verdict(0),
                seeds[1],
                verdict(1)
            );
            (Some(seeds[0]), summary)
        }
        Command::OptimizerTrace => {
            let cmp = optimizer_trace(&cfg.trace)?;
            table::write_trace(create(&csv_path)?, &table::trace_rows(&cmp)).map_err(out_err)?;
            let [a, s, l] = cmp.terminal_f_min();
            let summary = format!("final worst ratio: adaptive {a:.4}, small {s:.4}, large {l:.4}");
            (Some(cfg.trace.seed), summary)
        }
        Command::McSweep => {
            let mc = cfg.sweep.to_mc_config()?;
            let scenario = generate_scenario(&cfg.scenario)?;
            let result = mc_sweep(&mc, &scenario)?;
            table::write_sweep(create(&csv_path)?, &result).map_err(out_err)?;
            let summary = format!(
                "{} rows ({} methods x {} scaling factors, {} runs each)",
                result.rows.len(),
                mc.methods.len(),
                mc.c_grid.len(),
                mc.runs
            );
            (Some(mc.seed), summary)
        }
        Command::LapSolve => {
            let costs = cfg.lap.costs.as_ref().ok_or_else(|| ConfigError::Invalid {
                field: "lap.costs".into(),
                message: "lap-solve needs a cost matrix".into(),
            })?;
            let a = AssignmentMatrix::from_rows(costs, MatrixKind::Full)?;
            let sol = solve_lap(&a)?;
            table::write_assignment(create(&csv_path)?, &sol).map_err(out_err)?;
            let perm: Vec<String> = sol.perm.iter().map(|i| (i + 1).to_string()).collect();
            (
                None,
                format!(
                    "assignment [{}] cost {}",
                    perm.join(" "),
                    table::format_float(sol.cost)
                ),
            )
        }
    };

    let resolved = serde_json::to_vec(&cfg).expect("config serializes");
    let sidecar = Sidecar {
        command: manifest.command.name(),
        seed,
        config_sha256: hex(&Sha256::digest(&resolved)),
        wall_time_s: start.elapsed().as_secs_f64(),
        csv: csv_path.file_name().unwrap().to_string_lossy().into_owned(),
    };
    let mut w = create(&meta_path)?;
    serde_json::to_writer_pretty(&mut w, &sidecar).map_err(|e| RunError::Io {
        path: meta_path.clone(),
        source: e.into(),
    })?;
    Ok(RunReport {
        csv_path,
        meta_path,
        summary,
    })
}

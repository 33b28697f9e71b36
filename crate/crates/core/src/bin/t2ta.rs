use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dimred_t2ta::io::{run_command, Command, RunManifest, SweepOverrides};
use dimred_t2ta::simulation::Method;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Motivating,
    RealizationDemo,
    OptimizerTrace,
    McSweep,
    LapSolve,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Full,
    FusionOpt,
    AssocOpt,
}

/// Track-to-track association with dimension-reduced estimates.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    command: Cmd,
    /// TOML configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<MethodArg>>,
    #[arg(long)]
    c_min: Option<f64>,
    #[arg(long)]
    c_max: Option<f64>,
    #[arg(long)]
    c_step: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Motivating => Command::Motivating,
        Cmd::RealizationDemo => Command::RealizationDemo,
        Cmd::OptimizerTrace => Command::OptimizerTrace,
        Cmd::McSweep => Command::McSweep,
        Cmd::LapSolve => Command::LapSolve,
    };
    let methods = args.method.map(|ms| {
        ms.into_iter()
            .map(|m| match m {
                MethodArg::Full => Method::Full,
                MethodArg::FusionOpt => Method::FusionOpt,
                MethodArg::AssocOpt => Method::AssocOpt,
            })
            .collect()
    });
    let manifest = RunManifest {
        command,
        config_path: args.config,
        output_dir: args.out,
        seed_override: args.seed,
        sweep: SweepOverrides {
            runs: args.runs,
            methods,
            c_min: args.c_min,
            c_max: args.c_max,
            c_step: args.c_step,
        },
    };
    match run_command(&manifest) {
        Ok(report) => {
            println!("{}", report.summary);
            println!("wrote {}", report.csv_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("t2ta {command}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

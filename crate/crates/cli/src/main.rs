//! `lame-navier`: geometry, jets, operator fields and verification suites
//! from the command line.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage or input error.

mod commands;
mod config;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{parse_grid, parse_tol, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] lame_navier::Error),
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
}

macro_rules! core_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        })*
    };
}

core_error!(
    lame_navier::lame::LameError,
    lame_navier::geometry::GeometryError,
    lame_navier::quadrature::QuadratureError,
    lame_navier::whitney::WhitneyError,
    lame_navier::operators::OperatorError,
    lame_navier::io::IoError
);

/// Whether the checks a command ran all passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Parser, Debug)]
#[command(name = "lame-navier", version, about = "Plane Lamé-Navier operators, Whitney jets and jump problems")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Flags {
    /// Lamé constant λ (needs `3λ + 2μ > 0`, `μ > 0`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Shear modulus μ.
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Hölder exponent ν of the jet, in (0, 1).
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// Summability exponent d of the curve, in (1, 2).
    #[arg(long, global = true)]
    d: Option<f64>,
    /// Decomposition depth.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Segments of a circle.
    #[arg(long, global = true)]
    segments: Option<usize>,
    /// Evaluation grid, `NxM`.
    #[arg(long, global = true, value_parser = parse_grid_arg)]
    grid: Option<String>,
    /// Directory for CSV and JSON output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON file with any of the flag values; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for probe sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override, `NAME=VALUE` (repeatable).
    #[arg(long, global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Koch snowflake of this generation.
    #[arg(long, global = true)]
    koch: Option<u32>,
    /// Circle of this radius about the origin.
    #[arg(long, global = true)]
    circle: Option<f64>,
    /// Closed polyline from a CSV file (`x,y`).
    #[arg(long, global = true)]
    polyline: Option<PathBuf>,
    /// Side of the Koch snowflake's initial triangle.
    #[arg(long, global = true)]
    scale: Option<f64>,
    /// Jet CSV file on the chosen curve.
    #[arg(long, global = true)]
    jet: Option<PathBuf>,
    /// Closed-form field: const:RE[,IM], monomial:P,Q, z, z2 or exp.
    #[arg(long, global = true)]
    field: Option<String>,
}

fn parse_grid_arg(s: &str) -> Result<String, String> {
    parse_grid(s).map(|_| s.to_owned())
}

impl Flags {
    fn into_config(self) -> RunConfig {
        RunConfig {
            lambda: self.lambda,
            mu: self.mu,
            nu: self.nu,
            d: self.d,
            depth: self.depth,
            segments: self.segments,
            grid: self.grid,
            out: self.out,
            seed: self.seed,
            tol: self.tol.into_iter().collect(),
            koch: self.koch,
            circle: self.circle,
            polyline: self.polyline,
            scale: self.scale,
            jet: self.jet,
            field: self.field,
            density: None,
            method: None,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Polyline, Whitney decomposition, box dimension and d-sum table.
    Geometry,
    /// Make a jet from a closed-form field, or check one.
    Jet {
        #[command(subcommand)]
        action: JetAction,
    },
    /// Teodorescu transform of a density over the interior, on a grid.
    Teodorescu {
        /// Density, in the `--field` syntax (default const:1).
        #[arg(long)]
        density: Option<String>,
    },
    /// Lamé-Cauchy transform of a jet, on a grid.
    CauchyTransform,
    /// Solve the jump problem for a jet.
    Solve {
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
}

#[derive(Subcommand, Debug)]
enum JetAction {
    Check,
    Make,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MethodArg {
    Cauchy,
    Whitney,
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let config_path = cli.flags.config.clone();
    let mut flags = cli.flags.into_config();
    match &cli.command {
        Command::Teodorescu { density } => flags.density = density.clone(),
        Command::Solve { method: Some(m) } => {
            flags.method = Some(match m {
                MethodArg::Cauchy => "cauchy".into(),
                MethodArg::Whitney => "whitney".into(),
            })
        }
        _ => {}
    }
    let base = match config_path {
        Some(p) => RunConfig::from_file(&p)?,
        None => RunConfig::default(),
    };
    let cfg = base.overlay(flags);
    cfg.validate()?;
    if let Some(out) = &cfg.out {
        std::fs::create_dir_all(out).map_err(|source| CliError::Write { path: out.display().to_string(), source })?;
    }
    match cli.command {
        Command::Geometry => commands::geometry(&cfg),
        Command::Jet { action: JetAction::Make } => commands::jet_make(&cfg),
        Command::Jet { action: JetAction::Check } => commands::jet_check(&cfg),
        Command::Teodorescu { .. } => commands::teodorescu(&cfg),
        Command::CauchyTransform => commands::cauchy_transform(&cfg),
        Command::Solve { .. } => commands::solve(&cfg),
        Command::Verify { suite } => verify::run(&cfg, suite),
    }
}

/// Prints `report` as pretty JSON and, with `--out`, also writes it to `name`.
pub fn emit<T: Serialize>(cfg: &RunConfig, name: &str, report: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("reports serialise");
    if let Some(dir) = &cfg.out {
        let path = dir.join(name);
        std::fs::write(&path, format!("{text}\n"))
            .map_err(|source| CliError::Write { path: path.display().to_string(), source })?;
    }
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

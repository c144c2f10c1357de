use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use idjc_cli::config::{DimSetting, GridConfig};
use idjc_cli::{run_scenario, validate_config, CliError, FieldError, OutputFormat, RawConfig, Scenario};

#[derive(Parser)]
#[command(name = "idjc", version, about = "Intensity-dependent Jaynes-Cummings scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write its output files.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Cat parity: 1 even, -1 odd, 0 coherent.
    #[arg(long, allow_hyphen_values = true)]
    parity_r: Option<i32>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Number of τ samples over [0, tau_max], both ends included.
    #[arg(long)]
    tau_steps: Option<usize>,
    /// Fock dimension or "auto".
    #[arg(long)]
    dim: Option<DimSetting>,
    /// Q-function grid as x_min,x_max,y_min,y_max,nx,ny.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridConfig>,
    /// Comma-separated Q-function snapshot times.
    #[arg(long, value_delimiter = ',')]
    q_taus: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Check outputs against closed forms and invariants before writing.
    #[arg(long)]
    self_check: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> RawConfig {
        RawConfig {
            scenario: self.scenario,
            alpha: self.alpha,
            parity_r: self.parity_r,
            lambda: self.lambda,
            tau_max: self.tau_max,
            tau_steps: self.tau_steps,
            dim: self.dim.clone(),
            grid: self.grid,
            q_taus: self.q_taus.clone(),
            output_path: self.out.clone(),
            output_format: self.format,
        }
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let cfg = validate_config(&file.overlay(args.overrides())).map_err(CliError::Config)?;
    let pool = match args.threads {
        Some(0) => return Err(CliError::Config(vec![FieldError::new("threads", "must be at least 1")])),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .expect("thread pool construction");
    let output = pool.install(|| run_scenario(&cfg, args.self_check))?;
    for artifact in &output.artifacts {
        println!("{}", artifact.path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

//! Command-line front end: scenario loading, command dispatch and report output.

pub mod commands;
pub mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::Output;
pub use config::{load_scenario, parse_scenario, ScenarioConfig, SweepGrid};
pub use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tcr", version, about = "Token curated registry analyzer and simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate voting profiles and report the Nash equilibria.
    Equilibria(CommonArgs),
    /// Classify every (gamma, delta') grid point into an outcome region.
    Sweep(CommonArgs),
    /// Feed the candidate list through the registry in file order.
    Simulate(CommonArgs),
    /// Run every ordering of the candidate pool and compare final registries.
    Orderings(CommonArgs),
    /// Report the challenge and acceptance thresholds.
    Thresholds(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed of a `seeded_random` policy.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory that receives report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for parallel evaluation.
    #[arg(long)]
    pub parallel: Option<usize>,
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Equilibria(a)
            | Command::Sweep(a)
            | Command::Simulate(a)
            | Command::Orderings(a)
            | Command::Thresholds(a) => a,
        }
    }
}

/// Loads the scenario and runs the command without touching stdout or disk.
pub fn execute(command: &Command) -> Result<Output, CliError> {
    let args = command.args();
    let mut cfg = load_scenario(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.override_seed(seed);
    }
    let work = || match command {
        Command::Equilibria(_) => commands::equilibria(&cfg, args.format),
        Command::Sweep(_) => commands::sweep(&cfg, args.format),
        Command::Simulate(_) => commands::simulate(&cfg, args.format),
        Command::Orderings(_) => commands::orderings(&cfg, args.format),
        Command::Thresholds(_) => commands::thresholds(&cfg, args.format),
    };
    match args.parallel {
        None => work(),
        Some(0) => Err(CliError::Config("--parallel must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .install(work),
    }
}

/// Runs the command, writes report files into `--out` and prints the report.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let output = execute(&cli.command)?;
    if let Some(dir) = &cli.command.args().out {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in &output.files {
            std::fs::write(dir.join(name), contents)?;
        }
    }
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(output.stdout.as_bytes())?;
    stdout.flush()?;
    Ok(())
}

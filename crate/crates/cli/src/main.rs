use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use typicality_cli::{load, run, CliError, Overrides, Settings};

#[derive(Parser)]
#[command(
    name = "typicality",
    version,
    about = "Run typicality and randomness experiments from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Bits of precision for reported approximations.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Stage budget for semi-decisions.
    #[arg(long, global = true)]
    budget: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parameter grids.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Birkhoff,
    Correlation,
    Deviation,
    Prokhorov,
    ZeroPoint,
    ConvertTest,
    Verify,
    Construct,
    Isomorphism,
    /// Run whatever subcommand the config names.
    Run,
}

impl Command {
    fn name(self) -> Option<&'static str> {
        Some(match self {
            Command::Birkhoff => "birkhoff",
            Command::Correlation => "correlation",
            Command::Deviation => "deviation",
            Command::Prokhorov => "prokhorov",
            Command::ZeroPoint => "zero-point",
            Command::ConvertTest => "convert-test",
            Command::Verify => "verify",
            Command::Construct => "construct",
            Command::Isomorphism => "isomorphism",
            Command::Run => return None,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let (config, base) = load(path, cli.command.name())?;
    let flags = Overrides {
        out: cli.out.clone(),
        precision: cli.precision,
        budget: cli.budget,
        seed: cli.seed,
    };
    let settings = Settings::resolve(&config, &flags, &base);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| run(&config, &settings))
}

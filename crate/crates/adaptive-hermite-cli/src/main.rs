use adaptive_hermite::par;
use adaptive_hermite_cli::commands::{compare_command, defaults, precompute, run_command};
use adaptive_hermite_cli::{CliError, RunConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Adaptive Hermite spectral solver for the Boltzmann equation.
#[derive(Parser, Debug)]
#[command(name = "ahsolve", version)]
struct Cli {
    /// JSON configuration file; defaults are used for missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `threads`).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Dot-path override such as `solver.order=6`; may be repeated.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble the collision tensor, or verify the cached one.
    Precompute,
    /// Run the configured scenario and write the run directory.
    Run,
    /// Compare two reports (CSV files or run directories).
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Write the ratios to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the default configuration as JSON.
    PrintDefaults {
        /// Show the defaults of this scenario.
        #[arg(long)]
        scenario: Option<String>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut c = base.apply_overrides(&cli.overrides)?;
    if let Some(out) = &cli.out {
        c.out_dir = out.clone();
    }
    if cli.threads.is_some() {
        c.threads = cli.threads;
    }
    Ok(c)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::PrintDefaults { scenario } => {
            println!("{}", defaults(scenario.as_deref())?.to_json());
            Ok(())
        }
        Command::Compare { a, b, csv } => compare_command(a, b, csv.as_deref()).map(|_| ()),
        Command::Precompute | Command::Run => {
            let config = load_config(cli)?;
            config.validate()?;
            if let Some(n) = config.threads {
                par::init_threads(n).map_err(CliError::Config)?;
            }
            if matches!(cli.command, Command::Precompute) {
                precompute(&config).map(|_| ())
            } else {
                run_command(&config).map(|_| ())
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

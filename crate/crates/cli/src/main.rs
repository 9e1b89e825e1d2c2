//! `osclab` — cached, reproducible runs of the analysis modules.
//!
//! Every subcommand reads a JSON config (`--config`), hashes its canonical
//! form, and writes artifacts under `<cache root>/<hash>/`. Re-running an
//! identical config is a cache hit and recomputes nothing. Exit codes:
//! 1 = usage, 2 = validation/schema, 3 = numerical non-convergence.

mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "osclab",
    version,
    about = "Numerical laboratory for degenerate oscillatory integrals",
    disable_help_subcommand = true
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cache root for run artifacts (overridden by OSC_CACHE_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override the config's random seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for module-internal parallelism.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Decay law predicted by the exponent polygon.
    Predict,
    /// One oscillatory (t/u) or damped (r) integral.
    Integrate,
    /// |U(lambda)| along a log grid.
    Scan,
    /// Scan plus a decay-law fit against the prediction.
    Fit,
    /// Sublevel-set measures of a monomial with the exact comparison.
    Sublevel,
    /// Monomial comparability and principal-part split on a wedge.
    #[command(name = "resolution-check")]
    ResolutionCheck,
    /// Fourier-multiplier evolution norms on the periodic grid.
    Pde,
    /// Join cached runs of one phase into a plot-ready bundle.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Predict => "predict",
            Command::Integrate => "integrate",
            Command::Scan => "scan",
            Command::Fit => "fit",
            Command::Sublevel => "sublevel",
            Command::ResolutionCheck => "resolution-check",
            Command::Pde => "pde",
            Command::Report => "report",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful terminations, not usage errors
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("osclab: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // module reductions are thread-count independent, so this only
        // affects wall time; a pool already built (tests) is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config FILE is required".into()))?;
    let mut cfg = RunConfig::from_file(config_path)?;
    let name = cli.command.name();
    match cfg.subcommand.as_deref() {
        None => cfg.subcommand = Some(name.to_string()),
        Some(s) if s == name => {}
        Some(s) => {
            return Err(CliError::Validation(format!(
                "config is for subcommand {s:?} but {name:?} was invoked"
            )))
        }
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }

    let hash = cfg.hash();
    let root = cache::cache_root(cli.out.as_deref());
    let dir = cache::run_dir(&root, &hash);
    if let Some(record) = cache::lookup(&dir) {
        println!("cache hit {} ({} files) -> {}", hash, record.files.len(), dir.display());
        return Ok(());
    }

    let (artifacts, summary) = match cli.command {
        Command::Predict => commands::predict(&cfg, &hash)?,
        Command::Integrate => commands::integrate(&cfg, &hash)?,
        Command::Scan => commands::scan(&cfg, &hash)?,
        Command::Fit => commands::fit(&cfg, &hash)?,
        Command::Sublevel => commands::sublevel(&cfg, &hash)?,
        Command::ResolutionCheck => commands::resolution_check(&cfg, &hash)?,
        Command::Pde => commands::pde(&cfg, &hash)?,
        Command::Report => commands::report(&cfg, &hash, &root)?,
    };
    let phase_literal = cfg.phase.as_ref().map(|q| {
        serde_json::to_value(q).expect("quadruples serialize").to_string()
    });
    cache::store(&dir, &hash, name, phase_literal, &artifacts)?;
    println!("{summary}");
    println!("run {} -> {}", hash, dir.display());
    Ok(())
}

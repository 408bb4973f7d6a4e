mod bundled;
mod compare;
mod config;
mod error;
mod run;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "spinbus",
    version,
    about = "Simulator for a transmon coupled through a tunable bus resonator to an \
             inhomogeneously broadened NV spin ensemble"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config (file path or bundled name)
    Run {
        /// Path to a config file, or the name of a bundled config
        config: String,
        /// Output directory (default: run_<experiment>_<hash prefix>)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Number of worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compare the .dat tables in two output directories column by column
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
        /// Maximum allowed absolute difference per value
        #[arg(long)]
        tol: f64,
    },
    /// List available experiments and bundled configs
    List,
}

fn load_config(arg: &str) -> Result<ExperimentConfig, CliError> {
    let path = PathBuf::from(arg);
    let text = if path.is_file() {
        std::fs::read_to_string(&path)?
    } else if let Some(text) = bundled::lookup(arg) {
        text.to_string()
    } else {
        return Err(CliError::Validation(format!(
            "config `{arg}` is neither a readable file nor a bundled config name \
             (see `spinbus list`)"
        )));
    };
    ExperimentConfig::parse(&text)
}

fn cmd_run(config: &str, output: Option<PathBuf>, jobs: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool setup failed: {e}")))?;
    }
    let cfg = load_config(config)?;
    let out_dir = output.unwrap_or_else(|| {
        PathBuf::from(format!(
            "run_{}_{}",
            cfg.experiment.kind.name(),
            &cfg.hash()[..8]
        ))
    });
    let manifest = run::run(&cfg, &out_dir)?;
    println!(
        "wrote {} file(s) to {} (config hash {})",
        manifest.files.len(),
        out_dir.display(),
        &manifest.config_hash[..12]
    );
    for file in &manifest.files {
        println!("  {file}");
    }
    Ok(())
}

/// Returns whether all columns were within tolerance.
fn cmd_compare(dir_a: &PathBuf, dir_b: &PathBuf, tol: f64) -> Result<bool, CliError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Validation(
            "--tol must be a finite non-negative number".into(),
        ));
    }
    let report = compare::compare(dir_a, dir_b, tol)?;
    for col in &report.columns {
        let status = if col.max_abs_diff <= tol { "ok" } else { "FAIL" };
        println!(
            "{status:>4}  {}:{}  max |diff| = {:.6e}",
            col.file, col.column, col.max_abs_diff
        );
    }
    if report.passed() {
        println!(
            "compare passed ({} columns, tol {tol:e})",
            report.columns.len()
        );
    } else {
        eprintln!("compare failed: differences exceed tolerance {tol:e}");
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            output,
            jobs,
        } => cmd_run(&config, output, jobs),
        Command::Compare { dir_a, dir_b, tol } => {
            return match cmd_compare(&dir_a, &dir_b, tol) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::FAILURE,
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(err.exit_code())
                }
            };
        }
        Command::List => {
            print!("{}", bundled::catalog());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

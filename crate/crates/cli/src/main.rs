use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use specdet::Tolerances;
use specdet_cli::commands;
use specdet_cli::config::{Format, RunConfig, SolverConfig};
use specdet_cli::validate;

#[derive(Parser)]
#[command(name = "specdet", version, about = "Spectral determinants of anharmonic oscillators with compact perturbations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Write the table here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Determinant for a single configuration
    Det(Common),
    /// Determinant over a range of alpha or b
    Sweep(Common),
    /// Low eigenvalues, growth fit and truncated product
    Spectrum(Common),
    /// Run the invariant suite
    Validate {
        /// Take solver tolerances from this config
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the solver relative tolerance
        #[arg(long)]
        rtol: Option<f64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn set_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().context("thread pool")?;
    }
    Ok(())
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(c: &Common) -> Result<(RunConfig, Format, Option<PathBuf>)> {
    set_jobs(c.jobs)?;
    let cfg = RunConfig::load(&c.config)?;
    let format = c.format.unwrap_or(cfg.output.format);
    let path = c.output.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    Ok((cfg, format, path))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Det(c) => {
            let (cfg, format, path) = load(&c)?;
            let r = commands::det(&cfg)?;
            print!("{}", commands::det_summary(&r));
            if path.is_none() {
                println!();
            }
            let table = commands::render_rows(&cfg, "alpha", &[commands::det_row(&cfg, &r)], format)?;
            emit(&table, path.as_deref())?;
        }
        Command::Sweep(c) => {
            let (cfg, format, path) = load(&c)?;
            let (param, rows) = commands::sweep(&cfg)?;
            emit(&commands::render_rows(&cfg, param.as_str(), &rows, format)?, path.as_deref())?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} rows failed; see the error column", rows.len());
            }
        }
        Command::Spectrum(c) => {
            let (cfg, format, path) = load(&c)?;
            let p = commands::spectrum(&cfg)?;
            eprint!("{}", commands::spectrum_summary(&p));
            emit(&commands::render_spectrum(&cfg, &p, format)?, path.as_deref())?;
        }
        Command::Validate { config, rtol, jobs } => {
            set_jobs(jobs)?;
            let mut solver = match config {
                Some(p) => RunConfig::load(&p)?.solver,
                None => SolverConfig::default(),
            };
            if let Some(r) = rtol {
                solver.rtol = r;
            }
            let results = validate::run_checks(Tolerances::new(solver.rtol, solver.atol));
            print!("{}", validate::render(&results));
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! `parabolic`: batch driver that turns a JSON config into CSV curves and JSON reports.

mod config;
mod error;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parabolic::flow::direction_field;
use parabolic::fmt::g17;
use rayon::prelude::*;

use config::{ExperimentConfig, Overrides};
use error::CliError;
use output::{out_dir, write_atomic, write_json, Envelope};

#[derive(Parser)]
#[command(name = "parabolic", version, about = "Parabolic semigroup experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Final time of the grid.
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Relative integrator tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate each initial point and write `trajectory_NN.csv`.
    Simulate,
    /// Run every configured experiment and write one JSON report each.
    Report,
    /// Sample the generator on a grid and write `field.csv`.
    Field,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("parabolic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    if cli.parallel == 0 {
        return Err(CliError::Config("--parallel must be at least 1".into()));
    }
    let ov = Overrides { out_dir: cli.out.clone(), t_max: cli.t_max, tol: cli.tol };
    let cfg = ExperimentConfig::load(path, &ov)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.parallel)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Simulate => simulate(&cfg),
        Command::Report => report(&cfg),
        Command::Field => field(&cfg),
    })
}

/// First failure in config order, so exit status does not depend on scheduling.
fn first_error(results: Vec<Result<(), CliError>>) -> Result<(), CliError> {
    results.into_iter().collect()
}

fn simulate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.initial_points.is_empty() {
        return Err(CliError::Config("simulate needs initial_points".into()));
    }
    let dir = out_dir(cfg)?;
    let results: Vec<_> = cfg
        .initial_points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let traj = experiments::trajectory(cfg, p).map_err(|e| e.context(format!("trajectory {i}")))?;
            write_atomic(&dir.join(format!("trajectory_{i:02}.csv")), |w| traj.write_csv(w))
        })
        .collect();
    first_error(results)
}

fn report(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.experiments.is_empty() {
        return Err(CliError::Config("report needs at least one experiment".into()));
    }
    let dir = out_dir(cfg)?;
    let hash = cfg.hash();
    let results: Vec<_> = cfg
        .experiments
        .par_iter()
        .enumerate()
        .map(|(i, exp)| {
            let label = exp.label(i);
            let ctx = format!("experiment '{label}' ({})", exp.kind());
            let result = experiments::run(cfg, exp, &label, &dir).map_err(|e| e.context(ctx))?;
            let env = Envelope {
                software: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                config_sha256: &hash,
                tolerances: cfg.tolerances,
                kind: exp.kind(),
                name: &label,
                result,
            };
            write_json(&dir.join(format!("{label}.json")), &env)
        })
        .collect();
    first_error(results)
}

fn field(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let fc = cfg.field.unwrap_or_default();
    let df = direction_field(&cfg.generator, &fc.rect, fc.nx, fc.ny).map_err(|e| CliError::from(e).context("field"))?;
    let dir = out_dir(cfg)?;
    write_atomic(&dir.join("field.csv"), |w| {
        writeln!(w, "re,im,f_re,f_im")?;
        for s in &df.samples {
            writeln!(w, "{},{},{},{}", g17(s.z.re), g17(s.z.im), g17(s.f.re), g17(s.f.im))?;
        }
        Ok(())
    })
}

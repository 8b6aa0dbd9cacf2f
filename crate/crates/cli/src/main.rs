//! `qlm`: Hawking/Bartnik mass bounds for constant-mean-curvature spheres.
//!
//! Exit codes: 0 success, 1 I/O, parse or usage error, 2 inadmissible input (a
//! machine-readable reason is printed as JSON on stdout), 3 collar curvature breach,
//! 4 failed self-test.

mod commands;
mod config;
mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use qlm_core::mass_bounds::SCHEMA_VERSION;
use qlm_core::Grid;
use serde::Serialize;

use commands::{Status, Tolerances, FLOOR_TOL};
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "qlm", version, about = "Hawking/Bartnik mass bounds for CMC spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (stdout when omitted; overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Evaluation grid as `T` or `TxN`: t samples and x intervals.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<Grid>,

    /// Tolerance for the scalar curvature floor certificate.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Worker threads for parallel work.
    #[arg(long, global = true, env = "QLM_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mass bounds report for one configuration.
    Analyze { config: PathBuf },
    /// Build collar extensions and certify their scalar curvature.
    Collar { config: PathBuf },
    /// Parameter sweep to CSV.
    Sweep { spec: PathBuf },
    /// Run the acceptance criteria.
    Selftest,
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let d = Grid::default();
    let (t, x) = match s.split_once(['x', 'X']) {
        Some((t, x)) => (t, Some(x)),
        None => (s, None),
    };
    let t = t.trim().parse::<usize>().map_err(|e| format!("t samples: {e}"))?;
    let x = match x {
        Some(x) => x.trim().parse::<usize>().map_err(|e| format!("x intervals: {e}"))?,
        None => d.x_intervals,
    };
    Grid::new(t, x).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Failure<'a> {
    schema_version: u32,
    status: &'static str,
    reason: &'a str,
    detail: String,
}

/// Core errors that describe the input geometry rather than a malformed request.
fn inadmissible(e: &anyhow::Error) -> Option<&qlm_core::Error> {
    use qlm_core::Error as E;
    e.chain().find_map(|c| c.downcast_ref::<E>()).filter(|e| {
        matches!(
            e,
            E::Admissibility { .. }
                | E::Precondition { .. }
                | E::PoleRegularity { .. }
                | E::NonPositiveProfile { .. }
                | E::Embedding(_)
        )
    })
}

fn run(cli: Cli) -> Result<Status> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    let floor = cli.tol.unwrap_or(FLOOR_TOL);
    if !(floor > 0.0 && floor.is_finite()) {
        return Err(anyhow!("--tol must be positive, got {floor}"));
    }
    let tol = Tolerances::new(floor);

    match &cli.command {
        Command::Analyze { config } | Command::Collar { config } => {
            let raw = RunConfig::load(config)?;
            let tol = raw.floor_tol.filter(|_| cli.tol.is_none()).map_or(tol, Tolerances::new);
            let out = cli.out.clone().or_else(|| raw.out.clone());
            let cfg = raw.resolve(commands::base_dir(config), cli.grid)?;
            let (bytes, status) = if matches!(cli.command, Command::Analyze { .. }) {
                (output::to_json(&commands::analyze(&cfg, tol)?)?, Status::Ok)
            } else {
                let (rep, status) = commands::collar(&cfg, tol)?;
                (output::to_json(&rep)?, status)
            };
            output::emit(out.as_deref(), &bytes)?;
            Ok(status)
        }
        Command::Sweep { spec } => {
            let s: sweep::SweepSpec = config::parse_file(spec)?;
            let out = cli.out.clone().or_else(|| s.out.clone().map(|p| rebase(spec, p)));
            let bytes = sweep::run(&s).context("sweep")?;
            output::emit(out.as_deref(), &bytes)?;
            Ok(Status::Ok)
        }
        Command::Selftest => {
            let (rep, status) = commands::selftest();
            output::emit(cli.out.as_deref(), &output::to_json(&rep)?)?;
            Ok(status)
        }
    }
}

fn rebase(config: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        commands::base_dir(config).join(p)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors share exit code 1 with parse errors; 2 is reserved
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Breach) => {
            eprintln!("qlm: collar scalar curvature breaches its floor");
            ExitCode::from(3)
        }
        Ok(Status::SelftestFailed) => {
            eprintln!("qlm: acceptance criteria failed");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("qlm: {e:#}");
            match inadmissible(&e) {
                Some(core) => {
                    let f = Failure {
                        schema_version: SCHEMA_VERSION,
                        status: "inadmissible",
                        reason: core.reason(),
                        detail: core.to_string(),
                    };
                    if let Ok(s) = serde_json::to_string(&f) {
                        println!("{s}");
                    }
                    ExitCode::from(2)
                }
                None => ExitCode::from(1),
            }
        }
    }
}

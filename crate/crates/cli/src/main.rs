//! `sharpfront` — simulate delayed degenerate diffusion fronts and compute
//! critical wave speeds.
//!
//! Exit codes: 0 ok, 1 a check failed, 2 usage or configuration error,
//! 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Ctx;
use crate::config::Config;

#[derive(Parser, Debug)]
#[command(name = "sharpfront", version, about)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Accepted for interface compatibility; every run is deterministic.
    #[arg(long, global = true)]
    seedless: bool,
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Override a configuration key, e.g. `--set r=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Run the PDE and write snapshots and the edge trajectory.
    Simulate,
    /// Bisect for the critical wave speed.
    Wavespeed,
    /// Run the PDE and fit the front speed.
    Frontspeed,
    /// PDE and shooting speeds for every delay in `r_list`.
    Sweep,
    /// Decay of a perturbation behind the front.
    Perturb,
    /// Edge-tracking versus classical scheme against the exact wave.
    Compare,
    /// Check the kinetics and integrate the homogeneous delay equation.
    Validate,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let quiet = cli.quiet;
    let (result, elapsed) = commands::timed(|| -> error::Result<()> {
        let cfg = Config::load(cli.config.as_deref(), &cli.overrides)?;
        commands::prepare_out(&cli.out)?;
        let ctx = Ctx {
            cfg,
            out: cli.out.clone(),
            quiet,
        };
        match cli.command {
            Command::Simulate => commands::simulate(&ctx),
            Command::Wavespeed => commands::wavespeed(&ctx),
            Command::Frontspeed => commands::frontspeed(&ctx),
            Command::Sweep => commands::sweep(&ctx),
            Command::Perturb => commands::perturb(&ctx),
            Command::Compare => commands::compare(&ctx),
            Command::Validate => commands::validate(&ctx),
        }
    });
    match result {
        Ok(()) => {
            if !quiet {
                eprintln!("done in {:.2?}", elapsed);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `elr`: runs oscillator scenarios from TOML files.
//!
//! Exit status: 0 on success, 1 for invalid input (the message names the
//! offending key), 2 for numerical failures (the message names the time).

mod analytic;
mod config;
mod plot;
mod reconstruct;
mod simulate;
mod sweep;

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{config_err, ConfigError, Format, Scenario};

#[derive(Debug, Parser)]
#[command(name = "elr", version, about = "Frequency-modulated quantum oscillator laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one scenario and write trajectory, schedule and summary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Terminal squeezing factor over a one- or two-parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Closed-form values, printed as JSON.
    Analytic {
        #[command(subcommand)]
        which: analytic::Which,
    },
    /// Recover omega(t) and T(t) from an Omega schedule.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        omega_schedule: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn out_dir(flag: Option<PathBuf>, s: &Scenario) -> Result<PathBuf> {
    flag.or_else(|| s.output_dir.clone())
        .ok_or_else(|| config_err("output_dir: pass --out or set output_dir"))
}

fn report(files: &[String], dir: &Path) {
    for f in files {
        println!("wrote {}", dir.join(f).display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, format } => {
            let s = config::load(&config)?;
            let dir = out_dir(out, &s)?;
            let sim = simulate::run(&s)?;
            let files = simulate::write_outputs(&s, &sim, &dir, format.unwrap_or(s.format))?;
            report(&files, &dir);
            println!(
                "terminal S = {:.10e}, Wronskian drift = {:.2e}",
                sim.terminal_s, sim.drift
            );
            for w in &sim.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Sweep { config, out, jobs } => {
            let s = config::load(&config)?;
            let dir = out_dir(out, &s)?;
            let spec = s.sweep.clone().ok_or_else(|| config_err("sweep: section missing"))?;
            if jobs == Some(0) {
                return Err(config_err("--jobs: must be positive"));
            }
            let cells = sweep::evaluate(&s, &spec, jobs)?;
            sweep::write(&dir, &spec, &cells)?;
            let failed = cells.iter().filter(|c| !c.reason.is_empty()).count();
            report(&["sweep.csv".into(), "sweep.svg".into()], &dir);
            println!("{} cells, {failed} failed", cells.len());
        }
        Command::Analytic { which } => {
            let v = analytic::evaluate(&which)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Command::Reconstruct {
            config,
            omega_schedule,
            out,
        } => {
            let s = config::load(&config)?;
            let o = reconstruct::run(&s, &omega_schedule)?;
            reconstruct::write(&out, &o)?;
            report(&["reconstruction.csv".into(), "reconstruction.svg".into()], &out);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let color = std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal();
            let label = if color { "\x1b[1;31merror\x1b[0m" } else { "error" };
            eprintln!("{label}: {e:#}");
            let code = if e.downcast_ref::<ConfigError>().is_some() {
                1
            } else {
                2
            };
            ExitCode::from(code)
        }
    }
}

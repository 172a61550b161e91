use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use clamped_opinion::config::{parse_config, ExperimentConfig};
use clamped_opinion::harness::{self, HarnessError};

#[derive(Parser)]
#[command(version, about = "Clamped bounded-confidence opinion dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print (or write) its summary.
    Simulate {
        config: PathBuf,
        /// Write the full trajectory as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the configured `sweep_eps` values and emit a CSV table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Classify the initial profile as given.
    Classify { config: PathBuf },
    /// Stabilize, then report the spectrum of the frozen influence matrix.
    Spectrum { config: PathBuf },
    /// Run both election experiments and check them against the expected bounds.
    ReproducePaper,
}

fn load(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = fs::read_to_string(path)?;
    Ok(parse_config(&text)?)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn dispatch(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Simulate {
            config,
            trajectory,
            summary,
        } => {
            let mut cfg = load(&config)?;
            if trajectory.is_some() {
                cfg.trajectory_path = trajectory;
            }
            if summary.is_some() {
                cfg.summary_path = summary;
            }
            let outcome = harness::run(&cfg)?;
            if cfg.summary_path.is_none() {
                emit(None, &outcome.summary.to_json())?;
            }
            eprintln!("wall time: {:.3} ms", outcome.summary.wall_time.as_secs_f64() * 1e3);
        }
        Command::Sweep { config, output } => {
            let cfg = load(&config)?;
            let rows = harness::sweep(&cfg)?;
            let mut buf = Vec::new();
            harness::write_sweep_csv(&rows, &mut buf)?;
            emit(output.as_deref(), &String::from_utf8_lossy(&buf))?;
        }
        Command::Classify { config } => {
            let cfg = load(&config)?;
            emit(None, &json(&harness::classify_initial(&cfg)?))?;
        }
        Command::Spectrum { config } => {
            let cfg = load(&config)?;
            emit(None, &json(&harness::spectrum_analysis(&cfg)?))?;
        }
        Command::ReproducePaper => {
            let report = harness::reproduce_election()?;
            for c in &report.checks {
                println!(
                    "{} eps={}: -1 x {} / +1 x {} (expected -1 x {:?}), step {:?} (expected {}±{}), {:.2} ms",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.eps,
                    c.minus_count,
                    c.plus_count,
                    c.expected_minus,
                    c.step,
                    c.expected_step,
                    c.step_slack,
                    c.runtime_ms
                );
            }
            if !report.passed() {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

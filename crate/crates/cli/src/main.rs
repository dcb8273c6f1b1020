use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qrdm_cli::config::{Gamma4Mode, MeasurementMode, StatePrepMode};
use qrdm_cli::plan_table::{plan_csv, plan_table};
use qrdm_cli::report::{load_outcomes, render, Format};
use qrdm_cli::{run_pipeline, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "qrdm", version, about = "Active-space RDMs from a simulated register, cumulant Γ4 and SC-NEVPT2")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Overrides {
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Worker count (the QRDM_WORKERS variable still wins).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_parser = parse_state_prep)]
    state_prep: Option<StatePrepMode>,
    #[arg(long, value_parser = parse_measurement)]
    measurement: Option<MeasurementMode>,
    #[arg(long, value_parser = parse_gamma4)]
    gamma4: Option<Gamma4Mode>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pmsv: Option<bool>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline over every geometry point.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Measurement-circuit counts (CSV on stdout).
    Plan {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check the configuration and its input files.
    Validate { config: PathBuf },
    /// Re-render the point results of an output directory.
    Report {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

fn kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_state_prep(s: &str) -> Result<StatePrepMode, String> {
    kebab(s)
}

fn parse_measurement(s: &str) -> Result<MeasurementMode, String> {
    kebab(s)
}

fn parse_gamma4(s: &str) -> Result<Gamma4Mode, String> {
    kebab(s)
}

fn load(path: &PathBuf, o: &Overrides) -> CliResult<RunConfig> {
    let mut c = RunConfig::load(path)?;
    if let Some(d) = &o.output_dir {
        c.output_dir = d.clone();
    }
    if let Some(w) = o.workers {
        c.workers = w;
    }
    if let Some(m) = o.state_prep {
        c.state_prep.mode = m;
    }
    if let Some(m) = o.measurement {
        c.measurement.mode = m;
    }
    if let Some(m) = o.gamma4 {
        c.gamma4.mode = m;
    }
    if let Some(s) = o.shots {
        c.measurement.shots = s;
    }
    if let Some(s) = o.seed {
        c.measurement.seed = s;
    }
    if let Some(p) = o.pmsv {
        c.measurement.pmsv = p;
    }
    Ok(c)
}

fn emit(bytes: &[u8]) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| qrdm_cli::CliError::io("stdout".as_ref(), e))
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.cmd {
        Cmd::Run { config, overrides } => {
            let c = load(&config, &overrides)?;
            c.check()?;
            let summary = run_pipeline(&c)?;
            emit(&render(&summary.outcomes, Format::Table)?)?;
            log::info!("results in {}", summary.output_dir.display());
            Ok(summary.success())
        }
        Cmd::Plan { config, overrides } => {
            let c = load(&config, &overrides)?;
            c.validate()?;
            emit(&plan_csv(&plan_table(&c)?)?)?;
            Ok(true)
        }
        Cmd::Validate { config } => {
            let c = RunConfig::load(&config)?;
            let points = c.validate()?;
            for p in &points {
                println!(
                    "point {}: {} orbitals, CAS({},{}), {} core, {} virtual",
                    p.label,
                    p.ints.n_orbitals,
                    p.spaces.n_active_electrons,
                    p.spaces.n_active,
                    p.spaces.n_core,
                    p.spaces.n_virtual
                );
            }
            Ok(true)
        }
        Cmd::Report { dir, format } => {
            emit(&render(&load_outcomes(&dir)?, format)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Renderings of a set of point outcomes.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `label` | geometry label |
//! | `status` | `ok` or `failed` |
//! | `reference_energy`, `e2`, `total_energy` | Hartree |
//! | `e2_ijrs` … `e2_r` | per-class energies, classes 0, +1, −1, +2, −2, 0', +1', −1' |
//! | `casci_energy`, `vqe_energy`, `vqe_iterations`, `vqe_converged` | state preparation |
//! | `pmsv_retention`, `measurement_sets`, `gamma4_sets` | measurement |
//! | `gamma4_density`, `replaced_fraction`, `invariant_deviation` | four-body diagnostics |
//! | `error` | failure message |
//!
//! Missing values are empty fields in CSV, `null` in JSON and `-` in tables.

use std::fmt::Write as _;

use qrdm_core::nevpt2::Class;

use crate::error::{CliError, CliResult};
use crate::pipeline::{PointOutcome, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(CliError::Usage(format!("unsupported report format {s:?} (csv, json, table)"))),
        }
    }
}

fn class_column(c: Class) -> String {
    format!("e2_{}", format!("{c:?}").to_lowercase())
}

pub fn columns() -> Vec<String> {
    let mut c: Vec<String> =
        ["label", "status", "reference_energy", "e2", "total_energy"].iter().map(|s| s.to_string()).collect();
    c.extend(Class::ALL.iter().map(|&k| class_column(k)));
    c.extend(
        [
            "casci_energy",
            "vqe_energy",
            "vqe_iterations",
            "vqe_converged",
            "pmsv_retention",
            "measurement_sets",
            "gamma4_sets",
            "gamma4_density",
            "replaced_fraction",
            "invariant_deviation",
            "error",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    c
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn row(o: &PointOutcome) -> Vec<String> {
    let status = match o.status {
        Status::Ok => "ok",
        Status::Failed => "failed",
    };
    let mut r = vec![o.label.to_string(), status.to_string()];
    match &o.point {
        Some(p) => {
            let d = &p.diagnostics;
            r.extend([p.reference_energy, p.e2, p.total_energy].iter().map(f64::to_string));
            r.extend(Class::ALL.iter().map(|&c| {
                p.classes.iter().find(|x| x.class == c).map(|x| x.e2.to_string()).unwrap_or_default()
            }));
            r.extend([
                opt(d.casci_energy),
                opt(d.vqe_energy),
                opt(d.vqe_iterations),
                opt(d.vqe_converged),
                opt(d.pmsv_retention),
                opt(d.measurement_sets),
                opt(d.gamma4_sets),
                opt(d.gamma4_density),
                opt(d.replaced_fraction),
                opt(d.invariant_deviation),
            ]);
        }
        None => r.extend(std::iter::repeat(String::new()).take(3 + Class::ALL.len() + 10)),
    }
    r.push(o.error.clone().unwrap_or_default());
    r
}

/// Deterministic rendering; outcomes are emitted in the given order.
pub fn render(outcomes: &[PointOutcome], format: Format) -> CliResult<Vec<u8>> {
    if outcomes.is_empty() {
        return Err(CliError::Usage("nothing to report".into()));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(columns())?;
            for o in outcomes {
                w.write_record(row(o))?;
            }
            w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(outcomes)?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "{:>8} {:>7} {:>18} {:>14} {:>18}  flags", "label", "status", "reference", "e2", "total");
            for o in outcomes {
                match &o.point {
                    Some(p) => {
                        let _ = writeln!(
                            s,
                            "{:>8} {:>7} {:>18.10} {:>14.10} {:>18.10}  {}",
                            o.label,
                            "ok",
                            p.reference_energy,
                            p.e2,
                            p.total_energy,
                            if p.flags.is_empty() { "-".to_string() } else { p.flags.join("; ") }
                        );
                    }
                    None => {
                        let _ = writeln!(
                            s,
                            "{:>8} {:>7} {:>18} {:>14} {:>18}  {}",
                            o.label,
                            "failed",
                            "-",
                            "-",
                            "-",
                            o.error.as_deref().unwrap_or("-")
                        );
                    }
                }
            }
            Ok(s.into_bytes())
        }
    }
}

/// Whitespace-separated columns for gnuplot; failed points are commented out.
pub fn gnuplot(outcomes: &[PointOutcome]) -> String {
    let mut s = String::from("# label reference_energy e2 total_energy\n");
    for o in outcomes {
        match &o.point {
            Some(p) => {
                let _ = writeln!(s, "{} {} {} {}", o.label, p.reference_energy, p.e2, p.total_energy);
            }
            None => {
                let _ = writeln!(s, "# {} failed", o.label);
            }
        }
    }
    s
}

/// Outcomes stored under `<dir>/points`, sorted by label.
pub fn load_outcomes(dir: &std::path::Path) -> CliResult<Vec<PointOutcome>> {
    let pd = crate::pipeline::points_dir(dir);
    let entries = std::fs::read_dir(&pd).map_err(|e| CliError::io(&pd, e))?;
    let mut out = Vec::new();
    for e in entries {
        let path = e.map_err(|e| CliError::io(&pd, e))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            out.push(serde_json::from_str::<PointOutcome>(&text)?);
        }
    }
    out.sort_by(|a, b| a.label.total_cmp(&b.label));
    Ok(out)
}

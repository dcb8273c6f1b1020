//! Per-point pipeline: state preparation, RDM estimation, Γ4 treatment and
//! SC-NEVPT2, with the run driver that writes the result files.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qrdm_core::chem::build_active_hamiltonian;
use qrdm_core::ci::casci_solve;
use qrdm_core::cumulant::{
    cu4_gamma4, filtered_gamma4, significant_elements, sparsity_report, ElementOracle, EstimatedElements,
    ExactTensors,
};
use qrdm_core::nevpt2::{sc_nevpt2_from_rdms, Class};
use qrdm_core::ops::{find_z2_symmetries, qubit_hamiltonian, SymmetryGroup};
use qrdm_core::rdm::{
    assemble_rdms, element_observables, execute_plan, plan_measurements, rdm_observables, statevector_rdms, Kind,
    MeasurementPlan, Mode, RdmSet,
};
use qrdm_core::sim::StateVector;
use qrdm_core::vqe::{vqe_exact, vqe_spsa, Ansatz, VqeResult};

use crate::config::{Gamma4Mode, MeasurementMode, PointInput, RunConfig, StatePrepMode};
use crate::error::{CliError, CliResult};
use crate::report::{self, Format};

/// Seed stride between geometry points.
const POINT_SEED_STRIDE: u64 = 1_000_003;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: Class,
    pub label: String,
    pub e2: f64,
}

/// Diagnostics of one point; absent values serialize as `null`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub provenance: String,
    pub casci_energy: Option<f64>,
    pub vqe_energy: Option<f64>,
    pub vqe_iterations: Option<usize>,
    pub vqe_converged: Option<bool>,
    pub pmsv_retention: Option<f64>,
    pub measurement_sets: Option<usize>,
    /// Extra sets measuring the four-body elements of a filtered run.
    pub gamma4_sets: Option<usize>,
    pub gamma4_density: Option<f64>,
    pub replaced_fraction: Option<f64>,
    /// Largest RDM identity violation before any Γ4 approximation.
    pub invariant_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub label: f64,
    /// Active-space energy of the RDMs fed to NEVPT2, frozen core included.
    pub reference_energy: f64,
    pub e2: f64,
    pub total_energy: f64,
    pub classes: Vec<ClassRow>,
    pub flags: Vec<String>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// A point's result or the error that stopped it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub label: f64,
    pub status: Status,
    pub point: Option<CurvePoint>,
    pub error: Option<String>,
}

/// Side outputs written next to the point JSON.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub vqe_trace_csv: Option<String>,
    pub sparsity_csv: Option<String>,
}

fn ranks_needed(mode: Gamma4Mode, n_electrons: usize) -> Vec<usize> {
    match mode {
        Gamma4Mode::Exact => vec![1, 2, 3, 4],
        Gamma4Mode::None if n_electrons <= 2 => vec![1, 2],
        _ => vec![1, 2, 3],
    }
}

struct Measured {
    rdms: RdmSet,
    plan: Option<MeasurementPlan>,
    retention: Option<f64>,
}

fn measure_plan(
    plan: &MeasurementPlan,
    state: &StateVector,
    mode: &Mode,
    pmsv: bool,
) -> CliResult<qrdm_core::rdm::Estimates> {
    let est = execute_plan(plan, state, mode, pmsv)?;
    if let Some(k) = est.missing.iter().next() {
        return Err(CliError::Core(qrdm_core::Error::Missing(format!(
            "{:?} {:?}: every shot of its set was rejected",
            k.kind, k.idx
        ))));
    }
    Ok(est)
}

/// Runs one geometry point through every configured stage.
pub fn run_point(cfg: &RunConfig, input: &PointInput, index: usize) -> CliResult<(CurvePoint, Artifacts)> {
    let (ints, spaces) = (&input.ints, &input.spaces);
    let n = spaces.n_active;
    let ne = spaces.n_active_electrons;
    let seed_offset = POINT_SEED_STRIDE.wrapping_mul(index as u64);
    let h = build_active_hamiltonian(ints, spaces)?;
    let casci = casci_solve(&h, spaces)?;
    let qh = qubit_hamiltonian(&h)?;
    let m = &cfg.measurement;
    let group = if m.symmetry_filter {
        Some(SymmetryGroup::from_reference(2 * n, find_z2_symmetries(&qh), spaces.reference_bits())?)
    } else {
        None
    };
    let mut diag = Diagnostics { casci_energy: Some(casci.total_energy()), ..Default::default() };
    let mut art = Artifacts::default();

    // state preparation
    let sp = &cfg.state_prep;
    let (na, nb) = spaces.active_alpha_beta();
    let (state, vqe): (StateVector, Option<VqeResult>) = match sp.mode {
        StatePrepMode::Casci => (casci.to_statevector(), None),
        StatePrepMode::VqeExact => {
            let ansatz = Ansatz::uccsd(n, na, nb)?;
            let r = vqe_exact(&qh, &ansatz, &sp.settings())?;
            (ansatz.state(&r.params), Some(r))
        }
        StatePrepMode::VqeSampled => {
            let ansatz = Ansatz::uccsd(n, na, nb)?;
            let obs = rdm_observables(n, &[1, 2], Kind::Rdm, group.as_ref())?;
            let plan = plan_measurements(&obs, m.strategy, group.as_ref())?;
            let noise = m.noise()?;
            let mut settings = sp.settings();
            settings.seed = settings.seed.wrapping_add(seed_offset);
            let r = vqe_spsa(&ansatz, &settings, |st, rng| {
                let mode = Mode::Shots { shots: sp.shots, seed: rng.gen(), noise };
                let est = execute_plan(&plan, st, &mode, m.pmsv)?;
                assemble_rdms(&est.values, &plan.zeros, n, ne)?.energy(&h)
            })?;
            (ansatz.state(&r.params), Some(r))
        }
    };
    if let Some(r) = &vqe {
        diag.vqe_energy = Some(r.energy);
        diag.vqe_iterations = Some(r.iterations);
        diag.vqe_converged = Some(r.converged);
        art.vqe_trace_csv = Some(r.trace_csv());
    }

    // RDM estimation
    let ranks = ranks_needed(cfg.gamma4.mode, ne);
    let max_rank = *ranks.last().expect("nonempty");
    let measured = match m.mode {
        MeasurementMode::Oracle => Measured { rdms: statevector_rdms(&state, n, max_rank)?, plan: None, retention: None },
        MeasurementMode::ExactPlan | MeasurementMode::Shots => {
            let obs = rdm_observables(n, &ranks, Kind::Rdm, group.as_ref())?;
            let plan = plan_measurements(&obs, m.strategy, group.as_ref())?;
            let est = measure_plan(&plan, &state, &m.plan_mode(seed_offset)?, m.pmsv)?;
            let rdms = assemble_rdms(&est.values, &plan.zeros, n, ne)?;
            let retention = (m.mode == MeasurementMode::Shots).then(|| est.mean_retained());
            Measured { rdms, plan: Some(plan), retention }
        }
    };
    let mut rdms = measured.rdms;
    diag.measurement_sets = measured.plan.as_ref().map(|p| p.n_sets());
    diag.pmsv_retention = measured.retention;
    if m.mode != MeasurementMode::Shots {
        let worst = rdms.invariant_report().into_iter().map(|(_, d)| d).fold(0.0, f64::max);
        diag.invariant_deviation = Some(worst);
    }

    // four-body treatment
    let g4 = &cfg.gamma4;
    match g4.mode {
        Gamma4Mode::Exact | Gamma4Mode::None => {}
        Gamma4Mode::Cu4 => rdms.gamma4 = Some(cu4_gamma4(&rdms)?),
        Gamma4Mode::Cu4RdmFiltered | Gamma4Mode::Cu4PdmFiltered => {
            let variant = g4.mode.variant().expect("filtered mode");
            let oracle: Box<dyn ElementOracle> = match m.mode {
                MeasurementMode::Oracle => Box::new(ExactTensors::from_state(&state, n)?),
                _ => {
                    let keys = significant_elements(&rdms, variant, g4.threshold)?;
                    let obs = element_observables(n, &keys, group.as_ref())?;
                    let plan = plan_measurements(&obs, m.strategy, group.as_ref())?;
                    let est = measure_plan(&plan, &state, &m.plan_mode(seed_offset.wrapping_add(1))?, m.pmsv)?;
                    diag.gamma4_sets = Some(plan.n_sets());
                    Box::new(EstimatedElements { values: est.values, zeros: plan.zeros })
                }
            };
            let f = filtered_gamma4(&rdms, oracle.as_ref(), variant, &g4.filter_options())?;
            diag.replaced_fraction = Some(f.replaced_fraction);
            rdms.gamma4 = Some(f.gamma4);
        }
    }
    if let Some(t) = &rdms.gamma4 {
        let r = sparsity_report(t, g4.threshold);
        diag.gamma4_density = Some(r.density);
        art.sparsity_csv = Some(r.to_csv());
    }

    let reference_energy = rdms.energy(&h)?;
    diag.provenance = format!(
        "{}/{}/{}",
        serde_plain(&sp.mode),
        serde_plain(&m.mode),
        g4.mode.label()
    );
    let res = sc_nevpt2_from_rdms(ints, spaces, &rdms, reference_energy)?;
    let mut flags = res.flags.clone();
    if diag.invariant_deviation.is_some_and(|d| d > cfg.tolerances.invariants) {
        flags.push(format!("RDM identities violated beyond {:e}", cfg.tolerances.invariants));
    }
    if vqe.as_ref().is_some_and(|r| !r.converged) {
        flags.push("VQE did not converge".into());
    }
    let point = CurvePoint {
        label: input.label,
        reference_energy,
        e2: res.total_e2,
        total_energy: reference_energy + res.total_e2,
        classes: Class::ALL
            .iter()
            .map(|&c| ClassRow { class: c, label: c.label().to_string(), e2: res.class_energy(c) })
            .collect(),
        flags,
        diagnostics: diag,
    };
    Ok((point, art))
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|x| x.as_str().map(str::to_string)).unwrap_or_default()
}

/// File stem of a point, e.g. `point_0.74`.
pub fn point_stem(label: f64) -> String {
    format!("point_{label}")
}

/// Write through a temporary sibling and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn points_dir(out: &Path) -> PathBuf {
    out.join("points")
}

fn write_point(dir: &Path, outcome: &PointOutcome, art: &Artifacts) -> CliResult<()> {
    let stem = point_stem(outcome.label);
    let mut json = serde_json::to_string_pretty(outcome)?;
    json.push('\n');
    write_atomic(&dir.join(format!("{stem}.json")), json.as_bytes())?;
    if let Some(t) = &art.vqe_trace_csv {
        write_atomic(&dir.join(format!("{stem}.vqe.csv")), t.as_bytes())?;
    }
    if let Some(t) = &art.sparsity_csv {
        write_atomic(&dir.join(format!("{stem}.sparsity.csv")), t.as_bytes())?;
    }
    Ok(())
}

/// Summary of a run; `success()` decides the exit code.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub outcomes: Vec<PointOutcome>,
    pub output_dir: PathBuf,
}

impl RunSummary {
    pub fn success(&self) -> bool {
        self.outcomes.iter().all(|o| o.status == Status::Ok)
    }

    pub fn points(&self) -> Vec<&CurvePoint> {
        self.outcomes.iter().filter_map(|o| o.point.as_ref()).collect()
    }
}

/// Runs every point (concurrently, up to the worker count), writing
/// `points/point_<label>.json` as each finishes, then `curve.csv` and
/// `curve.dat`. A failing point is recorded and the rest continue.
pub fn run_pipeline(cfg: &RunConfig) -> CliResult<RunSummary> {
    let workers = cfg.effective_workers()?;
    let out = cfg.output_path();
    let dir = points_dir(&out);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let outcomes: Vec<PointOutcome> = pool.install(|| {
        cfg.points
            .par_iter()
            .enumerate()
            .map(|(i, spec)| {
                let result = cfg.load_point(spec).and_then(|input| run_point(cfg, &input, i));
                let (outcome, art) = match result {
                    Ok((p, art)) => {
                        (PointOutcome { label: spec.label, status: Status::Ok, point: Some(p), error: None }, art)
                    }
                    Err(e) => {
                        log::error!("point {}: {e}", spec.label);
                        let o = PointOutcome {
                            label: spec.label,
                            status: Status::Failed,
                            point: None,
                            error: Some(e.to_string()),
                        };
                        (o, Artifacts::default())
                    }
                };
                if let Err(e) = write_point(&dir, &outcome, &art) {
                    log::error!("point {}: {e}", spec.label);
                }
                outcome
            })
            .collect()
    });
    let mut outcomes = outcomes;
    outcomes.sort_by(|a, b| a.label.total_cmp(&b.label));
    write_atomic(&out.join("curve.csv"), &report::render(&outcomes, Format::Csv)?)?;
    write_atomic(&out.join("curve.dat"), report::gnuplot(&outcomes).as_bytes())?;
    Ok(RunSummary { outcomes, output_dir: out })
}

//! Measurement-circuit counts per four-body approximation, with the
//! published counts alongside for the (4,4) and (4,5) active spaces.

use serde::Serialize;

use qrdm_core::chem::build_active_hamiltonian;
use qrdm_core::ci::casci_solve;
use qrdm_core::cumulant::{significant_elements, FilterVariant};
use qrdm_core::ops::{find_z2_symmetries, qubit_hamiltonian, PauliWord, SymmetryGroup};
use qrdm_core::rdm::{element_observables, partition_words, plan_measurements, rdm_observables, statevector_rdms, Kind};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Approximation {
    None,
    Cu4,
    Cu4PdmFiltered,
}

impl Approximation {
    pub const ALL: [Approximation; 3] = [Approximation::None, Approximation::Cu4, Approximation::Cu4PdmFiltered];

    pub fn label(self) -> &'static str {
        match self {
            Approximation::None => "None",
            Approximation::Cu4 => "CU(4)",
            Approximation::Cu4PdmFiltered => "CU(4)-PDM-filtered",
        }
    }
}

/// Published `(VQE, RDM)` circuit counts.
pub fn published_counts(n_electrons: usize, n_active: usize, a: Approximation) -> Option<(usize, usize)> {
    match ((n_electrons, n_active), a) {
        ((4, 4), Approximation::None) => Some((13, 31)),
        ((4, 4), Approximation::Cu4) => Some((13, 31)),
        ((4, 4), Approximation::Cu4PdmFiltered) => Some((13, 60)),
        ((4, 5), Approximation::None) => Some((23, 79)),
        ((4, 5), Approximation::Cu4) => Some((23, 63)),
        ((4, 5), Approximation::Cu4PdmFiltered) => Some((23, 132)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanRow {
    pub n_electrons: usize,
    pub n_active: usize,
    pub approximation: Approximation,
    /// Sets measuring the qubit Hamiltonian.
    pub vqe_sets: usize,
    /// Sets measuring the RDMs (plus four-body PDM elements when filtered).
    pub rdm_sets: usize,
    /// Distinct words behind `rdm_sets`, one circuit each without grouping.
    pub naive_words: usize,
    /// Words skipped because a symmetry forces them to zero.
    pub vanishing_words: usize,
    pub published_vqe: Option<usize>,
    pub published_rdm: Option<usize>,
}

/// Rows for the first point of the configuration. The filtered row's mask
/// comes from the CU(4) tensor of the CASCI ground state.
pub fn plan_table(cfg: &RunConfig) -> CliResult<Vec<PlanRow>> {
    let spec = cfg.points.first().ok_or_else(|| CliError::Config("no geometry points".into()))?;
    let input = cfg.load_point(spec)?;
    let (ints, spaces) = (&input.ints, &input.spaces);
    let n = spaces.n_active;
    let ne = spaces.n_active_electrons;
    let m = &cfg.measurement;
    let h = build_active_hamiltonian(ints, spaces)?;
    let qh = qubit_hamiltonian(&h)?;
    let group = if m.symmetry_filter {
        Some(SymmetryGroup::from_reference(2 * n, find_z2_symmetries(&qh), spaces.reference_bits())?)
    } else {
        None
    };
    let g = group.as_ref();
    let h_words = qh.words().copied().filter(|w| *w != PauliWord::IDENTITY).collect();
    let (vqe_sets, _) = partition_words(2 * n, &h_words, m.strategy, g)?;

    let low = plan_measurements(&rdm_observables(n, &[1, 2, 3], Kind::Rdm, g)?, m.strategy, g)?;
    let full = plan_measurements(&rdm_observables(n, &[1, 2, 3, 4], Kind::Rdm, g)?, m.strategy, g)?;
    let casci = casci_solve(&h, spaces)?;
    let rdms = statevector_rdms(&casci.to_statevector(), n, 3)?;
    let keys = significant_elements(&rdms, FilterVariant::PdmFiltered, cfg.gamma4.threshold)?;
    let pdm = plan_measurements(&element_observables(n, &keys, g)?, m.strategy, g)?;

    let row = |a: Approximation, sets: usize, words: usize, vanishing: usize| {
        let published = published_counts(ne, n, a);
        PlanRow {
            n_electrons: ne,
            n_active: n,
            approximation: a,
            vqe_sets: vqe_sets.len(),
            rdm_sets: sets,
            naive_words: words,
            vanishing_words: vanishing,
            published_vqe: published.map(|p| p.0),
            published_rdm: published.map(|p| p.1),
        }
    };
    Ok(vec![
        row(Approximation::None, full.n_sets(), full.n_words(), full.vanishing_words.len()),
        row(Approximation::Cu4, low.n_sets(), low.n_words(), low.vanishing_words.len()),
        row(
            Approximation::Cu4PdmFiltered,
            low.n_sets() + pdm.n_sets(),
            low.n_words() + pdm.n_words(),
            low.vanishing_words.len() + pdm.vanishing_words.len(),
        ),
    ])
}

pub const PLAN_COLUMNS: [&str; 8] = [
    "active_space",
    "approximation",
    "vqe_sets",
    "rdm_sets",
    "naive_words",
    "vanishing_words",
    "published_vqe",
    "published_rdm",
];

pub fn plan_csv(rows: &[PlanRow]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PLAN_COLUMNS)?;
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            format!("({},{})", r.n_electrons, r.n_active),
            r.approximation.label().to_string(),
            r.vqe_sets.to_string(),
            r.rdm_sets.to_string(),
            r.naive_words.to_string(),
            r.vanishing_words.to_string(),
            opt(r.published_vqe),
            opt(r.published_rdm),
        ])?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

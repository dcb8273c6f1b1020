//! Run configuration: one TOML file, paths relative to its directory.
//!
//! ```toml
//! output_dir = "out"
//! workers = 2
//!
//! [[points]]
//! label = 0.74
//! fcidump = "h2_0.74.fcidump"
//!
//! [spaces]
//! n_core = 0
//! n_active = 2
//! # active_orbitals = [2, 3]      (1-based, FCIDUMP numbering)
//!
//! [state_prep]
//! mode = "vqe-exact"
//!
//! [measurement]
//! mode = "shots"
//! shots = 100000
//! seed = 11
//! readout_error = 0.01
//! pmsv = true
//!
//! [gamma4]
//! mode = "cu4"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qrdm_core::chem::{parse_fcidump, MOIntegrals, OrbitalSpaces};
use qrdm_core::cumulant::{FilterOptions, FilterVariant, MaskSource, DEFAULT_THRESHOLD};
use qrdm_core::rdm::{Mode, Strategy};
use qrdm_core::sim::NoiseModel;
use qrdm_core::vqe::VqeSettings;

use crate::error::{CliError, CliResult};

/// Environment variable overriding `workers`.
pub const WORKERS_ENV: &str = "QRDM_WORKERS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "one")]
    pub workers: usize,
    pub points: Vec<PointSpec>,
    pub spaces: SpacesSpec,
    #[serde(default)]
    pub state_prep: StatePrepSpec,
    #[serde(default)]
    pub measurement: MeasurementSpec,
    #[serde(default)]
    pub gamma4: Gamma4Spec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Directory the relative paths resolve against; set by [`RunConfig::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    /// Geometry label, e.g. a bond length in Å.
    pub label: f64,
    pub fcidump: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacesSpec {
    pub n_core: usize,
    pub n_active: usize,
    /// Defaults to every remaining orbital.
    pub n_virtual: Option<usize>,
    /// Total electrons; defaults to the FCIDUMP `NELEC`.
    pub electrons: Option<usize>,
    /// Defaults to the FCIDUMP `MS2`.
    pub spin_2s: Option<i32>,
    /// Full 1-based orbital order (core, active, virtual).
    pub orbital_order: Option<Vec<usize>>,
    /// 1-based active orbitals; core is the lowest remaining orbitals.
    pub active_orbitals: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatePrepMode {
    #[default]
    Casci,
    VqeExact,
    VqeSampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatePrepSpec {
    pub mode: StatePrepMode,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Shots per energy evaluation in `vqe-sampled`.
    pub shots: u64,
}

impl Default for StatePrepSpec {
    fn default() -> Self {
        let v = VqeSettings::default();
        StatePrepSpec {
            mode: StatePrepMode::Casci,
            max_iterations: v.max_iterations,
            tolerance: v.tolerance,
            seed: v.seed,
            shots: 10_000,
        }
    }
}

impl StatePrepSpec {
    pub fn settings(&self) -> VqeSettings {
        VqeSettings { max_iterations: self.max_iterations, tolerance: self.tolerance, seed: self.seed }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementMode {
    /// RDMs read directly off the state vector.
    #[default]
    Oracle,
    /// Measurement plan evaluated with exact word expectations.
    ExactPlan,
    Shots,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasurementSpec {
    pub mode: MeasurementMode,
    /// Shots per measurement set.
    pub shots: u64,
    pub seed: u64,
    pub readout_error: f64,
    pub depolarizing: f64,
    pub pmsv: bool,
    pub strategy: Strategy,
    /// Drop words and elements forbidden by the Z2 symmetries.
    pub symmetry_filter: bool,
}

impl Default for MeasurementSpec {
    fn default() -> Self {
        MeasurementSpec {
            mode: MeasurementMode::Oracle,
            shots: 10_000,
            seed: 1,
            readout_error: 0.0,
            depolarizing: 0.0,
            pmsv: false,
            strategy: Strategy::GeneralCommuting,
            symmetry_filter: true,
        }
    }
}

impl MeasurementSpec {
    pub fn noise(&self) -> CliResult<Option<NoiseModel>> {
        if self.readout_error == 0.0 && self.depolarizing == 0.0 {
            return Ok(None);
        }
        Ok(Some(NoiseModel::new(self.depolarizing, self.readout_error)?))
    }

    /// Plan execution mode, with the seed offset so that independent plans
    /// of one run draw independent shots.
    pub fn plan_mode(&self, seed_offset: u64) -> CliResult<Mode> {
        Ok(match self.mode {
            MeasurementMode::Shots => {
                Mode::Shots { shots: self.shots, seed: self.seed.wrapping_add(seed_offset), noise: self.noise()? }
            }
            _ => Mode::Exact,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gamma4Mode {
    Exact,
    #[default]
    Cu4,
    Cu4RdmFiltered,
    Cu4PdmFiltered,
    None,
}

impl Gamma4Mode {
    pub fn variant(self) -> Option<FilterVariant> {
        match self {
            Gamma4Mode::Cu4RdmFiltered => Some(FilterVariant::RdmFiltered),
            Gamma4Mode::Cu4PdmFiltered => Some(FilterVariant::PdmFiltered),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Gamma4Mode::Exact => "exact",
            Gamma4Mode::Cu4 => "cu4",
            Gamma4Mode::Cu4RdmFiltered => "cu4-rdm-filtered",
            Gamma4Mode::Cu4PdmFiltered => "cu4-pdm-filtered",
            Gamma4Mode::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Gamma4Spec {
    pub mode: Gamma4Mode,
    pub threshold: f64,
    pub mask_source: MaskSource,
}

impl Default for Gamma4Spec {
    fn default() -> Self {
        Gamma4Spec { mode: Gamma4Mode::Cu4, threshold: DEFAULT_THRESHOLD, mask_source: MaskSource::Cu4 }
    }
}

impl Gamma4Spec {
    pub fn filter_options(&self) -> FilterOptions {
        FilterOptions { threshold: self.threshold, mask_source: self.mask_source }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// RDM invariant check in exact measurement modes.
    pub invariants: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { invariants: 1e-8 }
    }
}

/// A point's integrals (reordered) with its orbital spaces.
#[derive(Clone, Debug)]
pub struct PointInput {
    pub label: f64,
    pub ints: MOIntegrals,
    pub spaces: OrbitalSpaces,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> CliResult<Self> {
        let mut c: RunConfig = toml::from_str(text)?;
        c.base_dir = base_dir.to_path_buf();
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    /// `QRDM_WORKERS` if set, else the configured count.
    pub fn effective_workers(&self) -> CliResult<usize> {
        match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
            Err(_) => Ok(self.workers),
        }
    }

    /// Structural checks and existence of every referenced file.
    pub fn check(&self) -> CliResult<()> {
        if self.points.is_empty() {
            return Err(CliError::Config("no geometry points".into()));
        }
        if self.workers == 0 {
            return Err(CliError::Config("workers must be positive".into()));
        }
        let m = &self.measurement;
        if m.mode == MeasurementMode::Shots && m.shots == 0 {
            return Err(CliError::Config("measurement.shots must be positive".into()));
        }
        if m.pmsv && !m.symmetry_filter {
            return Err(CliError::Config("pmsv needs symmetry_filter".into()));
        }
        m.noise()?;
        if self.state_prep.mode == StatePrepMode::VqeSampled && self.state_prep.shots == 0 {
            return Err(CliError::Config("state_prep.shots must be positive".into()));
        }
        if self.gamma4.mask_source == MaskSource::Exact
            && self.gamma4.mode.variant().is_some()
            && m.mode != MeasurementMode::Oracle
        {
            return Err(CliError::Config("gamma4.mask_source = \"exact\" needs measurement mode oracle".into()));
        }
        if !(self.gamma4.threshold >= 0.0) {
            return Err(CliError::Config("gamma4.threshold must be non-negative".into()));
        }
        let mut labels: Vec<f64> = self.points.iter().map(|p| p.label).collect();
        labels.sort_by(f64::total_cmp);
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Config("duplicate point labels".into()));
        }
        for p in &self.points {
            let path = self.resolve(&p.fcidump);
            if !path.is_file() {
                return Err(CliError::Config(format!("point {}: {} does not exist", p.label, path.display())));
            }
        }
        Ok(())
    }

    /// [`RunConfig::check`] plus, per point, that the FCIDUMP parses and
    /// admits the orbital spaces.
    pub fn validate(&self) -> CliResult<Vec<PointInput>> {
        self.check()?;
        self.points.iter().map(|p| self.load_point(p)).collect()
    }

    pub fn load_point(&self, p: &PointSpec) -> CliResult<PointInput> {
        let path = self.resolve(&p.fcidump);
        if !path.is_file() {
            return Err(CliError::Config(format!("point {}: {} does not exist", p.label, path.display())));
        }
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let (ints, header) = parse_fcidump(&text).map_err(|e| CliError::Point(p.label, e.to_string()))?;
        let s = &self.spaces;
        let order = orbital_order(s, ints.n_orbitals).map_err(|e| CliError::Point(p.label, e))?;
        let ints = match order {
            Some(o) => ints.reordered(&o)?,
            None => ints,
        };
        let n_virtual = match s.n_virtual {
            Some(v) => v,
            None => ints.n_orbitals.checked_sub(s.n_core + s.n_active).ok_or_else(|| {
                CliError::Point(p.label, format!("{} orbitals cannot hold core + active", ints.n_orbitals))
            })?,
        };
        let spaces = OrbitalSpaces::new(
            s.n_core,
            s.n_active,
            n_virtual,
            s.electrons.unwrap_or(header.nelec),
            s.spin_2s.unwrap_or(header.ms2),
        )
        .map_err(|e| CliError::Point(p.label, e.to_string()))?;
        if spaces.n_orbitals() > ints.n_orbitals {
            return Err(CliError::Point(
                p.label,
                format!("spaces need {} orbitals, FCIDUMP has {}", spaces.n_orbitals(), ints.n_orbitals),
            ));
        }
        if self.gamma4.mode == Gamma4Mode::None && spaces.n_active_electrons > 3 {
            return Err(CliError::Point(
                p.label,
                format!("gamma4 mode none with {} active electrons (at most 3)", spaces.n_active_electrons),
            ));
        }
        Ok(PointInput { label: p.label, ints, spaces })
    }
}

/// 0-based reorder vector from the configured lists, if any.
fn orbital_order(s: &SpacesSpec, n: usize) -> Result<Option<Vec<usize>>, String> {
    let zero_based = |v: &[usize]| -> Result<Vec<usize>, String> {
        v.iter().map(|&i| if i == 0 || i > n { Err(format!("orbital {i} outside 1..={n}")) } else { Ok(i - 1) }).collect()
    };
    match (&s.orbital_order, &s.active_orbitals) {
        (Some(_), Some(_)) => Err("give orbital_order or active_orbitals, not both".into()),
        (Some(o), None) => Ok(Some(zero_based(o)?)),
        (None, Some(a)) => {
            if a.len() != s.n_active {
                return Err(format!("{} active orbitals listed, n_active = {}", a.len(), s.n_active));
            }
            let active = zero_based(a)?;
            let rest: Vec<usize> = (0..n).filter(|i| !active.contains(i)).collect();
            if s.n_core > rest.len() {
                return Err("not enough orbitals for the core".into());
            }
            let mut order: Vec<usize> = rest[..s.n_core].to_vec();
            order.extend(&active);
            order.extend(&rest[s.n_core..]);
            Ok(Some(order))
        }
        (None, None) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spaces(active: Option<Vec<usize>>, n_core: usize) -> SpacesSpec {
        SpacesSpec {
            n_core,
            n_active: active.as_ref().map_or(2, Vec::len),
            n_virtual: None,
            electrons: None,
            spin_2s: None,
            orbital_order: None,
            active_orbitals: active,
        }
    }

    #[test]
    fn active_list_places_core_first() {
        let o = orbital_order(&spaces(Some(vec![2, 4]), 1), 5).unwrap().unwrap();
        assert_eq!(o, vec![0, 1, 3, 2, 4]);
    }

    #[test]
    fn bad_orbital_lists_are_rejected() {
        assert!(orbital_order(&spaces(Some(vec![0, 1]), 0), 4).is_err());
        assert!(orbital_order(&spaces(Some(vec![5, 1]), 0), 4).is_err());
    }

    #[test]
    fn defaults_fill_missing_sections() {
        let c = RunConfig::from_toml(
            "[[points]]\nlabel = 1.0\nfcidump = \"a\"\n[spaces]\nn_core = 0\nn_active = 2\n",
            Path::new("/tmp"),
        )
        .unwrap();
        assert_eq!(c.gamma4.mode, Gamma4Mode::Cu4);
        assert_eq!(c.measurement.strategy, Strategy::GeneralCommuting);
        assert_eq!(c.resolve(Path::new("a")), PathBuf::from("/tmp/a"));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let r = RunConfig::from_toml(
            "[[points]]\nlabel = 1.0\nfcidump = \"a\"\n[spaces]\nn_core = 0\nn_active = 2\nbogus = 1\n",
            Path::new("."),
        );
        assert!(r.is_err());
    }
}

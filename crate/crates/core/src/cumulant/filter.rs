//! Hybrid four-body tensors: CU(4) everywhere except at the elements it
//! predicts to be non-zero, which are taken exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{cu4_gamma4, symmetrize_gamma4};
use crate::error::{contract, Error, Result};
use crate::rdm::{
    canonical, pdm4_from_rdms, rdm4_from_pdm4, statevector_pdm4, statevector_rdms, ElementKey, Kind, RdmSet,
};
use crate::sim::StateVector;
use crate::tensor::Tensor;

pub const DEFAULT_THRESHOLD: f64 = 1e-16;

/// `mask[i] = |source[i]| > threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsityMask {
    pub threshold: f64,
    pub n: usize,
    pub rank: usize,
    pub mask: Vec<bool>,
}

impl SparsityMask {
    pub fn new(source: &Tensor, threshold: f64) -> Self {
        SparsityMask {
            threshold,
            n: source.n(),
            rank: source.rank(),
            mask: source.data().iter().map(|x| x.abs() > threshold).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn density(&self) -> f64 {
        if self.mask.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.mask.len() as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub threshold: f64,
    pub size: usize,
    pub nonzero: usize,
    pub density: f64,
    /// `(lower, upper, count)` per decade of `|x|`; the first bucket holds
    /// everything at or below the threshold.
    pub histogram: Vec<(f64, f64, usize)>,
}

impl SparsityReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("threshold,density,bucket_lower,bucket_upper,count\n");
        for (lo, hi, c) in &self.histogram {
            s.push_str(&format!("{:e},{:.6},{:e},{:e},{}\n", self.threshold, self.density, lo, hi, c));
        }
        s
    }
}

pub fn sparsity_report(t: &Tensor, threshold: f64) -> SparsityReport {
    let mask = SparsityMask::new(t, threshold);
    let lo_exp = threshold.max(f64::MIN_POSITIVE).log10().floor() as i32;
    let hi_exp = t.max_abs().max(threshold).log10().floor() as i32;
    let mut histogram = vec![(0.0, threshold, 0usize)];
    for e in lo_exp..=hi_exp {
        histogram.push((10f64.powi(e).max(threshold), 10f64.powi(e + 1), 0));
    }
    for x in t.data().iter().map(|x| x.abs()) {
        if x <= threshold {
            histogram[0].2 += 1;
        } else {
            let b = ((x.log10().floor() as i32 - lo_exp).max(0) as usize + 1).min(histogram.len() - 1);
            histogram[b].2 += 1;
        }
    }
    SparsityReport { threshold, size: t.len(), nonzero: mask.count(), density: mask.density(), histogram }
}

/// Supplier of exact four-body elements, `idx` in `[p,r,t,v,q,s,u,w]` order.
pub trait ElementOracle: Sync {
    fn gamma4(&self, idx: &[usize; 8]) -> Result<f64>;
    fn pdm4(&self, idx: &[usize; 8]) -> Result<f64>;
}

/// Dense exact tensors, e.g. from a statevector.
#[derive(Clone, Debug)]
pub struct ExactTensors {
    pub gamma4: Tensor,
    pub pdm4: Tensor,
}

impl ExactTensors {
    pub fn from_state(state: &StateVector, n_active: usize) -> Result<Self> {
        let r = statevector_rdms(state, n_active, 4)?;
        Ok(ExactTensors { gamma4: r.gamma4.expect("rank 4 requested"), pdm4: statevector_pdm4(state, n_active)? })
    }
}

impl ElementOracle for ExactTensors {
    fn gamma4(&self, idx: &[usize; 8]) -> Result<f64> {
        if idx.iter().any(|&i| i >= self.gamma4.n()) {
            return Err(Error::Bounds(format!("{idx:?}")));
        }
        Ok(self.gamma4.get(idx))
    }
    fn pdm4(&self, idx: &[usize; 8]) -> Result<f64> {
        if idx.iter().any(|&i| i >= self.pdm4.n()) {
            return Err(Error::Bounds(format!("{idx:?}")));
        }
        Ok(self.pdm4.get(idx))
    }
}

/// Element values keyed canonically, e.g. from a measurement plan.
#[derive(Clone, Debug, Default)]
pub struct EstimatedElements {
    pub values: BTreeMap<ElementKey, f64>,
    pub zeros: BTreeSet<ElementKey>,
}

impl EstimatedElements {
    fn lookup(&self, kind: Kind, idx: &[usize; 8]) -> Result<f64> {
        let key = canonical(kind, idx);
        if self.zeros.contains(&key) {
            return Ok(0.0);
        }
        self.values.get(&key).copied().ok_or_else(|| Error::Contract(format!("no estimate for {kind:?} {idx:?}")))
    }
}

impl ElementOracle for EstimatedElements {
    fn gamma4(&self, idx: &[usize; 8]) -> Result<f64> {
        self.lookup(Kind::Rdm, idx)
    }
    fn pdm4(&self, idx: &[usize; 8]) -> Result<f64> {
        self.lookup(Kind::Pdm, idx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterVariant {
    RdmFiltered,
    PdmFiltered,
}

/// Which tensor decides the replaced elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskSource {
    #[default]
    Cu4,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterOptions {
    pub threshold: f64,
    pub mask_source: MaskSource,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions { threshold: DEFAULT_THRESHOLD, mask_source: MaskSource::Cu4 }
    }
}

#[derive(Clone, Debug)]
pub struct FilteredGamma4 {
    pub gamma4: Tensor,
    pub replaced: usize,
    pub replaced_fraction: f64,
}

fn replace(
    approx: &mut Tensor,
    opts: &FilterOptions,
    exact: impl Fn(&[usize; 8]) -> Result<f64> + Sync,
) -> Result<usize> {
    let decider: Tensor = match opts.mask_source {
        MaskSource::Cu4 => approx.clone(),
        MaskSource::Exact => {
            let mut t = Tensor::zeros(approx.n(), 8);
            let mut idx = [0usize; 8];
            for off in 0..t.len() {
                t.unravel(off, &mut idx);
                t.data_mut()[off] = exact(&idx).map_err(|e| with_index(e, &idx))?;
            }
            t
        }
    };
    let mask = SparsityMask::new(&decider, opts.threshold);
    let mut idx = [0usize; 8];
    for (off, _) in mask.mask.iter().enumerate().filter(|(_, &m)| m) {
        decider.unravel(off, &mut idx);
        approx.data_mut()[off] = exact(&idx).map_err(|e| with_index(e, &idx))?;
    }
    Ok(mask.count())
}

fn with_index(e: Error, idx: &[usize; 8]) -> Error {
    Error::Contract(format!("exact element {idx:?} unavailable: {e}"))
}

/// CU(4) tensor in the variant's representation.
fn cu4_tensor(rdms: &RdmSet, variant: FilterVariant) -> Result<Tensor> {
    if rdms.gamma3.is_none() {
        return contract("filtered Γ4 needs gamma3");
    }
    let cu4 = cu4_gamma4(rdms)?;
    match variant {
        FilterVariant::RdmFiltered => Ok(cu4),
        FilterVariant::PdmFiltered => {
            let mut with_cu4 = rdms.clone();
            with_cu4.gamma4 = Some(cu4);
            pdm4_from_rdms(&with_cu4)
        }
    }
}

/// Canonical keys of the elements a CU(4)-masked filter replaces: the
/// four-body elements that have to be measured.
pub fn significant_elements(rdms: &RdmSet, variant: FilterVariant, threshold: f64) -> Result<BTreeSet<ElementKey>> {
    let t = cu4_tensor(rdms, variant)?;
    let kind = match variant {
        FilterVariant::RdmFiltered => Kind::Rdm,
        FilterVariant::PdmFiltered => Kind::Pdm,
    };
    let mut idx = [0usize; 8];
    let mut out = BTreeSet::new();
    for (off, x) in t.data().iter().enumerate() {
        if x.abs() > threshold {
            t.unravel(off, &mut idx);
            out.insert(canonical(kind, &idx));
        }
    }
    Ok(out)
}

/// CU(4) Γ4 with its significant elements replaced by exact values, in the
/// RDM or the PDM representation, then symmetrized.
pub fn filtered_gamma4(
    rdms: &RdmSet,
    oracle: &dyn ElementOracle,
    variant: FilterVariant,
    opts: &FilterOptions,
) -> Result<FilteredGamma4> {
    let mut t = cu4_tensor(rdms, variant)?;
    let size = t.len();
    let (gamma4, replaced) = match variant {
        FilterVariant::RdmFiltered => {
            let k = replace(&mut t, opts, |i| oracle.gamma4(i))?;
            (t, k)
        }
        FilterVariant::PdmFiltered => {
            let k = replace(&mut t, opts, |i| oracle.pdm4(i))?;
            (rdm4_from_pdm4(rdms, &t)?, k)
        }
    };
    Ok(FilteredGamma4 {
        gamma4: symmetrize_gamma4(&gamma4),
        replaced,
        replaced_fraction: if size == 0 { 0.0 } else { replaced as f64 / size as f64 },
    })
}

//! Plan execution (exact or sampled) and tensor assembly.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::observables::{canonical, ElementKey, Kind};
use super::plan::{MeasurementPlan, MeasurementSet};
use super::RdmSet;
use crate::error::{contract, Error, Result};
use crate::ops::PauliWord;
use crate::sim::{sample, NoiseModel, ShotTable, StateVector};
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Exact,
    Shots { shots: u64, seed: u64, noise: Option<NoiseModel> },
}

#[derive(Clone, Debug, Default)]
pub struct Estimates {
    pub values: BTreeMap<ElementKey, f64>,
    pub word_values: BTreeMap<PauliWord, f64>,
    /// Fraction of shots kept by post-selection, per set (1 in exact mode).
    pub retained: Vec<f64>,
    /// Elements depending on a set whose shots were all discarded.
    pub missing: BTreeSet<ElementKey>,
}

impl Estimates {
    pub fn mean_retained(&self) -> f64 {
        if self.retained.is_empty() {
            1.0
        } else {
            self.retained.iter().sum::<f64>() / self.retained.len() as f64
        }
    }
}

fn parity(bits: u64, mask: u64) -> f64 {
    if (bits & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn set_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Word values of one set, or `None` when post-selection left no shots.
fn run_set(
    set: &MeasurementSet,
    index: usize,
    state: &StateVector,
    mode: &Mode,
    pmsv: bool,
) -> Result<(Option<Vec<f64>>, f64)> {
    match *mode {
        Mode::Exact => {
            let mut rotated = state.clone();
            rotated.apply_circuit(&set.basis_change)?;
            let probs = rotated.probabilities();
            let vals = set
                .words
                .iter()
                .map(|fw| fw.sign * probs.iter().enumerate().map(|(b, p)| p * parity(b as u64, fw.z_mask)).sum::<f64>())
                .collect();
            Ok((Some(vals), 1.0))
        }
        Mode::Shots { shots, seed, noise } => {
            let mut rng = set_rng(seed, index);
            let table = sample(state, &set.basis_change, shots, noise.as_ref(), &mut rng)?;
            let kept: ShotTable = if pmsv && !set.syndromes.is_empty() {
                table.filtered(|b| set.syndromes.iter().all(|(fw, v)| fw.sign * parity(b, fw.z_mask) == *v as f64))
            } else {
                table
            };
            let frac = kept.total_shots as f64 / shots as f64;
            if kept.total_shots == 0 {
                return Ok((None, 0.0));
            }
            let vals = set.words.iter().map(|fw| fw.sign * kept.parity_mean(fw.z_mask).unwrap_or(0.0)).collect();
            Ok((Some(vals), frac))
        }
    }
}

/// Estimate every planned element on `state`. With `pmsv`, shots whose
/// symmetry syndromes differ from the sector are discarded.
pub fn execute_plan(plan: &MeasurementPlan, state: &StateVector, mode: &Mode, pmsv: bool) -> Result<Estimates> {
    if state.n_qubits() != plan.n_qubits {
        return contract(format!("{}-qubit state for a {}-qubit plan", state.n_qubits(), plan.n_qubits));
    }
    let results: Vec<(Option<Vec<f64>>, f64)> = plan
        .sets
        .par_iter()
        .enumerate()
        .map(|(i, s)| run_set(s, i, state, mode, pmsv))
        .collect::<Result<_>>()?;
    let mut est = Estimates::default();
    let mut lost: BTreeSet<PauliWord> = BTreeSet::new();
    for (set, (vals, frac)) in plan.sets.iter().zip(results) {
        est.retained.push(frac);
        match vals {
            Some(v) => {
                for (fw, x) in set.words.iter().zip(v) {
                    est.word_values.insert(fw.word, x);
                }
            }
            None => lost.extend(set.words.iter().map(|fw| fw.word)),
        }
    }
    for (key, terms) in &plan.elements {
        let mut v = 0.0;
        let mut ok = true;
        for (w, c) in terms {
            if *w == PauliWord::IDENTITY {
                v += c;
            } else if plan.vanishing_words.contains(w) {
            } else if let Some(x) = est.word_values.get(w) {
                v += c * x;
            } else {
                ok = false;
                if !lost.contains(w) {
                    return Err(Error::Internal(format!("word {} missing from the plan", w.to_letters(plan.n_qubits))));
                }
            }
        }
        if ok {
            est.values.insert(key.clone(), v);
        } else {
            est.missing.insert(key.clone());
        }
    }
    Ok(est)
}

fn fill(
    kind: Kind,
    rank: usize,
    n: usize,
    values: &BTreeMap<ElementKey, f64>,
    zeros: &BTreeSet<ElementKey>,
) -> Result<Tensor> {
    let mut t = Tensor::zeros(n, 2 * rank);
    let mut idx = vec![0usize; 2 * rank];
    for off in 0..t.len() {
        t.unravel(off, &mut idx);
        let key = canonical(kind, &idx);
        if zeros.contains(&key) {
            continue;
        }
        match values.get(&key) {
            Some(&v) => t.data_mut()[off] = v,
            None => return contract(format!("no estimate for {kind:?} element {:?}", key.idx)),
        }
    }
    Ok(t)
}

/// Fill full tensors from canonical estimates by symmetry fan-out. Ranks are
/// taken from the keys present; Γ1 and Γ2 are required.
pub fn assemble_rdms(
    values: &BTreeMap<ElementKey, f64>,
    zeros: &BTreeSet<ElementKey>,
    n_active: usize,
    n_electrons: usize,
) -> Result<RdmSet> {
    let has = |kind: Kind, k: usize| values.keys().chain(zeros.iter()).any(|e| e.kind == kind && e.rank() == k);
    if !has(Kind::Rdm, 1) || !has(Kind::Rdm, 2) {
        return contract("gamma1 and gamma2 estimates are required");
    }
    let opt = |kind: Kind, k: usize| -> Result<Option<Tensor>> {
        if has(kind, k) {
            Ok(Some(fill(kind, k, n_active, values, zeros)?))
        } else {
            Ok(None)
        }
    };
    Ok(RdmSet {
        n_active,
        n_electrons,
        gamma1: fill(Kind::Rdm, 1, n_active, values, zeros)?,
        gamma2: fill(Kind::Rdm, 2, n_active, values, zeros)?,
        gamma3: opt(Kind::Rdm, 3)?,
        gamma4: opt(Kind::Rdm, 4)?,
        pdm4: opt(Kind::Pdm, 4)?,
    })
}

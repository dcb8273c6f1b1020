//! Partitioning of observable words into jointly measurable sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::observables::{ElementKey, ObservableSet};
use crate::error::{contract, Error, Result};
use crate::ops::{PauliWord, SymmetryGroup};
use crate::sim::clifford::{conjugate, diagonalizing_circuit, qubitwise_circuit};
use crate::sim::Circuit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Words in a set commute; Clifford basis change.
    GeneralCommuting,
    /// Words in a set commute qubit by qubit; single-qubit basis change.
    Qubitwise,
}

/// A word as read in its set's measurement frame: `P = sign · C† Z_mask C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameWord {
    pub word: PauliWord,
    pub sign: f64,
    pub z_mask: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub words: Vec<FrameWord>,
    pub basis_change: Circuit,
    /// Symmetry generators readable in this frame, with their sector values.
    pub syndromes: Vec<(FrameWord, i8)>,
}

#[derive(Clone, Debug)]
pub struct MeasurementPlan {
    pub n_qubits: usize,
    pub strategy: Strategy,
    pub sets: Vec<MeasurementSet>,
    /// Element → `[(word, coefficient)]`; the identity word is kept as is.
    pub elements: BTreeMap<ElementKey, Vec<(PauliWord, f64)>>,
    pub zeros: BTreeSet<ElementKey>,
    /// Words known to vanish by symmetry and therefore not measured.
    pub vanishing_words: BTreeSet<PauliWord>,
}

impl MeasurementPlan {
    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn n_words(&self) -> usize {
        self.sets.iter().map(|s| s.words.len()).sum()
    }

    /// Exhaustive pairwise compatibility check of every set.
    pub fn verify(&self) -> Result<()> {
        for (i, s) in self.sets.iter().enumerate() {
            for (a, x) in s.words.iter().enumerate() {
                for y in &s.words[a + 1..] {
                    let ok = match self.strategy {
                        Strategy::GeneralCommuting => x.word.commutes(&y.word),
                        Strategy::Qubitwise => x.word.qubitwise_commutes(&y.word),
                    };
                    if !ok {
                        return Err(Error::Internal(format!("set {i} holds incompatible words")));
                    }
                }
                let (sign, img) = conjugate(&s.basis_change, x.word)?;
                if img.x != 0 || img.z != x.z_mask || sign != x.sign {
                    return Err(Error::Internal(format!("set {i}: frame of {} is stale", x.word.to_letters(self.n_qubits))));
                }
            }
        }
        Ok(())
    }
}

fn compatible(strategy: Strategy, a: &PauliWord, b: &PauliWord) -> bool {
    match strategy {
        Strategy::GeneralCommuting => a.commutes(b),
        Strategy::Qubitwise => a.qubitwise_commutes(b),
    }
}

fn frame(c: &Circuit, w: PauliWord) -> Result<FrameWord> {
    let (sign, img) = conjugate(c, w)?;
    if img.x != 0 {
        return Err(Error::Internal(format!("word {} not diagonal after basis change", w.to_letters(c.n_qubits))));
    }
    Ok(FrameWord { word: w, sign, z_mask: img.z })
}

/// Greedy largest-first colouring of the incompatibility graph, ties broken
/// by word order. With a symmetry group, words that break a symmetry are
/// dropped (zero expectation) and every generator compatible with a set is
/// added to its frame for post-selection.
pub fn plan_measurements(
    obs: &ObservableSet,
    strategy: Strategy,
    symmetry: Option<&SymmetryGroup>,
) -> Result<MeasurementPlan> {
    let n_qubits = 2 * obs.n_active;
    let (sets, vanishing) = partition_words(n_qubits, &obs.words(), strategy, symmetry)?;
    let elements = obs
        .entries
        .iter()
        .map(|(k, o)| (k.clone(), o.terms.iter().map(|(w, c)| (*w, *c)).collect()))
        .collect();
    let plan = MeasurementPlan {
        n_qubits,
        strategy,
        sets,
        elements,
        zeros: obs.zeros.clone(),
        vanishing_words: vanishing,
    };
    plan.verify()?;
    Ok(plan)
}

/// Measurement sets for an arbitrary word list (identity excluded by the
/// caller), plus the words dropped as symmetry-forbidden.
pub fn partition_words(
    n_qubits: usize,
    all_words: &BTreeSet<PauliWord>,
    strategy: Strategy,
    symmetry: Option<&SymmetryGroup>,
) -> Result<(Vec<MeasurementSet>, BTreeSet<PauliWord>)> {
    if let Some(g) = symmetry {
        if g.n_qubits != n_qubits {
            return contract(format!("symmetry group on {} qubits, register has {n_qubits}", g.n_qubits));
        }
    }
    let mut vanishing = BTreeSet::new();
    let words: Vec<PauliWord> = all_words
        .iter()
        .copied()
        .filter(|w| match symmetry {
            Some(g) if !g.commutes_with(w) => {
                vanishing.insert(*w);
                false
            }
            _ => true,
        })
        .collect();
    let m = words.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            if !compatible(strategy, &words[i], &words[j]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| adj[b].len().cmp(&adj[a].len()).then(words[a].cmp(&words[b])));
    let mut color = vec![usize::MAX; m];
    let mut n_colors = 0;
    let mut used = Vec::new();
    for &v in &order {
        used.clear();
        used.resize(n_colors + 1, false);
        for &u in &adj[v] {
            if color[u] != usize::MAX {
                used[color[u]] = true;
            }
        }
        let c = used.iter().position(|&x| !x).expect("one spare colour");
        color[v] = c;
        n_colors = n_colors.max(c + 1);
    }
    let mut groups: Vec<Vec<PauliWord>> = vec![Vec::new(); n_colors];
    for &v in &order {
        groups[color[v]].push(words[v]);
    }
    let mut sets = Vec::with_capacity(n_colors);
    for g in groups {
        let gens: Vec<(PauliWord, i8)> = match symmetry {
            Some(sym) => sym
                .generators
                .iter()
                .zip(&sym.sector)
                .filter(|(s, _)| g.iter().all(|w| compatible(strategy, w, s)))
                .map(|(s, &v)| (*s, v))
                .collect(),
            None => Vec::new(),
        };
        let mut all = g.clone();
        all.extend(gens.iter().map(|(s, _)| *s));
        let circ = match strategy {
            Strategy::GeneralCommuting => diagonalizing_circuit(n_qubits, &all)?,
            Strategy::Qubitwise => qubitwise_circuit(n_qubits, &all)?,
        };
        let words = g.iter().map(|w| frame(&circ, *w)).collect::<Result<Vec<_>>>()?;
        let syndromes = gens.iter().map(|(s, v)| Ok((frame(&circ, *s)?, *v))).collect::<Result<Vec<_>>>()?;
        sets.push(MeasurementSet { words, basis_change: circ, syndromes });
    }
    Ok((sets, vanishing))
}

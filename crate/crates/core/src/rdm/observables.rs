//! Element observables of spin-traced RDMs and PDMs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::ops::{excitation_product, jordan_wigner, spin_traced_excitation, symmetry_vanishes, PauliSum, SymmetryGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    /// `Γ_k[P; Q] = ⟨Σ_σ a†_{p1}…a†_{pk} a_{qk}…a_{q1}⟩`
    Rdm,
    /// `⟨E^{p1}_{q1} … E^{pk}_{qk}⟩`
    Pdm,
}

/// Tensor element: kind plus indices `(upper…, lower…)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementKey {
    pub kind: Kind,
    pub idx: Vec<usize>,
}

impl ElementKey {
    pub fn rank(&self) -> usize {
        self.idx.len() / 2
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Every index tuple carrying the same value as `idx` (real states).
pub fn equivalent_tuples(kind: Kind, idx: &[usize]) -> Vec<Vec<usize>> {
    let k = idx.len() / 2;
    let (up, low) = idx.split_at(k);
    let mut out = Vec::new();
    match kind {
        Kind::Rdm => {
            for perm in permutations(k) {
                let u: Vec<usize> = perm.iter().map(|&i| up[i]).collect();
                let l: Vec<usize> = perm.iter().map(|&i| low[i]).collect();
                out.push([u.clone(), l.clone()].concat());
                out.push([l, u].concat());
            }
        }
        Kind::Pdm => {
            out.push(idx.to_vec());
            // (E^{p1}_{q1} … E^{pk}_{qk})† = E^{qk}_{pk} … E^{q1}_{p1}
            let u: Vec<usize> = low.iter().rev().copied().collect();
            let l: Vec<usize> = up.iter().rev().copied().collect();
            out.push([u, l].concat());
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn canonical(kind: Kind, idx: &[usize]) -> ElementKey {
    let best = equivalent_tuples(kind, idx).into_iter().next().expect("orbit contains the tuple itself");
    ElementKey { kind, idx: best }
}

/// Hermitian qubit observable whose expectation on a real state is the element.
pub fn element_observable(n_active: usize, key: &ElementKey) -> Result<PauliSum> {
    let k = key.rank();
    let (up, low) = key.idx.split_at(k);
    let op = match key.kind {
        Kind::Rdm => spin_traced_excitation(up, low),
        Kind::Pdm => excitation_product(up, low),
    };
    let mut obs = jordan_wigner(&op, 2 * n_active)?.hermitian_part();
    obs.prune();
    Ok(obs)
}

/// Observables of all canonical elements of the requested tensors.
#[derive(Clone, Debug, Default)]
pub struct ObservableSet {
    pub n_active: usize,
    pub entries: BTreeMap<ElementKey, PauliSum>,
    /// Canonical elements known to vanish without measurement.
    pub zeros: BTreeSet<ElementKey>,
}

impl ObservableSet {
    /// Distinct non-identity words over all entries.
    pub fn words(&self) -> BTreeSet<crate::ops::PauliWord> {
        self.entries.values().flat_map(|o| o.words().copied()).filter(|w| *w != crate::ops::PauliWord::IDENTITY).collect()
    }

    fn insert(&mut self, key: ElementKey, filter: Option<&SymmetryGroup>) -> Result<()> {
        if self.entries.contains_key(&key) || self.zeros.contains(&key) {
            return Ok(());
        }
        let obs = element_observable(self.n_active, &key)?;
        if obs.is_empty() || filter.is_some_and(|g| symmetry_vanishes(&obs, g)) {
            self.zeros.insert(key);
        } else {
            self.entries.insert(key, obs);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: ObservableSet) {
        self.entries.extend(other.entries);
        self.zeros.extend(other.zeros);
    }
}

/// Canonical element observables for `ranks` of the given kind. With a
/// symmetry group, elements whose every word breaks a symmetry are recorded
/// as structural zeros instead of observables.
pub fn rdm_observables(
    n_active: usize,
    ranks: &[usize],
    kind: Kind,
    filter: Option<&SymmetryGroup>,
) -> Result<ObservableSet> {
    if ranks.is_empty() {
        return contract("at least one RDM rank is required");
    }
    if let Some(&k) = ranks.iter().find(|&&k| !(1..=4).contains(&k)) {
        return contract(format!("RDM rank {k} outside 1..=4"));
    }
    if let Some(g) = filter {
        if g.n_qubits != 2 * n_active {
            return contract(format!("symmetry group on {} qubits, register has {}", g.n_qubits, 2 * n_active));
        }
    }
    let mut set = ObservableSet { n_active, ..Default::default() };
    for &k in ranks {
        let total = n_active.pow(2 * k as u32);
        let mut idx = vec![0usize; 2 * k];
        for off in 0..total {
            let mut o = off;
            for d in (0..2 * k).rev() {
                idx[d] = o % n_active;
                o /= n_active;
            }
            let key = canonical(kind, &idx);
            if key.idx != idx {
                continue;
            }
            set.insert(key, filter)?;
        }
    }
    Ok(set)
}

/// Observables for an explicit element list; keys are canonicalized.
pub fn element_observables<'a>(
    n_active: usize,
    keys: impl IntoIterator<Item = &'a ElementKey>,
    filter: Option<&SymmetryGroup>,
) -> Result<ObservableSet> {
    if let Some(g) = filter {
        if g.n_qubits != 2 * n_active {
            return contract(format!("symmetry group on {} qubits, register has {}", g.n_qubits, 2 * n_active));
        }
    }
    let mut set = ObservableSet { n_active, ..Default::default() };
    for key in keys {
        if key.idx.iter().any(|&i| i >= n_active) || key.idx.len() % 2 != 0 {
            return contract(format!("element {:?} outside a {n_active}-orbital register", key.idx));
        }
        set.insert(canonical(key.kind, &key.idx), filter)?;
    }
    Ok(set)
}

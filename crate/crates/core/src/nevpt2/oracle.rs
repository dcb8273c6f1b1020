//! Perturbers built explicitly as determinant expansions.

use std::collections::{BTreeMap, HashMap};

use super::{Class, DyallContext, LabelTerm, Nevpt2Result};
use crate::chem::{MOIntegrals, OrbitalSpaces};
use crate::ci::{CasciSolution, SpinFreeHamiltonian};
use crate::error::{contract, Error, Result};
use crate::ops::fermion::{apply_ladders, Ladder};
use crate::tensor::Tensor;

/// Largest `|Ψ0| · n⁴` the oracle accepts.
const WORK_BUDGET: usize = 400_000_000;

fn one_rdm(n: usize, psi: &[(u64, f64)]) -> Tensor {
    let index: HashMap<u64, f64> = psi.iter().copied().collect();
    let mut g = Tensor::zeros(n, 2);
    for &(d, c) in psi {
        for t in 0..n {
            for u in 0..n {
                for s in 0..2 {
                    if let Some((sg, d2)) = apply_ladders(&[Ladder::create(2 * t + s), Ladder::annihilate(2 * u + s)], d) {
                        if let Some(&c2) = index.get(&d2) {
                            g.add(&[t, u], sg * c * c2);
                        }
                    }
                }
            }
        }
    }
    g
}

/// Apply an active-space Hamiltonian to the active segment of full
/// determinants; core and virtual bits are spectators.
fn apply_active(ham: &SpinFreeHamiltonian, shift: u32, vec: &HashMap<u64, f64>) -> HashMap<u64, f64> {
    let mask = (1u64 << (2 * ham.n)) - 1;
    let mut out = HashMap::new();
    let mut tmp = HashMap::new();
    for (&d, &c) in vec {
        let outer = d & !(mask << shift);
        tmp.clear();
        ham.apply_det((d >> shift) & mask, c, &mut tmp);
        for (&a, &v) in &tmp {
            *out.entry(outer | a << shift).or_insert(0.0) += v;
        }
    }
    out
}

fn dot(a: &HashMap<u64, f64>, b: &HashMap<u64, f64>) -> f64 {
    a.iter().map(|(k, v)| v * b.get(k).copied().unwrap_or(0.0)).sum()
}

/// Brute-force SC-NEVPT2 from the CASCI vector, without RDMs.
pub fn sc_nevpt2_oracle(ints: &MOIntegrals, spaces: &OrbitalSpaces, casci: &CasciSolution) -> Result<Nevpt2Result> {
    spaces.validate()?;
    let n = ints.n_orbitals;
    if casci.n_active != spaces.n_active {
        return contract(format!("CI vector has {} active orbitals, spaces {}", casci.n_active, spaces.n_active));
    }
    if 2 * n > 62 {
        return Err(Error::Bounds(format!("{n} orbitals exceed the determinant register")));
    }
    let work = casci.dets.len().saturating_mul(n.pow(4));
    if work > WORK_BUDGET {
        return Err(Error::OverBudget { dim: work, budget: WORK_BUDGET });
    }
    let nc = spaces.n_core;
    let na = spaces.n_active;
    let psi = casci.as_sparse();
    let ctx = DyallContext::new(ints, spaces, &one_rdm(na, &psi))?;

    let shift = 2 * nc as u32;
    let core_bits = (1u64 << shift) - 1;
    let psi0: Vec<(u64, f64)> = psi.iter().map(|&(d, c)| (core_bits | d << shift, c)).collect();
    let mut full = SpinFreeHamiltonian::from_integrals(&ctx.ints);
    full.constant = 0.0;
    let h_psi = full.apply(&psi0);

    let h_act = SpinFreeHamiltonian { n: na, h1: ctx.h_eff.clone(), eri: ctx.eri_act.clone(), constant: 0.0 };
    let psi0_map: HashMap<u64, f64> = psi.iter().map(|&(d, c)| (d << shift, c)).collect();
    let e_act = dot(&psi0_map, &apply_active(&h_act, shift, &psi0_map));

    let v0 = nc + na;
    let mut groups: BTreeMap<(Vec<usize>, Vec<usize>), HashMap<u64, f64>> = BTreeMap::new();
    for (&d, &c) in &h_psi {
        let mut holes = Vec::new();
        for i in 0..nc {
            for s in 0..2 {
                if d >> (2 * i + s) & 1 == 0 {
                    holes.push(i);
                }
            }
        }
        let mut parts = Vec::new();
        for r in v0..n {
            for s in 0..2 {
                if d >> (2 * r + s) & 1 == 1 {
                    parts.push(r);
                }
            }
        }
        if holes.is_empty() && parts.is_empty() {
            continue;
        }
        groups.entry((holes, parts)).or_default().insert(d, c);
    }

    let mut per_class: BTreeMap<Class, Vec<LabelTerm>> = BTreeMap::new();
    for ((holes, parts), vec) in groups {
        let class = Class::from_counts(holes.len(), parts.len())
            .ok_or_else(|| Error::Internal(format!("H|Ψ0⟩ component with {} holes, {} particles", holes.len(), parts.len())))?;
        let norm = vec.values().map(|c| c * c).sum::<f64>();
        let koopmans = dot(&vec, &apply_active(&h_act, shift, &vec)) - e_act * norm;
        let orbital_gap = ctx.orbital_gap(&holes, &parts);
        per_class.entry(class).or_default().push(LabelTerm { label: (holes, parts), norm, koopmans, orbital_gap });
    }
    Ok(Nevpt2Result::assemble(per_class.into_iter().collect(), casci.total_energy(), "determinants"))
}

//! First-order Trotterized UCCSD on the Jordan–Wigner register.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::ops::fermion::{spin_orbital, FermionOperator, Ladder};
use crate::ops::jw::jordan_wigner;
use crate::ops::pauli::PauliWord;
use crate::sim::{Circuit, Gate, StateVector};

/// One spin-orbital excitation `a†_{c…} a_{…a}` (creators, annihilators).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinExcitation {
    pub creators: Vec<usize>,
    pub annihilators: Vec<usize>,
}

impl SpinExcitation {
    /// Anti-Hermitian generator `τ − τ†`.
    pub fn generator(&self) -> FermionOperator {
        let mut ops: Vec<Ladder> = self.creators.iter().map(|&m| Ladder::create(m)).collect();
        ops.extend(self.annihilators.iter().map(|&m| Ladder::annihilate(m)));
        let mut op = FermionOperator::zero();
        op.push(1.0, ops);
        let dag = op.dagger();
        op.extend(dag.scaled(-1.0));
        op
    }

    fn spin_flipped(&self) -> SpinExcitation {
        let flip = |m: &usize| m ^ 1;
        SpinExcitation {
            creators: self.creators.iter().map(flip).collect(),
            annihilators: self.annihilators.iter().map(flip).collect(),
        }
    }

    fn canonical(mut self) -> SpinExcitation {
        self.creators.sort_unstable();
        self.annihilators.sort_unstable();
        self
    }
}

/// Parameter `k` drives all spin excitations in `groups[k]` with a shared
/// amplitude (a spin-complemented pair, or a single self-conjugate term).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ansatz {
    pub n_qubits: usize,
    pub reference: u64,
    pub groups: Vec<Vec<SpinExcitation>>,
    /// Per parameter: Pauli rotations `(P, c)` realizing `exp(θ·i c P)`.
    rotations: Vec<Vec<(PauliWord, f64)>>,
}

impl Ansatz {
    /// Spin-complemented UCCSD from the `(n_alpha, n_beta)` HF determinant,
    /// singles before doubles, each in lexicographic order.
    pub fn uccsd(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if n_alpha > n_orbitals || n_beta > n_orbitals {
            return contract("more electrons of one spin than orbitals");
        }
        let nq = 2 * n_orbitals;
        let mut reference = 0u64;
        for p in 0..n_alpha {
            reference |= 1 << spin_orbital(p, false);
        }
        for p in 0..n_beta {
            reference |= 1 << spin_orbital(p, true);
        }
        let occ: Vec<usize> = (0..nq).filter(|m| reference >> m & 1 == 1).collect();
        let vir: Vec<usize> = (0..nq).filter(|m| reference >> m & 1 == 0).collect();
        let mut singles = Vec::new();
        for &i in &occ {
            for &a in &vir {
                if i % 2 == a % 2 {
                    singles.push(SpinExcitation { creators: vec![a], annihilators: vec![i] });
                }
            }
        }
        let mut doubles = Vec::new();
        for (x, &i) in occ.iter().enumerate() {
            for &j in &occ[x + 1..] {
                for (y, &a) in vir.iter().enumerate() {
                    for &b in &vir[y + 1..] {
                        let sz_in = (i % 2) + (j % 2);
                        let sz_out = (a % 2) + (b % 2);
                        if sz_in == sz_out {
                            doubles.push(SpinExcitation { creators: vec![b, a], annihilators: vec![j, i] });
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<SpinExcitation>> = Vec::new();
        let mut seen: Vec<SpinExcitation> = Vec::new();
        for e in singles.into_iter().chain(doubles) {
            let key = e.clone().canonical();
            if seen.contains(&key) {
                continue;
            }
            let partner = e.spin_flipped();
            let pkey = partner.clone().canonical();
            seen.push(key.clone());
            if pkey == key {
                groups.push(vec![e]);
            } else {
                seen.push(pkey);
                // spin-flip keeps the reference fixed only for closed shells
                if reference_supports(&partner, reference) {
                    groups.push(vec![e, partner]);
                } else {
                    groups.push(vec![e]);
                }
            }
        }
        let mut rotations = Vec::with_capacity(groups.len());
        for g in &groups {
            let mut rots = Vec::new();
            for e in g {
                let q = jordan_wigner(&e.generator(), nq)?;
                for (w, c) in &q.terms {
                    debug_assert!(c.re.abs() < 1e-12);
                    rots.push((*w, c.im));
                }
            }
            rotations.push(rots);
        }
        Ok(Ansatz { n_qubits: nq, reference, groups, rotations })
    }

    pub fn n_params(&self) -> usize {
        self.groups.len()
    }

    pub fn reference_state(&self) -> StateVector {
        StateVector::basis(self.n_qubits, self.reference)
    }

    /// `(parameter index, rotation angle derivative)` for every rotation gate
    /// after the reference preparation, in circuit order.
    pub(crate) fn gate_map(&self) -> Vec<(usize, f64)> {
        self.rotations
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.iter().map(move |&(_, c)| (k, -2.0 * c)))
            .collect()
    }

    /// Rotation gates only; the reference is prepared separately.
    pub fn rotation_circuit(&self, params: &[f64]) -> Circuit {
        let mut c = Circuit::new(self.n_qubits);
        for (k, rots) in self.rotations.iter().enumerate() {
            for &(w, coef) in rots {
                // exp(θ i c P) = exp(−i(−2cθ)/2 P)
                c.push(Gate::PauliRot(w, -2.0 * coef * params[k]));
            }
        }
        c
    }

    /// Full circuit from `|0…0⟩`: X gates for the reference, then rotations.
    pub fn circuit(&self, params: &[f64]) -> Circuit {
        let mut c = Circuit::new(self.n_qubits);
        for q in 0..self.n_qubits {
            if self.reference >> q & 1 == 1 {
                c.push(Gate::X(q));
            }
        }
        c.extend(&self.rotation_circuit(params));
        c
    }

    pub fn state(&self, params: &[f64]) -> StateVector {
        let mut s = self.reference_state();
        for g in &self.rotation_circuit(params).gates {
            s.apply_gate(g);
        }
        s
    }
}

fn reference_supports(e: &SpinExcitation, reference: u64) -> bool {
    e.annihilators.iter().all(|m| reference >> m & 1 == 1) && e.creators.iter().all(|m| reference >> m & 1 == 0)
}

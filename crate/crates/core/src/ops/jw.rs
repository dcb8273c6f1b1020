//! Jordan–Wigner mapping: mode `k` ↦ qubit `k`, `|1⟩` = occupied.

use num_complex::Complex64;

use super::fermion::{FermionOperator, Ladder};
use super::pauli::{PauliSum, PauliWord, QubitOperator};
use crate::error::{Error, Result};

/// `a†_j = Z_{<j} (X_j − iY_j)/2`, `a_j = Z_{<j} (X_j + iY_j)/2`.
pub fn ladder_image(l: Ladder, n_qubits: usize) -> QubitOperator {
    let j = l.mode;
    let zs = (1u64 << j) - 1;
    let b = 1u64 << j;
    let mut op = QubitOperator::zero(n_qubits);
    op.add_term(PauliWord::new(b, zs), Complex64::new(0.5, 0.0));
    let im = if l.dagger { -0.5 } else { 0.5 };
    op.add_term(PauliWord::new(b, zs | b), Complex64::new(0.0, im));
    op
}

pub fn jordan_wigner(op: &FermionOperator, n_qubits: usize) -> Result<QubitOperator> {
    if n_qubits > 64 {
        return Err(Error::Bounds(format!("{n_qubits} qubits exceeds the 64-qubit word limit")));
    }
    let images: Vec<[QubitOperator; 2]> = (0..n_qubits)
        .map(|m| [ladder_image(Ladder::annihilate(m), n_qubits), ladder_image(Ladder::create(m), n_qubits)])
        .collect();
    let mut out = QubitOperator::zero(n_qubits);
    for t in &op.terms {
        let mut prod = QubitOperator::identity(n_qubits);
        for l in &t.ops {
            if l.mode >= n_qubits {
                return Err(Error::Bounds(format!("mode {} outside {n_qubits}-qubit register", l.mode)));
            }
            prod = prod.mul(&images[l.mode][l.dagger as usize]);
            if prod.terms.is_empty() {
                break;
            }
        }
        out.add_assign(&prod, Complex64::new(t.coeff, 0.0));
    }
    out.prune(1e-13);
    Ok(out)
}

/// Map a Hermitian fermionic operator to a real Pauli observable.
pub fn jw_observable(op: &FermionOperator, n_qubits: usize) -> Result<PauliSum> {
    jordan_wigner(op, n_qubits)?.to_observable(1e-10)
}

/// Qubit image of the active-space Hamiltonian, `e_frozen` on the identity.
pub fn qubit_hamiltonian(h: &crate::chem::ActiveHamiltonian) -> Result<PauliSum> {
    jw_observable(&super::fermion::hamiltonian_operator(h), 2 * h.n_active)
}

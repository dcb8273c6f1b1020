//! Operator algebra: Pauli words and sums, fermionic operators, the
//! Jordan–Wigner mapping and Z₂ symmetry handling.

pub mod fermion;
pub mod jw;
pub mod pauli;
pub mod symmetry;

pub use fermion::{
    excitation_product, hamiltonian_operator, spin_orbital, spin_traced_excitation, FermionOperator, Ladder,
};
pub use jw::{jordan_wigner, jw_observable, qubit_hamiltonian};
pub use pauli::{PauliSum, PauliWord, QubitOperator};
pub use symmetry::{find_z2_symmetries, in_span, symmetry_vanishes, SymmetryGroup, Tapering};

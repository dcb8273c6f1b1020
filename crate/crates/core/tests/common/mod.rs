#![allow(dead_code)]

use std::path::PathBuf;

use qrdm_core::chem::{build_active_hamiltonian, parse_fcidump, ActiveHamiltonian, MOIntegrals, OrbitalSpaces};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn load(rel: &str) -> MOIntegrals {
    let text = std::fs::read_to_string(data_dir().join(rel)).unwrap();
    parse_fcidump(&text).unwrap().0
}

pub fn reference(rel: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(data_dir().join(rel)).unwrap()).unwrap()
}

/// H2/6-31G at the given bond label with a (2,2) active space.
pub fn h2(bond: &str) -> (MOIntegrals, OrbitalSpaces, ActiveHamiltonian) {
    let ints = load(&format!("h2/h2_{bond}.fcidump"));
    let spaces = OrbitalSpaces::new(0, 2, 2, 2, 0).unwrap();
    let h = build_active_hamiltonian(&ints, &spaces).unwrap();
    (ints, spaces, h)
}

/// Lowest eigenvalue of a real symmetric dense matrix.
pub fn min_eig(m: Vec<f64>, dim: usize) -> f64 {
    let m = nalgebra::DMatrix::from_row_slice(dim, dim, &m);
    nalgebra::SymmetricEigen::new(m).eigenvalues.min()
}

//! Shared fixtures for the kernel benchmarks.

use std::path::PathBuf;

use qrdm_core::chem::{build_active_hamiltonian, parse_fcidump, ActiveHamiltonian, MOIntegrals, OrbitalSpaces};
use qrdm_core::ci::{casci_solve, CasciSolution};
use qrdm_core::Result;

pub struct Fixture {
    pub ints: MOIntegrals,
    pub spaces: OrbitalSpaces,
    pub h: ActiveHamiltonian,
    pub casci: CasciSolution,
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Load an FCIDUMP under `data/` and solve the CASCI ground state.
pub fn fixture(rel: &str, n_core: usize, n_active: usize) -> Result<Fixture> {
    let text = std::fs::read_to_string(data_dir().join(rel))
        .map_err(|e| qrdm_core::Error::Contract(format!("{rel}: {e}")))?;
    let (ints, header) = parse_fcidump(&text)?;
    let n_virtual = ints.n_orbitals - n_core - n_active;
    let spaces = OrbitalSpaces::new(n_core, n_active, n_virtual, header.nelec, header.ms2)?;
    let h = build_active_hamiltonian(&ints, &spaces)?;
    let casci = casci_solve(&h, &spaces)?;
    Ok(Fixture { ints, spaces, h, casci })
}

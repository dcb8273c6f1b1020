mod common;

use qrdm_core::chem::{build_active_hamiltonian, OrbitalSpaces};
use qrdm_core::ops::symmetry::{find_z2_symmetries, in_span, SymmetryGroup, Tapering};
use qrdm_core::ops::qubit_hamiltonian;
use qrdm_core::PauliWord;

#[test]
fn h2_symmetries_contain_izzi_and_iizz() {
    let ints = common::load("h2_sto3g/h2_0.74.fcidump");
    let spaces = OrbitalSpaces::new(0, 2, 0, 2, 0).unwrap();
    let h = qubit_hamiltonian(&build_active_hamiltonian(&ints, &spaces).unwrap()).unwrap();
    let gens = find_z2_symmetries(&h);
    let masks: Vec<u64> = gens.iter().map(|g| g.z).collect();
    for w in ["IZZI", "IIZZ", "ZIZI"] {
        let p = PauliWord::parse(w).unwrap();
        assert!(in_span(p.z, &masks), "{w}");
        assert!(h.words().all(|t| t.commutes(&p)));
    }
    // alpha parity, beta parity and the parity of the ungerade orbital
    assert_eq!(gens.len(), 3);
}

#[test]
fn tapering_preserves_the_sector_ground_energy() {
    let ints = common::load("h2_sto3g/h2_0.74.fcidump");
    let spaces = OrbitalSpaces::new(0, 2, 0, 2, 0).unwrap();
    let h = qubit_hamiltonian(&build_active_hamiltonian(&ints, &spaces).unwrap()).unwrap();
    let gens = vec![PauliWord::parse("IZZI").unwrap(), PauliWord::parse("IIZZ").unwrap()];
    // Hartree-Fock reference occupies qubits 0 and 1
    let group = SymmetryGroup::from_reference(4, gens, 0b0011).unwrap();
    let t = Tapering::new(&group);
    let ht = t.taper_operator(&h).unwrap();
    assert_eq!(ht.n_qubits, 2);
    let full = common::min_eig(h.to_dense().iter().map(|c| c.re).collect(), 16);
    let tapered = common::min_eig(ht.to_dense().iter().map(|c| c.re).collect(), 4);
    assert!((full - tapered).abs() < 1e-10, "{full} {tapered}");
}

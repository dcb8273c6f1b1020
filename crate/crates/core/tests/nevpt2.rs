mod common;

use qrdm_core::chem::models::random_integrals;
use qrdm_core::chem::{build_active_hamiltonian, MOIntegrals, OrbitalSpaces};
use qrdm_core::ci::{casci_solve, CasciSolution};
use qrdm_core::nevpt2::{sc_nevpt2_from_rdms, sc_nevpt2_oracle, Class, Nevpt2Result};
use qrdm_core::rdm::statevector_rdms;

fn solve(ints: &MOIntegrals, spaces: &OrbitalSpaces) -> CasciSolution {
    let h = build_active_hamiltonian(ints, spaces).unwrap();
    casci_solve(&h, spaces).unwrap()
}

fn both(ints: &MOIntegrals, spaces: &OrbitalSpaces) -> (Nevpt2Result, Nevpt2Result) {
    let sol = solve(ints, spaces);
    let rdms = statevector_rdms(&sol.to_statevector(), spaces.n_active, 4).unwrap();
    let a = sc_nevpt2_from_rdms(ints, spaces, &rdms, sol.total_energy()).unwrap();
    let b = sc_nevpt2_oracle(ints, spaces, &sol).unwrap();
    (a, b)
}

/// (n_core, n_active, n_virtual, active electrons, 2S, seed)
const MATRIX: [(usize, usize, usize, usize, i32, u64); 10] = [
    (0, 2, 2, 2, 0, 1),
    (1, 2, 2, 2, 0, 2),
    (1, 2, 2, 4, 0, 3),
    (1, 3, 2, 4, 0, 4),
    (2, 3, 1, 2, 0, 5),
    (0, 4, 3, 4, 0, 6),
    (1, 3, 3, 3, 1, 7),
    (2, 2, 4, 2, 2, 8),
    (1, 4, 2, 4, 2, 9),
    (0, 5, 3, 6, 0, 10),
];

#[test]
fn contraction_matches_determinants_across_systems() {
    for &(nc, na, nv, ne, ms2, seed) in &MATRIX {
        let ints = random_integrals(nc + na + nv, seed, 0.6);
        let spaces = OrbitalSpaces::new(nc, na, nv, 2 * nc + ne, ms2).unwrap();
        let (a, b) = both(&ints, &spaces);
        let diff = a.max_class_diff(&b);
        assert!(diff < 1e-8, "system {:?}: per-class deviation {diff:e}", (nc, na, nv, ne, ms2));
        let sum: f64 = a.classes.iter().map(|c| c.e2).sum();
        assert_eq!(sum, a.total_e2);
        assert_eq!(a.total_energy, a.reference_energy + a.total_e2);
    }
}

#[test]
fn no_external_orbitals_gives_zero() {
    let ints = random_integrals(3, 4, 1.0);
    let spaces = OrbitalSpaces::new(0, 3, 0, 4, 0).unwrap();
    let (a, b) = both(&ints, &spaces);
    for r in [&a, &b] {
        assert!(r.classes.iter().all(|c| c.e2 == 0.0));
        assert_eq!(r.total_energy, r.reference_energy);
    }
}

#[test]
fn closed_shell_two_orbital_toy_is_mp2() {
    // one doubly occupied and one empty orbital, Brillouin condition h12 = −(12|11)
    let mut ints = MOIntegrals::zeros(2);
    ints.set_h(0, 0, -1.3);
    ints.set_h(1, 1, -0.4);
    ints.set_g(0, 0, 0, 0, 0.62);
    ints.set_g(1, 1, 1, 1, 0.55);
    ints.set_g(0, 0, 1, 1, 0.51);
    ints.set_g(0, 1, 0, 1, 0.13);
    ints.set_g(0, 1, 0, 0, 0.07);
    ints.set_g(0, 1, 1, 1, 0.04);
    ints.set_h(0, 1, -0.07);
    let spaces = OrbitalSpaces::new(1, 0, 1, 2, 0).unwrap();
    let eps_i = ints.h(0, 0) + ints.g(0, 0, 0, 0);
    let eps_a = ints.h(1, 1) + 2.0 * ints.g(1, 1, 0, 0) - ints.g(1, 0, 0, 1);
    let k = ints.g(0, 1, 0, 1);
    let mp2 = k * k / (2.0 * (eps_i - eps_a));
    let (a, b) = both(&ints, &spaces);
    for r in [&a, &b] {
        assert!((r.class_energy(Class::Ijrs) - mp2).abs() < 1e-12, "{} vs {mp2}", r.class_energy(Class::Ijrs));
        assert!((r.total_e2 - mp2).abs() < 1e-12);
    }
}

#[test]
fn size_consistent_for_noninteracting_copies() {
    let ints = random_integrals(5, 21, 0.6);
    let spaces = OrbitalSpaces::new(1, 2, 2, 4, 0).unwrap();
    let (single, _) = both(&ints, &spaces);
    let (dimer, dspaces) = qrdm_core::chem::models::direct_sum(&ints, &spaces, &ints, &spaces);
    let sol = solve(&dimer, &dspaces);
    let rdms = statevector_rdms(&sol.to_statevector(), dspaces.n_active, 4).unwrap();
    let r = sc_nevpt2_from_rdms(&dimer, &dspaces, &rdms, sol.total_energy()).unwrap();
    assert!((r.total_e2 - 2.0 * single.total_e2).abs() < 1e-7, "{} vs {}", r.total_e2, 2.0 * single.total_e2);
}

#[test]
fn invariant_under_degenerate_virtual_rotation() {
    // two identical copies make every virtual level doubly degenerate
    let ints = random_integrals(4, 31, 0.6);
    let spaces = OrbitalSpaces::new(0, 2, 2, 2, 0).unwrap();
    let (dimer, dspaces) = qrdm_core::chem::models::direct_sum(&ints, &spaces, &ints, &spaces);
    let (base, _) = both(&dimer, &dspaces);
    let n = dimer.n_orbitals;
    let mut c = vec![0.0; n * n];
    for p in 0..n {
        c[p * n + p] = 1.0;
    }
    // virtual(a) orbital k pairs with virtual(b) orbital k
    let v0 = dspaces.n_core + dspaces.n_active;
    let theta: f64 = 0.7;
    for k in 0..2 {
        let (x, y) = (v0 + k, v0 + 2 + k);
        c[x * n + x] = theta.cos();
        c[y * n + y] = theta.cos();
        c[x * n + y] = -theta.sin();
        c[y * n + x] = theta.sin();
    }
    let rotated = dimer.rotated(&c);
    let (a, b) = both(&rotated, &dspaces);
    assert!((a.total_energy - base.total_energy).abs() < 1e-8);
    assert!((b.total_energy - base.total_energy).abs() < 1e-8);
}

#[test]
fn missing_gamma4_is_refused_with_cu4_hint() {
    let ints = random_integrals(6, 2, 0.6);
    let spaces = OrbitalSpaces::new(1, 3, 2, 6, 0).unwrap();
    let sol = solve(&ints, &spaces);
    let rdms = statevector_rdms(&sol.to_statevector(), 3, 3).unwrap();
    let err = sc_nevpt2_from_rdms(&ints, &spaces, &rdms, sol.total_energy()).unwrap_err();
    assert!(err.to_string().contains("CU(4)"), "{err}");
}

#[test]
fn pdm4_alone_is_accepted() {
    let ints = random_integrals(6, 2, 0.6);
    let spaces = OrbitalSpaces::new(1, 3, 2, 6, 0).unwrap();
    let sol = solve(&ints, &spaces);
    let st = sol.to_statevector();
    let full = statevector_rdms(&st, 3, 4).unwrap();
    let mut partial = statevector_rdms(&st, 3, 3).unwrap();
    partial.pdm4 = Some(qrdm_core::rdm::statevector_pdm4(&st, 3).unwrap());
    let a = sc_nevpt2_from_rdms(&ints, &spaces, &full, sol.total_energy()).unwrap();
    let b = sc_nevpt2_from_rdms(&ints, &spaces, &partial, sol.total_energy()).unwrap();
    assert!(a.max_class_diff(&b) < 1e-10);
}

#[test]
fn result_round_trips_through_json() {
    let (ints, spaces, _) = common::h2("0.74");
    let (a, _) = both(&ints, &spaces);
    let back = Nevpt2Result::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(a, back);
}

#[test]
fn h2_matches_golden_reference() {
    let refs = common::reference("h2/reference.json");
    for p in refs["points"].as_array().unwrap() {
        let ints = common::load(&format!("h2/{}", p["fcidump"].as_str().unwrap()));
        let spaces = OrbitalSpaces::new(0, 2, 2, 2, 0).unwrap();
        let (a, b) = both(&ints, &spaces);
        let e2 = p["e2"].as_f64().unwrap();
        assert!((a.total_e2 - e2).abs() < 1e-8, "{} vs {e2}", a.total_e2);
        assert!((b.total_e2 - e2).abs() < 1e-8);
        assert!((a.total_energy - p["e_total"].as_f64().unwrap()).abs() < 1e-8);
    }
}

#[test]
fn li2_matches_golden_reference() {
    let refs = common::reference("li2/reference.json");
    let p = &refs["points"][0];
    let ints = common::load(&format!("li2/{}", p["fcidump"].as_str().unwrap()));
    let spaces = OrbitalSpaces::new(1, 6, 11, 6, 0).unwrap();
    let sol = solve(&ints, &spaces);
    let rdms = statevector_rdms(&sol.to_statevector(), 6, 4).unwrap();
    let t = std::time::Instant::now();
    let r = sc_nevpt2_from_rdms(&ints, &spaces, &rdms, sol.total_energy()).unwrap();
    println!("li2 nevpt2 {:?}", t.elapsed());
    for c in &r.classes {
        println!("{:>4} {:+.12}", c.class, c.e2);
    }
    let e2 = p["e2"].as_f64().unwrap();
    assert!((r.total_e2 - e2).abs() < 1e-7, "{} vs {e2}", r.total_e2);
}

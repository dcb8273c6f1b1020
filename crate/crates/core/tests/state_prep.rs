mod common;

use approx::assert_abs_diff_eq;
use qrdm_core::chem::models::{random_integrals, PppChain};
use qrdm_core::chem::{build_active_hamiltonian, OrbitalSpaces};
use qrdm_core::ci::casci_solve;
use qrdm_core::ops::fermion::{number_operator, sz_operator};
use qrdm_core::ops::{jordan_wigner, jw_observable, qubit_hamiltonian};
use qrdm_core::vqe::{
    energy, gradient, gradient_finite_difference, gradient_parameter_shift, vqe_exact, Ansatz, VqeSettings,
};

#[test]
fn sto3g_fci_matches_reference_package() {
    let ints = common::load("h2_sto3g/h2_0.74.fcidump");
    let r = common::reference("h2_sto3g/reference.json");
    let spaces = OrbitalSpaces::new(0, 2, 0, 2, 0).unwrap();
    let h = build_active_hamiltonian(&ints, &spaces).unwrap();
    let sol = casci_solve(&h, &spaces).unwrap();
    assert_abs_diff_eq!(sol.total_energy(), r["e_fci"].as_f64().unwrap(), epsilon = 1e-8);
}

#[test]
fn casci_matches_qubit_sector_diagonalization() {
    let (_, spaces, h) = common::h2("0.74");
    let sol = casci_solve(&h, &spaces).unwrap();
    let hq = qubit_hamiltonian(&h).unwrap();
    let dense = hq.to_dense();
    let basis: Vec<usize> = (0..16usize).filter(|b| b.count_ones() == 2 && (b & 0b0101).count_ones() == 1).collect();
    let m: Vec<f64> = basis.iter().flat_map(|&i| basis.iter().map(move |&j| (i, j))).map(|(i, j)| dense[i * 16 + j].re).collect();
    let e = common::min_eig(m, basis.len());
    assert_abs_diff_eq!(sol.total_energy(), e, epsilon = 1e-10);
}

#[test]
fn casci_invariant_under_relabeling() {
    let ints = random_integrals(5, 3, 0.4);
    let spaces = OrbitalSpaces::new(0, 5, 0, 4, 0).unwrap();
    let e0 = casci_solve(&build_active_hamiltonian(&ints, &spaces).unwrap(), &spaces).unwrap().energy;
    let perm = ints.reordered(&[3, 0, 4, 1, 2]).unwrap();
    let e1 = casci_solve(&build_active_hamiltonian(&perm, &spaces).unwrap(), &spaces).unwrap().energy;
    assert_abs_diff_eq!(e0, e1, epsilon = 1e-10);
}

#[test]
fn frozen_core_embedding_matches_full_space() {
    use qrdm_core::ci::{ground_state, SpinFreeHamiltonian};
    let ints = random_integrals(4, 21, 0.3);
    let spaces = OrbitalSpaces::new(2, 2, 0, 6, 0).unwrap();
    let e_act = casci_solve(&build_active_hamiltonian(&ints, &spaces).unwrap(), &spaces).unwrap().total_energy();
    // full space, core spin orbitals 0..3 always occupied
    let dets: Vec<u64> = qrdm_core::ci::determinants(2, 1, 1).into_iter().map(|d| (d << 4) | 0b1111).collect();
    let (e_full, _) = ground_state(&SpinFreeHamiltonian::from_integrals(&ints), &dets).unwrap();
    assert_abs_diff_eq!(e_act, e_full, epsilon = 1e-10);
}

#[test]
fn h2_vqe_reaches_casci() {
    for bond in ["0.50", "0.74", "1.50", "2.50"] {
        let (_, spaces, h) = common::h2(bond);
        let sol = casci_solve(&h, &spaces).unwrap();
        let hq = qubit_hamiltonian(&h).unwrap();
        let ansatz = Ansatz::uccsd(2, 1, 1).unwrap();
        let res = vqe_exact(&hq, &ansatz, &VqeSettings::default()).unwrap();
        assert!(res.converged, "{res:?}");
        assert_abs_diff_eq!(res.energy, sol.total_energy(), epsilon = 1e-8);
        assert!(res.energy >= sol.total_energy() - 1e-9);
    }
}

#[test]
fn zero_iterations_gives_hf_energy() {
    let (ints, _, h) = common::h2("1.00");
    let hq = qubit_hamiltonian(&h).unwrap();
    let ansatz = Ansatz::uccsd(2, 1, 1).unwrap();
    let res = vqe_exact(&hq, &ansatz, &VqeSettings { max_iterations: 0, ..Default::default() }).unwrap();
    // closed-shell determinant energy from integrals
    let e_hf = ints.e_nuclear + 2.0 * ints.h(0, 0) + ints.g(0, 0, 0, 0);
    assert_abs_diff_eq!(res.energy, e_hf, epsilon = 1e-12);
    assert_eq!(res.iterations, 0);
}

#[test]
fn gradients_agree() {
    let ints = PppChain::new(6, 1.45).integrals();
    let spaces = OrbitalSpaces::new(1, 3, 2, 6, 0).unwrap();
    let h = build_active_hamiltonian(&ints, &spaces).unwrap();
    let hq = qubit_hamiltonian(&h).unwrap();
    let ansatz = Ansatz::uccsd(3, 2, 2).unwrap();
    let params: Vec<f64> = (0..ansatz.n_params()).map(|k| 0.1 * ((k as f64 * 1.7).sin())).collect();
    let (e, adj) = gradient(&hq, &ansatz, &params);
    assert_abs_diff_eq!(e, energy(&hq, &ansatz, &params), epsilon = 1e-12);
    let ps = gradient_parameter_shift(&hq, &ansatz, &params);
    let fd = gradient_finite_difference(&hq, &ansatz, &params, 1e-4);
    for k in 0..params.len() {
        assert_abs_diff_eq!(ps[k], fd[k], epsilon = 1e-5);
        assert_abs_diff_eq!(ps[k], adj[k], epsilon = 1e-10);
    }
}

#[test]
fn ansatz_conserves_number_and_sz() {
    let ansatz = Ansatz::uccsd(3, 2, 1).unwrap();
    let n = jw_observable(&number_operator(3), 6).unwrap();
    let sz = jw_observable(&sz_operator(3), 6).unwrap();
    let params: Vec<f64> = (0..ansatz.n_params()).map(|k| 0.3 * (k as f64 + 0.5).cos()).collect();
    let s = ansatz.state(&params);
    assert_abs_diff_eq!(s.expectation(&n), 3.0, epsilon = 1e-8);
    assert_abs_diff_eq!(s.expectation(&sz), 0.5, epsilon = 1e-8);
    // generator-level check: [G, N] = 0 and [G, Sz] = 0 as matrices
    for g in &ansatz.groups {
        for e in g {
            let gq = jordan_wigner(&e.generator(), 6).unwrap();
            for op in [&n, &sz] {
                let oq = op.to_qubit_operator();
                let mut comm = gq.mul(&oq);
                comm.add_assign(&oq.mul(&gq), num_complex::Complex64::new(-1.0, 0.0));
                comm.prune(1e-12);
                assert!(comm.terms.is_empty());
            }
        }
    }
    // zero parameters reproduce the reference determinant
    let z = ansatz.state(&vec![0.0; ansatz.n_params()]);
    assert_abs_diff_eq!(z.fidelity(&ansatz.reference_state()), 1.0, epsilon = 1e-14);
    let mut from_zero = qrdm_core::sim::StateVector::zero(6);
    from_zero.apply_circuit(&ansatz.circuit(&vec![0.0; ansatz.n_params()])).unwrap();
    assert_abs_diff_eq!(from_zero.fidelity(&ansatz.reference_state()), 1.0, epsilon = 1e-14);
}

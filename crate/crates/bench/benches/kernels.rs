use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use qrdm_bench::fixture;
use qrdm_core::cumulant::cu4_gamma4;
use qrdm_core::nevpt2::sc_nevpt2_from_rdms;
use qrdm_core::ops::{find_z2_symmetries, qubit_hamiltonian, SymmetryGroup};
use qrdm_core::rdm::{execute_plan, plan_measurements, rdm_observables, statevector_rdms, Kind, Mode, Strategy};

fn kernels(c: &mut Criterion) {
    let f = fixture("h4/h4_2.00.fcidump", 0, 4).unwrap();
    let n = f.spaces.n_active;
    let state = f.casci.to_statevector();
    let qh = qubit_hamiltonian(&f.h).unwrap();
    let group = SymmetryGroup::from_reference(2 * n, find_z2_symmetries(&qh), f.spaces.reference_bits()).unwrap();
    let obs = rdm_observables(n, &[1, 2, 3], Kind::Rdm, Some(&group)).unwrap();
    let plan = plan_measurements(&obs, Strategy::GeneralCommuting, Some(&group)).unwrap();
    let rdms = statevector_rdms(&state, n, 3).unwrap();
    let mut with_g4 = rdms.clone();
    with_g4.gamma4 = Some(cu4_gamma4(&rdms).unwrap());
    let e_cas = f.casci.total_energy();

    let mut g = c.benchmark_group("h4_cas44");
    g.sample_size(10);
    g.bench_function("statevector_rdms_rank3", |b| b.iter(|| statevector_rdms(black_box(&state), n, 3).unwrap()));
    g.bench_function("cu4_gamma4", |b| b.iter(|| cu4_gamma4(black_box(&rdms)).unwrap()));
    g.bench_function("plan_measurements_rank3", |b| {
        b.iter(|| plan_measurements(black_box(&obs), Strategy::GeneralCommuting, Some(&group)).unwrap())
    });
    g.bench_function("execute_plan_exact", |b| b.iter(|| execute_plan(&plan, black_box(&state), &Mode::Exact, false).unwrap()));
    g.bench_function("execute_plan_shots", |b| {
        b.iter_batched(
            || Mode::Shots { shots: 1000, seed: 7, noise: None },
            |m| execute_plan(&plan, &state, &m, false).unwrap(),
            BatchSize::SmallInput,
        )
    });
    g.bench_function("sc_nevpt2_from_rdms", |b| {
        b.iter(|| sc_nevpt2_from_rdms(&f.ints, &f.spaces, black_box(&with_g4), e_cas).unwrap())
    });
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);

//! Determinant-space machinery: sparse Hamiltonian action over spin
//! orbitals and the exact active-space (CASCI) solver.

mod davidson;

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chem::{ActiveHamiltonian, MOIntegrals, OrbitalSpaces};
use crate::error::{contract, Error, Result};
use crate::ops::fermion::{apply_ladders, Ladder};
use crate::sim::StateVector;

/// Largest determinant space handled.
pub const DET_BUDGET: usize = 1_000_000;
/// Above this dimension the iterative solver is used.
const DENSE_LIMIT: usize = 400;

/// Spin-free Hamiltonian over `n` spatial orbitals with a scalar shift.
#[derive(Clone, Debug)]
pub struct SpinFreeHamiltonian {
    pub n: usize,
    pub h1: Vec<f64>,
    pub eri: Vec<f64>,
    pub constant: f64,
}

impl SpinFreeHamiltonian {
    pub fn from_active(h: &ActiveHamiltonian, include_frozen: bool) -> Self {
        SpinFreeHamiltonian {
            n: h.n_active,
            h1: h.h1_eff.clone(),
            eri: h.eri_act.clone(),
            constant: if include_frozen { h.e_frozen } else { 0.0 },
        }
    }

    pub fn from_integrals(ints: &MOIntegrals) -> Self {
        SpinFreeHamiltonian { n: ints.n_orbitals, h1: ints.h1.clone(), eri: ints.eri.clone(), constant: ints.e_nuclear }
    }

    #[inline]
    fn h(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n + q]
    }

    #[inline]
    fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.eri[((p * n + q) * n + r) * n + s]
    }

    /// `H|det⟩` accumulated into `out` with weight `c`.
    pub fn apply_det(&self, det: u64, c: f64, out: &mut HashMap<u64, f64>) {
        let m = 2 * self.n;
        if self.constant != 0.0 {
            *out.entry(det).or_insert(0.0) += c * self.constant;
        }
        let occ: Vec<usize> = (0..m).filter(|&k| det >> k & 1 == 1).collect();
        for &q in &occ {
            for p in (q % 2..m).step_by(2) {
                let v = self.h(p / 2, q / 2);
                if v == 0.0 {
                    continue;
                }
                if let Some((s, d)) = apply_ladders(&[Ladder::create(p), Ladder::annihilate(q)], det) {
                    *out.entry(d).or_insert(0.0) += c * v * s;
                }
            }
        }
        // a†_p a†_r a_s a_q: q leaves first
        for &q in &occ {
            let Some((s1, d1)) = apply_ladders(&[Ladder::annihilate(q)], det) else { continue };
            for &s in &occ {
                if q == s {
                    continue;
                }
                let Some((s2, d2)) = apply_ladders(&[Ladder::annihilate(s)], d1) else { continue };
                for r in (s % 2..m).step_by(2) {
                    if d2 >> r & 1 == 1 {
                        continue;
                    }
                    let d3 = d2 | 1 << r;
                    let s3 = if (d2 & ((1u64 << r) - 1)).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    for p in (q % 2..m).step_by(2) {
                        if d3 >> p & 1 == 1 {
                            continue;
                        }
                        let v = self.g(p / 2, q / 2, r / 2, s / 2);
                        if v == 0.0 {
                            continue;
                        }
                        let s4 = if (d3 & ((1u64 << p) - 1)).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                        *out.entry(d3 | 1 << p).or_insert(0.0) += 0.5 * c * v * s1 * s2 * s3 * s4;
                    }
                }
            }
        }
    }

    pub fn apply(&self, vec: &[(u64, f64)]) -> HashMap<u64, f64> {
        let mut out = HashMap::new();
        for &(d, c) in vec {
            if c != 0.0 {
                self.apply_det(d, c, &mut out);
            }
        }
        out
    }

    pub fn matrix(&self, dets: &[u64]) -> DMatrix<f64> {
        let index: HashMap<u64, usize> = dets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        let mut m = DMatrix::zeros(dets.len(), dets.len());
        for (j, &d) in dets.iter().enumerate() {
            let mut col = HashMap::new();
            self.apply_det(d, 1.0, &mut col);
            for (e, v) in col {
                if let Some(&i) = index.get(&e) {
                    m[(i, j)] += v;
                }
            }
        }
        m
    }
}

/// Determinants of `n` spatial orbitals with fixed α and β counts,
/// interleaved spin-orbital bits, in ascending bit order.
pub fn determinants(n: usize, n_alpha: usize, n_beta: usize) -> Vec<u64> {
    let spread = |m: u64, off: usize| (0..n).filter(|k| m >> k & 1 == 1).fold(0u64, |acc, k| acc | 1 << (2 * k + off));
    let combos = |k: usize| (0..1u64 << n).filter(move |m| m.count_ones() as usize == k);
    let mut dets: Vec<u64> =
        combos(n_alpha).flat_map(|a| combos(n_beta).map(move |b| spread(a, 0) | spread(b, 1))).collect();
    dets.sort_unstable();
    dets
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Lowest eigenpair of `ham` in the span of `dets`.
pub fn ground_state(ham: &SpinFreeHamiltonian, dets: &[u64]) -> Result<(f64, Vec<f64>)> {
    if dets.is_empty() {
        return contract("empty determinant space");
    }
    let (e, mut v) = if dets.len() <= DENSE_LIMIT {
        let eig = SymmetricEigen::new(ham.matrix(dets));
        let k = eig.eigenvalues.imin();
        (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect::<Vec<_>>())
    } else {
        davidson::lowest(ham, dets)?
    };
    // deterministic sign: largest-magnitude coefficient positive
    let imax = v.iter().enumerate().fold(0, |b, (i, x)| if x.abs() > v[b].abs() + 1e-12 { i } else { b });
    if v[imax] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((e, v))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CasciSolution {
    /// Active-space electronic energy, without `e_frozen`.
    pub energy: f64,
    pub e_frozen: f64,
    pub n_active: usize,
    pub dets: Vec<u64>,
    pub coeffs: Vec<f64>,
}

impl CasciSolution {
    pub fn total_energy(&self) -> f64 {
        self.energy + self.e_frozen
    }

    /// Embed the CI vector into the `2 n_active`-qubit register.
    pub fn to_statevector(&self) -> StateVector {
        let nq = 2 * self.n_active;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << nq];
        for (&d, &c) in self.dets.iter().zip(&self.coeffs) {
            amps[d as usize] = Complex64::new(c, 0.0);
        }
        StateVector::from_amplitudes(nq, amps).expect("normalized CI vector")
    }

    pub fn as_sparse(&self) -> Vec<(u64, f64)> {
        self.dets.iter().copied().zip(self.coeffs.iter().copied()).collect()
    }
}

/// Exact diagonalization in the fixed-(N, S_z) active determinant space.
pub fn casci_solve(h: &ActiveHamiltonian, spaces: &OrbitalSpaces) -> Result<CasciSolution> {
    if h.n_active != spaces.n_active {
        return contract(format!("Hamiltonian has {} active orbitals, spaces {}", h.n_active, spaces.n_active));
    }
    spaces.validate()?;
    let (na, nb) = spaces.active_alpha_beta();
    let dim = binomial(h.n_active, na) * binomial(h.n_active, nb);
    if dim > DET_BUDGET {
        return Err(Error::OverBudget { dim, budget: DET_BUDGET });
    }
    if 2 * h.n_active > 62 {
        return Err(Error::Bounds(format!("{} active orbitals exceed the 31-orbital register limit", h.n_active)));
    }
    let dets = determinants(h.n_active, na, nb);
    let ham = SpinFreeHamiltonian::from_active(h, false);
    let (energy, coeffs) = ground_state(&ham, &dets)?;
    Ok(CasciSolution { energy, e_frozen: h.e_frozen, n_active: h.n_active, dets, coeffs })
}

/// Sparse vector helpers shared by the oracles.
pub fn sparse_dot(a: &HashMap<u64, f64>, b: &HashMap<u64, f64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut keys: Vec<&u64> = small.keys().collect();
    keys.sort_unstable();
    keys.into_iter().map(|k| small[k] * large.get(k).copied().unwrap_or(0.0)).sum()
}

pub fn sorted(v: HashMap<u64, f64>) -> BTreeMap<u64, f64> {
    v.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{build_active_hamiltonian, models::random_integrals};

    #[test]
    fn single_orbital_closed_form() {
        let mut ints = MOIntegrals::zeros(1);
        ints.set_h(0, 0, -1.25);
        ints.set_g(0, 0, 0, 0, 0.675);
        let spaces = OrbitalSpaces::new(0, 1, 0, 2, 0).unwrap();
        let h = build_active_hamiltonian(&ints, &spaces).unwrap();
        let sol = casci_solve(&h, &spaces).unwrap();
        assert!((sol.energy - (2.0 * -1.25 + 0.675)).abs() < 1e-12, "{sol:?} {h:?}");
    }

    #[test]
    fn determinant_counts() {
        assert_eq!(determinants(4, 2, 2).len(), 36);
        assert_eq!(determinants(3, 2, 1).len(), 9);
    }

    #[test]
    fn davidson_matches_dense() {
        let ints = random_integrals(6, 11, 0.3);
        let ham = SpinFreeHamiltonian::from_integrals(&ints);
        let dets = determinants(6, 3, 3);
        assert_eq!(dets.len(), 400);
        let (e_dav, v) = davidson::lowest(&ham, &dets).unwrap();
        let eig = SymmetricEigen::new(ham.matrix(&dets));
        let e_dense = eig.eigenvalues.min();
        assert!((e_dav - e_dense).abs() < 1e-10, "{e_dav} {e_dense}");
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn over_budget_refused() {
        let spaces = OrbitalSpaces::new(0, 30, 0, 30, 0).unwrap();
        let h = ActiveHamiltonian { n_active: 30, h1_eff: vec![], eri_act: vec![], e_frozen: 0.0 };
        match casci_solve(&h, &spaces) {
            Err(Error::OverBudget { dim, .. }) => assert_eq!(dim, binomial(30, 15).pow(2)),
            other => panic!("expected refusal, got {other:?}"),
        }
    }
}

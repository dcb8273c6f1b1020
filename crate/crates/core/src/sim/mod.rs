//! Dense statevector simulation, gate circuits and shot sampling.

pub mod clifford;
mod sample;

pub use sample::{sample, NoiseModel, ShotTable};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::ops::pauli::{apply_word_to_basis, PauliSum, PauliWord};

const C0: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Rz(usize, f64),
    /// `exp(−iθ/2 · P)`
    PauliRot(PauliWord, f64),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::Rz(q, _) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) => vec![a, b],
            Gate::PauliRot(w, _) => (0..64).filter(|q| w.support() >> q & 1 == 1).collect(),
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rz(q, t) => Gate::Rz(q, -t),
            Gate::PauliRot(w, t) => Gate::PauliRot(w, -t),
            g => g,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            if let Some(q) = g.qubits().into_iter().find(|&q| q >= self.n_qubits) {
                return contract(format!("gate {g:?} targets qubit {q} of a {}-qubit circuit", self.n_qubits));
            }
            if let Gate::Cnot(a, b) | Gate::Cz(a, b) = g {
                if a == b {
                    return contract(format!("two-qubit gate {g:?} on a single qubit"));
                }
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Circuit {
        Circuit { n_qubits: self.n_qubits, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    /// Replace every Pauli exponential by basis changes, a CNOT ladder and `Rz`.
    pub fn decomposed(&self) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        for g in &self.gates {
            match *g {
                Gate::PauliRot(w, theta) => out.extend(&pauli_rotation_ladder(self.n_qubits, w, theta)),
                g => out.push(g),
            }
        }
        out
    }
}

fn pauli_rotation_ladder(n: usize, w: PauliWord, theta: f64) -> Circuit {
    let mut c = Circuit::new(n);
    let qs: Vec<usize> = (0..n).filter(|&q| w.support() >> q & 1 == 1).collect();
    if qs.is_empty() {
        // global phase only
        c.push(Gate::PauliRot(PauliWord::IDENTITY, theta));
        return c;
    }
    let mut basis = Vec::new();
    for &q in &qs {
        match w.letter(q) {
            'X' => basis.push(Gate::H(q)),
            'Y' => {
                basis.push(Gate::Sdg(q));
                basis.push(Gate::H(q));
            }
            _ => {}
        }
    }
    c.gates.extend_from_slice(&basis);
    for pair in qs.windows(2) {
        c.push(Gate::Cnot(pair[0], pair[1]));
    }
    c.push(Gate::Rz(*qs.last().unwrap(), theta));
    for pair in qs.windows(2).rev() {
        c.push(Gate::Cnot(pair[0], pair[1]));
    }
    c.gates.extend(basis.iter().rev().map(Gate::inverse));
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![C0; 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, bits: u64) -> Self {
        let mut amps = vec![C0; 1 << n_qubits];
        amps[bits as usize] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    /// Normalizes the supplied amplitudes.
    pub fn from_amplitudes(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return contract(format!("{} amplitudes for {n_qubits} qubits", amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return contract("zero state vector");
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wrap amplitudes without normalizing (intermediate vectors such as `H|ψ⟩`).
    pub fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << n_qubits);
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.n_qubits != self.n_qubits {
            return contract(format!("{}-qubit circuit applied to {}-qubit state", c.n_qubits, self.n_qubits));
        }
        c.validate()?;
        for g in &c.gates {
            self.apply_gate(g);
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_phase(&mut self, q: usize, p0: Complex64, p1: Complex64) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { p0 } else { p1 };
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match *g {
            Gate::H(q) => self.apply_1q(q, [[h, h], [h, -h]]),
            Gate::S(q) => self.apply_phase(q, one, i),
            Gate::Sdg(q) => self.apply_phase(q, one, -i),
            Gate::Z(q) => self.apply_phase(q, one, -one),
            Gate::X(q) => self.apply_word(PauliWord::single(q, 'X')),
            Gate::Y(q) => self.apply_word(PauliWord::single(q, 'Y')),
            Gate::Rz(q, t) => {
                let (s, c) = (t / 2.0).sin_cos();
                self.apply_phase(q, Complex64::new(c, -s), Complex64::new(c, s))
            }
            Gate::Cnot(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for k in 0..self.amps.len() {
                    if k & cb != 0 && k & tb == 0 {
                        self.amps.swap(k, k | tb);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let m = (1usize << a) | (1usize << b);
                for (k, amp) in self.amps.iter_mut().enumerate() {
                    if k & m == m {
                        *amp = -*amp;
                    }
                }
            }
            Gate::PauliRot(w, t) => {
                let (s, c) = (t / 2.0).sin_cos();
                let mut pv = vec![C0; self.amps.len()];
                for (b, a) in self.amps.iter().enumerate() {
                    let (nb, ph) = apply_word_to_basis(&w, b as u64);
                    pv[nb as usize] = ph * a;
                }
                let mis = Complex64::new(0.0, -s);
                for (a, p) in self.amps.iter_mut().zip(&pv) {
                    *a = *a * c + mis * p;
                }
            }
        }
    }

    /// In-place `P|ψ⟩` for a Hermitian Pauli word.
    pub fn apply_word(&mut self, w: PauliWord) {
        let mut out = vec![C0; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let (nb, ph) = apply_word_to_basis(&w, b as u64);
            out[nb as usize] = ph * a;
        }
        self.amps = out;
    }

    /// `⟨ψ|P|ψ⟩` (real for Hermitian P).
    pub fn word_expectation(&self, w: &PauliWord) -> f64 {
        let amps = &self.amps;
        let f = |b: usize| {
            let (nb, ph) = apply_word_to_basis(w, b as u64);
            (amps[nb as usize].conj() * ph * amps[b]).re
        };
        if amps.len() >= 1 << 14 {
            (0..amps.len()).into_par_iter().map(f).sum()
        } else {
            (0..amps.len()).map(f).sum()
        }
    }

    pub fn expectation(&self, obs: &PauliSum) -> f64 {
        obs.terms.iter().map(|(w, c)| c * self.word_expectation(w)).sum()
    }

    /// Probabilities `|amplitude|²` of the computational basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_circuit(n: usize, depth: usize, seed: u64) -> Circuit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(n);
        for _ in 0..depth {
            let q = rng.gen_range(0..n);
            let r = (q + 1 + rng.gen_range(0..n - 1)) % n;
            let g = match rng.gen_range(0..7) {
                0 => Gate::H(q),
                1 => Gate::S(q),
                2 => Gate::Cnot(q, r),
                3 => Gate::Rz(q, rng.gen_range(-3.0..3.0)),
                4 => Gate::Cz(q, r),
                _ => {
                    let w = PauliWord::new(rng.gen_range(0..1u64 << n), rng.gen_range(0..1u64 << n));
                    Gate::PauliRot(w, rng.gen_range(-3.0..3.0))
                }
            };
            c.push(g);
        }
        c
    }

    #[test]
    fn rx_pi_flips_with_phase() {
        let mut s = StateVector::zero(1);
        let mut c = Circuit::new(1);
        c.push(Gate::PauliRot(PauliWord::single(0, 'X'), std::f64::consts::PI));
        s.apply_circuit(&c).unwrap();
        assert!((s.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn native_and_ladder_agree_and_inverse_restores() {
        for seed in 0..10 {
            let c = random_circuit(4, 30, seed);
            let mut init = StateVector::zero(4);
            init.apply_gate(&Gate::H(0));
            init.apply_gate(&Gate::H(2));
            let mut a = init.clone();
            let mut b = init.clone();
            a.apply_circuit(&c).unwrap();
            b.apply_circuit(&c.decomposed()).unwrap();
            assert!((a.fidelity(&b) - 1.0).abs() < 1e-10);
            assert!((a.norm() - 1.0).abs() < 1e-10);
            a.apply_circuit(&c.inverse()).unwrap();
            assert!((a.fidelity(&init) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut s = StateVector::zero(2);
        assert!(s.apply_circuit(&Circuit::new(3)).is_err());
        let mut c = Circuit::new(2);
        c.push(Gate::H(5));
        assert!(s.apply_circuit(&c).is_err());
    }

    #[test]
    fn z_expectation_on_zero_state() {
        let s = StateVector::zero(3);
        for q in 0..3 {
            assert_eq!(s.word_expectation(&PauliWord::single(q, 'Z')), 1.0);
        }
    }
}

//! Variational state preparation: UCCSD ansatz, exact-expectation VQE with
//! quasi-Newton steps and a shot-based SPSA driver.

mod ansatz;

pub use ansatz::{Ansatz, SpinExcitation};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::ops::pauli::{apply_word_to_basis, PauliSum};
use crate::sim::{Gate, StateVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeSettings {
    pub max_iterations: usize,
    /// Gradient-norm threshold (exact mode) or energy-change threshold.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for VqeSettings {
    fn default() -> Self {
        VqeSettings { max_iterations: 200, tolerance: 1e-7, seed: 7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub params: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(iteration, energy)` convergence trace.
    pub trace: Vec<(usize, f64)>,
}

impl VqeResult {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,energy\n");
        for (i, e) in &self.trace {
            s.push_str(&format!("{i},{e:.12}\n"));
        }
        s
    }
}

fn check(h: &PauliSum, ansatz: &Ansatz) -> Result<()> {
    if h.n_qubits > ansatz.n_qubits || (h.n_qubits < ansatz.n_qubits && !h.is_empty()) {
        return contract(format!("{}-qubit Hamiltonian with a {}-qubit ansatz", h.n_qubits, ansatz.n_qubits));
    }
    Ok(())
}

pub fn energy(h: &PauliSum, ansatz: &Ansatz, params: &[f64]) -> f64 {
    ansatz.state(params).expectation(h)
}

fn apply_sum(h: &PauliSum, s: &StateVector) -> Vec<Complex64> {
    let amps = s.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (w, c) in &h.terms {
        for (b, a) in amps.iter().enumerate() {
            let (nb, ph) = apply_word_to_basis(w, b as u64);
            out[nb as usize] += ph * a * *c;
        }
    }
    out
}

/// Reverse-mode (adjoint) gradient; analytically identical to the
/// parameter-shift rule but needs one backward sweep.
pub fn gradient(h: &PauliSum, ansatz: &Ansatz, params: &[f64]) -> (f64, Vec<f64>) {
    let circ = ansatz.rotation_circuit(params);
    let map = ansatz.gate_map();
    let mut phi = ansatz.reference_state();
    for g in &circ.gates {
        phi.apply_gate(g);
    }
    let lam_amps = apply_sum(h, &phi);
    let e: f64 = phi.amplitudes().iter().zip(&lam_amps).map(|(a, b)| (a.conj() * b).re).sum();
    let mut lam = StateVector::from_raw(phi.n_qubits(), lam_amps);
    let mut grad = vec![0.0; params.len()];
    for (g, &(k, dphi)) in circ.gates.iter().zip(&map).rev() {
        let Gate::PauliRot(w, _) = *g else { unreachable!("rotation circuit holds Pauli rotations only") };
        // d/dφ exp(−iφ/2 P)ψ = −i/2 P ψ
        let mut pphi = phi.clone();
        pphi.apply_word(w);
        let ov: Complex64 = lam.amplitudes().iter().zip(pphi.amplitudes()).map(|(l, m)| l.conj() * m).sum();
        grad[k] += dphi * 2.0 * (ov * Complex64::new(0.0, -0.5)).re;
        let inv = g.inverse();
        phi.apply_gate(&inv);
        lam.apply_gate(&inv);
    }
    (e, grad)
}

/// Parameter-shift gradient: each rotation gate is shifted by ±π/2.
pub fn gradient_parameter_shift(h: &PauliSum, ansatz: &Ansatz, params: &[f64]) -> Vec<f64> {
    let circ = ansatz.rotation_circuit(params);
    let map = ansatz.gate_map();
    let mut grad = vec![0.0; params.len()];
    let eval = |gates: &[Gate]| {
        let mut s = ansatz.reference_state();
        for g in gates {
            s.apply_gate(g);
        }
        s.expectation(h)
    };
    for (i, &(k, dphi)) in map.iter().enumerate() {
        let mut gates = circ.gates.clone();
        let Gate::PauliRot(w, t) = gates[i] else { unreachable!() };
        gates[i] = Gate::PauliRot(w, t + std::f64::consts::FRAC_PI_2);
        let ep = eval(&gates);
        gates[i] = Gate::PauliRot(w, t - std::f64::consts::FRAC_PI_2);
        let em = eval(&gates);
        grad[k] += dphi * 0.5 * (ep - em);
    }
    grad
}

pub fn gradient_finite_difference(h: &PauliSum, ansatz: &Ansatz, params: &[f64], step: f64) -> Vec<f64> {
    (0..params.len())
        .map(|k| {
            let mut p = params.to_vec();
            p[k] += step;
            let ep = energy(h, ansatz, &p);
            p[k] -= 2.0 * step;
            let em = energy(h, ansatz, &p);
            (ep - em) / (2.0 * step)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact-expectation VQE: BFGS from the zero (HF) point.
pub fn vqe_exact(h: &PauliSum, ansatz: &Ansatz, settings: &VqeSettings) -> Result<VqeResult> {
    check(h, ansatz)?;
    let n = ansatz.n_params();
    let mut x = vec![0.0; n];
    let (mut e, mut g) = gradient(h, ansatz, &x);
    let mut trace = vec![(0, e)];
    let mut hinv: Vec<f64> = (0..n * n).map(|i| if i % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let mut it = 0;
    let mut converged = n == 0 || dot(&g, &g).sqrt() < settings.tolerance;
    while !converged && it < settings.max_iterations {
        it += 1;
        let mut d: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| hinv[i * n + j] * g[j]).sum::<f64>()).collect();
        if dot(&d, &g) >= 0.0 {
            hinv.iter_mut().enumerate().for_each(|(i, v)| *v = if i % (n + 1) == 0 { 1.0 } else { 0.0 });
            d = g.iter().map(|v| -v).collect();
        }
        let slope = dot(&d, &g);
        let mut alpha = 1.0;
        let (mut xn, mut en, mut gn);
        loop {
            xn = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect::<Vec<_>>();
            (en, gn) = gradient(h, ansatz, &xn);
            if en <= e + 1e-4 * alpha * slope || alpha < 1e-10 {
                break;
            }
            alpha *= 0.5;
        }
        if en > e {
            // no descent possible along d: stationary to working precision
            converged = dot(&g, &g).sqrt() < settings.tolerance.sqrt();
            break;
        }
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hinv[i * n + j] * y[j]).sum()).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let stalled = (e - en).abs() < 1e-14;
        x = xn;
        e = en;
        g = gn;
        trace.push((it, e));
        converged = dot(&g, &g).sqrt() < settings.tolerance || stalled;
    }
    Ok(VqeResult { params: x, energy: e, iterations: it, converged, trace })
}

/// SPSA on a stochastic energy estimate `f(state, rng)`.
pub fn vqe_spsa(
    ansatz: &Ansatz,
    settings: &VqeSettings,
    mut estimate: impl FnMut(&StateVector, &mut ChaCha8Rng) -> Result<f64>,
) -> Result<VqeResult> {
    let n = ansatz.n_params();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut x = vec![0.0; n];
    let (a, c, big_a, alpha, gamma) = (0.2, 0.1, 10.0, 0.602, 0.101);
    let mut trace = Vec::new();
    let mut last = estimate(&ansatz.state(&x), &mut rng)?;
    trace.push((0, last));
    let mut converged = false;
    let mut it = 0;
    while it < settings.max_iterations {
        it += 1;
        let ak = a / (it as f64 + big_a).powf(alpha);
        let ck = c / (it as f64).powf(gamma);
        let delta: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let xp: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v + ck * d).collect();
        let xm: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v - ck * d).collect();
        let ep = estimate(&ansatz.state(&xp), &mut rng)?;
        let em = estimate(&ansatz.state(&xm), &mut rng)?;
        for (v, d) in x.iter_mut().zip(&delta) {
            *v -= ak * (ep - em) / (2.0 * ck * d);
        }
        let e = estimate(&ansatz.state(&x), &mut rng)?;
        trace.push((it, e));
        if (e - last).abs() < settings.tolerance {
            converged = true;
            last = e;
            break;
        }
        last = e;
    }
    Ok(VqeResult { params: x, energy: last, iterations: it, converged, trace })
}

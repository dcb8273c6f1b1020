//! Direct RDM evaluation from amplitudes by ladder-operator action; no
//! Pauli decomposition involved.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::RdmSet;
use crate::error::{contract, Result};
use crate::ops::fermion::{apply_ladders, Ladder};
use crate::sim::StateVector;
use crate::tensor::Tensor;

/// Nonzero amplitudes as `(bits, re, im)`.
fn support(state: &StateVector) -> Vec<(u64, f64, f64)> {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(b, a)| (b as u64, a.re, a.im))
        .collect()
}

fn electron_count(sup: &[(u64, f64, f64)]) -> Result<usize> {
    let mut weight: HashMap<u32, f64> = HashMap::new();
    for &(b, re, im) in sup {
        *weight.entry(b.count_ones()).or_insert(0.0) += re * re + im * im;
    }
    let mut it = weight.iter().filter(|(_, &w)| w > 1e-20);
    match (it.next(), it.next()) {
        (Some((&n, _)), None) => Ok(n as usize),
        _ => contract("state is not an electron-number eigenstate"),
    }
}

/// Gram matrix (real part) of sparse vectors over a shared basis.
fn gram(vectors: &[Vec<(u64, f64, f64)>]) -> DMatrix<f64> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    for v in vectors {
        for &(b, _, _) in v {
            let next = index.len();
            index.entry(b).or_insert(next);
        }
    }
    let dim = index.len().max(1);
    let mut xr = DMatrix::<f64>::zeros(vectors.len(), dim);
    let mut xi = DMatrix::<f64>::zeros(vectors.len(), dim);
    for (r, v) in vectors.iter().enumerate() {
        for &(b, re, im) in v {
            let c = index[&b];
            xr[(r, c)] += re;
            xi[(r, c)] += im;
        }
    }
    &xr * xr.transpose() + &xi * xi.transpose()
}

fn apply(ops: &[Ladder], v: &[(u64, f64, f64)]) -> Vec<(u64, f64, f64)> {
    let mut acc: HashMap<u64, (f64, f64)> = HashMap::new();
    for &(b, re, im) in v {
        if let Some((s, nb)) = apply_ladders(ops, b) {
            let e = acc.entry(nb).or_insert((0.0, 0.0));
            e.0 += s * re;
            e.1 += s * im;
        }
    }
    let mut out: Vec<_> = acc.into_iter().map(|(b, (r, i))| (b, r, i)).collect();
    out.sort_by_key(|x| x.0);
    out
}

fn sorted_with_sign(t: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for i in 1..t.len() {
        let mut j = i;
        while j > 0 && t[j - 1] > t[j] {
            t.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

/// Spin-traced k-RDM `Γ_k[p…; q…] = Σ_σ ⟨a†_{p1σ1}…a†_{pkσk} a_{qkσk}…a_{q1σ1}⟩`.
fn spin_traced(sup: &[(u64, f64, f64)], n: usize, k: usize) -> Tensor {
    let m = 2 * n;
    // sorted spin-orbital k-subsets
    let subsets: Vec<u64> = (0..1u64 << m).filter(|s| s.count_ones() as usize == k).collect();
    let index: HashMap<u64, usize> = subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let chis: Vec<Vec<(u64, f64, f64)>> = subsets
        .par_iter()
        .map(|&s| {
            // χ(q1<…<qk) = a_{qk} … a_{q1} |Ψ⟩
            let ops: Vec<Ladder> = (0..m).rev().filter(|q| s >> q & 1 == 1).map(Ladder::annihilate).collect();
            apply(&ops, sup)
        })
        .collect();
    let g = gram(&chis);
    let mut t = Tensor::zeros(n, 2 * k);
    let data: Vec<f64> = (0..t.len())
        .into_par_iter()
        .map(|off| {
            let mut idx = vec![0usize; 2 * k];
            let mut o = off;
            for d in (0..2 * k).rev() {
                idx[d] = o % n;
                o /= n;
            }
            let mut total = 0.0;
            for spins in 0..(1usize << k) {
                let mut p: Vec<usize> = (0..k).map(|i| 2 * idx[i] + (spins >> i & 1)).collect();
                let mut q: Vec<usize> = (0..k).map(|i| 2 * idx[k + i] + (spins >> i & 1)).collect();
                let sp = sorted_with_sign(&mut p);
                let sq = sorted_with_sign(&mut q);
                if p.windows(2).any(|w| w[0] == w[1]) || q.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let mp = p.iter().fold(0u64, |a, &x| a | 1 << x);
                let mq = q.iter().fold(0u64, |a, &x| a | 1 << x);
                total += sp * sq * g[(index[&mp], index[&mq])];
            }
            total
        })
        .collect();
    t.data_mut().copy_from_slice(&data);
    t
}

/// Spin-traced RDMs of ranks `1..=max_rank` directly from amplitudes.
pub fn statevector_rdms(state: &StateVector, n_active: usize, max_rank: usize) -> Result<RdmSet> {
    if state.n_qubits() != 2 * n_active {
        return contract(format!("{}-qubit state for {n_active} active orbitals", state.n_qubits()));
    }
    if !(1..=4).contains(&max_rank) {
        return contract(format!("RDM rank {max_rank} outside 1..=4"));
    }
    let sup = support(state);
    let n_elec = electron_count(&sup)?;
    let rank = |k: usize| if k <= n_elec { spin_traced(&sup, n_active, k) } else { Tensor::zeros(n_active, 2 * k) };
    let g1 = rank(1);
    let g2 = if max_rank >= 2 { rank(2) } else { Tensor::zeros(n_active, 4) };
    let g3 = if max_rank >= 3 { Some(rank(3)) } else { None };
    let g4 = if max_rank >= 4 { Some(rank(4)) } else { None };
    Ok(RdmSet { n_active, n_electrons: n_elec, gamma1: g1, gamma2: g2, gamma3: g3, gamma4: g4, pdm4: None })
}

fn excite(a: usize, b: usize, v: &[(u64, f64, f64)]) -> Vec<(u64, f64, f64)> {
    let mut acc: HashMap<u64, (f64, f64)> = HashMap::new();
    for s in 0..2 {
        for (b2, re, im) in apply(&[Ladder::create(2 * a + s), Ladder::annihilate(2 * b + s)], v) {
            let e = acc.entry(b2).or_insert((0.0, 0.0));
            e.0 += re;
            e.1 += im;
        }
    }
    let mut out: Vec<_> = acc.into_iter().map(|(b, (r, i))| (b, r, i)).collect();
    out.sort_by_key(|x| x.0);
    out
}

/// 4-PDM `⟨E^p_q E^r_s E^t_u E^v_w⟩` by direct operator application,
/// axes `[p, r, t, v, q, s, u, w]`.
pub fn statevector_pdm4(state: &StateVector, n_active: usize) -> Result<Tensor> {
    if state.n_qubits() != 2 * n_active {
        return contract(format!("{}-qubit state for {n_active} active orbitals", state.n_qubits()));
    }
    let n = n_active;
    let sup = support(state);
    // T[a,b,c,d] = E_ab E_cd Ψ
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let single: Vec<Vec<(u64, f64, f64)>> = pairs.par_iter().map(|&(c, d)| excite(c, d, &sup)).collect();
    let t: Vec<Vec<(u64, f64, f64)>> = pairs
        .par_iter()
        .flat_map_iter(|&(a, b)| single.iter().map(move |v| excite(a, b, v)))
        .collect();
    let g = gram(&t);
    let n2 = n * n;
    let mut out = Tensor::zeros(n, 8);
    let data: Vec<f64> = (0..out.len())
        .into_par_iter()
        .map(|off| {
            let mut i = [0usize; 8];
            let mut o = off;
            for d in (0..8).rev() {
                i[d] = o % n;
                o /= n;
            }
            let [p, r, t_, v, q, s, u, w] = i;
            // ⟨Ψ|E_pq E_rs E_tu E_vw|Ψ⟩ = ⟨E_sr E_qp Ψ | E_tu E_vw Ψ⟩
            let left = (s * n + r) * n2 + q * n + p;
            let right = (t_ * n + u) * n2 + v * n + w;
            g[(left, right)]
        })
        .collect();
    out.data_mut().copy_from_slice(&data);
    Ok(out)
}

//! Heisenberg-picture conjugation of Pauli words by Clifford gates.

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::ops::PauliWord;

/// `G P G†` for a Clifford gate, as `(sign, word)`.
pub fn conjugate_gate(g: &Gate, w: PauliWord) -> Result<(f64, PauliWord)> {
    let (mut x, mut z) = (w.x, w.z);
    let bit = |m: u64, q: usize| (m >> q & 1) == 1;
    let mut flip = false;
    match *g {
        Gate::H(a) => {
            flip ^= bit(x, a) && bit(z, a);
            let (xa, za) = (bit(x, a), bit(z, a));
            x = (x & !(1 << a)) | (za as u64) << a;
            z = (z & !(1 << a)) | (xa as u64) << a;
        }
        Gate::S(a) => {
            flip ^= bit(x, a) && bit(z, a);
            z ^= (bit(x, a) as u64) << a;
        }
        Gate::Sdg(a) => {
            // S³
            for _ in 0..3 {
                flip ^= bit(x, a) && bit(z, a);
                z ^= (bit(x, a) as u64) << a;
            }
        }
        Gate::X(a) => flip ^= bit(z, a),
        Gate::Z(a) => flip ^= bit(x, a),
        Gate::Y(a) => flip ^= bit(x, a) ^ bit(z, a),
        Gate::Cnot(c, t) => {
            flip ^= bit(x, c) && bit(z, t) && !(bit(x, t) ^ bit(z, c));
            x ^= (bit(x, c) as u64) << t;
            z ^= (bit(z, t) as u64) << c;
        }
        Gate::Cz(a, b) => {
            for g in [Gate::H(b), Gate::Cnot(a, b), Gate::H(b)] {
                let (s, w2) = conjugate_gate(&g, PauliWord { x, z })?;
                flip ^= s < 0.0;
                x = w2.x;
                z = w2.z;
            }
        }
        Gate::Rz(..) | Gate::PauliRot(..) => {
            return Err(Error::Internal(format!("{g:?} is not a Clifford gate")));
        }
    }
    Ok((if flip { -1.0 } else { 1.0 }, PauliWord { x, z }))
}

/// `C P C†` for a Clifford circuit `C`.
pub fn conjugate(c: &Circuit, w: PauliWord) -> Result<(f64, PauliWord)> {
    let mut sign = 1.0;
    let mut cur = w;
    for g in &c.gates {
        let (s, next) = conjugate_gate(g, cur)?;
        sign *= s;
        cur = next;
    }
    Ok((sign, cur))
}

/// Clifford circuit mapping every word of a commuting set to an I/Z word.
pub fn diagonalizing_circuit(n_qubits: usize, words: &[PauliWord]) -> Result<Circuit> {
    let full = |w: &PauliWord| (w.x as u128) << 64 | w.z as u128;
    // independent generators
    let mut basis: Vec<(u128, PauliWord)> = Vec::new();
    for w in words {
        let mut v = full(w);
        let mut cur = *w;
        for (b, bw) in &basis {
            let top = 127 - b.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= b;
                cur = PauliWord { x: cur.x ^ bw.x, z: cur.z ^ bw.z };
            }
        }
        if v != 0 {
            basis.push((v, cur));
            basis.sort_by(|a, b| b.0.cmp(&a.0));
        }
    }
    let mut gens: Vec<PauliWord> = basis.into_iter().map(|(_, w)| w).collect();
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            if !gens[a].commutes(&gens[b]) {
                return Err(Error::Internal("diagonalization requested for a non-commuting set".into()));
            }
        }
    }
    // reduce the X block so every generator with X support owns a pivot qubit
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for q in 0..n_qubits {
        let Some(p) = (row..gens.len()).find(|&i| gens[i].x >> q & 1 == 1) else { continue };
        gens.swap(row, p);
        for i in 0..gens.len() {
            if i != row && gens[i].x >> q & 1 == 1 {
                gens[i] = PauliWord { x: gens[i].x ^ gens[row].x, z: gens[i].z ^ gens[row].z };
            }
        }
        pivots.push((row, q));
        row += 1;
    }
    let mut circ = Circuit::new(n_qubits);
    let apply = |g: Gate, gens: &mut Vec<PauliWord>, circ: &mut Circuit| -> Result<()> {
        for w in gens.iter_mut() {
            *w = conjugate_gate(&g, *w)?.1;
        }
        circ.push(g);
        Ok(())
    };
    for &(i, q) in &pivots {
        for j in 0..n_qubits {
            if j != q && gens[i].x >> j & 1 == 1 {
                apply(Gate::Cnot(q, j), &mut gens, &mut circ)?;
            }
        }
        if gens[i].z >> q & 1 == 1 {
            apply(Gate::S(q), &mut gens, &mut circ)?;
        }
        for j in 0..n_qubits {
            if j != q && gens[i].z >> j & 1 == 1 {
                apply(Gate::Cz(q, j), &mut gens, &mut circ)?;
            }
        }
        apply(Gate::H(q), &mut gens, &mut circ)?;
    }
    for w in words {
        if conjugate(&circ, *w)?.1.x != 0 {
            return Err(Error::Internal("basis change left a non-diagonal word".into()));
        }
    }
    Ok(circ)
}

/// Single-qubit basis change for a qubitwise-commuting set.
pub fn qubitwise_circuit(n_qubits: usize, words: &[PauliWord]) -> Result<Circuit> {
    let mut circ = Circuit::new(n_qubits);
    for q in 0..n_qubits {
        let letters: Vec<char> = words.iter().map(|w| w.letter(q)).filter(|&c| c != 'I' && c != 'Z').collect();
        match letters.first() {
            None => {}
            Some(&c) if letters.iter().any(|&d| d != c) => {
                return Err(Error::Internal(format!("qubit {q} carries both X and Y in a qubitwise set")));
            }
            Some('X') => circ.push(Gate::H(q)),
            Some(_) => {
                circ.push(Gate::Sdg(q));
                circ.push(Gate::H(q));
            }
        }
    }
    Ok(circ)
}

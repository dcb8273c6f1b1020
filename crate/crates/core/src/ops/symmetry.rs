//! Z₂ (Z-type Pauli) symmetries, tapering and symmetry-vanishing tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{apply_word_to_basis, PauliSum, PauliWord, QubitOperator};
use crate::error::{contract, Result};

/// Commuting Z-type generators with their eigenvalues (±1) in the target sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    pub n_qubits: usize,
    pub generators: Vec<PauliWord>,
    pub sector: Vec<i8>,
}

impl SymmetryGroup {
    pub fn new(n_qubits: usize, generators: Vec<PauliWord>, sector: Vec<i8>) -> Result<Self> {
        if generators.len() != sector.len() {
            return contract(format!("{} generators but {} sector values", generators.len(), sector.len()));
        }
        if let Some(g) = generators.iter().find(|g| !g.is_diagonal() || g.z == 0) {
            return contract(format!("generator {} is not a non-trivial Z string", g.to_letters(n_qubits)));
        }
        if sector.iter().any(|&s| s != 1 && s != -1) {
            return contract("sector eigenvalues must be ±1");
        }
        if rank(&generators.iter().map(|g| g.z).collect::<Vec<_>>()) != generators.len() {
            return contract("symmetry generators are not independent");
        }
        Ok(SymmetryGroup { n_qubits, generators, sector })
    }

    /// Sector fixed by a computational basis state (e.g. the HF determinant).
    pub fn from_reference(n_qubits: usize, generators: Vec<PauliWord>, reference: u64) -> Result<Self> {
        let sector = generators.iter().map(|g| eigenvalue_on_basis(g, reference)).collect();
        SymmetryGroup::new(n_qubits, generators, sector)
    }

    /// Does `word` commute with every generator?
    pub fn commutes_with(&self, word: &PauliWord) -> bool {
        self.generators.iter().all(|g| g.commutes(word))
    }
}

pub fn eigenvalue_on_basis(g: &PauliWord, bits: u64) -> i8 {
    if (g.z & bits).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Row-reduce masks over GF(2); returns (reduced rows, pivot bit per row).
fn rref(rows: &[u64]) -> (Vec<u64>, Vec<usize>) {
    let mut rows: Vec<u64> = rows.iter().copied().filter(|&r| r != 0).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..64 {
        let bit = 1u64 << col;
        let Some(k) = (r..rows.len()).find(|&k| rows[k] & bit != 0) else { continue };
        rows.swap(r, k);
        for j in 0..rows.len() {
            if j != r && rows[j] & bit != 0 {
                rows[j] ^= rows[r];
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

fn rank(rows: &[u64]) -> usize {
    rref(rows).0.len()
}

/// Is `mask` in the GF(2) span of `basis`?
pub fn in_span(mask: u64, basis: &[u64]) -> bool {
    let mut b = basis.to_vec();
    let r = rank(&b);
    b.push(mask);
    rank(&b) == r
}

/// Basis of all Z strings commuting with every term of `h`.
pub fn find_z2_symmetries(h: &PauliSum) -> Vec<PauliWord> {
    let n = h.n_qubits;
    let (rows, pivots) = rref(&h.words().map(|w| w.x).collect::<Vec<_>>());
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut z = 1u64 << free;
        for (row, &p) in rows.iter().zip(&pivots) {
            if row & (1u64 << free) != 0 {
                z |= 1u64 << p;
            }
        }
        out.push(PauliWord::z_only(z));
    }
    out
}

/// Clifford tapering data: `U = Π (X_{q_k} + g_k)/√2` maps `g_k` to `X_{q_k}`.
#[derive(Clone, Debug)]
pub struct Tapering {
    pub n_qubits: usize,
    pub generators: Vec<PauliWord>,
    pub sector: Vec<i8>,
    pub qubits: Vec<usize>,
}

impl Tapering {
    pub fn new(group: &SymmetryGroup) -> Self {
        // Reduce generators so that pivot qubit q_k appears only in g_k,
        // carrying sector values through the row operations.
        let mut gens: Vec<(u64, i8)> = group.generators.iter().map(|g| g.z).zip(group.sector.iter().copied()).collect();
        let mut qubits = Vec::new();
        let mut r = 0;
        for col in 0..group.n_qubits {
            let bit = 1u64 << col;
            let Some(k) = (r..gens.len()).find(|&k| gens[k].0 & bit != 0) else { continue };
            gens.swap(r, k);
            for j in 0..gens.len() {
                if j != r && gens[j].0 & bit != 0 {
                    gens[j].0 ^= gens[r].0;
                    gens[j].1 *= gens[r].1;
                }
            }
            qubits.push(col);
            r += 1;
            if r == gens.len() {
                break;
            }
        }
        Tapering {
            n_qubits: group.n_qubits,
            generators: gens.iter().map(|g| PauliWord::z_only(g.0)).collect(),
            sector: gens.iter().map(|g| g.1).collect(),
            qubits,
        }
    }

    fn unitary(&self) -> QubitOperator {
        let mut u = QubitOperator::identity(self.n_qubits);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for (g, &q) in self.generators.iter().zip(&self.qubits) {
            let mut uk = QubitOperator::zero(self.n_qubits);
            uk.add_term(PauliWord::single(q, 'X'), h);
            uk.add_term(*g, h);
            u = u.mul(&uk);
        }
        u
    }

    pub fn n_tapered(&self) -> usize {
        self.n_qubits - self.qubits.len()
    }

    /// Tapered form of an operator commuting with the group.
    pub fn taper_operator(&self, h: &PauliSum) -> Result<PauliSum> {
        if let Some(w) = h.words().find(|w| self.generators.iter().any(|g| !g.commutes(w))) {
            return contract(format!("term {} breaks the symmetry being tapered", w.to_letters(h.n_qubits)));
        }
        let u = self.unitary();
        let rotated = u.mul(&h.to_qubit_operator()).mul(&u).to_observable(1e-10)?;
        let mut qs: Vec<(usize, i8)> = self.qubits.iter().copied().zip(self.sector.iter().copied()).collect();
        qs.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out = PauliSum::zero(self.n_tapered());
        for (w, c) in &rotated.terms {
            let mut w = *w;
            let mut c = *c;
            for &(q, s) in &qs {
                let bit = 1u64 << q;
                if w.z & bit != 0 {
                    return contract("tapered qubit carries a non-X letter after rotation");
                }
                if w.x & bit != 0 {
                    c *= s as f64;
                }
                w = w.remove_qubit(q);
            }
            out.add_term(w, c);
        }
        out.prune();
        Ok(out)
    }

    /// Project amplitudes of an in-sector state onto the tapered register.
    pub fn taper_amplitudes(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let u = self.unitary();
        let mut rot = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (w, c) in &u.terms {
            for (b, a) in amps.iter().enumerate() {
                let (nb, ph) = apply_word_to_basis(w, b as u64);
                rot[nb as usize] += c * ph * a;
            }
        }
        let mut cur = rot;
        let mut n = self.n_qubits;
        let mut qs: Vec<(usize, i8)> = self.qubits.iter().copied().zip(self.sector.iter().copied()).collect();
        qs.sort_by(|a, b| b.0.cmp(&a.0));
        for (q, s) in qs {
            let low = (1usize << q) - 1;
            let mut next = vec![Complex64::new(0.0, 0.0); 1 << (n - 1)];
            for (i, v) in next.iter_mut().enumerate() {
                let b0 = (i & low) | ((i & !low) << 1);
                let b1 = b0 | (1 << q);
                *v = (cur[b0] + cur[b1] * s as f64) * std::f64::consts::FRAC_1_SQRT_2;
            }
            cur = next;
            n -= 1;
        }
        cur
    }
}

/// True when every word of the observable anticommutes with some generator,
/// so its expectation vanishes in any symmetry eigenstate.
pub fn symmetry_vanishes(observable: &PauliSum, group: &SymmetryGroup) -> bool {
    observable.words().all(|w| !group.commutes_with(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_membership() {
        assert!(in_span(0b110, &[0b011, 0b101]));
        assert!(!in_span(0b001, &[0b011]));
    }

    #[test]
    fn zz_symmetry_of_xx_plus_yy() {
        let h = PauliSum::from_terms(2, [(PauliWord::parse("XX").unwrap(), 1.0), (PauliWord::parse("YY").unwrap(), 1.0)]);
        let s = find_z2_symmetries(&h);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].to_letters(2), "ZZ");
        let g = SymmetryGroup::from_reference(2, s, 0b01).unwrap();
        let t = Tapering::new(&g);
        let ht = t.taper_operator(&h).unwrap();
        assert_eq!(ht.n_qubits, 1);
        // odd-parity sector: XX+YY has eigenvalues ±2 there
        let d = ht.to_dense();
        let tr: f64 = d[0].re + d[3].re;
        let det = (d[0] * d[3] - d[1] * d[2]).re;
        assert!(tr.abs() < 1e-12 && (det + 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_dependent_generators() {
        let g = vec![PauliWord::z_only(0b11), PauliWord::z_only(0b110), PauliWord::z_only(0b101)];
        assert!(SymmetryGroup::new(3, g, vec![1, 1, 1]).is_err());
    }
}

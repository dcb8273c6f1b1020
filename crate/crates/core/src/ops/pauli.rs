//! Pauli words over up to 64 qubits and real/complex linear combinations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are pruned from sums.
pub const PRUNE_TOL: f64 = 1e-12;

/// A Hermitian Pauli word stored in symplectic form: qubit `k` carries
/// `X` if only bit `k` of `x` is set, `Z` if only `z`, `Y` if both.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliWord {
    pub x: u64,
    pub z: u64,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        PauliWord { x, z }
    }

    pub fn z_only(mask: u64) -> Self {
        PauliWord { x: 0, z: mask }
    }

    pub fn single(q: usize, letter: char) -> Self {
        let b = 1u64 << q;
        match letter {
            'X' => PauliWord { x: b, z: 0 },
            'Y' => PauliWord { x: b, z: b },
            'Z' => PauliWord { x: 0, z: b },
            _ => PauliWord::IDENTITY,
        }
    }

    /// Parse a letter string; character `k` is qubit `k`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut w = PauliWord::IDENTITY;
        if s.len() > 64 {
            return Err(Error::Bounds(format!("Pauli word longer than 64 qubits: {s}")));
        }
        for (k, c) in s.chars().enumerate() {
            let b = 1u64 << k;
            match c {
                'I' => {}
                'X' => w.x |= b,
                'Y' => {
                    w.x |= b;
                    w.z |= b
                }
                'Z' => w.z |= b,
                _ => return Err(Error::Contract(format!("invalid Pauli letter {c:?} in {s:?}"))),
            }
        }
        Ok(w)
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn to_letters(&self, n_qubits: usize) -> String {
        (0..n_qubits).map(|q| self.letter(q)).collect()
    }

    #[inline]
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    #[inline]
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    #[inline]
    pub fn commutes(&self, other: &PauliWord) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Qubit-wise commutation: on every shared qubit the letters agree.
    #[inline]
    pub fn qubitwise_commutes(&self, other: &PauliWord) -> bool {
        let both = self.support() & other.support();
        (self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0
    }

    /// Product `self · other = i^k · word`; returns `(k mod 4, word)`.
    #[inline]
    pub fn mul_phase(&self, other: &PauliWord) -> (u32, PauliWord) {
        let x3 = self.x ^ other.x;
        let z3 = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() + (other.x & other.z).count_ones() + 2 * (self.z & other.x).count_ones()
            + 4 * 64
            - (x3 & z3).count_ones();
        (k % 4, PauliWord { x: x3, z: z3 })
    }

    /// Drop qubit `q`, shifting higher qubits down by one.
    pub fn remove_qubit(&self, q: usize) -> PauliWord {
        let low = (1u64 << q) - 1;
        let squeeze = |m: u64| (m & low) | ((m >> 1) & !low);
        PauliWord { x: squeeze(self.x), z: squeeze(self.z) }
    }
}

pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Complex linear combination of Pauli words; intermediate form of mappings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QubitOperator {
    pub n_qubits: usize,
    pub terms: BTreeMap<PauliWord, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        QubitOperator { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut op = QubitOperator::zero(n_qubits);
        op.terms.insert(PauliWord::IDENTITY, Complex64::new(1.0, 0.0));
        op
    }

    pub fn add_term(&mut self, w: PauliWord, c: Complex64) {
        let e = self.terms.entry(w).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn mul(&self, other: &QubitOperator) -> QubitOperator {
        let mut out = QubitOperator::zero(self.n_qubits.max(other.n_qubits));
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (k, w) = wa.mul_phase(wb);
                out.add_term(w, ca * cb * i_pow(k));
            }
        }
        out.prune(PRUNE_TOL * 1e-3);
        out
    }

    pub fn add_assign(&mut self, other: &QubitOperator, scale: Complex64) {
        for (w, c) in &other.terms {
            self.add_term(*w, c * scale);
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Real observable form; fails if any imaginary part exceeds `tol`.
    pub fn to_observable(&self, tol: f64) -> Result<PauliSum> {
        let im = self.max_imag();
        if im > tol {
            return Err(Error::Contract(format!("operator is not Hermitian: imaginary coefficient {im:e}")));
        }
        let mut s = PauliSum::zero(self.n_qubits);
        for (w, c) in &self.terms {
            s.add_term(*w, c.re);
        }
        s.prune();
        Ok(s)
    }

    /// Hermitian part `(A + A†)/2` as a real observable.
    pub fn hermitian_part(&self) -> PauliSum {
        let mut s = PauliSum::zero(self.n_qubits);
        for (w, c) in &self.terms {
            s.add_term(*w, c.re);
        }
        s.prune();
        s
    }
}

/// Real linear combination of Pauli words (a Hermitian observable).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    pub n_qubits: usize,
    pub terms: BTreeMap<PauliWord, f64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliWord, f64)>) -> Self {
        let mut s = PauliSum::zero(n_qubits);
        for (w, c) in terms {
            s.add_term(w, c);
        }
        s.prune();
        s
    }

    pub fn add_term(&mut self, w: PauliWord, c: f64) {
        *self.terms.entry(w).or_insert(0.0) += c;
    }

    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() >= PRUNE_TOL);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, a: f64) -> PauliSum {
        PauliSum::from_terms(self.n_qubits, self.terms.iter().map(|(w, c)| (*w, c * a)))
    }

    pub fn constant(&self) -> f64 {
        self.terms.get(&PauliWord::IDENTITY).copied().unwrap_or(0.0)
    }

    pub fn words(&self) -> impl Iterator<Item = &PauliWord> {
        self.terms.keys()
    }

    pub fn to_qubit_operator(&self) -> QubitOperator {
        let mut q = QubitOperator::zero(self.n_qubits);
        for (w, c) in &self.terms {
            q.add_term(*w, Complex64::new(*c, 0.0));
        }
        q
    }

    /// Product of two observables; the result must again be Hermitian,
    /// which holds when the factors commute.
    pub fn product(&self, other: &PauliSum) -> QubitOperator {
        self.to_qubit_operator().mul(&other.to_qubit_operator())
    }

    /// `[(word, coefficient)]` JSON form used for dumps and golden files.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(w, c)| serde_json::json!([w.to_letters(self.n_qubits), c]))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Contract("Pauli dump must be an array".into()))?;
        let mut n = 0;
        let mut terms = Vec::new();
        for item in arr {
            let pair = item.as_array().filter(|p| p.len() == 2);
            let (w, c) = match pair {
                Some(p) => (p[0].as_str(), p[1].as_f64()),
                None => (None, None),
            };
            match (w, c) {
                (Some(w), Some(c)) => {
                    n = n.max(w.len());
                    terms.push((PauliWord::parse(w)?, c));
                }
                _ => return Err(Error::Contract(format!("malformed Pauli dump entry {item}"))),
            }
        }
        Ok(PauliSum::from_terms(n, terms))
    }

    /// Dense `2^n × 2^n` matrix (row-major), for small-register checks.
    pub fn to_dense(&self) -> Vec<Complex64> {
        self.to_qubit_operator().to_dense()
    }
}

impl QubitOperator {
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, c) in &self.terms {
            for col in 0..dim {
                let (row, ph) = apply_word_to_basis(w, col as u64);
                m[row as usize * dim + col] += c * ph;
            }
        }
        m
    }
}

/// `P|b⟩ = phase · |b'⟩`.
#[inline]
pub fn apply_word_to_basis(w: &PauliWord, b: u64) -> (u64, Complex64) {
    // Y = iXZ per qubit: phase i^{#Y} (−1)^{popcount(z & b)}
    let ny = (w.x & w.z).count_ones();
    let sign = (w.z & b).count_ones();
    (b ^ w.x, i_pow(ny + 2 * sign))
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c:.6}·{}", w.to_letters(self.n_qubits))?;
        }
        Ok(())
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        let mut s = self.clone();
        s.n_qubits = s.n_qubits.max(rhs.n_qubits);
        for (w, c) in &rhs.terms {
            s.add_term(*w, *c);
        }
        s.prune();
        s
    }
}

impl Mul<f64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, a: f64) -> PauliSum {
        self.scaled(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_word(w: &PauliWord, n: usize) -> Vec<Complex64> {
        let mut q = QubitOperator::zero(n);
        q.add_term(*w, Complex64::new(1.0, 0.0));
        q.to_dense()
    }

    fn matmul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                for j in 0..d {
                    c[i * d + j] += a[i * d + k] * b[k * d + j];
                }
            }
        }
        c
    }

    #[test]
    fn letters_round_trip() {
        let w = PauliWord::parse("IXYZ").unwrap();
        assert_eq!(w.to_letters(4), "IXYZ");
        assert!(PauliWord::parse("IQ").is_err());
    }

    #[test]
    fn product_phase_matches_dense() {
        let letters = ['I', 'X', 'Y', 'Z'];
        for a in 0..16 {
            for b in 0..16 {
                let wa = PauliWord::parse(&format!("{}{}", letters[a % 4], letters[a / 4])).unwrap();
                let wb = PauliWord::parse(&format!("{}{}", letters[b % 4], letters[b / 4])).unwrap();
                let (k, w) = wa.mul_phase(&wb);
                let lhs = matmul(&dense_word(&wa, 2), &dense_word(&wb, 2), 4);
                let rhs: Vec<_> = dense_word(&w, 2).iter().map(|x| x * i_pow(k)).collect();
                for (l, r) in lhs.iter().zip(&rhs) {
                    assert!((l - r).norm() < 1e-14, "{a} {b}");
                }
                let ab = matmul(&dense_word(&wa, 2), &dense_word(&wb, 2), 4);
                let ba = matmul(&dense_word(&wb, 2), &dense_word(&wa, 2), 4);
                let comm = ab.iter().zip(&ba).all(|(x, y)| (x - y).norm() < 1e-14);
                assert_eq!(comm, wa.commutes(&wb));
            }
        }
    }

    #[test]
    fn json_dump_round_trip() {
        let s = PauliSum::from_terms(4, [(PauliWord::parse("IZZI").unwrap(), 0.5), (PauliWord::IDENTITY, -1.0)]);
        let back = PauliSum::from_json(&s.to_json()).unwrap();
        assert_eq!(back.terms, s.terms);
    }

    #[test]
    fn remove_qubit_shifts() {
        let w = PauliWord::parse("XYZX").unwrap();
        assert_eq!(w.remove_qubit(1).to_letters(3), "XZX");
    }
}

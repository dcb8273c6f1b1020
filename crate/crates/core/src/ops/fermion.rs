//! Second-quantized fermionic operators over spin orbitals.
//!
//! Spin orbitals are interleaved: spatial orbital `p` owns modes `2p` (α)
//! and `2p + 1` (β).

use crate::chem::ActiveHamiltonian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder { mode, dagger: true }
    }
    pub fn annihilate(mode: usize) -> Self {
        Ladder { mode, dagger: false }
    }
}

#[inline]
pub fn spin_orbital(p: usize, beta: bool) -> usize {
    2 * p + beta as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coeff: f64,
    pub ops: Vec<Ladder>,
}

/// Real linear combination of ladder-operator products.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOperator {
    pub terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        FermionOperator { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        FermionOperator { terms: vec![FermionTerm { coeff: 1.0, ops: Vec::new() }] }
    }

    pub fn push(&mut self, coeff: f64, ops: Vec<Ladder>) {
        if coeff != 0.0 {
            self.terms.push(FermionTerm { coeff, ops });
        }
    }

    pub fn extend(&mut self, other: FermionOperator) {
        self.terms.extend(other.terms);
    }

    pub fn scaled(mut self, a: f64) -> Self {
        for t in &mut self.terms {
            t.coeff *= a;
        }
        self
    }

    pub fn mul(&self, other: &FermionOperator) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut ops = a.ops.clone();
                ops.extend_from_slice(&b.ops);
                out.push(a.coeff * b.coeff, ops);
            }
        }
        out
    }

    pub fn dagger(&self) -> FermionOperator {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm {
                    coeff: t.coeff,
                    ops: t.ops.iter().rev().map(|l| Ladder { mode: l.mode, dagger: !l.dagger }).collect(),
                })
                .collect(),
        }
    }

    /// Act on an occupation-number basis state (bit `k` = mode `k`).
    /// Returns `(coefficient, new bits)` pairs, Jordan–Wigner sign convention.
    pub fn apply_to_basis(&self, bits: u64) -> Vec<(f64, u64)> {
        let mut out = Vec::new();
        for t in &self.terms {
            if let Some((s, b)) = apply_ladders(&t.ops, bits) {
                out.push((t.coeff * s, b));
            }
        }
        out
    }
}

/// Apply a ladder product (rightmost first) to a basis determinant.
pub fn apply_ladders(ops: &[Ladder], mut bits: u64) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    for l in ops.iter().rev() {
        let m = 1u64 << l.mode;
        let occupied = bits & m != 0;
        if occupied == l.dagger {
            return None;
        }
        if (bits & (m - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        bits ^= m;
    }
    Some((sign, bits))
}

/// Spin-summed rank-k excitation
/// `Σ_σ a†_{u1σ1}…a†_{ukσk} a_{lkσk}…a_{l1σ1}`: upper index `i` pairs
/// with lower index `i` through a shared spin.
pub fn spin_traced_excitation(upper: &[usize], lower: &[usize]) -> FermionOperator {
    assert_eq!(upper.len(), lower.len());
    let k = upper.len();
    let mut op = FermionOperator::zero();
    for spins in 0..(1usize << k) {
        let mut ops = Vec::with_capacity(2 * k);
        for (i, &u) in upper.iter().enumerate() {
            ops.push(Ladder::create(spin_orbital(u, (spins >> i) & 1 == 1)));
        }
        for (i, &l) in lower.iter().enumerate().rev() {
            ops.push(Ladder::annihilate(spin_orbital(l, (spins >> i) & 1 == 1)));
        }
        op.push(1.0, ops);
    }
    op
}

/// Product of singlet excitations `E^{u1}_{l1} E^{u2}_{l2} …`.
pub fn excitation_product(upper: &[usize], lower: &[usize]) -> FermionOperator {
    let mut op = FermionOperator::identity();
    for (&u, &l) in upper.iter().zip(lower) {
        op = op.mul(&spin_traced_excitation(&[u], &[l]));
    }
    op
}

/// Active-space Hamiltonian `e_frozen + Σ h E + ½ Σ (pq|rs) e_{pr,qs}`.
pub fn hamiltonian_operator(h: &ActiveHamiltonian) -> FermionOperator {
    let n = h.n_active;
    let mut op = FermionOperator::zero();
    op.push(h.e_frozen, Vec::new());
    for p in 0..n {
        for q in 0..n {
            let v = h.h(p, q);
            if v.abs() > 1e-14 {
                op.extend(spin_traced_excitation(&[p], &[q]).scaled(v));
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = h.g(p, q, r, s);
                    if v.abs() > 1e-14 {
                        op.extend(spin_traced_excitation(&[p, r], &[q, s]).scaled(0.5 * v));
                    }
                }
            }
        }
    }
    op
}

pub fn number_operator(n_spatial: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for m in 0..2 * n_spatial {
        op.push(1.0, vec![Ladder::create(m), Ladder::annihilate(m)]);
    }
    op
}

pub fn sz_operator(n_spatial: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for p in 0..n_spatial {
        for (beta, s) in [(false, 0.5), (true, -0.5)] {
            let m = spin_orbital(p, beta);
            op.push(s, vec![Ladder::create(m), Ladder::annihilate(m)]);
        }
    }
    op
}

/// Total spin `S² = S₋S₊ + S_z(S_z + 1)`.
pub fn s2_operator(n_spatial: usize) -> FermionOperator {
    let mut sp = FermionOperator::zero();
    let mut sm = FermionOperator::zero();
    for p in 0..n_spatial {
        sp.push(1.0, vec![Ladder::create(spin_orbital(p, false)), Ladder::annihilate(spin_orbital(p, true))]);
        sm.push(1.0, vec![Ladder::create(spin_orbital(p, true)), Ladder::annihilate(spin_orbital(p, false))]);
    }
    let sz = sz_operator(n_spatial);
    let mut s2 = sm.mul(&sp);
    s2.extend(sz.mul(&sz));
    s2.extend(sz);
    s2
}

//! Molecular-orbital integrals, orbital-space partitions and the embedded
//! active-space Hamiltonian.

mod fcidump;
pub mod models;

pub use fcidump::{parse_fcidump, write_fcidump, FcidumpHeader};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// Partition of spatial orbitals into core < active < virtual blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitalSpaces {
    pub n_core: usize,
    pub n_active: usize,
    pub n_virtual: usize,
    pub n_active_electrons: usize,
    pub total_electrons: usize,
    /// Twice the total spin projection.
    pub spin_2s: i32,
}

impl OrbitalSpaces {
    pub fn new(
        n_core: usize,
        n_active: usize,
        n_virtual: usize,
        total_electrons: usize,
        spin_2s: i32,
    ) -> Result<Self> {
        if 2 * n_core > total_electrons {
            return contract(format!(
                "{n_core} core orbitals need {} electrons, only {total_electrons} available",
                2 * n_core
            ));
        }
        let n_active_electrons = total_electrons - 2 * n_core;
        let s = OrbitalSpaces { n_core, n_active, n_virtual, n_active_electrons, total_electrons, spin_2s };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_core * 2 + self.n_active_electrons != self.total_electrons {
            return contract("2*n_core + n_active_electrons != total_electrons");
        }
        if self.n_active_electrons > 2 * self.n_active {
            return contract(format!(
                "{} active electrons do not fit in {} active orbitals",
                self.n_active_electrons, self.n_active
            ));
        }
        if (self.spin_2s.unsigned_abs() as usize) > self.n_active_electrons
            || (self.n_active_electrons as i32 + self.spin_2s) % 2 != 0
        {
            return contract(format!(
                "MS2={} incompatible with {} active electrons",
                self.spin_2s, self.n_active_electrons
            ));
        }
        let (na, nb) = self.active_alpha_beta();
        if na > self.n_active || nb > self.n_active {
            return contract("spin projection does not fit in the active space");
        }
        Ok(())
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_core + self.n_active + self.n_virtual
    }

    /// Active α and β electron counts.
    pub fn active_alpha_beta(&self) -> (usize, usize) {
        let n = self.n_active_electrons as i32;
        (((n + self.spin_2s) / 2) as usize, ((n - self.spin_2s) / 2) as usize)
    }

    /// Aufbau determinant over the active spin orbitals (interleaved α/β).
    pub fn reference_bits(&self) -> u64 {
        let (na, nb) = self.active_alpha_beta();
        (0..na).map(|p| 1u64 << (2 * p)).chain((0..nb).map(|p| 1u64 << (2 * p + 1))).sum()
    }

    pub fn core(&self) -> std::ops::Range<usize> {
        0..self.n_core
    }

    pub fn active(&self) -> std::ops::Range<usize> {
        self.n_core..self.n_core + self.n_active
    }

    pub fn virtuals(&self) -> std::ops::Range<usize> {
        self.n_core + self.n_active..self.n_orbitals()
    }
}

/// One- and two-electron integrals over spatial molecular orbitals.
///
/// `eri` is stored in chemists' notation `(pq|rs)` with full 8-fold symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MOIntegrals {
    pub n_orbitals: usize,
    pub h1: Vec<f64>,
    pub eri: Vec<f64>,
    pub e_nuclear: f64,
}

impl MOIntegrals {
    pub fn zeros(n: usize) -> Self {
        MOIntegrals { n_orbitals: n, h1: vec![0.0; n * n], eri: vec![0.0; n.pow(4)], e_nuclear: 0.0 }
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_orbitals + q]
    }

    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.eri[((p * n + q) * n + r) * n + s]
    }

    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_orbitals;
        self.h1[p * n + q] = v;
        self.h1[q * n + p] = v;
    }

    /// Set `(pq|rs)` and its seven symmetry partners.
    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_orbitals;
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.eri[((a * n + b) * n + c) * n + d] = v;
        }
    }

    /// Largest violation of the h1 and 8-fold eri symmetries.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.n_orbitals;
        let mut err: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                err = err.max((self.h(p, q) - self.h(q, p)).abs());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        err = err
                            .max((v - self.g(q, p, r, s)).abs())
                            .max((v - self.g(p, q, s, r)).abs())
                            .max((v - self.g(r, s, p, q)).abs());
                    }
                }
            }
        }
        err
    }

    /// Reorder orbitals so that new orbital `k` is old orbital `order[k]`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_orbitals;
        let mut seen = vec![false; n];
        if order.len() != n {
            return contract(format!("orbital order has {} entries, expected {n}", order.len()));
        }
        for &o in order {
            if o >= n || seen[o] {
                return Err(Error::Bounds(format!("orbital order entry {o} invalid or repeated")));
            }
            seen[o] = true;
        }
        let mut out = MOIntegrals::zeros(n);
        out.e_nuclear = self.e_nuclear;
        for p in 0..n {
            for q in 0..n {
                out.h1[p * n + q] = self.h(order[p], order[q]);
                for r in 0..n {
                    for s in 0..n {
                        out.eri[((p * n + q) * n + r) * n + s] =
                            self.g(order[p], order[q], order[r], order[s]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Apply an orthogonal orbital rotation: new orbital `p` = Σ_μ c[μ, p] old μ.
    /// `coeff` is row-major `n × n`.
    pub fn rotated(&self, coeff: &[f64]) -> Self {
        let n = self.n_orbitals;
        assert_eq!(coeff.len(), n * n);
        let c = |mu: usize, p: usize| coeff[mu * n + p];
        let mut out = MOIntegrals::zeros(n);
        out.e_nuclear = self.e_nuclear;
        for p in 0..n {
            for q in 0..n {
                let mut v = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        v += c(a, p) * self.h(a, b) * c(b, q);
                    }
                }
                out.h1[p * n + q] = v;
            }
        }
        // four quarter transformations
        let mut t = self.eri.clone();
        for axis in 0..4 {
            let mut next = vec![0.0; n.pow(4)];
            let stride = n.pow(3 - axis as u32);
            for (off, slot) in next.iter_mut().enumerate() {
                let p = (off / stride) % n;
                let base = off - p * stride;
                let mut v = 0.0;
                for mu in 0..n {
                    v += c(mu, p) * t[base + mu * stride];
                }
                *slot = v;
            }
            t = next;
        }
        out.eri = t;
        out
    }
}

/// Active-space Hamiltonian with the frozen core folded into one-body terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveHamiltonian {
    pub n_active: usize,
    pub h1_eff: Vec<f64>,
    pub eri_act: Vec<f64>,
    pub e_frozen: f64,
}

impl ActiveHamiltonian {
    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h1_eff[p * self.n_active + q]
    }

    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_active;
        self.eri_act[((p * n + q) * n + r) * n + s]
    }
}

/// Core Fock operator `h_pq + Σ_i [2(pq|ii) − (pi|iq)]` over all orbitals.
pub fn core_fock(ints: &MOIntegrals, n_core: usize) -> Vec<f64> {
    let n = ints.n_orbitals;
    let mut f = ints.h1.clone();
    for p in 0..n {
        for q in 0..n {
            let mut v = 0.0;
            for i in 0..n_core {
                v += 2.0 * ints.g(p, q, i, i) - ints.g(p, i, i, q);
            }
            f[p * n + q] += v;
        }
    }
    f
}

pub fn build_active_hamiltonian(ints: &MOIntegrals, spaces: &OrbitalSpaces) -> Result<ActiveHamiltonian> {
    spaces.validate()?;
    if spaces.n_orbitals() != ints.n_orbitals {
        return contract(format!(
            "orbital spaces cover {} orbitals, integrals have {}",
            spaces.n_orbitals(),
            ints.n_orbitals
        ));
    }
    let n = ints.n_orbitals;
    let nc = spaces.n_core;
    let na = spaces.n_active;
    let fock = core_fock(ints, nc);
    let mut h1_eff = vec![0.0; na * na];
    let mut eri_act = vec![0.0; na.pow(4)];
    for t in 0..na {
        for u in 0..na {
            h1_eff[t * na + u] = fock[(nc + t) * n + nc + u];
            for v in 0..na {
                for w in 0..na {
                    eri_act[((t * na + u) * na + v) * na + w] = ints.g(nc + t, nc + u, nc + v, nc + w);
                }
            }
        }
    }
    let mut e_frozen = ints.e_nuclear;
    for i in 0..nc {
        e_frozen += 2.0 * ints.h(i, i);
        for j in 0..nc {
            e_frozen += 2.0 * ints.g(i, i, j, j) - ints.g(i, j, j, i);
        }
    }
    Ok(ActiveHamiltonian { n_active: na, h1_eff, eri_act, e_frozen })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_core_is_identity() {
        let ints = models::random_integrals(3, 7, 0.3);
        let spaces = OrbitalSpaces::new(0, 3, 0, 2, 0).unwrap();
        let ah = build_active_hamiltonian(&ints, &spaces).unwrap();
        assert_eq!(ah.h1_eff, ints.h1);
        assert_eq!(ah.eri_act, ints.eri);
        assert_eq!(ah.e_frozen, ints.e_nuclear);
    }

    #[test]
    fn single_core_closed_form() {
        let mut ints = MOIntegrals::zeros(2);
        ints.e_nuclear = 0.5;
        ints.set_h(0, 0, -2.0);
        ints.set_g(0, 0, 0, 0, 1.0);
        let spaces = OrbitalSpaces::new(1, 1, 0, 2, 0).unwrap();
        let ah = build_active_hamiltonian(&ints, &spaces).unwrap();
        assert!((ah.e_frozen - (0.5 - 4.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let ints = models::random_integrals(3, 1, 0.3);
        let spaces = OrbitalSpaces::new(1, 1, 0, 2, 0).unwrap();
        assert!(matches!(build_active_hamiltonian(&ints, &spaces), Err(Error::Contract(_))));
        assert!(OrbitalSpaces::new(0, 1, 0, 3, 1).is_err());
        assert!(OrbitalSpaces::new(2, 1, 0, 2, 0).is_err());
    }

    #[test]
    fn rotation_preserves_symmetry_and_identity() {
        let ints = models::random_integrals(4, 3, 0.3);
        let mut eye = vec![0.0; 16];
        for i in 0..4 {
            eye[i * 4 + i] = 1.0;
        }
        let same = ints.rotated(&eye);
        assert!(same.eri.iter().zip(&ints.eri).all(|(a, b)| (a - b).abs() < 1e-14));
        let (c, s) = (0.6f64, 0.8f64);
        let mut rot = eye.clone();
        rot[0] = c;
        rot[1] = -s;
        rot[4] = s;
        rot[5] = c;
        let r = ints.rotated(&rot);
        assert!(r.symmetry_error() < 1e-13);
    }
}

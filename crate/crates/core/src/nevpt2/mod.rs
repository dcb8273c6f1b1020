//! Strongly contracted NEVPT2 with the Dyall zeroth-order Hamiltonian.
//!
//! Every perturber is `P_l H |Ψ0⟩`, the part of `H|Ψ0⟩` with a fixed
//! multiset of core holes and virtual particles `l`. Its contribution is
//! `−N_l / (E_l − E0)` with `E_l − E0 = K_l / N_l + Σ ε_particles − Σ ε_holes`,
//! where `K_l = ⟨Ψ_l|H_act − E_act|Ψ_l⟩`. Two evaluations are provided:
//! contraction of RDMs ([`sc_nevpt2_from_rdms`]) and explicit determinants
//! ([`sc_nevpt2_oracle`]).

mod contract;
mod oracle;

pub use contract::sc_nevpt2_from_rdms;
pub use oracle::sc_nevpt2_oracle;

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chem::{core_fock, MOIntegrals, OrbitalSpaces};
use crate::error::{contract as violation, Result};
use crate::tensor::Tensor;

/// Perturber norms below this are skipped.
pub const NORM_TOL: f64 = 1e-12;
/// Denominators below this magnitude are flagged as intruders.
pub const DENOMINATOR_TOL: f64 = 1e-8;

/// Excitation class labelled by the change in active electron count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    /// two holes, two particles
    Ijrs,
    /// two holes, one particle
    Ijr,
    /// one hole, two particles
    Irs,
    /// two holes
    Ij,
    /// two particles
    Rs,
    /// one hole, one particle
    Ir,
    /// one hole
    I,
    /// one particle
    R,
}

impl Class {
    pub const ALL: [Class; 8] = [Class::Ijrs, Class::Ijr, Class::Irs, Class::Ij, Class::Rs, Class::Ir, Class::I, Class::R];

    /// `(core holes, virtual particles)`.
    pub fn counts(self) -> (usize, usize) {
        match self {
            Class::Ijrs => (2, 2),
            Class::Ijr => (2, 1),
            Class::Irs => (1, 2),
            Class::Ij => (2, 0),
            Class::Rs => (0, 2),
            Class::Ir => (1, 1),
            Class::I => (1, 0),
            Class::R => (0, 1),
        }
    }

    pub fn from_counts(holes: usize, particles: usize) -> Option<Class> {
        Class::ALL.iter().copied().find(|c| c.counts() == (holes, particles))
    }

    pub fn label(self) -> &'static str {
        match self {
            Class::Ijrs => "0",
            Class::Ijr => "+1",
            Class::Irs => "-1",
            Class::Ij => "+2",
            Class::Rs => "-2",
            Class::Ir => "0'",
            Class::I => "+1'",
            Class::R => "-1'",
        }
    }

    pub fn from_label(s: &str) -> Option<Class> {
        Class::ALL.iter().copied().find(|c| c.label() == s)
    }

    /// Highest RDM rank the class consumes.
    pub fn max_rdm_rank(self) -> usize {
        match self {
            Class::Ijrs => 0,
            Class::Ijr | Class::Irs | Class::Ij | Class::Rs => 3,
            Class::Ir => 3,
            Class::I | Class::R => 4,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEnergy {
    pub class: Class,
    pub e2: f64,
    /// Perturbers with norm above [`NORM_TOL`].
    pub n_perturbers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nevpt2Result {
    /// In [`Class::ALL`] order.
    pub classes: Vec<ClassEnergy>,
    pub total_e2: f64,
    pub reference_energy: f64,
    pub total_energy: f64,
    pub flags: Vec<String>,
    /// Where the RDMs came from (free text, e.g. `exact`, `cu4`).
    pub provenance: String,
}

impl Nevpt2Result {
    pub fn class_energy(&self, c: Class) -> f64 {
        self.classes.iter().find(|x| x.class == c).map_or(0.0, |x| x.e2)
    }

    /// Largest per-class deviation from `other`.
    pub fn max_class_diff(&self, other: &Nevpt2Result) -> f64 {
        Class::ALL.iter().map(|&c| (self.class_energy(c) - other.class_energy(c)).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Sum per-label contributions (already in a fixed order) into classes.
    pub(crate) fn assemble(
        per_class: Vec<(Class, Vec<LabelTerm>)>,
        reference_energy: f64,
        provenance: &str,
    ) -> Nevpt2Result {
        let mut classes = Vec::new();
        let mut flags = Vec::new();
        for c in Class::ALL {
            let terms: &[LabelTerm] = per_class.iter().find(|(k, _)| *k == c).map_or(&[], |(_, v)| v.as_slice());
            let mut e2 = 0.0;
            let mut count = 0;
            for t in terms {
                match t.outcome() {
                    Outcome::Skipped => {}
                    Outcome::Intruder(d) => {
                        count += 1;
                        flags.push(format!("class {c} label {:?}: denominator {d:e} below {DENOMINATOR_TOL:e}", t.label));
                    }
                    Outcome::Energy(e) => {
                        count += 1;
                        e2 += e;
                    }
                }
            }
            if e2 > 0.0 {
                flags.push(format!("class {c}: positive second-order energy {e2:e}"));
            }
            classes.push(ClassEnergy { class: c, e2, n_perturbers: count });
        }
        let total_e2 = classes.iter().map(|c| c.e2).sum();
        Nevpt2Result {
            classes,
            total_e2,
            reference_energy,
            total_energy: reference_energy + total_e2,
            flags,
            provenance: provenance.to_string(),
        }
    }
}

/// Norm and Koopmans-type energy of one perturber.
#[derive(Clone, Debug)]
pub(crate) struct LabelTerm {
    /// Core holes then virtual particles (absolute orbital indices).
    pub label: (Vec<usize>, Vec<usize>),
    pub norm: f64,
    /// `⟨Ψ_l|H_act − E_act|Ψ_l⟩`.
    pub koopmans: f64,
    /// `Σ ε_particles − Σ ε_holes`.
    pub orbital_gap: f64,
}

pub(crate) enum Outcome {
    Skipped,
    Intruder(f64),
    Energy(f64),
}

impl LabelTerm {
    fn outcome(&self) -> Outcome {
        if self.norm < NORM_TOL {
            return Outcome::Skipped;
        }
        let denom = self.koopmans / self.norm + self.orbital_gap;
        if denom.abs() < DENOMINATOR_TOL {
            Outcome::Intruder(denom)
        } else {
            Outcome::Energy(-self.norm / denom)
        }
    }
}

/// Dyall-Hamiltonian ingredients over semicanonical orbitals.
#[derive(Clone, Debug)]
pub struct DyallContext {
    pub spaces: OrbitalSpaces,
    /// Integrals after rotating core and virtual orbitals to diagonalize the
    /// generalized Fock matrix within each block.
    pub ints: MOIntegrals,
    /// Core Fock matrix `h + Σ_i [2(pq|ii) − (pi|iq)]`, full `n × n`.
    pub core_fock: Vec<f64>,
    pub eps_core: Vec<f64>,
    pub eps_virtual: Vec<f64>,
    /// Active block of the core Fock matrix.
    pub h_eff: Vec<f64>,
    pub eri_act: Vec<f64>,
}

/// `f_pq = h_pq + Σ_i [2(pq|ii) − (pi|iq)] + Σ_tu Γ1_tu [(pq|tu) − ½ (pt|uq)]`.
pub fn generalized_fock(ints: &MOIntegrals, spaces: &OrbitalSpaces, gamma1: &Tensor) -> Vec<f64> {
    let n = ints.n_orbitals;
    let nc = spaces.n_core;
    let na = spaces.n_active;
    let mut f = core_fock(ints, nc);
    for p in 0..n {
        for q in 0..n {
            let mut v = 0.0;
            for t in 0..na {
                for u in 0..na {
                    let d = gamma1.get(&[t, u]);
                    if d != 0.0 {
                        v += d * (ints.g(p, q, nc + t, nc + u) - 0.5 * ints.g(p, nc + t, nc + u, q));
                    }
                }
            }
            f[p * n + q] += v;
        }
    }
    f
}

impl DyallContext {
    pub fn new(ints: &MOIntegrals, spaces: &OrbitalSpaces, gamma1: &Tensor) -> Result<Self> {
        spaces.validate()?;
        let n = ints.n_orbitals;
        if spaces.n_orbitals() != n {
            return violation(format!("orbital spaces cover {} orbitals, integrals have {n}", spaces.n_orbitals()));
        }
        if gamma1.n() != spaces.n_active || gamma1.rank() != 2 {
            return violation("gamma1 does not match the active space");
        }
        let f = generalized_fock(ints, spaces, gamma1);
        let mut coeff = vec![0.0; n * n];
        for p in spaces.active() {
            coeff[p * n + p] = 1.0;
        }
        for block in [spaces.core(), spaces.virtuals()] {
            let m = block.len();
            if m == 0 {
                continue;
            }
            let sub = DMatrix::from_fn(m, m, |a, b| f[(block.start + a) * n + block.start + b]);
            let eig = SymmetricEigen::new(sub);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            for (new, &old) in order.iter().enumerate() {
                let col = eig.eigenvectors.column(old);
                // fix the sign so the largest component is positive
                let big = col.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
                let sign = if big < 0.0 { -1.0 } else { 1.0 };
                for a in 0..m {
                    coeff[(block.start + a) * n + block.start + new] = sign * col[a];
                }
            }
        }
        let rot = ints.rotated(&coeff);
        let fock = generalized_fock(&rot, spaces, gamma1);
        let cf = core_fock(&rot, spaces.n_core);
        let nc = spaces.n_core;
        let na = spaces.n_active;
        let mut h_eff = vec![0.0; na * na];
        let mut eri_act = vec![0.0; na.pow(4)];
        for t in 0..na {
            for u in 0..na {
                h_eff[t * na + u] = cf[(nc + t) * n + nc + u];
                for v in 0..na {
                    for w in 0..na {
                        eri_act[((t * na + u) * na + v) * na + w] = rot.g(nc + t, nc + u, nc + v, nc + w);
                    }
                }
            }
        }
        Ok(DyallContext {
            spaces: spaces.clone(),
            eps_core: spaces.core().map(|i| fock[i * n + i]).collect(),
            eps_virtual: spaces.virtuals().map(|r| fock[r * n + r]).collect(),
            ints: rot,
            core_fock: cf,
            h_eff,
            eri_act,
        })
    }

    /// `Σ ε_particles − Σ ε_holes` for absolute orbital indices.
    pub(crate) fn orbital_gap(&self, holes: &[usize], particles: &[usize]) -> f64 {
        let nc = self.spaces.n_core;
        let nv0 = nc + self.spaces.n_active;
        particles.iter().map(|&r| self.eps_virtual[r - nv0]).sum::<f64>() - holes.iter().map(|&i| self.eps_core[i]).sum::<f64>()
    }

    /// All labels of a class: sorted hole and particle multisets.
    pub(crate) fn labels(&self, class: Class) -> Vec<(Vec<usize>, Vec<usize>)> {
        let (h, p) = class.counts();
        let core: Vec<usize> = self.spaces.core().collect();
        let virt: Vec<usize> = self.spaces.virtuals().collect();
        let mut out = Vec::new();
        for hs in multisets(&core, h) {
            for ps in multisets(&virt, p) {
                out.push((hs.clone(), ps));
            }
        }
        out
    }
}

/// Sorted multisets of size `k` (0 ≤ k ≤ 2) drawn from `items`.
fn multisets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    match k {
        0 => vec![vec![]],
        1 => items.iter().map(|&a| vec![a]).collect(),
        2 => {
            let mut v = Vec::new();
            for (i, &a) in items.iter().enumerate() {
                for &b in &items[i..] {
                    v.push(vec![a, b]);
                }
            }
            v
        }
        _ => unreachable!("perturber labels have at most two holes or particles"),
    }
}

/// One row of a comparison of γ4 approximations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub label: String,
    pub variant: String,
    pub total_energy: f64,
    /// `|E(variant) − E(exact)|`.
    pub deviation: f64,
}

/// Per-point deviations of each variant from the `exact` variant. Input is
/// `(point label, [(variant name, result)])`; the first variant of every
/// point is the reference.
pub fn energy_error_report(points: &[(String, Vec<(String, Nevpt2Result)>)]) -> Result<Vec<ErrorRow>> {
    let mut rows = Vec::new();
    for (label, variants) in points {
        if variants.len() < 2 {
            return violation(format!("point {label}: at least two variants are needed"));
        }
        let reference = variants[0].1.total_energy;
        for (name, r) in variants {
            rows.push(ErrorRow {
                label: label.clone(),
                variant: name.clone(),
                total_energy: r.total_energy,
                deviation: (r.total_energy - reference).abs(),
            });
        }
    }
    Ok(rows)
}

pub fn error_report_csv(rows: &[ErrorRow]) -> String {
    let mut s = String::from("label,variant,total_energy,deviation\n");
    for r in rows {
        s.push_str(&format!("{},{},{:.12},{:.3e}\n", r.label, r.variant, r.total_energy, r.deviation));
    }
    s
}

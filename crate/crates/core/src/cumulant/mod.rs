//! Spin-free density cumulants, the CU(4) reconstruction of Γ4 (four-body
//! cumulant set to zero), filtered hybrids and sparsity diagnostics.
//!
//! Two independent routes to Γ4 exist. [`cu4_gamma4`] evaluates the
//! closed-form spin-free expansion term by term. [`cu4_gamma4_spin_adapted`]
//! builds the same quantity from the spin-orbital cumulant expansion, with
//! each spin-free cumulant mapped to a spin-pairing representative; the two
//! agree for singlet states and the second serves as a cross-check.

pub mod expansion;
mod filter;
pub mod formula;

pub use filter::{
    filtered_gamma4, significant_elements, sparsity_report, ElementOracle, EstimatedElements, ExactTensors, FilterOptions, FilterVariant, FilteredGamma4,
    MaskSource, SparsityMask, SparsityReport, DEFAULT_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use self::expansion::{disconnected_terms, evaluate, pairing_weights, permute_lower, permutations, Source};
use crate::error::{contract, Result};
use crate::rdm::RdmSet;
use crate::tensor::Tensor;

/// Connected parts of Γ2 and Γ3 (axes as the RDMs). Λ4 is zero under CU(4).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet {
    pub gamma1: Tensor,
    pub lambda2: Tensor,
    pub lambda3: Tensor,
}

fn scaled(t: &Tensor, a: f64) -> Tensor {
    Tensor::from_vec(t.n(), t.rank(), t.data().iter().map(|x| a * x).collect())
}

fn sum(a: &Tensor, b: &Tensor, sb: f64) -> Tensor {
    Tensor::from_vec(a.n(), a.rank(), a.data().iter().zip(b.data()).map(|(x, y)| x + sb * y).collect())
}

impl CumulantSet {
    /// Spin-pairing representatives `f1 = Γ1/2`, `f2`, `f3`.
    fn pairings(&self) -> [Tensor; 3] {
        [
            scaled(&self.gamma1, 0.5),
            permute_lower(&self.lambda2, &pairing_weights(2)),
            permute_lower(&self.lambda3, &pairing_weights(3)),
        ]
    }

    /// Γ2 or Γ3 rebuilt from the cumulants.
    pub fn reconstruct(&self, k: usize) -> Result<Tensor> {
        let f = self.pairings();
        let connected = match k {
            2 => &self.lambda2,
            3 => &self.lambda3,
            _ => return contract(format!("cumulant reconstruction of rank {k}")),
        };
        let disc = evaluate(&disconnected_terms(k), k, self.gamma1.n(), |s| match s {
            Source::Pairing(m) if m < k => Some(&f[m - 1]),
            _ => None,
        })?;
        Ok(sum(connected, &disc, 1.0))
    }
}

fn require_gamma3(rdms: &RdmSet) -> Result<&Tensor> {
    rdms.gamma3.as_ref().ok_or_else(|| crate::error::Error::Contract("cumulants need gamma3".into()))
}

/// Λ2 and Λ3 by peeling the disconnected products off Γ2 and Γ3.
pub fn cumulants_from_rdms(rdms: &RdmSet) -> Result<CumulantSet> {
    let g3 = require_gamma3(rdms)?;
    let n = rdms.n_active;
    let f1 = scaled(&rdms.gamma1, 0.5);
    let d2 = evaluate(&disconnected_terms(2), 2, n, |s| (s == Source::Pairing(1)).then_some(&f1))?;
    let lambda2 = sum(&rdms.gamma2, &d2, -1.0);
    let f2 = permute_lower(&lambda2, &pairing_weights(2));
    let d3 = evaluate(&disconnected_terms(3), 3, n, |s| match s {
        Source::Pairing(1) => Some(&f1),
        Source::Pairing(2) => Some(&f2),
        _ => None,
    })?;
    let lambda3 = sum(g3, &d3, -1.0);
    Ok(CumulantSet { gamma1: rdms.gamma1.clone(), lambda2, lambda3 })
}

fn formula_lookup<'a>(c: &'a CumulantSet, g4: Option<&'a Tensor>) -> impl Fn(Source) -> Option<&'a Tensor> {
    move |s| match s {
        Source::Gamma(1) => Some(&c.gamma1),
        Source::Lambda(2) => Some(&c.lambda2),
        Source::Lambda(3) => Some(&c.lambda3),
        Source::Gamma(4) => g4,
        _ => None,
    }
}

/// Γ4 with the four-body cumulant set to zero.
pub fn cu4_gamma4(rdms: &RdmSet) -> Result<Tensor> {
    let c = cumulants_from_rdms(rdms)?;
    evaluate(formula::cu4_terms(), 4, rdms.n_active, formula_lookup(&c, None))
}

/// Λ4 of a set carrying Γ4.
pub fn lambda4(rdms: &RdmSet) -> Result<Tensor> {
    let Some(g4) = rdms.gamma4.as_ref() else { return contract("Λ4 needs gamma4") };
    let c = cumulants_from_rdms(rdms)?;
    evaluate(formula::lambda4_terms(), 4, rdms.n_active, formula_lookup(&c, Some(g4)))
}

/// Γ4 from Λ4 and the lower RDMs; inverse of [`lambda4`].
pub fn gamma4_from_lambda4(rdms: &RdmSet, lambda4: &Tensor) -> Result<Tensor> {
    Ok(sum(&cu4_gamma4(rdms)?, lambda4, 1.0))
}

/// CU(4) through spin-pairing representatives of the spin-orbital expansion.
pub fn cu4_gamma4_spin_adapted(rdms: &RdmSet) -> Result<Tensor> {
    let c = cumulants_from_rdms(rdms)?;
    let f = c.pairings();
    evaluate(&disconnected_terms(4), 4, rdms.n_active, |s| match s {
        Source::Pairing(m) if m < 4 => Some(&f[m - 1]),
        _ => None,
    })
}

/// `max |Σ_v Γ4[p,r,t,v,q,s,u,v] − (N−3) Γ3[p,r,t,q,s,u]|`.
pub fn partial_trace_deviation(gamma4: &Tensor, rdms: &RdmSet) -> Result<f64> {
    let g3 = require_gamma3(rdms)?;
    let n = rdms.n_active;
    let factor = rdms.n_electrons as f64 - 3.0;
    let mut worst = 0.0f64;
    let mut idx = [0usize; 6];
    for off in 0..g3.len() {
        g3.unravel(off, &mut idx);
        let [p, r, t, q, s, u] = idx;
        let tr: f64 = (0..n).map(|v| gamma4.get(&[p, r, t, v, q, s, u, v])).sum();
        worst = worst.max((tr - factor * g3.data()[off]).abs());
    }
    Ok(worst)
}

/// Average over simultaneous pair permutations and the upper/lower swap.
pub fn symmetrize_gamma4(t: &Tensor) -> Tensor {
    let perms = permutations(4);
    let mut out = Tensor::zeros(t.n(), 8);
    let mut idx = [0usize; 8];
    let mut src = [0usize; 8];
    let weight = 1.0 / (2 * perms.len()) as f64;
    for off in 0..out.len() {
        out.unravel(off, &mut idx);
        let mut v = 0.0;
        for pi in &perms {
            for i in 0..4 {
                src[i] = idx[pi[i]];
                src[4 + i] = idx[4 + pi[i]];
            }
            v += t.get(&src);
            src.rotate_left(4);
            v += t.get(&src);
        }
        out.data_mut()[off] = weight * v;
    }
    out
}

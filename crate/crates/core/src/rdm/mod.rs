//! Spin-traced reduced density matrices: container, invariants, direct
//! oracle, element observables and the measurement pipeline.

mod execute;
pub mod io;
pub mod observables;
mod oracle;
pub mod plan;

pub use execute::{assemble_rdms, execute_plan, Estimates, Mode};
pub use observables::{canonical, element_observable, element_observables, rdm_observables, ElementKey, Kind, ObservableSet};
pub use oracle::{statevector_pdm4, statevector_rdms};
pub use plan::{partition_words, plan_measurements, MeasurementPlan, MeasurementSet, Strategy};

use serde::{Deserialize, Serialize};

use crate::chem::ActiveHamiltonian;
use crate::error::{contract, Result};
use crate::tensor::Tensor;

/// Spin-traced RDMs over `n_active` orbitals with axis order
/// `(upper…, lower…)`; `Γ2[p,r,q,s] = Σ ⟨a†_{pσ} a†_{rτ} a_{sτ} a_{qσ}⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdmSet {
    pub n_active: usize,
    pub n_electrons: usize,
    pub gamma1: Tensor,
    pub gamma2: Tensor,
    pub gamma3: Option<Tensor>,
    pub gamma4: Option<Tensor>,
    pub pdm4: Option<Tensor>,
}

impl RdmSet {
    pub fn gamma(&self, k: usize) -> Option<&Tensor> {
        match k {
            1 => Some(&self.gamma1),
            2 => Some(&self.gamma2),
            3 => self.gamma3.as_ref(),
            4 => self.gamma4.as_ref(),
            _ => None,
        }
    }

    /// `Σ h_pq Γ1_pq + ½ Σ (pq|rs) Γ2_prqs + e_frozen`.
    pub fn energy(&self, h: &ActiveHamiltonian) -> Result<f64> {
        let n = self.n_active;
        if h.n_active != n {
            return contract(format!("Hamiltonian has {} active orbitals, RDMs {n}", h.n_active));
        }
        let mut e = h.e_frozen;
        for p in 0..n {
            for q in 0..n {
                e += h.h(p, q) * self.gamma1.get(&[p, q]);
                for r in 0..n {
                    for s in 0..n {
                        e += 0.5 * h.g(p, q, r, s) * self.gamma2.get(&[p, r, q, s]);
                    }
                }
            }
        }
        Ok(e)
    }

    /// Largest violation of the trace, partial-trace, index-symmetry and
    /// vanishing-rank identities; each entry is `(identity, deviation)`.
    pub fn invariant_report(&self) -> Vec<(String, f64)> {
        let n = self.n_active;
        let ne = self.n_electrons as f64;
        let mut out = Vec::new();
        let tr: f64 = (0..n).map(|p| self.gamma1.get(&[p, p])).sum();
        out.push(("trace gamma1".to_string(), (tr - ne).abs()));
        for k in 2..=4 {
            let (Some(hi), Some(lo)) = (self.gamma(k), self.gamma(k - 1)) else { continue };
            let mut dev: f64 = 0.0;
            crate::tensor::for_each_index(n, 2 * (k - 1), |idx| {
                let (up, low) = idx.split_at(k - 1);
                let mut s = 0.0;
                for x in 0..n {
                    let mut full: Vec<usize> = up.to_vec();
                    full.push(x);
                    full.extend_from_slice(low);
                    full.push(x);
                    s += hi.get(&full);
                }
                dev = dev.max((s - (ne - (k as f64 - 1.0)) * lo.get(idx)).abs());
            });
            out.push((format!("partial trace gamma{k}"), dev));
        }
        for k in 1..=4 {
            let Some(g) = self.gamma(k) else { continue };
            let mut dev: f64 = 0.0;
            crate::tensor::for_each_index(n, 2 * k, |idx| {
                let v = g.get(idx);
                // hermiticity (real states)
                let mut h: Vec<usize> = idx[k..].to_vec();
                h.extend_from_slice(&idx[..k]);
                dev = dev.max((v - g.get(&h)).abs());
                // simultaneous pair permutation: swap pairs 0 and 1
                if k >= 2 {
                    let mut s = idx.to_vec();
                    s.swap(0, 1);
                    s.swap(k, k + 1);
                    dev = dev.max((v - g.get(&s)).abs());
                }
            });
            out.push((format!("symmetry gamma{k}"), dev));
            if self.n_electrons < k {
                out.push((format!("vanishing gamma{k}"), g.max_abs()));
            }
        }
        out
    }

    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        for (name, dev) in self.invariant_report() {
            if dev > tol {
                return contract(format!("RDM identity '{name}' violated by {dev:e}"));
            }
        }
        Ok(())
    }
}

/// `⟨e^{P}_{Q} E^{r1}_{s1} E^{r2}_{s2} …⟩` expanded with
/// `e^P_Q E^r_s = e^{P r}_{Q s} + Σ_i δ_{q_i r} e^P_{Q[q_i → s]}`.
/// `skip_top` drops the fully connected term.
fn product_value(
    gammas: &[Option<&Tensor>; 5],
    up: &mut Vec<usize>,
    low: &mut Vec<usize>,
    rest: &[(usize, usize)],
    skip_top: bool,
) -> f64 {
    let Some((&(r, s), tail)) = rest.split_first() else {
        if skip_top {
            return 0.0;
        }
        let mut idx = up.clone();
        idx.extend_from_slice(low);
        return gammas[up.len()].map_or(0.0, |g| g.get(&idx));
    };
    up.push(r);
    low.push(s);
    let mut v = product_value(gammas, up, low, tail, skip_top);
    up.pop();
    low.pop();
    for i in 0..low.len() {
        if low[i] == r {
            low[i] = s;
            v += product_value(gammas, up, low, tail, false);
            low[i] = r;
        }
    }
    v
}

fn gamma_slots<'a>(rdms: &'a RdmSet, g4: Option<&'a Tensor>) -> [Option<&'a Tensor>; 5] {
    [None, Some(&rdms.gamma1), Some(&rdms.gamma2), rdms.gamma3.as_ref(), g4]
}

/// 4-PDM `⟨E^p_q E^r_s E^t_u E^v_w⟩` (axes `[p,r,t,v,q,s,u,w]`) from Γ1..Γ4.
pub fn pdm4_from_rdms(rdms: &RdmSet) -> Result<Tensor> {
    let n = rdms.n_active;
    let g4 = match (&rdms.gamma3, &rdms.gamma4) {
        (Some(_), Some(g4)) => g4,
        _ => return contract("4-PDM assembly needs gamma3 and gamma4"),
    };
    let gammas = gamma_slots(rdms, Some(g4));
    let mut out = Tensor::zeros(n, 8);
    let mut idx = [0usize; 8];
    for off in 0..out.len() {
        out.unravel(off, &mut idx);
        let [p, r, t, v, q, s, u, w] = idx;
        let mut up = vec![p];
        let mut low = vec![q];
        out.data_mut()[off] = product_value(&gammas, &mut up, &mut low, &[(r, s), (t, u), (v, w)], false);
    }
    Ok(out)
}

/// Γ4 from the 4-PDM and Γ1..Γ3 by removing the disconnected terms.
pub fn rdm4_from_pdm4(rdms: &RdmSet, pdm4: &Tensor) -> Result<Tensor> {
    let n = rdms.n_active;
    if rdms.gamma3.is_none() {
        return contract("4-RDM recovery from the 4-PDM needs gamma3");
    }
    if pdm4.n() != n || pdm4.rank() != 8 {
        return contract("4-PDM does not match the active space");
    }
    let gammas = gamma_slots(rdms, None);
    let mut out = Tensor::zeros(n, 8);
    let mut idx = [0usize; 8];
    for off in 0..out.len() {
        out.unravel(off, &mut idx);
        let [p, r, t, v, q, s, u, w] = idx;
        let mut up = vec![p];
        let mut low = vec![q];
        let lower = product_value(&gammas, &mut up, &mut low, &[(r, s), (t, u), (v, w)], true);
        out.data_mut()[off] = pdm4.data()[off] - lower;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::models::random_integrals;
    use crate::chem::{build_active_hamiltonian, OrbitalSpaces};
    use crate::ci::casci_solve;

    #[test]
    fn pdm4_round_trip_matches_direct_evaluation() {
        let ints = random_integrals(3, 11, 1.0);
        let spaces = OrbitalSpaces::new(0, 3, 0, 4, 0).unwrap();
        let h = build_active_hamiltonian(&ints, &spaces).unwrap();
        let st = casci_solve(&h, &spaces).unwrap().to_statevector();
        let rdms = statevector_rdms(&st, 3, 4).unwrap();
        let direct = statevector_pdm4(&st, 3).unwrap();
        let built = pdm4_from_rdms(&rdms).unwrap();
        assert!(built.max_abs_diff(&direct) < 1e-10);
        let back = rdm4_from_pdm4(&rdms, &direct).unwrap();
        assert!(back.max_abs_diff(rdms.gamma4.as_ref().unwrap()) < 1e-10);
    }
}

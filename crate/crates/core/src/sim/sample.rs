use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Circuit, StateVector};
use crate::error::{contract, Error, Result};
use crate::ops::pauli::PauliWord;

/// Depolarizing noise after every gate (on each touched qubit) plus
/// independent readout bit flips.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub depolarizing: f64,
    pub readout: f64,
}

impl NoiseModel {
    pub fn new(depolarizing: f64, readout: f64) -> Result<Self> {
        for (name, p) in [("depolarizing", depolarizing), ("readout", readout)] {
            if !(0.0..=1.0).contains(&p) {
                return contract(format!("{name} probability {p} outside [0, 1]"));
            }
        }
        Ok(NoiseModel { depolarizing, readout })
    }

    pub fn readout_only(p: f64) -> Result<Self> {
        NoiseModel::new(0.0, p)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ShotTable {
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub total_shots: u64,
}

impl ShotTable {
    pub fn new(n_qubits: usize) -> Self {
        ShotTable { n_qubits, counts: BTreeMap::new(), total_shots: 0 }
    }

    pub fn record(&mut self, bits: u64, n: u64) {
        *self.counts.entry(bits).or_insert(0) += n;
        self.total_shots += n;
    }

    /// Keep only outcomes satisfying `keep`.
    pub fn filtered(&self, keep: impl Fn(u64) -> bool) -> ShotTable {
        let mut t = ShotTable::new(self.n_qubits);
        for (&b, &n) in &self.counts {
            if keep(b) {
                t.record(b, n);
            }
        }
        t
    }

    /// Mean of `(−1)^{popcount(bits & mask)}` over the recorded shots.
    pub fn parity_mean(&self, mask: u64) -> Option<f64> {
        if self.total_shots == 0 {
            return None;
        }
        let s: i64 = self
            .counts
            .iter()
            .map(|(&b, &n)| if (b & mask).count_ones() % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum();
        Some(s as f64 / self.total_shots as f64)
    }

    pub fn bitstring(&self, bits: u64) -> String {
        (0..self.n_qubits).map(|q| if bits >> q & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let counts: serde_json::Map<String, serde_json::Value> =
            self.counts.iter().map(|(&b, &n)| (self.bitstring(b), n.into())).collect();
        serde_json::json!({ "n_qubits": self.n_qubits, "total_shots": self.total_shots, "counts": counts })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::Contract("malformed shot table".into());
        let n = v["n_qubits"].as_u64().ok_or_else(bad)? as usize;
        let mut t = ShotTable::new(n);
        for (k, c) in v["counts"].as_object().ok_or_else(bad)? {
            if k.len() != n {
                return Err(bad());
            }
            let mut b = 0u64;
            for (q, ch) in k.chars().enumerate() {
                match ch {
                    '1' => b |= 1 << q,
                    '0' => {}
                    _ => return Err(bad()),
                }
            }
            t.record(b, c.as_u64().ok_or_else(bad)?);
        }
        if v["total_shots"].as_u64() != Some(t.total_shots) {
            return contract("shot table total does not match its counts");
        }
        Ok(t)
    }
}

fn cdf(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .probabilities()
        .into_iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], rng: &mut impl Rng) -> u64 {
    let u = rng.gen::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u64
}

/// Sample computational-basis outcomes after applying `basis_change`.
pub fn sample(
    state: &StateVector,
    basis_change: &Circuit,
    shots: u64,
    noise: Option<&NoiseModel>,
    rng: &mut impl Rng,
) -> Result<ShotTable> {
    if shots == 0 {
        return contract("shot count must be positive");
    }
    let n = state.n_qubits();
    let mut rotated = state.clone();
    rotated.apply_circuit(basis_change)?;
    let ideal = cdf(&rotated);
    let noise = noise.copied().unwrap_or_default();
    let mut table = ShotTable::new(n);
    let mut cache: HashMap<Vec<(usize, usize, u8)>, Vec<f64>> = HashMap::new();
    for _ in 0..shots {
        let mut errors = Vec::new();
        if noise.depolarizing > 0.0 {
            for (gi, g) in basis_change.gates.iter().enumerate() {
                for q in g.qubits() {
                    if rng.gen::<f64>() < noise.depolarizing {
                        errors.push((gi, q, rng.gen_range(0..3u8)));
                    }
                }
            }
        }
        let mut bits = if errors.is_empty() {
            draw(&ideal, rng)
        } else {
            let c = cache.entry(errors.clone()).or_insert_with(|| {
                let mut s = state.clone();
                let mut k = 0;
                for (gi, g) in basis_change.gates.iter().enumerate() {
                    s.apply_gate(g);
                    while k < errors.len() && errors[k].0 == gi {
                        let (_, q, l) = errors[k];
                        s.apply_word(PauliWord::single(q, ['X', 'Y', 'Z'][l as usize]));
                        k += 1;
                    }
                }
                cdf(&s)
            });
            draw(c, rng)
        };
        if noise.readout > 0.0 {
            for q in 0..n {
                if rng.gen::<f64>() < noise.readout {
                    bits ^= 1 << q;
                }
            }
        }
        table.record(bits, 1);
    }
    Ok(table)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Gate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_state_all_zero_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = sample(&StateVector::zero(2), &Circuit::new(2), 1000, None, &mut rng).unwrap();
        assert_eq!(t.counts.get(&0), Some(&1000));
        assert_eq!(t.total_shots, 1000);
    }

    #[test]
    fn scrambled_readout_kills_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let noise = NoiseModel::readout_only(0.5).unwrap();
        let t = sample(&StateVector::zero(2), &Circuit::new(2), 40_000, Some(&noise), &mut rng).unwrap();
        for m in 1..4 {
            assert!(t.parity_mean(m).unwrap().abs() < 4.0 / 200.0);
        }
    }

    #[test]
    fn deterministic_under_seed_and_json_round_trip() {
        let mut s = StateVector::zero(3);
        s.apply_gate(&Gate::H(0));
        s.apply_gate(&Gate::Cnot(0, 2));
        let mut c = Circuit::new(3);
        c.push(Gate::H(1));
        let noise = NoiseModel::new(0.05, 0.02).unwrap();
        let a = sample(&s, &c, 500, Some(&noise), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample(&s, &c, 500, Some(&noise), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(ShotTable::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        assert!(NoiseModel::new(1.5, 0.0).is_err());
        assert!(NoiseModel::new(0.0, -0.1).is_err());
    }
}

//! Index-term machinery: products of spin-free tensors whose upper and
//! lower slots are drawn from the output's `P` and `Q` indices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{contract, Result};
use crate::tensor::Tensor;

/// Tensor feeding a block of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Gamma(usize),
    Lambda(usize),
    /// Spin-pairing representative `f_m` of the rank-`m` cumulant.
    Pairing(usize),
}

/// One factor: `upper[i]` names the output `P` slot of the factor's i-th
/// upper axis, `lower[i]` the output `Q` slot of its i-th lower axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub source: Source,
    pub upper: Vec<usize>,
    pub lower: Vec<usize>,
}

impl Block {
    pub fn new(source: Source, upper: &[usize], lower: &[usize]) -> Self {
        Block { source, upper: upper.to_vec(), lower: lower.to_vec() }
    }

    /// Spin-free tensors are invariant under simultaneous permutation of
    /// their (upper, lower) pairs; sort the pairs.
    fn canonical(&self) -> Block {
        let mut pairs: Vec<(usize, usize)> = self.upper.iter().copied().zip(self.lower.iter().copied()).collect();
        pairs.sort_unstable();
        Block { source: self.source, upper: pairs.iter().map(|p| p.0).collect(), lower: pairs.iter().map(|p| p.1).collect() }
    }

    fn relabel(&self, up: &[usize], low: &[usize]) -> Block {
        Block {
            source: self.source,
            upper: self.upper.iter().map(|&i| up[i]).collect(),
            lower: self.lower.iter().map(|&i| low[i]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub blocks: Vec<Block>,
}

impl Term {
    fn key(&self) -> Vec<Block> {
        let mut b: Vec<Block> = self.blocks.iter().map(Block::canonical).collect();
        b.sort();
        b
    }
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

pub fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut c = 0;
    for s in 0..perm.len() {
        if !seen[s] {
            c += 1;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
            }
        }
    }
    c
}

pub fn parity(perm: &[usize]) -> f64 {
    if (perm.len() - cycle_count(perm)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Set partitions of `0..k`, blocks in order of their smallest element.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![vec![]];
    for e in 0..k {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q: Vec<Vec<usize>> = p.clone();
                q[b].push(e);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![e]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// Distinct images of `template` under simultaneous relabelling of the
/// `P` and `Q` slots, each carrying the template coefficient.
pub fn orbit(template: &Term, k: usize) -> Vec<Term> {
    let mut seen: BTreeMap<Vec<Block>, Term> = BTreeMap::new();
    for sigma in permutations(k) {
        let t = Term { coeff: template.coeff, blocks: template.blocks.iter().map(|b| b.relabel(&sigma, &sigma)).collect() };
        seen.entry(t.key()).or_insert(t);
    }
    seen.into_values().collect()
}

/// `Σ_B Σ_π sgn(π) 2^{c(π)} Π_b f(P_b; Q_{π(b)})` over set partitions `B`
/// of the `k` pairs with at least two blocks: the disconnected part of a
/// spin-traced rank-`k` density written through pairing representatives.
pub fn disconnected_terms(k: usize) -> Vec<Term> {
    let perms = permutations(k);
    let mut out = Vec::new();
    for part in set_partitions(k).into_iter().filter(|p| p.len() > 1) {
        for pi in &perms {
            let coeff = parity(pi) * f64::powi(2.0, cycle_count(pi) as i32);
            let blocks = part
                .iter()
                .map(|b| Block {
                    source: Source::Pairing(b.len()),
                    upper: b.clone(),
                    lower: b.iter().map(|&i| pi[i]).collect(),
                })
                .collect();
            out.push(Term { coeff, blocks });
        }
    }
    out
}

/// Coefficients `v(π)` with `f = Σ_π v(π) Λ(P; Q∘π)`: the pseudo-inverse of
/// `Λ = Σ_π sgn(π) 2^{c(π)} f(P; Q∘π)` in the group algebra of `S_m`. For
/// `m = 3` the map has a kernel (no totally antisymmetric spin state), which
/// the pseudo-inverse discards.
pub fn pairing_weights(m: usize) -> Vec<(Vec<usize>, f64)> {
    let perms = permutations(m);
    let index: BTreeMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let w = |p: &[usize]| parity(p) * f64::powi(2.0, cycle_count(p) as i32);
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&i| a[i]).collect() };
    // column σ of left multiplication by w: Σ_π w(π) (π∘σ)
    let d = perms.len();
    let mut mat = DMatrix::<f64>::zeros(d, d);
    for (c, sigma) in perms.iter().enumerate() {
        for pi in &perms {
            mat[(index[&compose(pi, sigma)], c)] += w(pi);
        }
    }
    let pinv = mat.pseudo_inverse(1e-10).expect("finite group-algebra matrix");
    let id = index[&(0..m).collect::<Vec<_>>()];
    perms.into_iter().enumerate().map(|(i, p)| (p, pinv[(i, id)])).filter(|(_, v)| v.abs() > 1e-14).collect()
}

/// `out(P;Q) = Σ_π c(π) t(P; Q∘π)` for a rank-`2m` spin-free tensor.
pub fn permute_lower(t: &Tensor, weights: &[(Vec<usize>, f64)]) -> Tensor {
    let m = t.rank() / 2;
    let mut out = Tensor::zeros(t.n(), t.rank());
    let mut idx = vec![0usize; 2 * m];
    let mut src = vec![0usize; 2 * m];
    for off in 0..out.len() {
        out.unravel(off, &mut idx);
        let mut v = 0.0;
        for (pi, c) in weights {
            src[..m].copy_from_slice(&idx[..m]);
            for i in 0..m {
                src[m + i] = idx[m + pi[i]];
            }
            v += c * t.get(&src);
        }
        out.data_mut()[off] = v;
    }
    out
}

struct Compiled<'a> {
    coeff: f64,
    data: Vec<&'a [f64]>,
    start: Vec<isize>,
    /// `delta[axis][block]`: offset change when the odometer carries into `axis`.
    delta: Vec<Vec<isize>>,
}

/// Sum `terms` into a rank-`2k` tensor with axes `[P1..Pk, Q1..Qk]`.
pub fn evaluate<'a>(terms: &[Term], k: usize, n: usize, lookup: impl Fn(Source) -> Option<&'a Tensor>) -> Result<Tensor> {
    let rank = 2 * k;
    let mut compiled = Vec::with_capacity(terms.len());
    for t in terms {
        let mut data = Vec::new();
        let mut strides = Vec::new();
        for b in &t.blocks {
            let Some(tensor) = lookup(b.source) else {
                return contract(format!("{:?} is not available for the expansion", b.source));
            };
            let m = b.upper.len();
            if tensor.rank() != 2 * m || tensor.n() != n {
                return contract(format!("{:?} has the wrong shape", b.source));
            }
            let mut s = vec![0isize; rank];
            for (a, &slot) in b.upper.iter().enumerate() {
                s[slot] += n.pow((2 * m - 1 - a) as u32) as isize;
            }
            for (a, &slot) in b.lower.iter().enumerate() {
                s[k + slot] += n.pow((m - 1 - a) as u32) as isize;
            }
            data.push(tensor.data());
            strides.push(s);
        }
        let delta = (0..rank)
            .map(|ax| {
                strides.iter().map(|s| s[ax] - s[ax + 1..].iter().map(|x| x * (n as isize - 1)).sum::<isize>()).collect()
            })
            .collect();
        let start = strides.iter().map(|s| s[0]).collect();
        compiled.push(Compiled { coeff: t.coeff, data, start, delta });
    }
    let mut out = Tensor::zeros(n, rank);
    if n == 0 {
        return Ok(out);
    }
    let chunk = n.pow(rank as u32 - 1);
    out.data_mut().par_chunks_mut(chunk).enumerate().for_each(|(p0, slab)| {
        let mut offs: Vec<Vec<isize>> = compiled.iter().map(|c| c.start.iter().map(|s| s * p0 as isize).collect()).collect();
        let mut idx = vec![0usize; rank];
        for (e, slot) in slab.iter_mut().enumerate() {
            if e > 0 {
                let mut ax = rank - 1;
                loop {
                    idx[ax] += 1;
                    if idx[ax] < n {
                        break;
                    }
                    idx[ax] = 0;
                    ax -= 1;
                }
                for (c, o) in compiled.iter().zip(offs.iter_mut()) {
                    for (x, d) in o.iter_mut().zip(&c.delta[ax]) {
                        *x += d;
                    }
                }
            }
            let mut v = 0.0;
            for (c, o) in compiled.iter().zip(&offs) {
                let mut prod = c.coeff;
                for (d, &x) in c.data.iter().zip(o) {
                    prod *= d[x as usize];
                }
                v += prod;
            }
            *slot = v;
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_are_bell_numbers() {
        let bell: Vec<usize> = (0..6).map(|k| set_partitions(k).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn pairing_weights_invert_the_spin_trace() {
        // rank 2: f = Λ/3 + Λ(swapped)/6
        let w = pairing_weights(2);
        assert_eq!(w.len(), 2);
        assert!((w[0].1 - 1.0 / 3.0).abs() < 1e-12 && (w[1].1 - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(pairing_weights(1), vec![(vec![0], 0.5)]);
    }

    #[test]
    fn evaluate_matches_direct_products() {
        let n = 3;
        let mut a = Tensor::zeros(n, 2);
        let mut b = Tensor::zeros(n, 4);
        for (i, x) in a.data_mut().iter_mut().enumerate() {
            *x = (i as f64 * 0.37).sin();
        }
        for (i, x) in b.data_mut().iter_mut().enumerate() {
            *x = (i as f64 * 0.11).cos();
        }
        // 2 a[p2,q3] b[p1,p3,q2,q1]
        let t = Term {
            coeff: 2.0,
            blocks: vec![Block::new(Source::Gamma(1), &[1], &[2]), Block::new(Source::Gamma(2), &[0, 2], &[1, 0])],
        };
        let out = evaluate(&[t], 3, n, |s| match s {
            Source::Gamma(1) => Some(&a),
            Source::Gamma(2) => Some(&b),
            _ => None,
        })
        .unwrap();
        let mut idx = [0usize; 6];
        for off in 0..out.len() {
            out.unravel(off, &mut idx);
            let [p1, p2, p3, q1, q2, q3] = idx;
            let e = 2.0 * a.get(&[p2, q3]) * b.get(&[p1, p3, q2, q1]);
            assert!((out.data()[off] - e).abs() < 1e-14);
        }
    }
}

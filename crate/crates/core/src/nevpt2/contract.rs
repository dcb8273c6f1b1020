//! Perturber norms and Koopmans energies contracted from active RDMs.
//!
//! `P_l H |Ψ0⟩` is a sum of words: core-normal-ordered one- and two-body
//! terms of `H` whose creators lie in active ∪ virtual and annihilators in
//! core ∪ active, with the external slots fixed by the label. For words
//! `α, β` the overlap `⟨W_α† W_β⟩` and `⟨W_α† [H_act, W_β]⟩` are tensors over
//! their free active indices. They depend on the label only through which
//! label entries coincide, so they are built once per pattern and then
//! contracted with the integral coefficients of every label.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{Class, DyallContext, LabelTerm, Nevpt2Result};
use crate::chem::{MOIntegrals, OrbitalSpaces};
use crate::error::{contract as violation, Error, Result};
use crate::rdm::{rdm4_from_pdm4, RdmSet};
use crate::wick::{self, Evaluator, Op, Space, Symbols, Term};

/// Creator/annihilator pair spaces of a one- or two-body term.
#[derive(Clone, Copy, Debug)]
struct WordType {
    /// `(p, q)` and optionally `(r, s)` for `a†_p a†_r a_s a_q`.
    pairs: [(Space, Space); 2],
    two_body: bool,
    /// Multiplies `f^c_pq` or `(pq|rs)`.
    factor: f64,
}

const PAIRS: [(Space, Space); 4] = [
    (Space::Active, Space::Active),
    (Space::Active, Space::Core),
    (Space::Virtual, Space::Active),
    (Space::Virtual, Space::Core),
];

impl WordType {
    fn slots(&self) -> Vec<(Space, bool)> {
        let mut v = vec![(self.pairs[0].0, true), (self.pairs[0].1, false)];
        if self.two_body {
            v.push((self.pairs[1].0, true));
            v.push((self.pairs[1].1, false));
        }
        v
    }

    fn counts(&self) -> (usize, usize) {
        let slots = self.slots();
        let holes = slots.iter().filter(|s| s.0 == Space::Core).count();
        let parts = slots.iter().filter(|s| s.0 == Space::Virtual).count();
        (holes, parts)
    }
}

/// Word types of `H` that produce `class`; the two orderings of unequal
/// pair types are merged.
fn word_types(class: Class) -> Vec<WordType> {
    let mut out = Vec::new();
    for (i, &a) in PAIRS.iter().enumerate() {
        if i > 0 {
            out.push(WordType { pairs: [a, a], two_body: false, factor: 1.0 });
        }
        for (j, &b) in PAIRS.iter().enumerate().skip(i) {
            if i == 0 && j == 0 {
                continue;
            }
            let factor = if i == j { 0.5 } else { 1.0 };
            out.push(WordType { pairs: [a, b], two_body: true, factor });
        }
    }
    out.retain(|w| w.counts() == class.counts());
    out
}

/// Which label position fills each external slot.
#[derive(Clone, Debug)]
struct Word {
    ty: WordType,
    /// Per slot (p, q, r, s order): `None` for active, `Some(position)` into
    /// the hole or particle list otherwise.
    ext: Vec<Option<usize>>,
    n_active_slots: usize,
}

fn permutations(k: usize, distinct: bool) -> Vec<Vec<usize>> {
    match (k, distinct) {
        (0, _) => vec![vec![]],
        (1, _) => vec![vec![0]],
        (2, true) => vec![vec![0, 1], vec![1, 0]],
        (2, false) => vec![vec![0, 1]],
        _ => unreachable!(),
    }
}

fn words(class: Class, holes_distinct: bool, parts_distinct: bool) -> Vec<Word> {
    let (h, p) = class.counts();
    let mut out = Vec::new();
    for ty in word_types(class) {
        let slots = ty.slots();
        for hp in permutations(h, holes_distinct) {
            for pp in permutations(p, parts_distinct) {
                let (mut hi, mut pi) = (0, 0);
                let ext = slots
                    .iter()
                    .map(|&(sp, _)| match sp {
                        Space::Core => {
                            hi += 1;
                            Some(hp[hi - 1])
                        }
                        Space::Virtual => {
                            pi += 1;
                            Some(pp[pi - 1])
                        }
                        Space::Active => None,
                    })
                    .collect();
                let n_active_slots = slots.iter().filter(|s| s.0 == Space::Active).count();
                out.push(Word { ty, ext, n_active_slots });
            }
        }
    }
    out
}

/// A word instantiated as an operator string over symbols.
struct Built {
    term: Term,
    active: Vec<u16>,
}

fn build(syms: &mut Symbols, w: &Word, hole_syms: &[u16], part_syms: &[u16]) -> Built {
    let slots = w.ty.slots();
    let mut ids = Vec::with_capacity(slots.len());
    let mut active = Vec::new();
    for (k, &(sp, _)) in slots.iter().enumerate() {
        let id = match (sp, w.ext[k]) {
            (Space::Core, Some(i)) => hole_syms[i],
            (Space::Virtual, Some(i)) => part_syms[i],
            _ => {
                let s = syms.orbital(Space::Active);
                active.push(s);
                s
            }
        };
        ids.push(id);
    }
    let sigma = syms.spin();
    let ops = if w.ty.two_body {
        let tau = syms.spin();
        vec![
            Op { sym: ids[0], dagger: true, spin: sigma },
            Op { sym: ids[2], dagger: true, spin: tau },
            Op { sym: ids[3], dagger: false, spin: tau },
            Op { sym: ids[1], dagger: false, spin: sigma },
        ]
    } else {
        vec![Op { sym: ids[0], dagger: true, spin: sigma }, Op { sym: ids[1], dagger: false, spin: sigma }]
    };
    Built { term: Term::new(ops), active }
}

/// Overlap and Koopmans blocks for one label pattern.
struct Pattern {
    words: Vec<Word>,
    /// `[α][β]`, row-major `n^{kα} × n^{kβ}`.
    overlap: Vec<Vec<Vec<f64>>>,
    koopmans: Vec<Vec<Vec<f64>>>,
}

fn pattern(class: Class, holes_distinct: bool, parts_distinct: bool, eval: &Evaluator) -> Result<Pattern> {
    let (h, p) = class.counts();
    let ws = words(class, holes_distinct, parts_distinct);
    let mut syms = Symbols::new();
    let hole_syms: Vec<u16> = (0..h).map(|_| syms.orbital(Space::Core)).collect();
    let part_syms: Vec<u16> = (0..p).map(|_| syms.orbital(Space::Virtual)).collect();
    let mut fixed = HashMap::new();
    for (i, &s) in hole_syms.iter().enumerate() {
        fixed.insert(s, if holes_distinct { i } else { 0 });
    }
    for (i, &s) in part_syms.iter().enumerate() {
        fixed.insert(s, if parts_distinct { i } else { 0 });
    }
    let bras: Vec<Built> = ws.iter().map(|w| build(&mut syms, w, &hole_syms, &part_syms)).collect();
    let kets: Vec<Built> = ws.iter().map(|w| build(&mut syms, w, &hole_syms, &part_syms)).collect();
    let commutators: Vec<Vec<Term>> = kets.iter().map(|k| wick::commutator_with_hamiltonian(&mut syms, &k.term)).collect();
    let mut overlap = Vec::with_capacity(ws.len());
    let mut koopmans = Vec::with_capacity(ws.len());
    for bra in &bras {
        let adj = bra.term.adjoint();
        let mut orow = Vec::with_capacity(ws.len());
        let mut krow = Vec::with_capacity(ws.len());
        for (ket, comm) in kets.iter().zip(&commutators) {
            let mut out: Vec<u16> = bra.active.clone();
            out.extend_from_slice(&ket.active);
            let terms = wick::expectation(&syms, &adj.times(&ket.term));
            orow.push(eval.accumulate(&terms, &out, &fixed, syms.len())?);
            let mut kterms = Vec::new();
            for c in comm {
                kterms.extend(wick::expectation(&syms, &adj.times(c)));
            }
            krow.push(eval.accumulate(&kterms, &out, &fixed, syms.len())?);
        }
        overlap.push(orow);
        koopmans.push(krow);
    }
    Ok(Pattern { words: ws, overlap, koopmans })
}

/// Integral coefficients of a word for a concrete label, over its active slots.
fn coefficients(ctx: &DyallContext, w: &Word, holes: &[usize], parts: &[usize]) -> Vec<f64> {
    let na = ctx.spaces.n_active;
    let nc = ctx.spaces.n_core;
    let n = ctx.ints.n_orbitals;
    let slots = w.ty.slots();
    let len = na.pow(w.n_active_slots as u32);
    let mut out = vec![0.0; len];
    let mut orb = vec![0usize; slots.len()];
    for (x, slot) in out.iter_mut().enumerate() {
        let mut rem = x;
        let mut digits = vec![0usize; w.n_active_slots];
        for d in (0..w.n_active_slots).rev() {
            digits[d] = rem % na;
            rem /= na;
        }
        let mut a = 0;
        for (k, &(sp, _)) in slots.iter().enumerate() {
            orb[k] = match (sp, w.ext[k]) {
                (Space::Core, Some(i)) => holes[i],
                (Space::Virtual, Some(i)) => parts[i],
                _ => {
                    a += 1;
                    nc + digits[a - 1]
                }
            };
        }
        *slot = w.ty.factor
            * if w.ty.two_body {
                ctx.ints.g(orb[0], orb[1], orb[2], orb[3])
            } else {
                ctx.core_fock[orb[0] * n + orb[1]]
            };
    }
    out
}

fn quadratic(blocks: &[Vec<Vec<f64>>], c: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (a, row) in blocks.iter().enumerate() {
        for (b, m) in row.iter().enumerate() {
            let (ca, cb) = (&c[a], &c[b]);
            let cols = cb.len();
            for (i, &x) in ca.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let r = &m[i * cols..(i + 1) * cols];
                total += x * r.iter().zip(cb).map(|(u, v)| u * v).sum::<f64>();
            }
        }
    }
    total
}

/// SC-NEVPT2 second-order energy from the active-space RDMs. `e_cas` is the
/// total reference energy (nuclear repulsion and frozen core included).
pub fn sc_nevpt2_from_rdms(ints: &MOIntegrals, spaces: &OrbitalSpaces, rdms: &RdmSet, e_cas: f64) -> Result<Nevpt2Result> {
    if rdms.n_active != spaces.n_active {
        return violation(format!("RDMs over {} orbitals, active space has {}", rdms.n_active, spaces.n_active));
    }
    if rdms.n_electrons != spaces.n_active_electrons {
        return violation(format!(
            "RDMs carry {} electrons, active space has {}",
            rdms.n_electrons, spaces.n_active_electrons
        ));
    }
    let ctx = DyallContext::new(ints, spaces, &rdms.gamma1)?;
    let needs_g4 = rdms.n_electrons > 3 && (spaces.n_core > 0 || spaces.n_virtual > 0);
    let converted;
    let gamma4 = match (&rdms.gamma4, &rdms.pdm4) {
        (Some(g), _) => Some(g),
        (None, Some(p)) => {
            converted = rdm4_from_pdm4(rdms, p)?;
            Some(&converted)
        }
        (None, None) if needs_g4 => {
            return violation(
                "the +1' and -1' classes need gamma4 or the 4-PDM; supply one or use the CU(4) reconstruction",
            )
        }
        (None, None) => None,
    };
    if rdms.n_electrons > 2 && rdms.gamma3.is_none() && (spaces.n_core > 0 || spaces.n_virtual > 0) {
        return violation("gamma3 is required for SC-NEVPT2 with more than two active electrons");
    }
    let na = spaces.n_active;
    let h_prime: Vec<f64> = (0..na * na)
        .map(|ad| {
            let (a, d) = (ad / na, ad % na);
            let s: f64 = (0..na).map(|b| ctx.eri_act[((a * na + b) * na + b) * na + d]).sum();
            ctx.h_eff[ad] - 0.5 * s
        })
        .collect();
    let eval = Evaluator {
        n_active: na,
        n_electrons: rdms.n_electrons,
        gammas: [None, Some(&rdms.gamma1), Some(&rdms.gamma2), rdms.gamma3.as_ref(), gamma4],
        h1: &h_prime,
        eri: &ctx.eri_act,
    };
    let mut per_class = Vec::new();
    for class in Class::ALL {
        let labels = ctx.labels(class);
        if labels.is_empty() {
            per_class.push((class, Vec::new()));
            continue;
        }
        let mut cache: HashMap<(bool, bool), Pattern> = HashMap::new();
        for (hs, ps) in &labels {
            let key = (hs.len() == 2 && hs[0] != hs[1], ps.len() == 2 && ps[0] != ps[1]);
            if !cache.contains_key(&key) {
                let pat = pattern(class, key.0, key.1, &eval).map_err(|e| match e {
                    Error::Missing(m) => Error::Contract(format!("class {class}: {m}")),
                    other => other,
                })?;
                cache.insert(key, pat);
            }
        }
        let terms: Vec<LabelTerm> = labels
            .par_iter()
            .map(|(hs, ps)| {
                let key = (hs.len() == 2 && hs[0] != hs[1], ps.len() == 2 && ps[0] != ps[1]);
                let pat = &cache[&key];
                let c: Vec<Vec<f64>> = pat.words.iter().map(|w| coefficients(&ctx, w, hs, ps)).collect();
                LabelTerm {
                    label: (hs.clone(), ps.clone()),
                    norm: quadratic(&pat.overlap, &c),
                    koopmans: quadratic(&pat.koopmans, &c),
                    orbital_gap: ctx.orbital_gap(hs, ps),
                }
            })
            .collect();
        per_class.push((class, terms));
    }
    Ok(Nevpt2Result::assemble(per_class, e_cas, "rdms"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_types_cover_every_class() {
        for c in Class::ALL {
            assert!(!word_types(c).is_empty(), "{c}");
        }
        // two holes and two particles come only from the (vc|vc) block
        let t = word_types(Class::Ijrs);
        assert_eq!(t.len(), 1);
        assert!(t[0].two_body && t[0].factor == 0.5);
    }

    #[test]
    fn equal_labels_drop_duplicate_assignments() {
        let distinct = words(Class::Ijrs, true, true).len();
        let equal = words(Class::Ijrs, false, false).len();
        assert_eq!((distinct, equal), (4, 1));
        assert!(words(Class::R, false, false).iter().all(|w| w.n_active_slots <= 3));
    }
}

//! Spin-free Wick contraction of ladder-operator strings against a
//! reference `|core⟩ ⊗ |Ψ_active⟩ ⊗ |empty virtuals⟩`.
//!
//! Orbitals are symbols tagged with a space; spins are labels, each
//! carried by exactly one creator and one annihilator of a string and
//! summed over. Core and virtual operators are contracted against their
//! quasi-vacuum; active operators are brought to normal order and read
//! off as spin-traced RDM elements.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Core,
    Active,
    Virtual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Op {
    pub sym: u16,
    pub dagger: bool,
    pub spin: u16,
}

/// Integral factor attached to a term, over orbital symbols.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// One-body active coefficient `h[a, b]`.
    H1(u16, u16),
    /// Active electron-repulsion integral `(ab|cd)`.
    G(u16, u16, u16, u16),
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: f64,
    pub ops: Vec<Op>,
    pub deltas: Vec<(u16, u16)>,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn new(ops: Vec<Op>) -> Self {
        Term { coeff: 1.0, ops, deltas: Vec::new(), factors: Vec::new() }
    }

    pub fn adjoint(&self) -> Term {
        Term {
            coeff: self.coeff,
            ops: self.ops.iter().rev().map(|o| Op { dagger: !o.dagger, ..*o }).collect(),
            deltas: self.deltas.clone(),
            factors: self.factors.clone(),
        }
    }

    /// Concatenation `self · other`.
    pub fn times(&self, other: &Term) -> Term {
        let mut ops = self.ops.clone();
        ops.extend_from_slice(&other.ops);
        let mut deltas = self.deltas.clone();
        deltas.extend_from_slice(&other.deltas);
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Term { coeff: self.coeff * other.coeff, ops, deltas, factors }
    }
}

/// `coeff · Π δ · Π factors · Γ_k[upper; lower]` (`k = 0` means 1).
#[derive(Clone, Debug)]
pub struct Contracted {
    pub coeff: f64,
    pub deltas: Vec<(u16, u16)>,
    pub factors: Vec<Factor>,
    pub upper: Vec<u16>,
    pub lower: Vec<u16>,
}

/// Symbol table: orbital space of every symbol id.
#[derive(Clone, Debug, Default)]
pub struct Symbols {
    spaces: Vec<Space>,
    next_spin: u16,
}

impl Symbols {
    pub fn new() -> Self {
        Symbols::default()
    }

    pub fn orbital(&mut self, space: Space) -> u16 {
        self.spaces.push(space);
        (self.spaces.len() - 1) as u16
    }

    pub fn spin(&mut self) -> u16 {
        self.next_spin += 1;
        self.next_spin - 1
    }

    pub fn space(&self, s: u16) -> Space {
        self.spaces[s as usize]
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    /// Spin-summed excitation `E^a_b = Σ_σ a†_{aσ} a_{bσ}` as an operator list.
    pub fn excitation(&mut self, a: u16, b: u16) -> Vec<Op> {
        let s = self.spin();
        vec![Op { sym: a, dagger: true, spin: s }, Op { sym: b, dagger: false, spin: s }]
    }
}

fn rename_spin(ops: &mut [Op], from: u16, to: u16) {
    for o in ops.iter_mut() {
        if o.spin == from {
            o.spin = to;
        }
    }
}

/// Contract two operators' spins; returns the loop factor.
fn merge_spins(ops: &mut [Op], a: u16, b: u16) -> f64 {
    if a == b {
        2.0
    } else {
        rename_spin(ops, b, a);
        1.0
    }
}

#[derive(Clone, Debug)]
struct Partial {
    coeff: f64,
    deltas: Vec<(u16, u16)>,
    ops: Vec<Op>,
}

/// Full quasi-vacuum contraction of external operators.
fn contract_external(syms: &Symbols, p: Partial, ext: Vec<Op>, out: &mut Vec<Partial>) {
    if ext.is_empty() {
        out.push(p);
        return;
    }
    let x = ext[0];
    for j in 1..ext.len() {
        let y = ext[j];
        if syms.space(x.sym) != syms.space(y.sym) {
            continue;
        }
        // ⟨a_r a†_s⟩ = δ for virtuals, ⟨a†_i a_j⟩ = δ for core
        let ok = match syms.space(x.sym) {
            Space::Virtual => !x.dagger && y.dagger,
            Space::Core => x.dagger && !y.dagger,
            Space::Active => unreachable!(),
        };
        if !ok {
            continue;
        }
        let mut rest: Vec<Op> = ext[1..].iter().enumerate().filter(|&(k, _)| k + 1 != j).map(|(_, o)| *o).collect();
        let mut q = p.clone();
        let f = if x.spin == y.spin {
            2.0
        } else {
            rename_spin(&mut rest, y.spin, x.spin);
            rename_spin(&mut q.ops, y.spin, x.spin);
            1.0
        };
        q.coeff *= f * if (j - 1) % 2 == 1 { -1.0 } else { 1.0 };
        if x.sym != y.sym {
            q.deltas.push((x.sym, y.sym));
        }
        contract_external(syms, q, rest, out);
    }
}

/// Bring active operators to normal order (creators left).
fn normal_order(p: Partial, out: &mut Vec<Partial>) {
    let pos = p.ops.windows(2).position(|w| !w[0].dagger && w[1].dagger);
    let Some(k) = pos else {
        out.push(p);
        return;
    };
    let (x, y) = (p.ops[k], p.ops[k + 1]);
    // a_x a†_y = δ_xy − a†_y a_x
    let mut swapped = p.clone();
    swapped.ops.swap(k, k + 1);
    swapped.coeff = -swapped.coeff;
    let mut contracted = p;
    contracted.ops.drain(k..k + 2);
    let f = merge_spins(&mut contracted.ops, x.spin, y.spin);
    contracted.coeff *= f;
    if x.sym != y.sym {
        contracted.deltas.push((x.sym, y.sym));
    }
    normal_order(contracted, out);
    normal_order(swapped, out);
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Reference expectation value of `term` as a sum of RDM contractions.
pub fn expectation(syms: &Symbols, term: &Term) -> Vec<Contracted> {
    let mut ext = Vec::new();
    let mut act = Vec::new();
    let mut sign = 1.0;
    for o in &term.ops {
        if syms.space(o.sym) == Space::Active {
            act.push(*o);
        } else {
            if act.len() % 2 == 1 {
                sign = -sign;
            }
            ext.push(*o);
        }
    }
    let start = Partial { coeff: term.coeff * sign, deltas: term.deltas.clone(), ops: act };
    let mut after_ext = Vec::new();
    contract_external(syms, start, ext, &mut after_ext);
    let mut normal = Vec::new();
    for p in after_ext {
        normal_order(p, &mut normal);
    }
    let mut out = Vec::new();
    for p in normal {
        let creators: Vec<Op> = p.ops.iter().filter(|o| o.dagger).copied().collect();
        let annihilators: Vec<Op> = p.ops.iter().filter(|o| !o.dagger).copied().collect();
        if creators.len() != annihilators.len() {
            continue;
        }
        let k = creators.len();
        // nested order wants annihilators partnered with c_k, …, c_1
        let mut perm = Vec::with_capacity(k);
        for c in creators.iter().rev() {
            let j = annihilators.iter().position(|a| a.spin == c.spin).expect("spin label pairs a creator with an annihilator");
            perm.push(j);
        }
        let s = permutation_sign(&perm);
        let upper = creators.iter().map(|o| o.sym).collect();
        let lower = creators.iter().map(|c| annihilators.iter().find(|a| a.spin == c.spin).unwrap().sym).collect();
        out.push(Contracted { coeff: p.coeff * s, deltas: p.deltas, factors: term.factors.clone(), upper, lower });
    }
    out
}

/// `[E^a_b, op]` for a single active operator, as `(δ pair, replacement)`.
fn commute_excitation(a: u16, b: u16, o: &Op) -> (u16, u16, Op) {
    if o.dagger {
        // [E^a_b, a†_p] = δ_bp a†_a
        (b, o.sym, Op { sym: a, ..*o })
    } else {
        // [E^a_b, a_p] = −δ_ap a_b
        (a, o.sym, Op { sym: b, ..*o })
    }
}

/// `[E^a_b, W]` restricted to the active operators of `w`.
pub fn commutator_with_excitation(syms: &Symbols, a: u16, b: u16, w: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    for (k, o) in w.ops.iter().enumerate() {
        if syms.space(o.sym) != Space::Active {
            continue;
        }
        let (d1, d2, rep) = commute_excitation(a, b, o);
        let mut t = w.clone();
        t.ops[k] = rep;
        if !o.dagger {
            t.coeff = -t.coeff;
        }
        if d1 != d2 {
            t.deltas.push((d1, d2));
        }
        out.push(t);
    }
    out
}

/// `[H_act, W]` with `H_act = Σ h'_{ab} E^a_b + ½ Σ (ab|cd) E^a_b E^c_d`.
pub fn commutator_with_hamiltonian(syms: &mut Symbols, w: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    let (a, b) = (syms.orbital(Space::Active), syms.orbital(Space::Active));
    for mut t in commutator_with_excitation(syms, a, b, w) {
        t.factors.push(Factor::H1(a, b));
        out.push(t);
    }
    let (a, b, c, d) =
        (syms.orbital(Space::Active), syms.orbital(Space::Active), syms.orbital(Space::Active), syms.orbital(Space::Active));
    let eab = Term::new(syms.excitation(a, b));
    let ecd = Term::new(syms.excitation(c, d));
    // E_ab [E_cd, W] + [E_ab, W] E_cd
    for t in commutator_with_excitation(syms, c, d, w) {
        let mut x = eab.times(&t);
        x.coeff *= 0.5;
        x.factors.push(Factor::G(a, b, c, d));
        out.push(x);
    }
    for t in commutator_with_excitation(syms, a, b, w) {
        let mut x = t.times(&ecd);
        x.coeff *= 0.5;
        x.factors.push(Factor::G(a, b, c, d));
        out.push(x);
    }
    out
}

/// Numerical inputs for evaluating contractions over active orbitals.
pub struct Evaluator<'a> {
    pub n_active: usize,
    pub n_electrons: usize,
    /// `gammas[k]` is the spin-traced k-RDM (`gammas[0]` unused).
    pub gammas: [Option<&'a Tensor>; 5],
    pub h1: &'a [f64],
    pub eri: &'a [f64],
}

impl Evaluator<'_> {
    fn gamma_tensor(&self, k: usize) -> Result<Option<&[f64]>> {
        if k > self.n_electrons {
            return Ok(None);
        }
        match self.gammas.get(k).copied().flatten() {
            Some(t) => Ok(Some(t.data())),
            None => Err(Error::Missing(format!("{k}-particle RDM required by contraction"))),
        }
    }

    /// Sum the contractions over all free active symbols, for each value of
    /// the output symbols; `fixed` pins external symbols to orbital values.
    /// Output layout: row-major over `out` symbols, `n_active` per axis.
    pub fn accumulate(
        &self,
        terms: &[Contracted],
        out_syms: &[u16],
        fixed: &HashMap<u16, usize>,
        n_symbols: usize,
    ) -> Result<Vec<f64>> {
        let n = self.n_active;
        let mut result = vec![0.0; n.pow(out_syms.len() as u32)];
        let mut parent: Vec<usize> = (0..n_symbols).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let one = [1.0];
        'terms: for t in terms {
            let k = t.upper.len();
            let gamma: &[f64] = if k == 0 {
                &one
            } else {
                match self.gamma_tensor(k)? {
                    Some(g) => g,
                    None => continue,
                }
            };
            for (i, v) in parent.iter_mut().enumerate() {
                *v = i;
            }
            for &(a, b) in &t.deltas {
                let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
            // class value pinned by an external symbol
            let mut pinned: HashMap<usize, usize> = HashMap::new();
            for (&s, &v) in fixed {
                let r = find(&mut parent, s as usize);
                if let Some(&old) = pinned.get(&r) {
                    if old != v {
                        continue 'terms;
                    }
                }
                pinned.insert(r, v);
            }
            // each tensor is (data, [(symbol, stride)])
            let mut tensors: Vec<(&[f64], Vec<(u16, usize)>)> = Vec::new();
            let axes = |syms: &[u16]| -> Vec<(u16, usize)> {
                let r = syms.len();
                syms.iter().enumerate().map(|(i, &s)| (s, n.pow((r - 1 - i) as u32))).collect()
            };
            let mut gidx: Vec<u16> = t.upper.clone();
            gidx.extend_from_slice(&t.lower);
            tensors.push((gamma, axes(&gidx)));
            for f in &t.factors {
                match *f {
                    Factor::H1(a, b) => tensors.push((self.h1, axes(&[a, b]))),
                    Factor::G(a, b, c, d) => tensors.push((self.eri, axes(&[a, b, c, d]))),
                }
            }
            let out_axes = axes(out_syms);
            let mut slot_of = vec![usize::MAX; n_symbols];
            let mut n_slots = 0;
            let mut assign = |s: u16, parent: &mut [usize]| -> Result<usize> {
                let r = find(parent, s as usize);
                if pinned.contains_key(&r) {
                    return Err(Error::Internal("active symbol pinned to an external orbital".into()));
                }
                if slot_of[r] == usize::MAX {
                    slot_of[r] = n_slots;
                    n_slots += 1;
                }
                Ok(slot_of[r])
            };
            // per-slot strides: row 0 is the output, rows 1.. the tensors
            let mut slot_tensor: Vec<Vec<(usize, usize)>> = Vec::new();
            for (s, st) in &out_axes {
                slot_tensor.push(vec![(assign(*s, &mut parent)?, *st)]);
            }
            let out_pairs: Vec<(usize, usize)> = slot_tensor.drain(..).flatten().collect();
            let mut tensor_pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(tensors.len());
            for (_, ax) in &tensors {
                let mut v = Vec::with_capacity(ax.len());
                for (s, st) in ax {
                    v.push((assign(*s, &mut parent)?, *st));
                }
                tensor_pairs.push(v);
            }
            let m = n_slots;
            if m > 0 && n == 0 {
                continue;
            }
            let nt = tensors.len();
            // stride[slot][0] for output, stride[slot][1 + j] for tensor j
            let mut stride = vec![vec![0usize; nt + 1]; m];
            for &(sl, st) in &out_pairs {
                stride[sl][0] += st;
            }
            for (j, pairs) in tensor_pairs.iter().enumerate() {
                for &(sl, st) in pairs {
                    stride[sl][1 + j] += st;
                }
            }
            let data: Vec<&[f64]> = tensors.iter().map(|(d, _)| *d).collect();
            let mut off = vec![0usize; nt + 1];
            let mut vals = vec![0usize; m];
            loop {
                let mut v = t.coeff;
                for j in 0..nt {
                    v *= data[j][off[1 + j]];
                    if v == 0.0 {
                        break;
                    }
                }
                if v != 0.0 {
                    result[off[0]] += v;
                }
                let mut d = m;
                loop {
                    if d == 0 {
                        continue 'terms;
                    }
                    d -= 1;
                    vals[d] += 1;
                    if vals[d] < n {
                        for (o, st) in off.iter_mut().zip(&stride[d]) {
                            *o += st;
                        }
                        break;
                    }
                    vals[d] = 0;
                    for (o, st) in off.iter_mut().zip(&stride[d]) {
                        *o -= (n - 1) * st;
                    }
                }
            }
        }
        Ok(result)
    }
}

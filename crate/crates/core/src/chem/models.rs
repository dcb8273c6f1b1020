//! Model integral sets used for tests, benchmarks and demonstration scans.
//!
//! The Pariser–Parr–Pople chain gives molecule-like integrals with spatial
//! (inversion) symmetry, a tunable bond length and a proper dissociation
//! limit, without needing a Gaussian integral engine.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MOIntegrals, OrbitalSpaces};

/// Bohr radius in Ångström.
const BOHR: f64 = 0.529_177_210_9;

/// Random real integrals with exact 8-fold symmetry and a Coulomb-like,
/// positive semidefinite two-electron part. Orbital energies increase with
/// index so that core < active < virtual orderings are meaningful.
pub fn random_integrals(n: usize, seed: u64, scale: f64) -> MOIntegrals {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ints = MOIntegrals::zeros(n);
    for p in 0..n {
        ints.set_h(p, p, -1.6 + 0.55 * p as f64 + scale * rng.gen_range(-0.2..0.2));
        for q in 0..p {
            ints.set_h(p, q, scale * rng.gen_range(-0.3..0.3));
        }
    }
    let npair = n * (n + 1) / 2;
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(npair + 1);
    let mut diag = vec![0.0; n * n];
    for p in 0..n {
        diag[p * n + p] = 0.75;
    }
    vecs.push(diag);
    for _ in 0..npair {
        let mut b = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..=p {
                let v = scale * rng.gen_range(-0.35..0.35);
                b[p * n + q] = v;
                b[q * n + p] = v;
            }
        }
        vecs.push(b);
    }
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    let v: f64 = vecs.iter().map(|b| b[p * n + q] * b[r * n + s]).sum();
                    ints.set_g(p, q, r, s, v);
                }
            }
        }
    }
    ints.e_nuclear = 0.5 + scale * rng.gen_range(0.0..0.1);
    ints
}

/// Parameters of a neutral Pariser–Parr–Pople chain (Hartree, Ångström).
#[derive(Clone, Copy, Debug)]
pub struct PppChain {
    pub sites: usize,
    /// Nearest-neighbour distance.
    pub bond: f64,
    /// Hopping at the reference bond length.
    pub t0: f64,
    pub r0: f64,
    /// Decay length of the hopping integral.
    pub decay: f64,
    /// On-site repulsion.
    pub u: f64,
}

impl PppChain {
    pub fn new(sites: usize, bond: f64) -> Self {
        PppChain { sites, bond, t0: 0.09, r0: 1.4, decay: 0.35, u: 0.40 }
    }

    fn hopping(&self) -> f64 {
        self.t0 * (-(self.bond - self.r0) / self.decay).exp()
    }

    fn coulomb(&self, r: f64) -> f64 {
        1.0 / ((r / BOHR).powi(2) + (1.0 / self.u).powi(2)).sqrt()
    }

    /// Integrals over RHF canonical orbitals (ascending orbital energy).
    pub fn integrals(&self) -> MOIntegrals {
        let l = self.sites;
        let t = self.hopping();
        let v = |i: usize, j: usize| {
            if i == j {
                self.u
            } else {
                self.coulomb(self.bond * (i as f64 - j as f64).abs())
            }
        };
        let mut h = DMatrix::<f64>::zeros(l, l);
        let mut e_nuc = 0.0;
        for i in 0..l {
            for j in 0..l {
                if i != j {
                    h[(i, i)] -= v(i, j);
                    if j > i {
                        e_nuc += v(i, j);
                    }
                }
                if i.abs_diff(j) == 1 {
                    h[(i, j)] = -t;
                }
            }
        }
        // closed-shell SCF in the zero-differential-overlap basis
        let nocc = l / 2;
        let mut coeff = SymmetricEigen::new(h.clone()).eigenvectors;
        let mut energies = SymmetricEigen::new(h.clone()).eigenvalues;
        sort_eigen(&mut energies, &mut coeff);
        let mut dens = density(&coeff, nocc);
        for _ in 0..500 {
            let mut f = h.clone();
            for i in 0..l {
                for j in 0..l {
                    if i == j {
                        f[(i, i)] += (0..l).map(|k| dens[(k, k)] * v(i, k)).sum::<f64>() - 0.5 * dens[(i, i)] * v(i, i);
                    } else {
                        f[(i, j)] -= 0.5 * dens[(i, j)] * v(i, j);
                    }
                }
            }
            let eig = SymmetricEigen::new(f);
            coeff = eig.eigenvectors;
            energies = eig.eigenvalues;
            sort_eigen(&mut energies, &mut coeff);
            let new = density(&coeff, nocc);
            let change = (&new - &dens).abs().max();
            dens = 0.5 * &dens + 0.5 * new;
            if change < 1e-12 {
                break;
            }
        }
        let mut site = MOIntegrals::zeros(l);
        site.e_nuclear = e_nuc;
        for i in 0..l {
            for j in 0..=i {
                site.set_h(i, j, h[(i, j)]);
            }
            for j in 0..l {
                site.set_g(i, i, j, j, v(i, j));
            }
        }
        let c: Vec<f64> = (0..l).flat_map(|mu| (0..l).map(move |p| (mu, p))).map(|(mu, p)| coeff[(mu, p)]).collect();
        site.rotated(&c)
    }
}

fn sort_eigen(vals: &mut nalgebra::DVector<f64>, vecs: &mut DMatrix<f64>) {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let v2 = nalgebra::DVector::from_iterator(n, order.iter().map(|&k| vals[k]));
    let mut m2 = DMatrix::zeros(vecs.nrows(), n);
    for (new, &old) in order.iter().enumerate() {
        // fix the sign so the largest component is positive
        let col = vecs.column(old);
        let big = col.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() + 1e-9 { x } else { a });
        let sgn = if big < 0.0 { -1.0 } else { 1.0 };
        m2.set_column(new, &(col * sgn));
    }
    *vals = v2;
    *vecs = m2;
}

fn density(c: &DMatrix<f64>, nocc: usize) -> DMatrix<f64> {
    let occ = c.columns(0, nocc);
    2.0 * &occ * occ.transpose()
}

/// Block-diagonal union of two non-interacting systems. Orbitals are ordered
/// core(a) core(b) active(a) active(b) virtual(a) virtual(b).
pub fn direct_sum(
    a: &MOIntegrals,
    sa: &OrbitalSpaces,
    b: &MOIntegrals,
    sb: &OrbitalSpaces,
) -> (MOIntegrals, OrbitalSpaces) {
    let n = a.n_orbitals + b.n_orbitals;
    let mut map_a = Vec::new();
    let mut map_b = Vec::new();
    let mut next = 0;
    for (ra, rb) in [(sa.core(), sb.core()), (sa.active(), sb.active()), (sa.virtuals(), sb.virtuals())] {
        for p in ra {
            map_a.push((p, next));
            next += 1;
        }
        for p in rb {
            map_b.push((p, next));
            next += 1;
        }
    }
    map_a.sort();
    map_b.sort();
    let mut out = MOIntegrals::zeros(n);
    out.e_nuclear = a.e_nuclear + b.e_nuclear;
    for (src, map) in [(a, &map_a), (b, &map_b)] {
        let m = src.n_orbitals;
        for p in 0..m {
            for q in 0..m {
                out.h1[map[p].1 * n + map[q].1] = src.h(p, q);
                for r in 0..m {
                    for s in 0..m {
                        let (pp, qq, rr, ss) = (map[p].1, map[q].1, map[r].1, map[s].1);
                        out.eri[((pp * n + qq) * n + rr) * n + ss] = src.g(p, q, r, s);
                    }
                }
            }
        }
    }
    let spaces = OrbitalSpaces::new(
        sa.n_core + sb.n_core,
        sa.n_active + sb.n_active,
        sa.n_virtual + sb.n_virtual,
        sa.total_electrons + sb.total_electrons,
        sa.spin_2s + sb.spin_2s,
    )
    .expect("union of valid spaces is valid");
    (out, spaces)
}

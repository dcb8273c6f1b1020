use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::SpinFreeHamiltonian;
use crate::error::{Error, Result};

const TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;
const MAX_SUBSPACE: usize = 40;

fn hv(ham: &SpinFreeHamiltonian, dets: &[u64], index: &HashMap<u64, usize>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dets.len()];
    let mut buf = HashMap::new();
    for (j, &d) in dets.iter().enumerate() {
        if v[j] == 0.0 {
            continue;
        }
        buf.clear();
        ham.apply_det(d, v[j], &mut buf);
        for (e, x) in &buf {
            if let Some(&i) = index.get(e) {
                out[i] += x;
            }
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthonormalize(v: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let n0 = dot(v, v).sqrt();
    if n0 == 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n0);
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let n = dot(v, v).sqrt();
    if n < 1e-6 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Davidson iteration with diagonal preconditioning.
pub(crate) fn lowest(ham: &SpinFreeHamiltonian, dets: &[u64]) -> Result<(f64, Vec<f64>)> {
    let n = dets.len();
    let index: HashMap<u64, usize> = dets.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let diag: Vec<f64> = dets
        .iter()
        .map(|&d| {
            let mut b = HashMap::new();
            ham.apply_det(d, 1.0, &mut b);
            b.get(&d).copied().unwrap_or(0.0)
        })
        .collect();
    // start from the lowest few diagonal entries with a deterministic mix
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut sigma: Vec<Vec<f64>> = Vec::new();
    for (k, &i) in order.iter().take(4.min(n)).enumerate() {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        if k > 0 {
            v[order[0]] = 0.1;
        }
        if orthonormalize(&mut v, &basis) {
            sigma.push(hv(ham, dets, &index, &v));
            basis.push(v);
        }
    }
    for _ in 0..MAX_ITER {
        let m = basis.len();
        let sub = DMatrix::from_fn(m, m, |i, j| dot(&basis[i], &sigma[j]));
        let sub = (&sub + sub.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sub);
        let k = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[k];
        let y = eig.eigenvectors.column(k);
        let mut x = vec![0.0; n];
        let mut r = vec![0.0; n];
        for j in 0..m {
            for i in 0..n {
                x[i] += y[j] * basis[j][i];
                r[i] += y[j] * (sigma[j][i] - theta * basis[j][i]);
            }
        }
        let rn = dot(&r, &r).sqrt();
        if rn < TOL {
            let nx = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|v| *v /= nx);
            return Ok((theta, x));
        }
        let mut t: Vec<f64> = r
            .iter()
            .zip(&diag)
            .map(|(ri, di)| {
                let d = di - theta;
                ri / if d.abs() < 1e-6 { 1e-6_f64.copysign(d) } else { d }
            })
            .collect();
        if basis.len() >= MAX_SUBSPACE {
            let nx = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|v| *v /= nx);
            sigma = vec![hv(ham, dets, &index, &x)];
            basis = vec![x];
        }
        if !orthonormalize(&mut t, &basis) {
            let mut rr = r.clone();
            if !orthonormalize(&mut rr, &basis) {
                continue;
            }
            t = rr;
        }
        sigma.push(hv(ham, dets, &index, &t));
        basis.push(t);
    }
    Err(Error::Internal(format!("Davidson did not converge in {MAX_ITER} iterations (dimension {n})")))
}

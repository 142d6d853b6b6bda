//! Dual test on the data itself. `⟨t(S), λ⟩ = tr(S K(λ))` vanishes for a PSD
//! `K(λ)` exactly when `K(λ) S = 0`, so the MLE fails to exist iff the
//! kernel space `{K ∈ 𝒦 : K S = 0}` contains a nonzero PSD matrix.
//!
//! The kernel space is found by SVD. Its matrices live on the null space of
//! `S`, where the largest smallest eigenvalue over the trace-one slice
//! decides: positive means a PSD witness, negative means none exists.

use super::criteria::ellipsoid_max;
use super::{Certificate, ExistenceError, ExistenceVerdict, Status};
use crate::mle::variable_scale;
use crate::models::Model;
use crate::numkernel::{lambda_min, right_svd, sym_eigen, SymMatrix};

/// Eigenvalues of the rescaled `S` below this fraction of the largest are
/// zero; up to `RANGE_GAP` the rank of `S` is ambiguous.
const RANGE_TOL: f64 = 1e-12;
const RANGE_GAP: f64 = 1e-9;
/// Singular values below `NULL_TOL` (relative) span the kernel space; up to
/// `NULL_GAP` its dimension is ambiguous.
const NULL_TOL: f64 = 1e-9;
const NULL_GAP: f64 = 1e-6;

const METHOD: &str = "kernel";

/// Decides existence from a full sample covariance `s`. Margins are on the
/// Exists side positive: `-μ`, with `μ` the best `k · λ_min` over trace-one
/// PSD candidates on the `k`-dimensional null space of `S`.
pub fn kernel_test(model: &Model, s: &SymMatrix, eps: f64) -> Result<ExistenceVerdict, ExistenceError> {
    let m = s.order();
    let scale = variable_scale(model, s);
    let sn = s.congruence_diag(&scale);
    let eig = sym_eigen(&sn)?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    if eig.values.iter().any(|&v| v > RANGE_TOL * top && v <= RANGE_GAP * top) {
        return Ok(ExistenceVerdict::new(Status::Undecided, METHOD, None, None));
    }
    let (perp, range): (Vec<_>, Vec<_>) = eig
        .values
        .iter()
        .zip(eig.vectors)
        .partition(|(v, _)| **v <= RANGE_TOL * top);
    let perp: Vec<Vec<f64>> = perp.into_iter().map(|p| p.1).collect();
    let range: Vec<Vec<f64>> = range.into_iter().map(|p| p.1).collect();
    let k = perp.len();
    if k == 0 {
        return Ok(ExistenceVerdict::new(Status::Exists, METHOD, None, None));
    }

    // Columns vec(A_g R) for every generator A_g of the model space.
    let gens = model.generators();
    let r = range.len();
    let columns: Vec<Vec<f64>> = gens
        .iter()
        .map(|cells| {
            let mut col = vec![0.0; m * r];
            for &(i, j) in cells {
                for (l, v) in range.iter().enumerate() {
                    col[i * r + l] += v[j];
                    if i != j {
                        col[j * r + l] += v[i];
                    }
                }
            }
            col
        })
        .collect();
    let null: Vec<Vec<f64>> = if r == 0 {
        // S = 0 never reaches here (zero variances are rejected earlier).
        (0..gens.len()).map(|g| (0..gens.len()).map(|h| f64::from(u8::from(g == h))).collect()).collect()
    } else {
        let svd = right_svd(&columns)?;
        let big = svd.values[0].max(f64::MIN_POSITIVE);
        if svd.values.iter().any(|&v| v > NULL_TOL * big && v <= NULL_GAP * big) {
            return Ok(ExistenceVerdict::new(Status::Undecided, METHOD, None, None));
        }
        svd.values
            .iter()
            .zip(svd.vectors)
            .filter(|(v, _)| **v <= NULL_TOL * big)
            .map(|(_, vec)| vec)
            .collect()
    };
    if null.is_empty() {
        return Ok(ExistenceVerdict::new(Status::Exists, METHOD, None, None));
    }

    // Restrict to the null space of S and orthonormalise (Frobenius).
    let restrict = |lambda: &[f64]| -> SymMatrix {
        let kk = model.concentration(lambda);
        SymMatrix::from_fn(k, |a, b| {
            let kv = kk.mul_vec(&perp[b]);
            perp[a].iter().zip(&kv).map(|(x, y)| x * y).sum()
        })
    };
    let mut basis: Vec<(SymMatrix, Vec<f64>)> = Vec::new();
    for nu in &null {
        let mut e = restrict(nu);
        let mut lam = nu.clone();
        for (b, bl) in &basis {
            let c = e.dot(b);
            e = e.sub(&b.scaled(c));
            for (x, y) in lam.iter_mut().zip(bl) {
                *x -= c * y;
            }
        }
        let norm = e.dot(&e).sqrt();
        if norm > 1e-10 {
            lam.iter_mut().for_each(|x| *x /= norm);
            basis.push((e.scaled(1.0 / norm), lam));
        }
    }
    let d = basis.len();
    let g: Vec<f64> = basis.iter().map(|(e, _)| e.diag().iter().sum()).collect();
    let gn2: f64 = g.iter().map(|x| x * x).sum();
    if d == 0 || gn2.sqrt() <= 1e-10 {
        // Every kernel matrix is traceless on the null space, hence indefinite.
        return Ok(ExistenceVerdict::new(Status::Exists, METHOD, None, None));
    }
    let c0: Vec<f64> = g.iter().map(|x| x / gn2).collect();
    let dirs = complement(&g);
    let combine = |y: &[f64]| -> Vec<f64> {
        let mut c = c0.clone();
        for (dir, &t) in dirs.iter().zip(y) {
            for (ci, di) in c.iter_mut().zip(dir) {
                *ci += t * di;
            }
        }
        c
    };
    let matrix = |c: &[f64]| -> SymMatrix {
        let mut acc = SymMatrix::zeros(k);
        for ((e, _), &cj) in basis.iter().zip(c) {
            acc = acc.add(&e.scaled(cj));
        }
        acc
    };
    let kf = k as f64;
    let mut failure = None;
    let eval = |y: &[f64]| -> (f64, Vec<f64>) {
        let c = combine(y);
        match lambda_min(&matrix(&c)) {
            Ok((lam, v)) => {
                let gc: Vec<f64> = basis
                    .iter()
                    .map(|(e, _)| v.iter().zip(e.mul_vec(&v)).map(|(a, b)| a * b).sum::<f64>())
                    .collect();
                let gy = dirs.iter().map(|dir| kf * dir.iter().zip(&gc).map(|(a, b)| a * b).sum::<f64>()).collect();
                (kf * lam, gy)
            }
            Err(e) => {
                failure = Some(e);
                (f64::NEG_INFINITY, vec![0.0; dirs.len()])
            }
        }
    };
    let b0 = matrix(&c0);
    let e0 = sym_eigen(&b0)?;
    let spread = e0.values.last().unwrap() - e0.values[0];
    let radius = spread * (kf * (kf - 1.0)).sqrt() + 1e-9;
    let (best, best_y, upper) = if dirs.is_empty() {
        let f = kf * e0.values[0];
        (f, Vec::new(), f)
    } else {
        let n = dirs.len();
        let res = ellipsoid_max(eval, vec![0.0; n], radius, 400 * n * n + 200, eps, -eps);
        (res.best, res.best_x, res.upper)
    };
    if let Some(e) = failure {
        return Err(e.into());
    }
    if best > eps {
        let c = combine(&best_y);
        let mut lambda = vec![0.0; gens.len()];
        for ((_, bl), &cj) in basis.iter().zip(&c) {
            for (x, y) in lambda.iter_mut().zip(bl) {
                *x += cj * y;
            }
        }
        let k_orig = model.concentration(&lambda).congruence_diag(&scale);
        let direction = k_orig.scaled(1.0 / k_orig.max_abs());
        let pairing = s.dot(&direction);
        return Ok(ExistenceVerdict::new(
            Status::NotExists,
            METHOD,
            Some(-best),
            Some(Certificate::DualWitness { direction, pairing }),
        ));
    }
    if upper < -eps {
        return Ok(ExistenceVerdict::new(Status::Exists, METHOD, Some(-upper), None));
    }
    let status = if best >= -eps && upper <= eps { Status::Boundary } else { Status::Undecided };
    Ok(ExistenceVerdict::new(status, METHOD, Some(-best), None))
}

/// Orthonormal basis of the complement of `g`.
fn complement(g: &[f64]) -> Vec<Vec<f64>> {
    let n = g.len();
    let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut out: Vec<Vec<f64>> = vec![g.iter().map(|x| x / gn).collect()];
    for i in 0..n {
        let mut v: Vec<f64> = (0..n).map(|j| f64::from(u8::from(i == j))).collect();
        for b in &out {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 && out.len() < n {
            out.push(v.iter().map(|x| x / norm).collect());
        }
    }
    out.remove(0);
    out
}

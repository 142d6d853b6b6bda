//! General PD-completion feasibility: supergradient ascent on the smallest
//! eigenvalue over the free entries, backed by the likelihood solver as a
//! dual witness when the primal search cannot certify.

use super::{Certificate, ExistenceError, ExistenceVerdict, Status};
use crate::mle::{fit, MleError};
use crate::models::{Model, PartialMatrix};
use crate::numkernel::{lambda_min, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityOptions {
    pub iters: usize,
    /// Step length at iteration `k` is `step / sqrt(k)`.
    pub step: f64,
    pub eps_pd: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions {
            iters: 500,
            step: 1.0,
            eps_pd: super::EPS_PD,
        }
    }
}

/// Best completion found by maximising `λ_min` over the non-edge entries of
/// the correlation-rescaled partial matrix. Returns `(λ_min, completion)`.
pub fn max_min_eigenvalue(corr: &PartialMatrix, opts: &FeasibilityOptions) -> Result<(f64, SymMatrix), ExistenceError> {
    let free = corr.graph.non_edges();
    let mut z = vec![0.0; free.len()];
    let mut best = (f64::NEG_INFINITY, corr.complete_with(&z));
    for k in 1..=opts.iters.max(1) {
        let c = corr.complete_with(&z);
        let (lam, v) = lambda_min(&c)?;
        if lam > best.0 {
            best = (lam, c);
        }
        if best.0 > opts.eps_pd || free.is_empty() {
            break;
        }
        let g: Vec<f64> = free.iter().map(|&(i, j)| 2.0 * v[i] * v[j]).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let t = opts.step / (k as f64).sqrt() / norm;
        for (zi, gi) in z.iter_mut().zip(&g) {
            *zi = (*zi + t * gi).clamp(-1.0, 1.0);
        }
    }
    Ok(best)
}

/// Decides PD completability of `p`.
///
/// `Exists` carries a completion; `NotExists` carries a recession direction
/// of the likelihood (a PSD concentration matrix supported on the graph with
/// non-positive pairing against the data), which certifies that no completion
/// exists.
pub fn general_feasibility(p: &PartialMatrix, opts: &FeasibilityOptions) -> Result<ExistenceVerdict, ExistenceError> {
    if let Some(i) = p.diag.iter().position(|&v| !(v > 0.0)) {
        return Err(ExistenceError::BadDiagonal(i + 1));
    }
    let (corr, d) = p.correlation();
    let (best, completion) = max_min_eigenvalue(&corr, opts)?;
    let inv: Vec<f64> = d.iter().map(|v| 1.0 / v).collect();
    if best > opts.eps_pd {
        return Ok(ExistenceVerdict::new(
            Status::Exists,
            "feasibility",
            Some(best),
            Some(Certificate::completion(completion.congruence_diag(&inv))),
        ));
    }
    if corr.graph.non_edges().is_empty() {
        let status = if best < -opts.eps_pd { Status::NotExists } else { Status::Boundary };
        let cert = (status == Status::NotExists).then(|| Certificate::violation("the matrix is fully specified and not PD".into()));
        return Ok(ExistenceVerdict::new(status, "feasibility", Some(best), cert));
    }
    // The likelihood of the plain model depends on the data only through
    // the partial matrix, so any completion can stand in for S.
    let model = Model::plain(corr.graph.clone());
    let (lower, upper, sigma, witness) = match fit(&model, &completion) {
        Ok(r) => {
            let (u, w) = super::dual_bound(&completion, &r.k_hat)?;
            let lo = super::unit_scale_lambda_min(&r.sigma_hat);
            (lo.max(best), u, Some(r.sigma_hat), Some(w))
        }
        Err(MleError::Diverged { direction, .. }) => {
            let (u, w) = super::dual_bound(&completion, &direction)?;
            (best, u, None, Some(w))
        }
        Err(MleError::NoConvergence { .. }) => (best, f64::INFINITY, None, None),
        Err(MleError::BadInput(msg)) => return Err(ExistenceError::OutOfRange(msg)),
        Err(MleError::Num(e)) => return Err(e.into()),
    };
    if lower > opts.eps_pd {
        let sigma = sigma.expect("lower bound above best comes from the MLE");
        return Ok(ExistenceVerdict::new(
            Status::Exists,
            "feasibility+mle",
            Some(lower),
            Some(Certificate::completion(sigma.congruence_diag(&inv))),
        ));
    }
    // A converged fit puts a PD point in the fiber: the best margin then
    // lies in `[lower, upper]`, which is Boundary rather than NotExists.
    if upper <= opts.eps_pd && sigma.is_none() {
        let w = witness.expect("finite bound has a witness");
        let k = w.congruence_diag(&d);
        let k = k.scaled(1.0 / k.max_abs());
        let pairing = dot_on_graph(p, &k);
        return Ok(ExistenceVerdict::new(
            Status::NotExists,
            "feasibility+mle",
            Some(lower.min(upper)),
            Some(Certificate::DualWitness { direction: k, pairing }),
        ));
    }
    let status = if lower >= -opts.eps_pd { Status::Boundary } else { Status::Undecided };
    Ok(ExistenceVerdict::new(status, "feasibility+mle", Some(lower), None))
}

/// `⟨S_G, K⟩` for `K` supported on the graph.
pub(crate) fn dot_on_graph(p: &PartialMatrix, k: &SymMatrix) -> f64 {
    let mut s: f64 = p.diag.iter().enumerate().map(|(i, v)| v * k.get(i, i)).sum();
    for (&(i, j), v) in &p.edge_vals {
        s += 2.0 * v * k.get(i, j);
    }
    s
}

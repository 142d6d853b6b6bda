//! Maximum likelihood estimation over the linear concentration space of a
//! plain or colored model.
//!
//! The objective `f(λ) = log det K(λ) − ⟨t, λ⟩` is concave; its gradient is
//! `t(Σ) − t(S)` with `Σ = K⁻¹`, and its Hessian is
//! `−tr(Σ A_k Σ A_l)`. Newton steps are damped by backtracking that rejects
//! any point outside the PD cone.

use serde::Serialize;
use thiserror::Error;

use crate::models::{stat_from_generators, Cells, ColoredModel, Model};
use crate::numkernel::{cholesky, lambda_min, NumError, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MleError {
    #[error("likelihood unbounded: |K| reached {k_max:e} after {iters} iterations (gradient {grad:e}); the MLE does not exist")]
    Diverged {
        iters: usize,
        k_max: f64,
        grad: f64,
        objective: f64,
        /// Last iterate, normalised to unit max entry: approximates a
        /// direction of recession (a PSD matrix in the model space with
        /// `⟨S, D⟩ ≈ 0`).
        direction: SymMatrix,
    },
    #[error("no convergence after {iters} iterations (gradient {grad:e})")]
    NoConvergence { iters: usize, grad: f64 },
    #[error("bad input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// `K = I` in the rescaled problem.
    Identity,
    /// `K = c I` in the rescaled problem.
    ScaledIdentity(f64),
    /// Explicit starting concentration in the rescaled problem; must lie in
    /// the model space and be PD.
    Concentration(SymMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Stop when the gradient's max-norm falls below this.
    pub tol: f64,
    /// Accept a stalled line search if the gradient is below this.
    pub stall_tol: f64,
    /// Stop when the squared Newton decrement falls below this.
    pub decrement_tol: f64,
    pub max_iter: usize,
    /// Declare divergence when an entry of the rescaled K exceeds this.
    pub divergence_bound: f64,
    pub init: Init,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-10,
            stall_tol: 1e-7,
            decrement_tol: 1e-16,
            max_iter: 200,
            divergence_bound: 1e10,
            init: Init::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MleResult {
    pub sigma_hat: SymMatrix,
    pub k_hat: SymMatrix,
    /// `log det K̂ − tr(S K̂)`.
    pub loglik: f64,
    pub iters: usize,
    /// Largest moment-matching violation, in the units of `S`.
    pub residual: f64,
}

/// Fits with default options.
pub fn fit(model: &Model, s: &SymMatrix) -> Result<MleResult, MleError> {
    fit_with(model, s, &FitOptions::default())
}

pub fn fit_with(model: &Model, s: &SymMatrix, opts: &FitOptions) -> Result<MleResult, MleError> {
    validate(model, s)?;
    let gens = model.generators();
    // Rescale so the problem is well conditioned; `scale[i]` multiplies
    // variable i.
    let scale = variable_scale(model, s);
    let s_n = s.congruence_diag(&scale);
    let t = stat_from_generators(&gens, &s_n);
    let lambda0 = match &opts.init {
        Init::Identity => model.coordinates(&SymMatrix::identity(s.order())).0,
        Init::ScaledIdentity(c) => model.coordinates(&SymMatrix::identity(s.order()).scaled(*c)).0,
        Init::Concentration(k) => {
            let (lambda, dev) = model.coordinates(k);
            if dev > 0.0 || cholesky(k).is_err() {
                return Err(MleError::BadInput("starting point outside the PD model space".into()));
            }
            lambda
        }
    };
    let (lambda, iters) = newton(&gens, &t, lambda0, opts)?;
    let k_n = concentration(&gens, &lambda, s.order());
    let sigma_n = cholesky(&k_n)?.inverse();
    let inv: Vec<f64> = scale.iter().map(|v| 1.0 / v).collect();
    let sigma_hat = sigma_n.congruence_diag(&inv);
    let k_hat = k_n.congruence_diag(&scale);
    let loglik = cholesky(&k_hat)?.logdet() - s.dot(&k_hat);
    let residual = moment_residual(&gens, &sigma_hat, s);
    Ok(MleResult {
        sigma_hat,
        k_hat,
        loglik,
        iters,
        residual,
    })
}

/// Diagonal rescaling `D` that keeps the model space fixed under
/// `K -> D K D` and brings `D S D` close to unit diagonal.
pub(crate) fn variable_scale(model: &Model, s: &SymMatrix) -> Vec<f64> {
    match model {
        Model::Plain(_) => s.diag().iter().map(|v| 1.0 / v.sqrt()).collect(),
        Model::Colored(cm) => colored_scale(cm, s),
    }
}

/// Per-class factors when every edge class joins one fixed pair of vertex
/// classes (the model is then closed under rescaling each vertex class),
/// otherwise one common factor.
fn colored_scale(cm: &ColoredModel, s: &SymMatrix) -> Vec<f64> {
    let m = s.order();
    let edges = cm.graph.edges();
    let mut joins: Vec<Option<(usize, usize)>> = vec![None; cm.edge_classes()];
    let mut per_class = true;
    for (&(i, j), &c) in edges.iter().zip(cm.edge_class_of()) {
        let (a, b) = (cm.vertex_class(i), cm.vertex_class(j));
        let pair = (a.min(b), a.max(b));
        match joins[c] {
            None => joins[c] = Some(pair),
            Some(p) if p == pair => {}
            Some(_) => per_class = false,
        }
    }
    if !per_class {
        let mean = s.diag().iter().sum::<f64>() / m as f64;
        return vec![1.0 / mean.sqrt(); m];
    }
    let mut sum = vec![0.0; cm.vertex_classes()];
    let mut count = vec![0usize; cm.vertex_classes()];
    for v in 0..m {
        sum[cm.vertex_class(v)] += s.get(v, v);
        count[cm.vertex_class(v)] += 1;
    }
    (0..m)
        .map(|v| {
            let c = cm.vertex_class(v);
            (count[c] as f64 / sum[c]).sqrt()
        })
        .collect()
}

fn validate(model: &Model, s: &SymMatrix) -> Result<(), MleError> {
    if s.order() != model.order() {
        return Err(MleError::BadInput(format!(
            "S is {}x{}, model has {} variables",
            s.order(),
            s.order(),
            model.order()
        )));
    }
    if !s.is_finite() {
        return Err(MleError::BadInput("S has non-finite entries".into()));
    }
    if let Some(i) = s.diag().iter().position(|&v| !(v > 0.0)) {
        return Err(MleError::BadInput(format!("S has non-positive diagonal entry at {}", i + 1)));
    }
    Ok(())
}

fn concentration(gens: &[Cells], lambda: &[f64], m: usize) -> SymMatrix {
    let mut k = SymMatrix::zeros(m);
    for (cells, &l) in gens.iter().zip(lambda) {
        for &(i, j) in cells {
            k.set(i, j, l);
        }
    }
    k
}

/// Ordered index pairs of a generator: `(i, j)` and `(j, i)` for off-diagonal
/// cells.
fn ordered(cells: &Cells) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(2 * cells.len());
    for &(i, j) in cells {
        out.push((i, j));
        if i != j {
            out.push((j, i));
        }
    }
    out
}

/// Fisher information `tr(Σ A_k Σ A_l)`.
fn information(ord: &[Vec<(usize, usize)>], sigma: &SymMatrix) -> Vec<Vec<f64>> {
    let p = ord.len();
    let mut h = vec![vec![0.0; p]; p];
    for k in 0..p {
        for l in 0..=k {
            let mut v = 0.0;
            for &(a, b) in &ord[k] {
                for &(c, d) in &ord[l] {
                    v += sigma.get(b, c) * sigma.get(d, a);
                }
            }
            h[k][l] = v;
            h[l][k] = v;
        }
    }
    h
}

fn objective(k: &SymMatrix, t: &[f64], lambda: &[f64]) -> Option<f64> {
    let chol = cholesky(k).ok()?;
    Some(chol.logdet() - t.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>())
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// A stalled iterate whose squared Newton decrement is below this is at the
/// optimum up to rounding.
const STALL_DECREMENT: f64 = 1e-9;

fn newton(gens: &[Cells], t: &[f64], mut lambda: Vec<f64>, opts: &FitOptions) -> Result<(Vec<f64>, usize), MleError> {
    let m = gens
        .iter()
        .flatten()
        .map(|&(i, _)| i + 1)
        .max()
        .unwrap_or(0);
    let ord: Vec<Vec<(usize, usize)>> = gens.iter().map(ordered).collect();
    let mut k = concentration(gens, &lambda, m);
    let mut f = objective(&k, t, &lambda)
        .ok_or_else(|| MleError::BadInput("starting point is not positive definite".into()))?;
    for iter in 0..opts.max_iter {
        let sigma = cholesky(&k)?.inverse();
        let grad: Vec<f64> = stat_from_generators(gens, &sigma)
            .iter()
            .zip(t)
            .map(|(a, b)| a - b)
            .collect();
        let gnorm = inf_norm(&grad);
        if gnorm <= opts.tol {
            return Ok((lambda, iter));
        }
        let k_max = k.max_abs();
        if k_max > opts.divergence_bound {
            return Err(MleError::Diverged {
                iters: iter,
                k_max,
                grad: gnorm,
                objective: f,
                direction: k.scaled(1.0 / k_max),
            });
        }
        let info = information(&ord, &sigma);
        let step = solve_pd(&info, &grad);
        let slope: f64 = grad.iter().zip(&step).map(|(g, d)| g * d).sum();
        // `slope` is the squared Newton decrement, which bounds the remaining
        // gain in the objective independently of the parametrisation.
        if slope <= opts.decrement_tol {
            return Ok((lambda, iter));
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = lambda.iter().zip(&step).map(|(l, d)| l + alpha * d).collect();
            let k_trial = concentration(gens, &trial, m);
            if let Some(f_trial) = objective(&k_trial, t, &trial) {
                if f_trial >= f + 1e-4 * alpha * slope {
                    // No measurable progress: the objective is at its
                    // floating-point floor.
                    if f_trial - f <= 1e-15 * f.abs().max(1.0) && (gnorm <= opts.stall_tol || slope <= STALL_DECREMENT) {
                        return Ok((lambda, iter));
                    }
                    lambda = trial;
                    k = k_trial;
                    f = f_trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            if gnorm <= opts.stall_tol || slope <= STALL_DECREMENT {
                return Ok((lambda, iter));
            }
            return Err(MleError::NoConvergence { iters: iter, grad: gnorm });
        }
    }
    let sigma = cholesky(&k)?.inverse();
    let grad: Vec<f64> = stat_from_generators(gens, &sigma)
        .iter()
        .zip(t)
        .map(|(a, b)| a - b)
        .collect();
    let gnorm = inf_norm(&grad);
    // A slowly receding iterate also has a small gradient, so the size of K
    // is checked first.
    let k_max = k.max_abs();
    if k_max > opts.divergence_bound.sqrt() {
        return Err(MleError::Diverged {
            iters: opts.max_iter,
            k_max,
            grad: gnorm,
            objective: f,
            direction: k.scaled(1.0 / k_max),
        });
    }
    if gnorm <= opts.stall_tol {
        return Ok((lambda, opts.max_iter));
    }
    Err(MleError::NoConvergence {
        iters: opts.max_iter,
        grad: gnorm,
    })
}

/// Solves `H x = g` for symmetric PSD `H`, adding a small ridge when the
/// factorisation fails.
fn solve_pd(h: &[Vec<f64>], g: &[f64]) -> Vec<f64> {
    let p = h.len();
    let base = SymMatrix::from_fn(p, |i, j| h[i][j]);
    let scale = base.diag().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut ridge = 0.0;
    loop {
        let a = if ridge == 0.0 { base.clone() } else { base.shifted(-ridge * scale) };
        if let Ok(chol) = cholesky(&a) {
            return chol.solve(g);
        }
        ridge = if ridge == 0.0 { 1e-14 } else { ridge * 100.0 };
        if ridge > 1.0 {
            // Fall back to gradient ascent.
            return g.iter().map(|v| v / scale).collect();
        }
    }
}

fn moment_residual(gens: &[Cells], sigma: &SymMatrix, s: &SymMatrix) -> f64 {
    let a = stat_from_generators(gens, sigma);
    let b = stat_from_generators(gens, s);
    // Report in entry units: divide class sums by the number of cells.
    gens.iter()
        .zip(a.iter().zip(&b))
        .map(|(cells, (x, y))| {
            let w: f64 = cells.iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }).sum();
            (x - y).abs() / w
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberReport {
    /// Σ̂ against S on the sufficient statistics.
    pub moment_residual: f64,
    /// K̂'s deviation from the model space (zeros and equalities).
    pub pattern_residual: f64,
    /// `max |Σ̂ K̂ − I|`.
    pub inverse_residual: f64,
    pub sigma_lambda_min: f64,
    pub k_lambda_min: f64,
    pub pass: bool,
}

/// Re-checks that a fit is the unique point of the fiber inside the model.
pub fn verify_fiber(result: &MleResult, model: &Model, s: &SymMatrix) -> FiberReport {
    const TOL: f64 = 1e-7;
    let gens = model.generators();
    let moment_residual = moment_residual(&gens, &result.sigma_hat, s);
    let pattern_residual = model.coordinates(&result.k_hat).1;
    let prod = result.sigma_hat.mul_dense(&result.k_hat);
    let mut inverse_residual = 0.0f64;
    for (i, row) in prod.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            inverse_residual = inverse_residual.max((v - want).abs());
        }
    }
    let sigma_lambda_min = lambda_min(&result.sigma_hat).map(|r| r.0).unwrap_or(f64::NAN);
    let k_lambda_min = lambda_min(&result.k_hat).map(|r| r.0).unwrap_or(f64::NAN);
    let pass = moment_residual <= TOL
        && pattern_residual <= TOL
        && inverse_residual <= TOL
        && sigma_lambda_min > 0.0
        && k_lambda_min > 0.0;
    FiberReport {
        moment_residual,
        pattern_residual,
        inverse_residual,
        sigma_lambda_min,
        k_lambda_min,
        pass,
    }
}

//! Monte Carlo estimates of the probability that the MLE exists.

use serde::Serialize;
use thiserror::Error;

use crate::existence::{DecideOptions, Decider, Evidence, ExistenceError, Status};
use crate::models::{sample_gaussian_trial, Model, ModelError};
use crate::numkernel::{cholesky, SymMatrix};

/// Fewest decided trials for a `Never` / `AlwaysAS` call.
pub const MIN_DECIDED: usize = 1000;
/// Largest fraction of Boundary/Undecided trials a cell may have.
pub const MAX_UNDECIDED_FRACTION: f64 = 0.01;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum McError {
    #[error("need at least 100 trials, got {0}")]
    TooFewTrials(usize),
    #[error("sigma_true has order {got}, model has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sigma_true is not positive definite")]
    NotPd,
    #[error(transparent)]
    Existence(#[from] ExistenceError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Never,
    Partial,
    AlwaysAS,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbEstimate {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub successes: usize,
    pub failures: usize,
    pub boundary_or_undecided: usize,
    /// Successes over decided trials.
    pub p_hat: f64,
    /// Wilson score interval.
    pub ci95: [f64; 2],
    pub ci95_halfwidth: f64,
    pub classification: Classification,
}

impl ProbEstimate {
    pub fn decided(&self) -> usize {
        self.successes + self.failures
    }
}

/// Wilson 95% interval for `k` successes in `n` trials: `(low, high, half)`.
pub fn wilson(k: usize, n: usize) -> (f64, f64, f64) {
    if n == 0 {
        return (0.0, 1.0, 0.5);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0), half)
}

/// `Never`/`AlwaysAS` need `p̂ ∈ {0, 1}` with at least [`MIN_DECIDED`]
/// decided trials; too many undecided trials or too few decided ones give
/// `Unresolved`.
pub fn classify(successes: usize, failures: usize, undecided: usize) -> Classification {
    let decided = successes + failures;
    let trials = decided + undecided;
    if trials == 0 || undecided as f64 >= MAX_UNDECIDED_FRACTION * trials as f64 {
        return Classification::Unresolved;
    }
    match (successes, failures) {
        (0, _) | (_, 0) if decided < MIN_DECIDED => Classification::Unresolved,
        (0, _) => Classification::Never,
        (_, 0) => Classification::AlwaysAS,
        _ => Classification::Partial,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is on, otherwise sequential.
    #[default]
    Parallel,
}

fn monte_carlo_options() -> DecideOptions {
    DecideOptions {
        completions: false,
        ..DecideOptions::default()
    }
}

/// Samples `n` observations from `N(0, sigma_true)` `trials` times and
/// decides existence each time.
pub fn estimate(model: &Model, sigma_true: &SymMatrix, n: usize, trials: usize, seed: u64) -> Result<ProbEstimate, McError> {
    let decider = Decider::with_options(model, monte_carlo_options())?;
    estimate_with(&decider, sigma_true, n, trials, seed, Exec::default())
}

pub fn estimate_with(decider: &Decider, sigma_true: &SymMatrix, n: usize, trials: usize, seed: u64, exec: Exec) -> Result<ProbEstimate, McError> {
    if trials < 100 {
        return Err(McError::TooFewTrials(trials));
    }
    let m = decider.model().order();
    if sigma_true.order() != m {
        return Err(McError::DimensionMismatch {
            expected: m,
            got: sigma_true.order(),
        });
    }
    if cholesky(sigma_true).is_err() {
        return Err(McError::NotPd);
    }
    let one = |t: usize| -> Result<Status, McError> {
        let d = sample_gaussian_trial(sigma_true, n, seed, t as u64)?;
        Ok(decider.decide(Evidence::Data(&d))?.status)
    };
    let statuses: Vec<Status> = run(trials, exec, one)?;
    let successes = statuses.iter().filter(|s| **s == Status::Exists).count();
    let failures = statuses.iter().filter(|s| **s == Status::NotExists).count();
    let undecided = trials - successes - failures;
    let decided = successes + failures;
    let (lo, hi, half) = wilson(successes, decided);
    Ok(ProbEstimate {
        n,
        trials,
        seed,
        successes,
        failures,
        boundary_or_undecided: undecided,
        p_hat: if decided == 0 { f64::NAN } else { successes as f64 / decided as f64 },
        ci95: [lo, hi],
        ci95_halfwidth: half,
        classification: classify(successes, failures, undecided),
    })
}

#[cfg(feature = "parallel")]
fn run<T: Send>(trials: usize, exec: Exec, f: impl Fn(usize) -> Result<T, McError> + Sync + Send) -> Result<Vec<T>, McError> {
    use rayon::prelude::*;
    match exec {
        Exec::Parallel => (0..trials).into_par_iter().map(f).collect(),
        Exec::Sequential => (0..trials).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run<T: Send>(trials: usize, _exec: Exec, f: impl Fn(usize) -> Result<T, McError> + Sync + Send) -> Result<Vec<T>, McError> {
    (0..trials).map(f).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub model: String,
    pub estimate: ProbEstimate,
}

/// Estimates every `(label, model, n)` row with `Σ = I` and the same seed.
pub fn classify_table(rows: &[(String, Model, usize)], trials: usize, seed: u64) -> Result<Vec<TableCell>, McError> {
    let mut out = Vec::with_capacity(rows.len());
    let mut cache: Vec<(String, Decider)> = Vec::new();
    for (label, model, n) in rows {
        let idx = match cache.iter().position(|(l, _)| l == label) {
            Some(i) => i,
            None => {
                cache.push((label.clone(), Decider::with_options(model, monte_carlo_options())?));
                cache.len() - 1
            }
        };
        let decider = &cache[idx].1;
        let sigma = SymMatrix::identity(model.order());
        out.push(TableCell {
            model: label.clone(),
            estimate: estimate_with(decider, &sigma, *n, trials, seed, Exec::default())?,
        });
    }
    Ok(out)
}

/// Classifications of the small non-chordal graphs at 1, 2, 3 and 4
/// observations, rows `a`..`g`.
pub const TABLE1_EXPECTED: [(&str, [Classification; 4]); 7] = {
    use Classification::{AlwaysAS as A, Never as N, Partial as P};
    [
        ("a", [N, P, A, A]),
        ("b", [N, P, A, A]),
        ("c", [N, P, A, A]),
        ("d", [N, N, A, A]),
        ("e", [N, P, A, A]),
        ("f", [N, N, A, A]),
        ("g", [N, N, P, A]),
    ]
};

/// Rows `(table1:x, model, n)` for every graph and `n = 1..=4`.
pub fn table1_rows() -> Vec<(String, Model, usize)> {
    let mut rows = Vec::new();
    for (row, _) in TABLE1_EXPECTED {
        let label = format!("table1:{row}");
        let g = crate::graphs::parse_family(&label).expect("table1 family");
        for n in 1..=4 {
            rows.push((label.clone(), Model::plain(g.clone()), n));
        }
    }
    rows
}

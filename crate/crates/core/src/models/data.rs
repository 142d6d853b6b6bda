use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ModelError;
use crate::numkernel::{cholesky, SymMatrix};

/// `n` observations of `m` variables, stored row-major with one observation
/// per row, so variable `i`'s data vector is column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleData {
    n: usize,
    m: usize,
    x: Vec<f64>,
}

impl SampleData {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        let n = rows.len();
        if n == 0 {
            return Err(ModelError::Data("no observations".into()));
        }
        let m = rows[0].len();
        let mut x = Vec::with_capacity(n * m);
        for (k, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(ModelError::Data(format!(
                    "observation {} has {} values, expected {m}",
                    k + 1,
                    r.len()
                )));
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(ModelError::Data(format!("observation {} has non-finite value {v}", k + 1)));
            }
            x.extend_from_slice(r);
        }
        Ok(SampleData { n, m, x })
    }

    /// One observation per line, comma-separated, no header. Blank lines are
    /// skipped.
    pub fn from_csv(text: &str) -> Result<Self, ModelError> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| ModelError::Data(format!("line {}: `{}`: {e}", ln + 1, f.trim())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 0..self.n {
            let cells: Vec<String> = self.observation(k).iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn observation(&self, k: usize) -> &[f64] {
        &self.x[k * self.m..(k + 1) * self.m]
    }

    /// Keeps only the listed variables, in that order.
    pub fn select(&self, vars: &[usize]) -> SampleData {
        let x = (0..self.n)
            .flat_map(|k| vars.iter().map(move |&i| self.x[k * self.m + i]))
            .collect();
        SampleData { n: self.n, m: vars.len(), x }
    }

    /// Data vector of variable `i` (length `n`).
    pub fn variable(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|k| self.x[k * self.m + i]).collect()
    }
}

/// `S = (1/n) Σ x_k x_kᵀ` over observations.
pub fn sample_cov(d: &SampleData) -> SymMatrix {
    let inv = 1.0 / d.n as f64;
    let mut s = SymMatrix::zeros(d.m);
    for k in 0..d.n {
        let x = d.observation(k);
        for i in 0..d.m {
            for j in 0..=i {
                s.set(i, j, s.get(i, j) + x[i] * x[j]);
            }
        }
    }
    s.scaled(inv)
}

/// `n` draws from `N(0, Σ)` using stream 0 of `seed`.
pub fn sample_gaussian(sigma: &SymMatrix, n: usize, seed: u64) -> Result<SampleData, ModelError> {
    sample_gaussian_trial(sigma, n, seed, 0)
}

/// Draws for Monte Carlo trial `trial`: each trial has its own ChaCha stream,
/// so the values depend only on `(seed, trial)` and never on scheduling.
pub fn sample_gaussian_trial(sigma: &SymMatrix, n: usize, seed: u64, trial: u64) -> Result<SampleData, ModelError> {
    if n == 0 {
        return Err(ModelError::Data("n must be positive".into()));
    }
    let chol = cholesky(sigma)?;
    let m = sigma.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut x = Vec::with_capacity(n * m);
    let mut z = vec![0.0; m];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        x.extend(chol.lower_mul(&z));
    }
    Ok(SampleData { n, m, x })
}

//! Small dense linear algebra: symmetric matrices in packed storage,
//! Cholesky-based PD tests, a symmetric eigensolver, a one-sided Jacobi SVD,
//! and exact rational rank.

mod eigen;
mod factor;
mod rational;
mod svd;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use eigen::{lambda_min, sym_eigen, SymEigen};
pub use factor::{cholesky, inverse, is_pd, logdet, Cholesky};
pub use rational::{rational_rank, RationalMatrix};
pub use svd::{right_svd, RightSvd};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPd { pivot: usize, value: f64 },
    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
}

/// Symmetric matrix stored as its row-major lower triangle.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut a = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            a.set(i, i, v);
        }
        a
    }

    /// Builds from a function evaluated on the lower triangle `j <= i`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        SymMatrix { n, data }
    }

    /// Builds from full rows; the rows must be square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumError> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(NumError::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            for (j, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(NumError::NonFinite(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(NumError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[idx(i, j)] = v;
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Principal submatrix on `rows` (in the given order).
    pub fn submatrix(&self, rows: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(rows.len(), |a, b| self.get(rows[a], rows[b]))
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.add(&other.scaled(-1.0))
    }

    /// `self - c I`.
    pub fn shifted(&self, c: f64) -> SymMatrix {
        let mut a = self.clone();
        for i in 0..self.n {
            a.set(i, i, a.get(i, i) - c);
        }
        a
    }

    /// `D A D` with `D = diag(d)`.
    pub fn congruence_diag(&self, d: &[f64]) -> SymMatrix {
        assert_eq!(d.len(), self.n);
        SymMatrix::from_fn(self.n, |i, j| d[i] * self.get(i, j) * d[j])
    }

    /// Symmetric relabelling: entry `(i, j)` of the result is `A[p[i], p[j]]`.
    pub fn permuted(&self, p: &[usize]) -> SymMatrix {
        self.submatrix(p)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Full product `A B`, symmetrised (exact when `A` and `B` commute).
    pub fn mul_dense(&self, other: &SymMatrix) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut out = vec![vec![0.0; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        out
    }

    /// Frobenius inner product `tr(A B)`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..=i {
                let w = if i == j { 1.0 } else { 2.0 };
                s += w * self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SymMatrix({})", self.n)?;
        for row in self.to_rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>12.6}")).collect();
            writeln!(f, "  [{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

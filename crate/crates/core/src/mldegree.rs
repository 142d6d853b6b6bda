//! ML degree of `K_{2,m}`: the critical equations reduce to one univariate
//! polynomial in `y = Σ₁₂`, built here with exact rational arithmetic.
//!
//! Vertices 0 and 1 are the distinguished pair, `B = {2, …, m+1}` the rest;
//! the covariance is assumed to have unit diagonal.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::mle::MleResult;
use crate::numkernel::{RationalMatrix, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlDegreeError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Univariate polynomial with exact rational coefficients, ascending degree,
/// no trailing zeros.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    /// The variable itself.
    pub fn y() -> Self {
        Poly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, y: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * y + c)
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * y + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Remainder of division by `d` (non-zero).
    pub fn rem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let f = &r[k] / &lead;
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k - dd + j] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Poly::new(r)
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.coeffs.last() {
            Some(l) => {
                let inv = l.recip();
                a.scale(&inv)
            }
            None => a,
        }
    }

    /// No repeated complex roots: `gcd(P, P') = 1`.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().enumerate().map(|(k, c)| format!("({c})y^{k}")).collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// rows, memoised on the set of remaining columns.
pub fn poly_det(a: &[Vec<Poly>]) -> Poly {
    let n = a.len();
    assert!(n <= 20 && a.iter().all(|r| r.len() == n), "square matrix of order <= 20");
    let mut memo: HashMap<u32, Poly> = HashMap::new();
    det_rec(a, 0, (1u32 << n) - 1, &mut memo)
}

fn det_rec(a: &[Vec<Poly>], row: usize, cols: u32, memo: &mut HashMap<u32, Poly>) -> Poly {
    if cols == 0 {
        return Poly::one();
    }
    if let Some(p) = memo.get(&cols) {
        return p.clone();
    }
    let mut acc = Poly::zero();
    let mut sign_neg = false;
    for c in 0..a.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        if !a[row][c].is_zero() {
            let term = a[row][c].mul(&det_rec(a, row + 1, cols & !(1 << c), memo));
            acc = if sign_neg { acc.sub(&term) } else { acc.add(&term) };
        }
        sign_neg = !sign_neg;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// `z_ij = N(y) / (1 − y²)` for `i, j ∈ B`; returns `(N, 1 − y²)`.
pub fn z_of_y(s: &RationalMatrix, i: usize, j: usize) -> Result<(Poly, Poly), MlDegreeError> {
    let k = shape(s)?;
    if i < 2 || j < 2 || i >= k || j >= k || i == j {
        return Err(MlDegreeError::DegenerateInput(format!("({i},{j}) is not a pair of distinct vertices in B")));
    }
    let (s1i, s2i, s1j, s2j) = (s.get(0, i), s.get(1, i), s.get(0, j), s.get(1, j));
    // −(y(S1i S2j + S1j S2i) − S1i S1j − S2i S2j)
    let num = Poly::new(vec![s1i * s1j + s2i * s2j, -(s1i * s2j + s1j * s2i)]);
    Ok((num, denominator()))
}

fn denominator() -> Poly {
    Poly::new(vec![BigRational::one(), BigRational::zero(), -BigRational::one()])
}

/// Checks that `s` is square, symmetric, of order `m + 2` with `m ≥ 2`, and
/// has unit diagonal; returns the order.
fn shape(s: &RationalMatrix) -> Result<usize, MlDegreeError> {
    let k = s.rows();
    if s.cols() != k {
        return Err(MlDegreeError::DegenerateInput("matrix is not square".into()));
    }
    if k < 4 {
        return Err(MlDegreeError::DegenerateInput(format!(
            "K_{{2,m}} needs m >= 2 (order >= 4), got order {k}"
        )));
    }
    for i in 0..k {
        if !s.get(i, i).is_one() {
            return Err(MlDegreeError::DegenerateInput(format!("diagonal entry {} is not 1", i + 1)));
        }
        for j in 0..i {
            if s.get(i, j) != s.get(j, i) {
                return Err(MlDegreeError::DegenerateInput("matrix is not symmetric".into()));
            }
        }
    }
    Ok(k)
}

/// `(1 − y²)^m · M₁₂(Σ(y))`, where `M₁₂` is the minor of `Σ` without row 1
/// and column 2 and the non-edge entries `z_ij` are replaced by `z_of_y`.
/// Its roots contain `Σ̂₁₂` of every critical point.
pub fn build_poly(s: &RationalMatrix) -> Result<Poly, MlDegreeError> {
    let k = shape(s)?;
    let m = k - 2;
    let d = denominator();
    let c = |v: &BigRational| Poly::constant(v.clone());
    // Row of vertex 2 over columns {1} ∪ B, then each row of B multiplied by
    // (1 − y²) so that every entry is a polynomial.
    let mut rows: Vec<Vec<Poly>> = Vec::with_capacity(m + 1);
    let mut top = vec![Poly::y()];
    top.extend((2..k).map(|j| c(s.get(1, j))));
    rows.push(top);
    for i in 2..k {
        let mut row = vec![c(s.get(i, 0)).mul(&d)];
        for j in 2..k {
            row.push(if i == j { d.clone() } else { z_of_y(s, i, j)?.0 });
        }
        rows.push(row);
    }
    let p = poly_det(&rows);
    if p.degree() != Some(2 * m + 1) {
        return Err(MlDegreeError::DegenerateInput(format!(
            "polynomial has degree {:?}, expected {} for generic data",
            p.degree(),
            2 * m + 1
        )));
    }
    Ok(p)
}

/// Exact conversion of a float covariance to the unit-diagonal rational
/// input of [`build_poly`] (correlation rescaling happens in floating point).
pub fn rational_correlation(s: &SymMatrix) -> Result<RationalMatrix, MlDegreeError> {
    let k = s.order();
    let d: Vec<f64> = s.diag().iter().map(|v| v.sqrt()).collect();
    if d.iter().any(|v| !(*v > 0.0)) {
        return Err(MlDegreeError::DegenerateInput("non-positive variance".into()));
    }
    let mut out = RationalMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let v = if i == j {
                BigRational::one()
            } else {
                let (a, b) = if i > j { (i, j) } else { (j, i) };
                BigRational::from_f64(s.get(a, b) / (d[a] * d[b]))
                    .ok_or_else(|| MlDegreeError::DegenerateInput("non-finite entry".into()))?
            };
            out.set(i, j, v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub y_hat: f64,
    /// `|P(ŷ)| / max |coefficient|`.
    pub residual: f64,
}

/// Evaluates the polynomial of `s` at the fitted `Σ̂₁₂` (on the correlation
/// scale of `s`).
pub fn crosscheck(s: &SymMatrix, result: &MleResult) -> Result<CrossCheck, MlDegreeError> {
    let p = build_poly(&rational_correlation(s)?)?;
    Ok(crosscheck_poly(&p, s, result))
}

pub fn crosscheck_poly(p: &Poly, s: &SymMatrix, result: &MleResult) -> CrossCheck {
    let y_hat = result.sigma_hat.get(1, 0) / (s.get(0, 0) * s.get(1, 1)).sqrt();
    CrossCheck {
        y_hat,
        residual: p.eval_f64(y_hat).abs() / p.max_abs_coeff(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::family;
    use crate::mle::fit;
    use crate::models::{sample_cov, sample_gaussian, Model};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn random_s(m: usize, rng: &mut ChaCha8Rng) -> RationalMatrix {
        let k = m + 2;
        let mut s = RationalMatrix::zeros(k, k);
        for i in 0..k {
            s.set(i, i, BigRational::one());
            for j in 0..i {
                let v = q(rng.gen_range(-999..=999), 1000);
                s.set(i, j, v.clone());
                s.set(j, i, v);
            }
        }
        s
    }

    fn identity(k: usize) -> RationalMatrix {
        RationalMatrix::from_fn(k, k, |i, j| if i == j { BigRational::one() } else { BigRational::zero() })
    }

    #[test]
    fn z_examples() {
        let (n, d) = z_of_y(&identity(5), 2, 3).unwrap();
        assert!(n.is_zero());
        assert_eq!(d, Poly::new(vec![q(1, 1), q(0, 1), q(-1, 1)]));
        let mut s = identity(4);
        for (i, j) in [(0, 2), (1, 3)] {
            s.set(i, j, BigRational::one());
            s.set(j, i, BigRational::one());
        }
        // z_34 = −y / (1 − y²)
        let (n, _) = z_of_y(&s, 2, 3).unwrap();
        assert_eq!(n, Poly::new(vec![q(0, 1), q(-1, 1)]));
        assert!(matches!(z_of_y(&s, 0, 3), Err(MlDegreeError::DegenerateInput(_))));
    }

    /// z_of_y makes the Schur complement `Σ_BB − Σ_BA Σ_AA⁻¹ Σ_AB` diagonal,
    /// checked in floating point at a few values of y.
    #[test]
    fn z_diagonalises_schur_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_s(3, &mut rng);
        let f = s.to_f64();
        for y in [-0.7, 0.1, 0.45] {
            let z = |i: usize, j: usize| {
                let (n, d) = z_of_y(&s, i, j).unwrap();
                n.eval_f64(y) / d.eval_f64(y)
            };
            for i in 2..5 {
                for j in 2..i {
                    let a = [f[0][i], f[1][i]];
                    let b = [f[0][j], f[1][j]];
                    let quad = (a[0] * b[0] - y * (a[0] * b[1] + a[1] * b[0]) + a[1] * b[1]) / (1.0 - y * y);
                    assert!((z(i, j) - quad).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn degree_is_2m_plus_1() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in 2..=5 {
            for _ in 0..5 {
                let p = build_poly(&random_s(m, &mut rng)).unwrap();
                assert_eq!(p.degree(), Some(2 * m + 1));
            }
        }
    }

    #[test]
    fn m1_and_bad_input_rejected() {
        assert!(build_poly(&identity(3)).is_err());
        let mut s = identity(4);
        s.set(2, 2, q(2, 1));
        assert!(build_poly(&s).is_err());
    }

    #[test]
    fn identity_has_root_zero() {
        // At S = I every z vanishes and the polynomial is y (1 − y²)^m.
        let p = build_poly(&identity(5)).unwrap();
        assert_eq!(p, Poly::y().mul(&denominator().pow(3)));
        assert!(p.eval(&BigRational::zero()).is_zero());
    }

    #[test]
    fn det_sigma_bb_constant_term_one() {
        // det(Σ_BB(t·z)) as a polynomial in t: degree m, constant term 1.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 2..=4 {
            let z: Vec<Vec<BigRational>> = (0..m).map(|_| (0..m).map(|_| q(rng.gen_range(1..=99), 100)).collect()).collect();
            let rows: Vec<Vec<Poly>> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            if i == j {
                                Poly::one()
                            } else {
                                let v = if i < j { &z[i][j] } else { &z[j][i] };
                                Poly::new(vec![BigRational::zero(), v.clone()])
                            }
                        })
                        .collect()
                })
                .collect();
            let p = poly_det(&rows);
            assert_eq!(p.degree(), Some(m));
            assert!(p.coeffs()[0].is_one());
        }
    }

    #[test]
    fn poly_det_matches_rational_det() {
        // Constant polynomial matrices: compare with a float determinant.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=6 {
            let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            let rows: Vec<Vec<Poly>> = a.iter().map(|r| r.iter().map(|&v| Poly::constant(q(v, 1))).collect()).collect();
            let exact = poly_det(&rows).eval(&BigRational::zero()).to_f64().unwrap();
            let fl = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j] as f64).determinant();
            assert!((exact - fl).abs() < 1e-6 * fl.abs().max(1.0));
        }
    }

    #[test]
    fn squarefree_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for m in 2..=4 {
            let p = build_poly(&random_s(m, &mut rng)).unwrap();
            assert!(p.is_squarefree());
        }
        let sq = Poly::new(vec![q(1, 1), q(-2, 1), q(1, 1)]);
        assert!(!sq.is_squarefree());
    }

    #[test]
    fn companion_roots_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for m in 2..=5 {
            let p = build_poly(&random_s(m, &mut rng)).unwrap();
            let c: Vec<f64> = p.coeffs().iter().map(|v| v.to_f64().unwrap()).collect();
            let deg = c.len() - 1;
            let lead = c[deg];
            let comp = nalgebra::DMatrix::from_fn(deg, deg, |i, j| {
                if j == deg - 1 {
                    -c[i] / lead
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let roots = comp.complex_eigenvalues();
            assert_eq!(roots.len(), 2 * m + 1);
            for a in 0..roots.len() {
                for b in 0..a {
                    assert!((roots[a] - roots[b]).norm() > 1e-6, "m={m}");
                }
            }
        }
    }

    #[test]
    fn crosscheck_against_fit() {
        for m in 2..=4 {
            let g = family("K", &[2, m]).unwrap();
            let model = Model::plain(g);
            for seed in 0..5 {
                let d = sample_gaussian(&SymMatrix::identity(m + 2), 6, 300 + seed).unwrap();
                let s = sample_cov(&d);
                let r = fit(&model, &s).unwrap();
                let c = crosscheck(&s, &r).unwrap();
                assert!(c.residual <= 1e-6, "m={m} seed={seed} {c:?}");
                let mut off = r.clone();
                let shift = 0.01 * (s.get(0, 0) * s.get(1, 1)).sqrt();
                off.sigma_hat.set(1, 0, r.sigma_hat.get(1, 0) + shift);
                let bad = crosscheck(&s, &off).unwrap();
                assert!(bad.residual > 1e-6, "m={m} seed={seed} {bad:?}");
            }
        }
    }
}

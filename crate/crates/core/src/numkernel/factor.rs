use super::{NumError, SymMatrix};

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`, packed like
/// [`SymMatrix`].
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

#[inline]
fn at(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

pub fn cholesky(a: &SymMatrix) -> Result<Cholesky, NumError> {
    let n = a.order();
    let mut l = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[at(i, k)] * l[at(j, k)];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(NumError::NotPd { pivot: i, value: s });
                }
                l[at(i, i)] = s.sqrt();
            } else {
                l[at(i, j)] = s / l[at(j, j)];
            }
        }
    }
    Ok(Cholesky { n, l })
}

impl Cholesky {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn logdet(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.l[at(i, i)].ln()).sum::<f64>()
    }

    /// `L z`.
    pub fn lower_mul(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..=i).map(|k| self.l[at(i, k)] * z[k]).sum())
            .collect()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[at(i, k)] * y[k];
            }
            y[i] = s / self.l[at(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[at(k, i)] * y[k];
            }
            y[i] = s / self.l[at(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> SymMatrix {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cols.push(self.solve(&e));
        }
        SymMatrix::from_fn(n, |i, j| 0.5 * (cols[j][i] + cols[i][j]))
    }
}

/// Cholesky succeeds on `a - margin I`.
pub fn is_pd(a: &SymMatrix, margin: f64) -> bool {
    debug_assert!(margin >= 0.0);
    if margin == 0.0 {
        cholesky(a).is_ok()
    } else {
        cholesky(&a.shifted(margin)).is_ok()
    }
}

pub fn inverse(a: &SymMatrix) -> Result<SymMatrix, NumError> {
    Ok(cholesky(a)?.inverse())
}

pub fn logdet(a: &SymMatrix) -> Result<f64, NumError> {
    Ok(cholesky(a)?.logdet())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(c: f64) -> SymMatrix {
        SymMatrix::from_rows(&[vec![1.0, c], vec![c, 1.0]]).unwrap()
    }

    #[test]
    fn pd_examples() {
        assert!(is_pd(&SymMatrix::identity(3), 0.0));
        assert!(!is_pd(&SymMatrix::diagonal(&[1.0, -1.0]), 0.0));
        assert!(is_pd(&pair(0.5), 0.4));
        assert!(!is_pd(&pair(0.5), 0.6));
        assert!(!is_pd(&SymMatrix::zeros(2), 0.0));
    }

    #[test]
    fn inverse_and_logdet() {
        let a = SymMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let inv = inverse(&a).unwrap();
        let prod = a.mul_dense(&inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-13);
            }
        }
        // det by cofactor expansion
        let det = 4.0 * (3.0 * 2.0 - 0.04) - 1.0 * (2.0 - 0.1) + 0.5 * (0.2 - 1.5);
        assert!((logdet(&a).unwrap() - f64::ln(det)).abs() < 1e-13);
    }
}

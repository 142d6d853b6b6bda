use super::NumError;

/// Singular values (descending) and right singular vectors of a dense
/// `rows x cols` matrix given column by column.
#[derive(Debug, Clone)]
pub struct RightSvd {
    pub values: Vec<f64>,
    /// `vectors[k]` belongs to `values[k]`; each has length `cols`.
    pub vectors: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 80;

/// One-sided Jacobi (Hestenes): rotates column pairs until they are
/// mutually orthogonal. Small singular values keep full relative accuracy
/// with respect to the largest one.
pub fn right_svd(columns: &[Vec<f64>]) -> Result<RightSvd, NumError> {
    let p = columns.len();
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut v: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    // Columns below this squared norm are numerically zero.
    let floor = 1e-30 * a.iter().map(|c| dot(c, c)).sum::<f64>();
    let mut converged = p < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let alpha = dot(&a[i], &a[i]);
                let beta = dot(&a[j], &a[j]);
                let gamma = dot(&a[i], &a[j]);
                if alpha <= floor || beta <= floor || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut a, &mut v] {
                    let (lo, hi) = m.split_at_mut(j);
                    for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                        let (xi, yj) = (*x, *y);
                        *x = c * xi - s * yj;
                        *y = s * xi + c * yj;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NumError::NoConvergence(MAX_SWEEPS));
    }
    let mut order: Vec<(f64, usize)> = a.iter().enumerate().map(|(k, col)| (dot(col, col).sqrt(), k)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    Ok(RightSvd {
        values: order.iter().map(|o| o.0).collect(),
        vectors: order.iter().map(|o| v[o.1].clone()).collect(),
    })
}

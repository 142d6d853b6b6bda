//! Exact existence criteria for special graph classes.

use std::f64::consts::PI;

use super::completion::chordal_completion;
use super::{Certificate, ExistenceError, ExistenceVerdict, Status};
use crate::graphs::{is_chordal, maximal_cliques, Graph};
use crate::models::{PartialMatrix, SampleData};
use crate::numkernel::{lambda_min, SymMatrix};

/// Angles closer than this (mod π) count as coincident lines.
pub const LINE_TOL: f64 = 1e-12;

/// The 3x3 matrix with unit diagonal and off-diagonal entries
/// `cos α, cos β, cos γ` is PD iff the angles satisfy the triangle
/// inequalities and `α + β + γ < 2π`.
pub fn arccos_pd(alpha: f64, beta: f64, gamma: f64) -> Result<bool, ExistenceError> {
    for a in [alpha, beta, gamma] {
        if !(a > 0.0 && a < PI) {
            return Err(ExistenceError::OutOfRange(format!("angle {a} not in (0, π)")));
        }
    }
    Ok(alpha < beta + gamma && beta < alpha + gamma && gamma < alpha + beta && alpha + beta + gamma < 2.0 * PI)
}

/// Smallest eigenvalue of each maximal clique block after rescaling to unit
/// diagonal; returns the minimum and the clique attaining it.
pub(crate) fn min_clique_margin(p: &PartialMatrix, g: &Graph) -> Result<(f64, Vec<usize>), ExistenceError> {
    let (corr, _) = p.correlation();
    let mut worst = (f64::INFINITY, Vec::new());
    for c in maximal_cliques(g) {
        let block = SymMatrix::from_fn(c.len(), |a, b| corr.get(c[a], c[b]).expect("clique entry"));
        let (lam, _) = lambda_min(&block)?;
        if lam < worst.0 {
            worst = (lam, c);
        }
    }
    Ok(worst)
}

fn one_based(vs: &[usize]) -> String {
    let labels: Vec<String> = vs.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", labels.join(","))
}

/// Chordal graphs: completable iff every maximal clique block is PD.
pub fn chordal_check(p: &PartialMatrix, eps_pd: f64) -> Result<ExistenceVerdict, ExistenceError> {
    if !is_chordal(&p.graph) {
        return Err(ExistenceError::NotChordal);
    }
    if let Some(v) = super::zero_variance(p) {
        return Ok(v);
    }
    let (margin, clique) = min_clique_margin(p, &p.graph)?;
    let verdict = if margin > eps_pd {
        let sigma = chordal_completion(p)?;
        ExistenceVerdict::new(Status::Exists, "chordal", Some(margin), Some(Certificate::completion(sigma)))
    } else if margin < -eps_pd {
        ExistenceVerdict::new(
            Status::NotExists,
            "chordal",
            Some(margin),
            Some(Certificate::violation(format!(
                "clique {} is not positive definite (λ_min = {margin:.3e})",
                one_based(&clique)
            ))),
        )
    } else {
        ExistenceVerdict::new(Status::Boundary, "chordal", Some(margin), None)
    };
    Ok(verdict)
}

/// Angle of the line spanned by a 2-vector, in `[0, π)`.
pub fn line_angle(v: [f64; 2]) -> f64 {
    let a = v[1].atan2(v[0]).rem_euclid(PI);
    if a >= PI {
        0.0
    } else {
        a
    }
}

/// Distance between two lines on the projective circle.
fn line_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Positions of the lines in circular order (index into `angles`).
fn circular_order(angles: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&x, &y| angles[x].rem_euclid(PI).total_cmp(&angles[y].rem_euclid(PI)));
    order
}

/// Buhl's condition for an m-cycle with two observations: the MLE fails to
/// exist exactly when the variable lines, read around the projective circle,
/// follow the cycle order (up to rotation and reflection).
///
/// `angles[k]` is the line of the k-th vertex along the cycle. The margin is
/// the smallest gap between two lines, negative when the MLE does not exist.
pub fn buhl_cycle(angles: &[f64]) -> Result<ExistenceVerdict, ExistenceError> {
    let m = angles.len();
    if m < 4 {
        return Err(ExistenceError::WrongGraph(format!("cycle condition needs m >= 4, got {m}")));
    }
    let mut gap = f64::INFINITY;
    for i in 0..m {
        for j in 0..i {
            gap = gap.min(line_gap(angles[i], angles[j]));
        }
    }
    if gap <= LINE_TOL {
        return Ok(ExistenceVerdict::new(
            Status::Boundary,
            "buhl-cycle",
            Some(gap),
            Some(Certificate::violation("two variable lines coincide".into())),
        ));
    }
    let order = circular_order(angles);
    let start = order.iter().position(|&v| v == 0).expect("vertex 0");
    let rotated: Vec<usize> = (0..m).map(|k| order[(start + k) % m]).collect();
    let forward = rotated.iter().enumerate().all(|(k, &v)| v == k);
    let backward = rotated.iter().enumerate().all(|(k, &v)| v == (m - k) % m);
    if forward || backward {
        Ok(ExistenceVerdict::new(
            Status::NotExists,
            "buhl-cycle",
            Some(-gap),
            Some(Certificate::violation(
                "the variable lines are ordered around the circle like the cycle".into(),
            )),
        ))
    } else {
        Ok(ExistenceVerdict::new(Status::Exists, "buhl-cycle", Some(gap), None))
    }
}

pub(crate) fn two_obs_angles(d: &SampleData, vertices: &[usize]) -> Result<Vec<f64>, ExistenceError> {
    if d.n() != 2 {
        return Err(ExistenceError::WrongN { expected: 2, got: d.n() });
    }
    vertices
        .iter()
        .map(|&v| {
            let x = [d.observation(0)[v], d.observation(1)[v]];
            if x == [0.0, 0.0] {
                Err(ExistenceError::OutOfRange(format!("variable {} has zero data vector", v + 1)))
            } else {
                Ok(line_angle(x))
            }
        })
        .collect()
}

/// Vertex order along a cycle graph starting at 0 towards its smaller
/// neighbour, or `None` if `g` is not a single cycle.
pub fn cycle_order(g: &Graph) -> Option<Vec<usize>> {
    let m = g.order();
    if m < 3 || !g.is_connected() || (0..m).any(|v| g.degree(v) != 2) {
        return None;
    }
    let mut order = vec![0];
    let mut prev = usize::MAX;
    let mut cur = 0;
    while order.len() < m {
        let next = crate::graphs::members_of(g.neighbors(cur))
            .into_iter()
            .find(|&w| w != prev)
            .expect("degree 2");
        prev = cur;
        cur = next;
        order.push(cur);
    }
    Some(order)
}

/// Recognises `K_{k,r}` and returns the part of size `k` and the rest.
/// When both parts have size `k` the part containing the smallest vertex is
/// returned first.
pub fn bipartite_parts(g: &Graph, k: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let m = g.order();
    if m <= k {
        return None;
    }
    // The parts of a complete bipartite graph are the components of its
    // complement.
    let complement = Graph::new(m, g.non_edges()).expect("complement");
    let comps_of_complement = complement.components(complement.vertex_set());
    if comps_of_complement.len() != 2 {
        return None;
    }
    let parts: Vec<Vec<usize>> = comps_of_complement.iter().map(|&c| crate::graphs::members_of(c)).collect();
    let sizes = (parts[0].len(), parts[1].len());
    if sizes.0 * sizes.1 != g.edge_count() || parts.iter().any(|p| !is_independent(g, p)) {
        return None;
    }
    if parts[0].len() == k {
        Some((parts[0].clone(), parts[1].clone()))
    } else if parts[1].len() == k {
        Some((parts[1].clone(), parts[0].clone()))
    } else {
        None
    }
}

fn is_independent(g: &Graph, vs: &[usize]) -> bool {
    vs.iter().enumerate().all(|(a, &u)| vs[a + 1..].iter().all(|&v| !g.has_edge(u, v)))
}

/// `K_{2,m}` with two observations: the MLE exists iff the lines of the two
/// distinguished variables are neighbours in the circular order of all
/// `m + 2` lines.
///
/// `blue` are the two distinguished vertices, `red` the others. The margin is
/// the smallest gap between a blue line and any other line, negative when
/// the MLE does not exist.
pub fn k2m_neighbor(d: &SampleData, blue: [usize; 2], red: &[usize]) -> Result<ExistenceVerdict, ExistenceError> {
    if red.len() < 2 {
        return Err(ExistenceError::WrongGraph("K_{2,m} needs m >= 2".into()));
    }
    let mut vertices = vec![blue[0], blue[1]];
    vertices.extend_from_slice(red);
    let angles = two_obs_angles(d, &vertices)?;
    Ok(k2m_from_angles(&angles))
}

/// `angles[0]`, `angles[1]` are the blue lines.
pub fn k2m_from_angles(angles: &[f64]) -> ExistenceVerdict {
    let mut gap = f64::INFINITY;
    for b in 0..2 {
        for (k, &a) in angles.iter().enumerate() {
            if k != b {
                gap = gap.min(line_gap(angles[b], a));
            }
        }
    }
    let red_blue = (0..2)
        .flat_map(|b| angles[2..].iter().map(move |&r| (b, r)))
        .map(|(b, r)| line_gap(angles[b], r))
        .fold(f64::INFINITY, f64::min);
    if red_blue <= LINE_TOL {
        return ExistenceVerdict::new(
            Status::Boundary,
            "k2m-neighbor",
            Some(red_blue),
            Some(Certificate::violation("a red line coincides with a blue line".into())),
        );
    }
    let order = circular_order(angles);
    let n = order.len();
    let p0 = order.iter().position(|&v| v == 0).expect("blue");
    let p1 = order.iter().position(|&v| v == 1).expect("blue");
    let adjacent = (p0 + 1) % n == p1 || (p1 + 1) % n == p0;
    if adjacent {
        ExistenceVerdict::new(Status::Exists, "k2m-neighbor", Some(gap), None)
    } else {
        ExistenceVerdict::new(
            Status::NotExists,
            "k2m-neighbor",
            Some(-gap),
            Some(Certificate::violation(
                "red lines separate the two blue lines on both sides".into(),
            )),
        )
    }
}

/// Maximum of a concave function over a ball by the central-cut ellipsoid
/// method. Each cut also yields an upper bound `f(x) + sqrt(gᵀ P g)` on the
/// maximum over the current ellipsoid, which contains every maximiser.
pub(crate) struct EllipsoidResult {
    pub best_x: Vec<f64>,
    pub best: f64,
    pub upper: f64,
}

pub(crate) fn ellipsoid_max(
    mut eval: impl FnMut(&[f64]) -> (f64, Vec<f64>),
    center: Vec<f64>,
    radius: f64,
    iters: usize,
    stop_above: f64,
    stop_below: f64,
) -> EllipsoidResult {
    let n = center.len();
    let nf = n as f64;
    let mut x = center;
    let mut p = vec![vec![0.0; n]; n];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = radius * radius;
    }
    let mut out = EllipsoidResult {
        best_x: x.clone(),
        best: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
    for _ in 0..iters {
        let (f, g) = eval(&x);
        if f > out.best {
            out.best = f;
            out.best_x = x.clone();
        }
        let pg: Vec<f64> = (0..n).map(|i| (0..n).map(|j| p[i][j] * g[j]).sum()).collect();
        let gpg: f64 = g.iter().zip(&pg).map(|(a, b)| a * b).sum();
        if !(gpg > 0.0) {
            // Zero supergradient: x is a maximiser.
            out.upper = out.upper.min(f);
            break;
        }
        let root = gpg.sqrt();
        out.upper = out.upper.min(f + root);
        if out.best > stop_above || out.upper < stop_below || out.upper - out.best < 1e-12 {
            break;
        }
        for i in 0..n {
            x[i] += pg[i] / ((nf + 1.0) * root);
        }
        if n == 1 {
            // The interval halves.
            p[0][0] *= 0.25;
            continue;
        }
        let c = nf * nf / (nf * nf - 1.0);
        for i in 0..n {
            for j in 0..n {
                p[i][j] = c * (p[i][j] - 2.0 / (nf + 1.0) * pg[i] * pg[j] / gpg);
            }
        }
    }
    out
}

/// `K_{3,m}`: the MLE exists iff some choice of the three free entries among
/// the distinguished vertices makes every 4x4 block on
/// `{red i} ∪ {blue 1, 2, 3}` PD (the blocks then form a chordal pattern).
pub fn k3m_pillow(p: &PartialMatrix, blue: [usize; 3], red: &[usize], eps_pd: f64) -> Result<ExistenceVerdict, ExistenceError> {
    if let Some(v) = super::zero_variance(p) {
        return Ok(v);
    }
    let (corr, _) = p.correlation();
    let mut s = Vec::with_capacity(red.len());
    for &r in red {
        let row: Vec<f64> = blue
            .iter()
            .map(|&b| {
                corr.get(r, b)
                    .ok_or_else(|| ExistenceError::WrongGraph(format!("{}-{} is not an edge", r + 1, b + 1)))
            })
            .collect::<Result<_, _>>()?;
        if let Some(v) = row.iter().find(|v| v.abs() >= 1.0) {
            return Err(ExistenceError::CorrelationOutOfRange(*v));
        }
        s.push(row);
    }
    let block = |xyz: &[f64], si: &[f64]| {
        let (x, y, z) = (xyz[0], xyz[1], xyz[2]);
        SymMatrix::from_rows(&[
            vec![1.0, si[0], si[1], si[2]],
            vec![si[0], 1.0, x, y],
            vec![si[1], x, 1.0, z],
            vec![si[2], y, z, 1.0],
        ])
        .expect("symmetric")
    };
    let mut failure = None;
    let eval = |xyz: &[f64]| -> (f64, Vec<f64>) {
        let mut worst = (f64::INFINITY, vec![0.0; 3]);
        for si in &s {
            match lambda_min(&block(xyz, si)) {
                Ok((lam, v)) if lam < worst.0 => {
                    worst = (lam, vec![2.0 * v[1] * v[2], 2.0 * v[1] * v[3], 2.0 * v[2] * v[3]]);
                }
                Ok(_) => {}
                Err(e) => failure = Some(e),
            }
        }
        worst
    };
    // The cube (-1, 1)^3 holds every PD choice; outside it the objective is
    // not positive anyway.
    let res = ellipsoid_max(eval, vec![0.0; 3], 3f64.sqrt(), 800, eps_pd, f64::NEG_INFINITY);
    if let Some(e) = failure {
        return Err(e.into());
    }
    let verdict = if res.best > eps_pd {
        let mut q = p.clone();
        let free = [(blue[0], blue[1], 0), (blue[0], blue[2], 1), (blue[1], blue[2], 2)];
        let d: Vec<f64> = p.diag.iter().map(|v| v.sqrt()).collect();
        let mut g = p.graph.clone();
        for &(a, b, k) in &free {
            g.add_edge(a, b);
            q.edge_vals.insert((a.min(b), a.max(b)), res.best_x[k] * d[a] * d[b]);
        }
        q.graph = g;
        let sigma = chordal_completion(&q)?;
        ExistenceVerdict::new(Status::Exists, "k3m-pillow", Some(res.best), Some(Certificate::completion(sigma)))
    } else if res.upper < -eps_pd {
        ExistenceVerdict::new(
            Status::NotExists,
            "k3m-pillow",
            Some(res.upper),
            Some(Certificate::violation(format!(
                "the pillows have no common interior point (certified max λ_min ≤ {:.3e})",
                res.upper
            ))),
        )
    } else {
        ExistenceVerdict::new(Status::Boundary, "k3m-pillow", Some(res.best), None)
    };
    Ok(verdict)
}

/// Frets's heads model with one observation: the MLE exists iff
/// `|x1| > |x2|` and `|x3| > |x4|`, or both reversed. The margin is the
/// smaller of `||x1| − |x2||`, `||x3| − |x4||` relative to `|x|`, negative
/// when the MLE does not exist.
pub fn frets_inequality(x: &[f64]) -> Result<ExistenceVerdict, ExistenceError> {
    if x.len() != 4 {
        return Err(ExistenceError::WrongModel(format!("expected 4 coordinates, got {}", x.len())));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let a = x[0].abs() - x[1].abs();
    let b = x[2].abs() - x[3].abs();
    let gap = if norm > 0.0 { a.abs().min(b.abs()) / norm } else { 0.0 };
    if a == 0.0 || b == 0.0 {
        return Ok(ExistenceVerdict::new(
            Status::Boundary,
            "frets-inequality",
            Some(0.0),
            Some(Certificate::violation("|x1| = |x2| or |x3| = |x4|".into())),
        ));
    }
    if (a > 0.0) == (b > 0.0) {
        Ok(ExistenceVerdict::new(Status::Exists, "frets-inequality", Some(gap), None))
    } else {
        Ok(ExistenceVerdict::new(
            Status::NotExists,
            "frets-inequality",
            Some(-gap),
            Some(Certificate::violation(
                "|x1| - |x2| and |x3| - |x4| have opposite signs".into(),
            )),
        ))
    }
}

//! Colored (RCON) models on the 4-cycle and on `K_{2,3}`: a catalog with the
//! known existence regimes, and the Frets' heads model in detail.

use serde::Serialize;

use crate::existence::{frets_inequality, unit_scale_lambda_min, ExistenceError, Status};
use crate::graphs::GraphJson;
use crate::mle::{fit, MleError};
use crate::models::{colored_stat, ColoredModel, Model};
use crate::montecarlo::Classification;
use crate::numkernel::SymMatrix;

/// Frets' heads: two vertex classes and three edge classes on a 4-cycle.
pub const FRETS_PATTERN: [[usize; 4]; 4] = [[1, 3, 0, 4], [3, 1, 4, 0], [0, 4, 2, 5], [4, 0, 5, 2]];

/// `K_{2,3}` with one vertex class and three edge classes, each a perfect
/// matching between `{1,2}` and two of `{3,4,5}`.
pub const K23_COLORED_PATTERN: [[usize; 5]; 5] = [
    [1, 0, 2, 3, 4],
    [0, 1, 4, 2, 3],
    [2, 4, 1, 0, 0],
    [3, 2, 0, 1, 0],
    [4, 3, 0, 0, 1],
];

/// A 4-cycle `1-2-3-4-1` given by its diagonal labels and the labels of
/// edges `12, 23, 34, 14`.
struct Cycle4 {
    id: &'static str,
    diag: [usize; 4],
    edges: [usize; 4],
    expected: [Classification; 3],
}

use Classification::{AlwaysAS as A, Never as N, Partial as P, Unresolved as U};

const fn c4(id: &'static str, diag: [usize; 4], edges: [usize; 4], expected: [Classification; 3]) -> Cycle4 {
    Cycle4 { id, diag, edges, expected }
}

const CYCLES: [Cycle4; 24] = [
    c4("T2-1", [1, 1, 1, 1], [2, 3, 2, 2], [A, A, A]),
    c4("T2-2", [1, 2, 1, 2], [3, 4, 3, 3], [A, A, A]),
    c4("T2-3", [1, 1, 1, 1], [2, 3, 3, 2], [A, A, A]),
    c4("T2-4", [1, 1, 2, 1], [3, 4, 4, 3], [A, A, A]),
    c4("T2-5", [1, 2, 1, 2], [3, 4, 4, 3], [A, A, A]),
    c4("T2-6", [1, 1, 1, 1], [2, 3, 4, 2], [A, A, A]),
    c4("T2-7", [1, 1, 2, 1], [3, 4, 5, 3], [P, A, A]),
    c4("T2-8", [1, 2, 1, 2], [3, 4, 5, 3], [P, A, A]),
    c4("T2-9", [1, 2, 3, 2], [4, 5, 6, 4], [U, A, A]),
    c4("T2-10", [1, 1, 1, 1], [2, 3, 4, 3], [A, A, A]),
    c4("T2-11", [1, 2, 1, 2], [3, 4, 5, 4], [U, A, A]),
    c4("T2-12", [1, 1, 1, 1], [2, 3, 4, 5], [A, A, A]),
    c4("T2-13", [1, 1, 2, 2], [3, 4, 5, 6], [P, A, A]),
    c4("T2-14", [1, 2, 1, 2], [3, 4, 5, 6], [U, A, A]),
    c4("T2-15", [1, 1, 1, 2], [3, 4, 5, 6], [P, A, A]),
    c4("T2-16", [1, 1, 2, 3], [4, 5, 6, 7], [N, A, A]),
    c4("T2-17", [1, 2, 1, 3], [4, 5, 6, 7], [U, A, A]),
    c4("T2-18", [1, 2, 3, 4], [5, 6, 7, 8], [N, P, A]),
    c4("T3-1", [1, 1, 1, 1], [2, 2, 2, 2], [A, A, A]),
    c4("T3-2", [1, 2, 1, 2], [3, 3, 3, 3], [A, A, A]),
    c4("T3-3", [1, 1, 1, 1], [2, 3, 2, 3], [A, A, A]),
    c4("T3-4", [1, 2, 1, 2], [3, 4, 3, 4], [A, A, A]),
    c4("T3-5", [1, 2, 3, 2], [4, 5, 5, 4], [A, A, A]),
    c4("T3-6", [1, 1, 2, 2], [3, 4, 5, 4], [P, A, A]),
];

impl Cycle4 {
    fn pattern(&self) -> Vec<Vec<usize>> {
        let mut k = vec![vec![0; 4]; 4];
        for (v, &d) in self.diag.iter().enumerate() {
            k[v][v] = d;
        }
        for (&(i, j), &l) in [(0, 1), (1, 2), (2, 3), (0, 3)].iter().zip(&self.edges) {
            k[i][j] = l;
            k[j][i] = l;
        }
        k
    }
}

#[derive(Debug, Clone)]
pub struct ColoredCatalogEntry {
    pub id: &'static str,
    /// Concentration pattern with the printed λ indices.
    pub printed: Vec<Vec<usize>>,
    pub model: ColoredModel,
    /// Expected regime at 1, 2 and ≥ 3 observations.
    pub expected: [Classification; 3],
}

impl ColoredCatalogEntry {
    fn new(id: &'static str, printed: Vec<Vec<usize>>, expected: [Classification; 3]) -> Self {
        let model = ColoredModel::from_pattern(&printed).expect("catalog pattern is valid");
        ColoredCatalogEntry {
            id,
            printed,
            model,
            expected,
        }
    }

    /// Expected regime for `n` observations.
    pub fn expected_at(&self, n: usize) -> Classification {
        self.expected[n.clamp(1, 3) - 1]
    }
}

/// All colored 4-cycles with edge classes joining fixed vertex classes
/// (`T2-*`), the permutation-symmetric ones (`T3-*`), Frets' heads and the
/// colored `K_{2,3}`.
pub fn catalog() -> Vec<ColoredCatalogEntry> {
    let mut out: Vec<ColoredCatalogEntry> = CYCLES
        .iter()
        .map(|c| ColoredCatalogEntry::new(c.id, c.pattern(), c.expected))
        .collect();
    out.push(ColoredCatalogEntry::new(
        "fret",
        FRETS_PATTERN.iter().map(|r| r.to_vec()).collect(),
        [P, A, A],
    ));
    out.push(ColoredCatalogEntry::new(
        "K23-colored",
        K23_COLORED_PATTERN.iter().map(|r| r.to_vec()).collect(),
        [A, A, A],
    ));
    out
}

pub fn catalog_entry(id: &str) -> Option<ColoredCatalogEntry> {
    catalog().into_iter().find(|e| e.id == id)
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntryJson {
    pub id: String,
    pub pattern: Vec<Vec<usize>>,
    pub graph: GraphJson,
    /// Regimes at n = 1, 2, ≥ 3.
    pub expected: [Classification; 3],
}

pub fn catalog_json() -> Vec<CatalogEntryJson> {
    catalog()
        .into_iter()
        .map(|e| CatalogEntryJson {
            id: e.id.to_string(),
            pattern: e.printed.clone(),
            graph: e.model.to_json(),
            expected: e.expected,
        })
        .collect()
}

pub fn frets() -> ColoredModel {
    ColoredModel::from_pattern(&FRETS_PATTERN.map(|r| r.to_vec())).expect("valid pattern")
}

/// The boundary polynomial of the Frets' heads statistic cone, evaluated at
/// `t = (t1, .., t5)`.
pub fn frets_boundary(t: &[f64; 5]) -> f64 {
    let [t1, t2, t3, _, t5] = *t;
    let linear = (t1 - t3) * (t1 + t3) * (t2 - t5) * (t2 + t5);
    linear * bow_tie(t)
}

/// The quartic factor, which vanishes on every single-observation statistic.
pub fn bow_tie(t: &[f64; 5]) -> f64 {
    let [t1, t2, t3, t4, t5] = *t;
    4.0 * t2 * t2 * t3 * t3 - 4.0 * t1 * t2 * t4 * t4 + t4.powi(4) + 8.0 * t1 * t2 * t3 * t5 - 4.0 * t3 * t4 * t4 * t5
        + 4.0 * t1 * t1 * t5 * t5
}

/// Sufficient statistic of one observation `x` under Frets' model.
pub fn frets_stat(x: &[f64; 4]) -> [f64; 5] {
    let s = SymMatrix::from_fn(4, |i, j| x[i] * x[j]);
    let t = colored_stat(&s, &frets()).expect("order 4").t;
    [t[0], t[1], t[2], t[3], t[4]]
}

/// Smallest unit-scale eigenvalue of a fitted `Σ̂` still counted as PD.
/// Exact fits near the boundary reach about `0.1·gap²`; fits that stop on a
/// flat gradient while running off to infinity sit near `1e-10`.
pub const SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverOutcome {
    Converged,
    /// The solver stopped but `Σ̂` is singular to within `SINGULAR_TOL` on the
    /// unit-diagonal scale.
    Degenerate,
    Diverged,
    NoConvergence,
}

#[derive(Debug, Clone, Serialize)]
pub struct FretsReport {
    pub x: [f64; 4],
    pub t: [f64; 5],
    pub boundary: f64,
    /// `bow_tie(t)` relative to `|t|⁴`.
    pub bow_tie_relative: f64,
    pub inequality: Status,
    pub solver: SolverOutcome,
    /// Solver outcome matches the inequality; `None` on the boundary.
    pub consistent: Option<bool>,
}

/// Runs the closed-form inequality and the Newton solver on one observation.
pub fn frets_consistency(x: &[f64; 4]) -> Result<FretsReport, ExistenceError> {
    let t = frets_stat(x);
    let inequality = frets_inequality(x)?.status;
    let s = SymMatrix::from_fn(4, |i, j| x[i] * x[j]);
    let solver = match fit(&Model::Colored(frets()), &s) {
        Ok(r) if unit_scale_lambda_min(&r.sigma_hat) >= SINGULAR_TOL => SolverOutcome::Converged,
        Ok(_) => SolverOutcome::Degenerate,
        Err(MleError::Diverged { .. }) => SolverOutcome::Diverged,
        Err(MleError::NoConvergence { .. }) => SolverOutcome::NoConvergence,
        Err(MleError::BadInput(msg)) => return Err(ExistenceError::WrongModel(msg)),
        Err(MleError::Num(e)) => return Err(e.into()),
    };
    let consistent = match inequality {
        Status::Exists => Some(solver == SolverOutcome::Converged),
        Status::NotExists => Some(solver != SolverOutcome::Converged),
        _ => None,
    };
    let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(FretsReport {
        x: *x,
        t,
        boundary: frets_boundary(&t),
        bow_tie_relative: if norm > 0.0 { bow_tie(&t) / norm.powi(4) } else { 0.0 },
        inequality,
        solver,
        consistent,
    })
}

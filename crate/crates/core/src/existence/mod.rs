//! Does the MLE exist for this data? Exact criteria for special graph
//! classes, a general feasibility solver, and a dispatcher that splits along
//! clique separators first.

mod completion;
mod criteria;
mod feasibility;
mod kernel;

use serde::Serialize;
use thiserror::Error;

use crate::colored::FRETS_PATTERN;
use crate::graphs::{clique_sum_tree, is_chordal, max_clique_size, maximal_cliques, minimal_chordal_cover, Graph, GraphError, SplitTree};
use crate::mle::{fit, MleError};
use crate::models::{project, sample_cov, Model, ModelError, PartialMatrix, SampleData};
use crate::numkernel::{lambda_min, NumError, SymMatrix};

pub use completion::{chordal_completion, glue};
pub use criteria::{
    arccos_pd, bipartite_parts, buhl_cycle, chordal_check, cycle_order, frets_inequality, k2m_from_angles, k2m_neighbor,
    k3m_pillow, line_angle, LINE_TOL,
};
pub use feasibility::{general_feasibility, max_min_eigenvalue, FeasibilityOptions};
pub use kernel::kernel_test;

/// Separates Exists / Boundary / NotExists on the unit-diagonal scale.
pub const EPS_PD: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExistenceError {
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("graph is not chordal")]
    NotChordal,
    #[error("wrong graph: {0}")]
    WrongGraph(String),
    #[error("criterion needs n = {expected} observations, got {got}")]
    WrongN { expected: usize, got: usize },
    #[error("wrong model: {0}")]
    WrongModel(String),
    #[error("correlation {0} has absolute value >= 1")]
    CorrelationOutOfRange(f64),
    #[error("diagonal entry {0} is not positive")]
    BadDiagonal(usize),
    #[error("dimension mismatch: model has {expected} variables, input has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Exists,
    NotExists,
    Boundary,
    Undecided,
}

impl Status {
    pub fn is_decided(self) -> bool {
        matches!(self, Status::Exists | Status::NotExists)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A PD matrix agreeing with the data on the diagonal and the edges (or,
    /// for colored models, on the colour-class sums). `lambda_min` is taken
    /// on the unit-diagonal scale.
    Completion { matrix: SymMatrix, lambda_min: f64 },
    /// An exact condition that fails.
    Violation { condition: String },
    /// PSD concentration matrix in the model space whose pairing with the
    /// data is not positive: the likelihood increases without bound along it.
    DualWitness { direction: SymMatrix, pairing: f64 },
}

impl Certificate {
    pub fn completion(matrix: SymMatrix) -> Self {
        let lambda_min = unit_scale_lambda_min(&matrix);
        Certificate::Completion { matrix, lambda_min }
    }

    pub fn violation(condition: String) -> Self {
        Certificate::Violation { condition }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceVerdict {
    pub status: Status,
    /// Which criterion produced the verdict.
    pub method: String,
    /// Criterion-specific slack on the unit-diagonal scale; positive on the
    /// Exists side.
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl ExistenceVerdict {
    pub fn new(status: Status, method: &str, margin: Option<f64>, certificate: Option<Certificate>) -> Self {
        ExistenceVerdict {
            status,
            method: method.to_string(),
            margin,
            certificate,
        }
    }
}

/// Smallest eigenvalue of `D A D` with `D = diag(A)^(-1/2)`; NaN if a
/// diagonal entry is not positive.
pub fn unit_scale_lambda_min(a: &SymMatrix) -> f64 {
    let d = a.diag();
    if d.iter().any(|&v| !(v > 0.0)) {
        return f64::NAN;
    }
    let inv: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    lambda_min(&a.congruence_diag(&inv)).map(|r| r.0).unwrap_or(f64::NAN)
}

/// Dual bound from a concentration matrix `k` in the model space: shifts
/// `k` by a multiple of the identity until it is PSD (this stays in the
/// model space) and returns `(⟨S, D⟩ / tr D, D)`. For every completion
/// `Σ` of the data, `λ_min(Σ) ≤ ⟨S, D⟩ / tr D`; `s` may be any matrix with
/// the data's sufficient statistic.
pub(crate) fn dual_bound(s: &SymMatrix, k: &SymMatrix) -> Result<(f64, SymMatrix), NumError> {
    let (l, _) = lambda_min(k)?;
    let d = if l < 0.0 { k.shifted(l) } else { k.clone() };
    let d = d.scaled(1.0 / d.max_abs());
    let tr: f64 = d.diag().iter().sum();
    Ok((s.dot(&d) / tr, d))
}

pub(crate) fn zero_variance(p: &PartialMatrix) -> Option<ExistenceVerdict> {
    p.diag.iter().position(|&v| !(v > 0.0)).map(|i| {
        ExistenceVerdict::new(
            Status::NotExists,
            "zero-variance",
            Some(0.0),
            Some(Certificate::violation(format!("variable {} has no positive variance", i + 1))),
        )
    })
}

/// What is known about the data.
#[derive(Debug, Clone, Copy)]
pub enum Evidence<'a> {
    /// Raw observations; enables the observation-count and line criteria.
    Data(&'a SampleData),
    /// Only the sufficient statistic.
    Partial(&'a PartialMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecideOptions {
    pub eps_pd: f64,
    /// Attach a completion to Exists verdicts from criteria that do not
    /// produce one (costs an MLE fit).
    pub completions: bool,
    pub feasibility: FeasibilityOptions,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            eps_pd: EPS_PD,
            completions: true,
            feasibility: FeasibilityOptions::default(),
        }
    }
}

impl DecideOptions {
    pub fn with_eps(eps_pd: f64) -> Self {
        DecideOptions {
            eps_pd,
            completions: true,
            feasibility: FeasibilityOptions {
                eps_pd,
                ..FeasibilityOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Chordal,
    Cycle(Vec<usize>),
    K2m { blue: [usize; 2], red: Vec<usize> },
    K3m { blue: [usize; 3], red: Vec<usize> },
    General,
}

#[derive(Debug, Clone)]
struct Piece {
    graph: Graph,
    q: usize,
    q_star: usize,
    cover: Graph,
    shape: Shape,
}

impl Piece {
    fn new(graph: Graph) -> Result<Self, ExistenceError> {
        // Past the exact-search limit the n >= q* shortcut is simply skipped.
        let (q_star, cover) = match minimal_chordal_cover(&graph) {
            Ok(r) => (r.q_star, r.cover(&graph)),
            Err(_) => (usize::MAX, graph.clone()),
        };
        let shape = if is_chordal(&graph) {
            Shape::Chordal
        } else if let Some(order) = criteria::cycle_order(&graph) {
            Shape::Cycle(order)
        } else if let Some((b, r)) = criteria::bipartite_parts(&graph, 2) {
            Shape::K2m { blue: [b[0], b[1]], red: r }
        } else if let Some((b, r)) = criteria::bipartite_parts(&graph, 3) {
            Shape::K3m {
                blue: [b[0], b[1], b[2]],
                red: r,
            }
        } else {
            Shape::General
        };
        Ok(Piece {
            q: max_clique_size(&graph),
            q_star,
            cover,
            graph,
            shape,
        })
    }
}

/// Routing plan for one model, reusable across datasets.
#[derive(Debug, Clone)]
pub struct Decider {
    model: Model,
    whole: Piece,
    tree: SplitTree,
    atoms: Vec<(Vec<usize>, Piece)>,
    frets: bool,
    opts: DecideOptions,
}

impl Decider {
    pub fn new(model: &Model) -> Result<Self, ExistenceError> {
        Self::with_options(model, DecideOptions::default())
    }

    pub fn with_options(model: &Model, opts: DecideOptions) -> Result<Self, ExistenceError> {
        let graph = model.graph().clone();
        let whole = Piece::new(graph.clone())?;
        let (tree, atoms) = match model {
            Model::Plain(_) => {
                let tree = clique_sum_tree(&graph);
                let atoms = if tree.is_atom() {
                    Vec::new()
                } else {
                    tree.atoms()
                        .into_iter()
                        .map(|a| Ok((a.vertices, Piece::new(a.graph)?)))
                        .collect::<Result<_, ExistenceError>>()?
                };
                (tree, atoms)
            }
            Model::Colored(_) => (clique_sum_tree(&Graph::empty(0)), Vec::new()),
        };
        let frets = match model {
            Model::Colored(cm) => cm.pattern().iter().map(|r| r.as_slice()).eq(FRETS_PATTERN.iter().map(|r| r.as_slice())),
            Model::Plain(_) => false,
        };
        Ok(Decider {
            model: model.clone(),
            whole,
            tree,
            atoms,
            frets,
            opts,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn q(&self) -> usize {
        self.whole.q
    }

    pub fn q_star(&self) -> usize {
        self.whole.q_star
    }

    pub fn decide(&self, ev: Evidence<'_>) -> Result<ExistenceVerdict, ExistenceError> {
        let m = self.model.order();
        let got = match ev {
            Evidence::Data(d) => d.m(),
            Evidence::Partial(p) => p.order(),
        };
        if got != m {
            return Err(ExistenceError::DimensionMismatch { expected: m, got });
        }
        let (p, data, s) = match ev {
            Evidence::Data(d) => {
                let s = sample_cov(d);
                (project(&s, self.model.graph())?, Some(d), Some(s))
            }
            Evidence::Partial(p) => {
                if p.graph != *self.model.graph() {
                    return Err(ExistenceError::WrongGraph("partial matrix is on a different graph".into()));
                }
                (p.clone(), None, None)
            }
        };
        if let Some(v) = zero_variance(&p) {
            return Ok(v);
        }
        match &self.model {
            Model::Plain(_) => self.decide_plain(&p, data, s.as_ref()),
            Model::Colored(_) => self.decide_colored(&p, data, s.as_ref()),
        }
    }

    fn decide_plain(&self, p: &PartialMatrix, data: Option<&SampleData>, s: Option<&SymMatrix>) -> Result<ExistenceVerdict, ExistenceError> {
        if let Some(v) = self.observation_count(&self.whole, p, data, s)? {
            return Ok(v);
        }
        if self.atoms.is_empty() {
            return self.decide_piece(&self.whole, p, data, s);
        }
        let mut verdicts = Vec::with_capacity(self.atoms.len());
        for (vertices, piece) in &self.atoms {
            let sub_p = p.restrict(vertices);
            let sub_d = data.map(|d| d.select(vertices));
            let sub_s = s.map(|s| s.submatrix(vertices));
            let mut v = self.observation_count(piece, &sub_p, sub_d.as_ref(), sub_s.as_ref())?;
            if v.is_none() {
                v = Some(self.decide_piece(piece, &sub_p, sub_d.as_ref(), sub_s.as_ref())?);
            }
            verdicts.push(v.expect("verdict"));
        }
        let inner: Vec<&str> = verdicts.iter().map(|v| v.method.as_str()).collect();
        let method = format!("clique-sum[{}]", inner.join(","));
        let margin = verdicts.iter().filter_map(|v| v.margin).fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))));
        if let Some(k) = verdicts.iter().position(|v| v.status == Status::NotExists) {
            let (vertices, _) = &self.atoms[k];
            let cert = verdicts[k].certificate.clone().map(|c| lift_certificate(c, vertices, p.order()));
            return Ok(ExistenceVerdict::new(Status::NotExists, &method, verdicts[k].margin, cert));
        }
        if verdicts.iter().all(|v| v.status == Status::Exists) {
            let mut cert = None;
            if self.opts.completions {
                let parts: Option<Vec<SymMatrix>> = verdicts
                    .iter()
                    .zip(&self.atoms)
                    .map(|(v, (vertices, piece))| match &v.certificate {
                        Some(Certificate::Completion { matrix, .. }) => Some(matrix.clone()),
                        _ => {
                            let sub = p.restrict(vertices);
                            mle_completion(&Model::plain(piece.graph.clone()), &sub.complete_with(&vec![0.0; sub.graph.non_edges().len()]), self.opts.eps_pd)
                        }
                    })
                    .collect();
                if let Some(parts) = parts {
                    cert = glue(&self.tree, &parts, p.order())
                        .ok()
                        .map(Certificate::completion)
                        .filter(|c| matches!(c, Certificate::Completion { lambda_min, .. } if *lambda_min >= self.opts.eps_pd));
                }
            }
            return Ok(ExistenceVerdict::new(Status::Exists, &method, margin, cert));
        }
        let status = if verdicts.iter().any(|v| v.status == Status::Undecided) {
            Status::Undecided
        } else {
            Status::Boundary
        };
        Ok(ExistenceVerdict::new(status, &method, margin, None))
    }

    /// Observation-count shortcuts: `n < q` fails for every dataset, and
    /// `n >= q*` succeeds for generic data (checked on the data by completing
    /// along a minimal chordal cover).
    fn observation_count(
        &self,
        piece: &Piece,
        p: &PartialMatrix,
        data: Option<&SampleData>,
        s: Option<&SymMatrix>,
    ) -> Result<Option<ExistenceVerdict>, ExistenceError> {
        let (Some(d), Some(s)) = (data, s) else {
            return Ok(None);
        };
        let n = d.n();
        if n < piece.q && !self.model.is_colored() {
            let clique = maximal_cliques(&piece.graph)
                .into_iter()
                .find(|c| c.len() == piece.q)
                .expect("max clique");
            let (corr, _) = p.correlation();
            let block = SymMatrix::from_fn(clique.len(), |a, b| corr.get(clique[a], clique[b]).expect("clique"));
            let margin = lambda_min(&block)?.0;
            let labels: Vec<String> = clique.iter().map(|v| (v + 1).to_string()).collect();
            return Ok(Some(ExistenceVerdict::new(
                Status::NotExists,
                "n<q",
                Some(margin),
                Some(Certificate::violation(format!(
                    "clique {{{}}} has {} > n = {n} variables, so its sample covariance is singular",
                    labels.join(","),
                    clique.len()
                ))),
            )));
        }
        if n >= piece.q_star {
            let cover_p = project(s, &piece.cover)?;
            let v = chordal_check(&cover_p, self.opts.eps_pd)?;
            if v.status == Status::Exists {
                return Ok(Some(ExistenceVerdict { method: "n>=q*".into(), ..v }));
            }
        }
        Ok(None)
    }

    fn decide_piece(
        &self,
        piece: &Piece,
        p: &PartialMatrix,
        data: Option<&SampleData>,
        s: Option<&SymMatrix>,
    ) -> Result<ExistenceVerdict, ExistenceError> {
        let eps = self.opts.eps_pd;
        let two_obs = data.filter(|d| d.n() == 2);
        let exact = match (&piece.shape, two_obs) {
            (Shape::Chordal, _) => Some(chordal_check(p, eps)?),
            (Shape::Cycle(order), Some(d)) => Some(buhl_cycle(&criteria::two_obs_angles(d, order)?)?),
            (Shape::K2m { blue, red }, Some(d)) => Some(k2m_neighbor(d, *blue, red)?),
            (Shape::K3m { blue, red }, _) => match k3m_pillow(p, *blue, red, eps) {
                Ok(v) if v.status.is_decided() => Some(v),
                Ok(_) | Err(ExistenceError::CorrelationOutOfRange(_)) => None,
                Err(e) => return Err(e),
            },
            _ => None,
        };
        let model = Model::plain(piece.graph.clone());
        if let Some(mut v) = exact {
            if v.status == Status::Exists && v.certificate.is_none() && self.opts.completions {
                let start = p.complete_with(&vec![0.0; p.graph.non_edges().len()]);
                v.certificate = mle_completion(&model, &start, eps).map(Certificate::completion);
            }
            if v.status != Status::Boundary {
                return Ok(v);
            }
        }
        if let Some(s) = s {
            let v = self.kernel_verdict(&model, s)?;
            if v.status.is_decided() {
                return Ok(v);
            }
        }
        general_feasibility(p, &self.opts.feasibility)
    }

    /// Kernel test on full data, with the MLE attached to Exists verdicts
    /// when completions are requested.
    fn kernel_verdict(&self, model: &Model, s: &SymMatrix) -> Result<ExistenceVerdict, ExistenceError> {
        let mut v = kernel_test(model, s, self.opts.eps_pd)?;
        if v.status == Status::Exists && self.opts.completions {
            v.certificate = mle_completion(model, s, self.opts.eps_pd).map(Certificate::completion);
        }
        Ok(v)
    }

    fn decide_colored(&self, p: &PartialMatrix, data: Option<&SampleData>, s: Option<&SymMatrix>) -> Result<ExistenceVerdict, ExistenceError> {
        // A PD completion of the partial matrix also matches the class sums,
        // so the plain-model shortcut for n >= q* carries over.
        if let (Some(d), Some(s)) = (data, s) {
            if d.n() >= self.whole.q_star {
                let v = chordal_check(&project(s, &self.whole.cover)?, self.opts.eps_pd)?;
                if v.status == Status::Exists {
                    return Ok(ExistenceVerdict { method: "n>=q*".into(), ..v });
                }
            }
            if self.frets && d.n() == 1 {
                let mut v = frets_inequality(d.observation(0))?;
                if v.status == Status::Exists && self.opts.completions {
                    v.certificate = mle_completion(&self.model, s, self.opts.eps_pd).map(Certificate::completion);
                }
                if v.status != Status::Boundary {
                    return Ok(v);
                }
            }
        }
        if let Some(s) = s {
            let v = self.kernel_verdict(&self.model, s)?;
            if v.status.is_decided() {
                return Ok(v);
            }
        }
        let start = p.complete_with(&vec![0.0; p.graph.non_edges().len()]);
        colored_mle_verdict(&self.model, &start, self.opts.eps_pd)
    }
}

/// MLE as a completion, kept only if it clears `eps` on the unit-diagonal
/// scale.
fn mle_completion(model: &Model, s: &SymMatrix, eps: f64) -> Option<SymMatrix> {
    fit(model, s)
        .ok()
        .map(|r| r.sigma_hat)
        .filter(|sig| unit_scale_lambda_min(sig) >= eps)
}

/// Brackets the best unit-scale margin between the fitted `Σ̂` (lower) and
/// the dual bound from the last concentration iterate (upper). Colored
/// models are compared on the scale of the mean variance.
fn colored_mle_verdict(model: &Model, s: &SymMatrix, eps: f64) -> Result<ExistenceVerdict, ExistenceError> {
    let scale = s.diag().iter().sum::<f64>() / s.order() as f64;
    let (lower, upper, sigma, witness) = match fit(model, s) {
        Ok(r) => {
            let (u, w) = dual_bound(s, &r.k_hat)?;
            (unit_scale_lambda_min(&r.sigma_hat), u / scale, Some(r.sigma_hat), Some(w))
        }
        Err(MleError::Diverged { direction, .. }) => {
            let (u, w) = dual_bound(s, &direction)?;
            (f64::NEG_INFINITY, u / scale, None, Some(w))
        }
        Err(MleError::NoConvergence { .. }) => (f64::NEG_INFINITY, f64::INFINITY, None, None),
        Err(MleError::BadInput(msg)) => return Err(ExistenceError::OutOfRange(msg)),
        Err(MleError::Num(e)) => return Err(e.into()),
    };
    if lower > eps {
        return Ok(ExistenceVerdict::new(
            Status::Exists,
            "colored-mle",
            Some(lower),
            sigma.map(Certificate::completion),
        ));
    }
    // A converged fit has a PD Σ̂ in the fiber, so the MLE exists even when
    // the margin is below `eps`.
    if upper <= eps && sigma.is_none() {
        let k = witness.expect("finite bound has a witness");
        let pairing = s.dot(&k);
        return Ok(ExistenceVerdict::new(
            Status::NotExists,
            "colored-mle",
            Some(upper),
            Some(Certificate::DualWitness { direction: k, pairing }),
        ));
    }
    let status = if lower.is_finite() { Status::Boundary } else { Status::Undecided };
    Ok(ExistenceVerdict::new(status, "colored-mle", lower.is_finite().then_some(lower), None))
}

/// Re-labels an atom's certificate on the whole graph.
fn lift_certificate(c: Certificate, vertices: &[usize], m: usize) -> Certificate {
    let labels: Vec<String> = vertices.iter().map(|v| (v + 1).to_string()).collect();
    match c {
        Certificate::Violation { condition } => Certificate::Violation {
            condition: format!("atom {{{}}}: {condition}", labels.join(",")),
        },
        Certificate::DualWitness { direction, pairing } => {
            let mut k = SymMatrix::zeros(m);
            for (a, &i) in vertices.iter().enumerate() {
                for (b, &j) in vertices.iter().enumerate().take(a + 1) {
                    k.set(i, j, direction.get(a, b));
                }
            }
            Certificate::DualWitness { direction: k, pairing }
        }
        other => other,
    }
}

/// One-shot convenience wrapper around [`Decider`].
pub fn decide(model: &Model, ev: Evidence<'_>) -> Result<ExistenceVerdict, ExistenceError> {
    Decider::new(model)?.decide(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::family;
    use crate::models::sample_gaussian;

    fn data(g: &str, n: usize, seed: u64) -> (Model, SampleData) {
        let graph = crate::graphs::parse_family(g).unwrap();
        let m = graph.order();
        (Model::plain(graph), sample_gaussian(&SymMatrix::identity(m), n, seed).unwrap())
    }

    #[test]
    fn observation_count_paths() {
        let (model, d) = data("complete:4", 4, 1);
        let v = decide(&model, Evidence::Data(&d)).unwrap();
        assert_eq!((v.status, v.method.as_str()), (Status::Exists, "n>=q*"));
        let (model, d) = data("cycle:4", 1, 1);
        let v = decide(&model, Evidence::Data(&d)).unwrap();
        assert_eq!((v.status, v.method.as_str()), (Status::NotExists, "n<q"));
    }

    #[test]
    fn hprime_uses_clique_sum() {
        let (model, d) = data("Hprime_fig5", 3, 5);
        let v = decide(&model, Evidence::Data(&d)).unwrap();
        assert_eq!(v.status, Status::Exists, "{v:?}");
        assert!(v.method.starts_with("clique-sum["), "{}", v.method);
        let Some(Certificate::Completion { matrix, lambda_min }) = &v.certificate else {
            panic!("{v:?}");
        };
        assert!(*lambda_min > 0.0);
        let s = sample_cov(&d);
        for (i, j) in model.graph().edges() {
            assert!((matrix.get(i, j) - s.get(i, j)).abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let (model, _) = data("cycle:4", 2, 1);
        let d = sample_gaussian(&SymMatrix::identity(3), 2, 1).unwrap();
        assert!(matches!(
            decide(&model, Evidence::Data(&d)),
            Err(ExistenceError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cycle_route_agrees_with_feasibility() {
        for m in 4..=7 {
            let (model, _) = data(&format!("cycle:{m}"), 2, 0);
            let decider = Decider::new(&model).unwrap();
            for seed in 0..60 {
                let d = sample_gaussian(&SymMatrix::identity(m), 2, 1000 + seed).unwrap();
                let exact = decider.decide(Evidence::Data(&d)).unwrap();
                assert_eq!(exact.method, "buhl-cycle");
                if exact.margin.unwrap().abs() < 1e-6 {
                    continue;
                }
                let p = project(&sample_cov(&d), model.graph()).unwrap();
                let general = general_feasibility(&p, &FeasibilityOptions::default()).unwrap();
                assert_eq!(exact.status, general.status, "m={m} seed={seed} {general:?}");
            }
        }
    }

    #[test]
    fn table1_row_c_splits_into_cycle_and_edge() {
        let (model, d) = data("table1:c", 2, 3);
        let v = decide(&model, Evidence::Data(&d)).unwrap();
        assert!(v.method.starts_with("clique-sum[") && v.method.contains("buhl-cycle"), "{}", v.method);
    }

    #[test]
    fn partial_evidence_on_grid() {
        let g = family("grid", &[3, 3]).unwrap();
        let p = project(&SymMatrix::identity(9), &g).unwrap();
        let v = decide(&Model::plain(g), Evidence::Partial(&p)).unwrap();
        assert_eq!(v.status, Status::Exists);
    }
}

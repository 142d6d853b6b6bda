//! Plain and colored (RCON) Gaussian graphical models with zero mean, their
//! sufficient statistics, and sample data.

mod data;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graphs::{Graph, GraphError, GraphJson};
use crate::numkernel::{NumError, SymMatrix};

pub use data::{sample_cov, sample_gaussian, sample_gaussian_trial, SampleData};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("colour classes: {0}")]
    BadClasses(String),
    #[error("dimension mismatch: model has {expected} variables, input has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("data: {0}")]
    Data(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianModel {
    pub graph: Graph,
}

impl GaussianModel {
    pub fn new(graph: Graph) -> Self {
        GaussianModel { graph }
    }
}

/// RCON model: concentration entries are shared within vertex classes (on
/// the diagonal) and within edge classes; non-edges are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredModel {
    pub graph: Graph,
    /// Class of each vertex, `0..p`.
    vertex_class: Vec<usize>,
    /// Class of each edge (in `graph.edges()` order), `0..q`.
    edge_class: Vec<usize>,
    p: usize,
    q: usize,
}

impl ColoredModel {
    /// `vertex_class[v]` in `0..p` and `edge_class[k]` in `0..q` for the
    /// `k`-th edge of `graph.edges()`; every class must be non-empty.
    pub fn new(graph: Graph, vertex_class: Vec<usize>, edge_class: Vec<usize>) -> Result<Self, ModelError> {
        if vertex_class.len() != graph.order() {
            return Err(ModelError::BadClasses(format!(
                "{} vertex labels for {} vertices",
                vertex_class.len(),
                graph.order()
            )));
        }
        if edge_class.len() != graph.edge_count() {
            return Err(ModelError::BadClasses(format!(
                "{} edge labels for {} edges",
                edge_class.len(),
                graph.edge_count()
            )));
        }
        let p = contiguous(&vertex_class, "vertex")?;
        let q = contiguous(&edge_class, "edge")?;
        Ok(ColoredModel {
            graph,
            vertex_class,
            edge_class,
            p,
            q,
        })
    }

    /// Builds a model from a symmetric pattern of concentration labels:
    /// `0` is a structural zero, equal labels mean equal entries. Labels on
    /// the diagonal and off the diagonal must be disjoint. Classes are
    /// numbered by increasing label.
    pub fn from_pattern(pattern: &[Vec<usize>]) -> Result<Self, ModelError> {
        let m = pattern.len();
        let mut edges = Vec::new();
        for i in 0..m {
            if pattern[i].len() != m {
                return Err(ModelError::BadClasses("pattern is not square".into()));
            }
            if pattern[i][i] == 0 {
                return Err(ModelError::BadClasses(format!("zero diagonal at {}", i + 1)));
            }
            for j in 0..i {
                if pattern[i][j] != pattern[j][i] {
                    return Err(ModelError::BadClasses(format!("pattern asymmetric at ({}, {})", i + 1, j + 1)));
                }
                if pattern[i][j] != 0 {
                    edges.push((j, i));
                }
            }
        }
        let graph = Graph::new(m, edges)?;
        let diag: Vec<usize> = (0..m).map(|i| pattern[i][i]).collect();
        let off: Vec<usize> = graph.edges().iter().map(|&(i, j)| pattern[i][j]).collect();
        if diag.iter().any(|l| off.contains(l)) {
            return Err(ModelError::BadClasses("a label is used both on and off the diagonal".into()));
        }
        ColoredModel::new(graph, renumber(&diag), renumber(&off))
    }

    /// Reads colours from a graph JSON file (1-based, contiguous labels).
    pub fn from_json(js: &GraphJson) -> Result<Self, ModelError> {
        let graph = js.graph()?;
        let vc = js
            .vertex_colors
            .clone()
            .ok_or_else(|| ModelError::BadClasses("vertex_colors missing".into()))?;
        let ec = js
            .edge_colors
            .clone()
            .ok_or_else(|| ModelError::BadClasses("edge_colors missing".into()))?;
        if ec.len() != js.edges.len() {
            return Err(ModelError::BadClasses("one edge colour per listed edge".into()));
        }
        let shift = |v: usize| {
            v.checked_sub(1)
                .ok_or_else(|| ModelError::BadClasses("colours are 1-based".into()))
        };
        // Edge colours follow the file's edge order; re-key them by sorted edge.
        let mut by_edge = BTreeMap::new();
        for (e, &c) in js.edges.iter().zip(&ec) {
            let (i, j) = (e[0].min(e[1]) - 1, e[0].max(e[1]) - 1);
            by_edge.insert((i, j), shift(c)?);
        }
        let edge_class = graph.edges().iter().map(|e| by_edge[e]).collect();
        let vertex_class = vc.into_iter().map(shift).collect::<Result<_, _>>()?;
        ColoredModel::new(graph, vertex_class, edge_class)
    }

    pub fn to_json(&self) -> GraphJson {
        let mut js = self.graph.to_json();
        js.vertex_colors = Some(self.vertex_class.iter().map(|c| c + 1).collect());
        js.edge_colors = Some(self.edge_class.iter().map(|c| c + 1).collect());
        js
    }

    pub fn vertex_classes(&self) -> usize {
        self.p
    }

    pub fn edge_classes(&self) -> usize {
        self.q
    }

    pub fn vertex_class(&self, v: usize) -> usize {
        self.vertex_class[v]
    }

    pub fn edge_class_of(&self) -> &[usize] {
        &self.edge_class
    }

    /// Label pattern with vertex classes `1..=p` then edge classes
    /// `p+1..=p+q`, zeros at non-edges.
    pub fn pattern(&self) -> Vec<Vec<usize>> {
        let m = self.graph.order();
        let mut out = vec![vec![0; m]; m];
        for (v, row) in out.iter_mut().enumerate() {
            row[v] = self.vertex_class[v] + 1;
        }
        for (k, &(i, j)) in self.graph.edges().iter().enumerate() {
            out[i][j] = self.p + self.edge_class[k] + 1;
            out[j][i] = out[i][j];
        }
        out
    }
}

fn contiguous(labels: &[usize], what: &str) -> Result<usize, ModelError> {
    let count = labels.iter().map(|&c| c + 1).max().unwrap_or(0);
    for c in 0..count {
        if !labels.contains(&c) {
            return Err(ModelError::BadClasses(format!("{what} class {} is empty", c + 1)));
        }
    }
    Ok(count)
}

fn renumber(labels: &[usize]) -> Vec<usize> {
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("present"))
        .collect()
}

/// Either kind of model; everything downstream works on the linear
/// concentration space this describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Plain(GaussianModel),
    Colored(ColoredModel),
}

/// Matrix cells `(i, j)`, `i >= j`, sharing one free concentration parameter.
pub type Cells = Vec<(usize, usize)>;

impl Model {
    pub fn plain(graph: Graph) -> Self {
        Model::Plain(GaussianModel::new(graph))
    }

    pub fn graph(&self) -> &Graph {
        match self {
            Model::Plain(g) => &g.graph,
            Model::Colored(c) => &c.graph,
        }
    }

    pub fn order(&self) -> usize {
        self.graph().order()
    }

    pub fn is_colored(&self) -> bool {
        matches!(self, Model::Colored(_))
    }

    /// Basis of the concentration space: one cell list per free parameter.
    /// Plain models: diagonal entries first, then edges in sorted order.
    pub fn generators(&self) -> Vec<Cells> {
        match self {
            Model::Plain(g) => {
                let m = g.graph.order();
                let mut out: Vec<Cells> = (0..m).map(|i| vec![(i, i)]).collect();
                out.extend(g.graph.edges().into_iter().map(|(i, j)| vec![(j, i)]));
                out
            }
            Model::Colored(c) => {
                let mut out: Vec<Cells> = vec![Vec::new(); c.p + c.q];
                for v in 0..c.graph.order() {
                    out[c.vertex_class[v]].push((v, v));
                }
                for (k, &(i, j)) in c.graph.edges().iter().enumerate() {
                    out[c.p + c.edge_class[k]].push((j, i));
                }
                out
            }
        }
    }

    /// Dimension of the sufficient statistic (`|E| + m`, or `p + q`).
    pub fn target_dim(&self) -> usize {
        match self {
            Model::Plain(g) => g.graph.augmented_edge_count(),
            Model::Colored(c) => c.p + c.q,
        }
    }

    /// Sufficient statistic in generator coordinates: `⟨S, A_k⟩`, i.e.
    /// diagonal cells count once and off-diagonal cells twice.
    pub fn stat(&self, s: &SymMatrix) -> Vec<f64> {
        stat_from_generators(&self.generators(), s)
    }

    /// `K(λ) = Σ λ_k A_k`.
    pub fn concentration(&self, lambda: &[f64]) -> SymMatrix {
        let mut k = SymMatrix::zeros(self.order());
        for (cells, &l) in self.generators().iter().zip(lambda) {
            for &(i, j) in cells {
                k.set(i, j, l);
            }
        }
        k
    }

    /// Coordinates of `k` in the generator basis, and the largest deviation of
    /// `k` from the space (entries outside the pattern, spread within classes).
    pub fn coordinates(&self, k: &SymMatrix) -> (Vec<f64>, f64) {
        let gens = self.generators();
        let mut dev = 0.0f64;
        let mut inside = vec![vec![false; self.order()]; self.order()];
        let lambda: Vec<f64> = gens
            .iter()
            .map(|cells| {
                let mean = cells.iter().map(|&(i, j)| k.get(i, j)).sum::<f64>() / cells.len() as f64;
                for &(i, j) in cells {
                    dev = dev.max((k.get(i, j) - mean).abs());
                    inside[i][j] = true;
                }
                mean
            })
            .collect();
        for i in 0..self.order() {
            for j in 0..=i {
                if !inside[i][j] {
                    dev = dev.max(k.get(i, j).abs());
                }
            }
        }
        (lambda, dev)
    }
}

pub(crate) fn stat_from_generators(gens: &[Cells], s: &SymMatrix) -> Vec<f64> {
    gens.iter()
        .map(|cells| {
            cells
                .iter()
                .map(|&(i, j)| if i == j { s.get(i, i) } else { 2.0 * s.get(i, j) })
                .sum()
        })
        .collect()
}

/// The diagonal and edge entries of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialMatrix {
    #[serde(skip)]
    pub graph: Graph,
    pub diag: Vec<f64>,
    /// Keyed by 0-based `(i, j)` with `i < j`.
    #[serde(serialize_with = "serialize_edges")]
    pub edge_vals: BTreeMap<(usize, usize), f64>,
}

fn serialize_edges<S: serde::Serializer>(
    map: &BTreeMap<(usize, usize), f64>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(map.len()))?;
    for (&(i, j), v) in map {
        seq.serialize_element(&(i + 1, j + 1, v))?;
    }
    seq.end()
}

impl PartialMatrix {
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Specified entry, if any.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            Some(self.diag[i])
        } else {
            self.edge_vals.get(&(i.min(j), i.max(j))).copied()
        }
    }

    /// Completion with the given values at the non-edges (in
    /// `graph.non_edges()` order).
    pub fn complete_with(&self, free: &[f64]) -> SymMatrix {
        let mut a = SymMatrix::diagonal(&self.diag);
        for (&(i, j), &v) in &self.edge_vals {
            a.set(i, j, v);
        }
        for (&(i, j), &v) in self.graph.non_edges().iter().zip(free) {
            a.set(i, j, v);
        }
        a
    }

    /// Rescales to unit diagonal; returns the rescaled matrix and the factors
    /// `d_i = 1/sqrt(s_ii)`.
    pub fn correlation(&self) -> (PartialMatrix, Vec<f64>) {
        let d: Vec<f64> = self.diag.iter().map(|v| 1.0 / v.sqrt()).collect();
        let mut out = self.clone();
        out.diag = vec![1.0; self.order()];
        for (&(i, j), v) in out.edge_vals.iter_mut() {
            *v *= d[i] * d[j];
        }
        (out, d)
    }

    /// Principal restriction to `vertices` (relabelled in order).
    pub fn restrict(&self, vertices: &[usize]) -> PartialMatrix {
        let graph = self.graph.induced(vertices);
        let diag = vertices.iter().map(|&v| self.diag[v]).collect();
        let edge_vals = graph
            .edges()
            .into_iter()
            .map(|(a, b)| ((a, b), self.get(vertices[a], vertices[b]).expect("edge")))
            .collect();
        PartialMatrix { graph, diag, edge_vals }
    }
}

/// `π_G(S)`: keeps the diagonal and the edge entries.
pub fn project(s: &SymMatrix, g: &Graph) -> Result<PartialMatrix, ModelError> {
    if s.order() != g.order() {
        return Err(ModelError::DimensionMismatch {
            expected: g.order(),
            got: s.order(),
        });
    }
    Ok(PartialMatrix {
        graph: g.clone(),
        diag: s.diag(),
        edge_vals: g.edges().into_iter().map(|(i, j)| ((i, j), s.get(i, j))).collect(),
    })
}

/// Colour-class sums: vertex classes `Σ S_αα`, then edge classes
/// `2 Σ S_αβ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuffStatColored {
    pub t: Vec<f64>,
}

pub fn colored_stat(s: &SymMatrix, cm: &ColoredModel) -> Result<SuffStatColored, ModelError> {
    if s.order() != cm.graph.order() {
        return Err(ModelError::DimensionMismatch {
            expected: cm.graph.order(),
            got: s.order(),
        });
    }
    Ok(SuffStatColored {
        t: Model::Colored(cm.clone()).stat(s),
    })
}

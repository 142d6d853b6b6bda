//! Undirected graphs on at most 64 vertices.
//!
//! Vertices are stored 0-based; every text or JSON surface uses 1-based
//! labels. The diagonal of a partial matrix is always specified, so self
//! loops are never stored here.

mod cliques;
mod cycles;
mod decompose;
mod family;
mod treewidth;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cliques::{is_chordal, max_clique_size, maximal_cliques, perfect_elimination_order};
pub use cycles::induced_cycles;
pub use decompose::{clique_sum_split, clique_sum_tree, Atom, SplitTree};
pub use family::{family, parse_family, FAMILY_HELP};
pub use treewidth::{minimal_chordal_cover, CliqueCoverReport, EXACT_SEARCH_LIMIT};

/// Largest vertex count representable by the bitset adjacency.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range 1..={m}")]
    VertexOutOfRange { vertex: usize, m: usize },
    #[error("self-loop at vertex {0} (the diagonal is implicit)")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("graphs are limited to {MAX_VERTICES} vertices, got {0}")]
    TooManyVertices(usize),
    #[error("exact search is limited to {limit} vertices, graph has {m}")]
    TooLarge { m: usize, limit: usize },
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("bad parameters for family `{family}`: {reason}")]
    BadParams { family: String, reason: String },
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

/// Vertex bitset.
pub type VSet = u64;

#[inline]
pub(crate) fn bit(v: usize) -> VSet {
    1u64 << v
}

pub(crate) fn members(set: VSet) -> impl Iterator<Item = usize> {
    let mut s = set;
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(v)
        }
    })
}

pub(crate) fn set_of(vs: &[usize]) -> VSet {
    vs.iter().fold(0, |acc, &v| acc | bit(v))
}

/// Simple undirected graph `([m], E)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    m: usize,
    adj: Vec<VSet>,
}

impl Graph {
    /// Builds a graph from 0-based edge pairs.
    pub fn new<I>(m: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if m > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(m));
        }
        let mut g = Graph::empty(m);
        for (i, j) in edges {
            for v in [i, j] {
                if v >= m {
                    return Err(GraphError::VertexOutOfRange { vertex: v + 1, m });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i + 1));
            }
            if g.has_edge(i, j) {
                return Err(GraphError::DuplicateEdge(i.min(j) + 1, i.max(j) + 1));
            }
            g.adj[i] |= bit(j);
            g.adj[j] |= bit(i);
        }
        Ok(g)
    }

    /// Builds a graph from 1-based edge pairs, as written in the literature.
    pub fn from_one_based<I>(m: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut shifted = Vec::new();
        for (i, j) in edges {
            for v in [i, j] {
                if v == 0 || v > m {
                    return Err(GraphError::VertexOutOfRange { vertex: v, m });
                }
            }
            shifted.push((i - 1, j - 1));
        }
        Graph::new(m, shifted)
    }

    pub fn empty(m: usize) -> Self {
        Graph { m, adj: vec![0; m] }
    }

    pub fn complete(m: usize) -> Self {
        let all = full_set(m);
        Graph {
            m,
            adj: (0..m).map(|v| all & !bit(v)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    /// Dimension of the projection target: edges plus diagonal.
    pub fn augmented_edge_count(&self) -> usize {
        self.edge_count() + self.m
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adj[i] & bit(j) != 0
    }

    pub fn neighbors(&self, v: usize) -> VSet {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn vertex_set(&self) -> VSet {
        full_set(self.m)
    }

    /// Edges `(i, j)` with `i < j`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.m {
            for j in members(self.adj[i] & !full_set(i + 1)) {
                out.push((i, j));
            }
        }
        out
    }

    /// Vertex pairs `(i, j)`, `i < j`, that are not edges.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                if !self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.adj[i] |= bit(j);
            self.adj[j] |= bit(i);
        }
    }

    pub fn is_clique(&self, set: VSet) -> bool {
        members(set).all(|v| (set & !bit(v)) & !self.adj[v] == 0)
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.m == other.m && self.adj.iter().zip(&other.adj).all(|(a, b)| a & !b == 0)
    }

    /// Induced subgraph on `vertices` (relabelled in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::empty(vertices.len());
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Connected components of the subgraph induced by `within`.
    pub fn components(&self, within: VSet) -> Vec<VSet> {
        let mut rest = within;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest.trailing_zeros() as usize;
            let mut comp = bit(start);
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for v in members(frontier) {
                    next |= self.adj[v];
                }
                next &= within & !comp;
                comp |= next;
                frontier = next;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.m == 0 || self.components(self.vertex_set()).len() == 1
    }

    /// Union of neighbourhoods of `set`, minus `set` itself.
    pub fn boundary(&self, set: VSet) -> VSet {
        members(set).fold(0, |acc, v| acc | self.adj[v]) & !set
    }

    /// Returns the permutation `p` with `self` equal to `other` relabelled by `p`,
    /// if one exists. Brute force; intended for small graphs.
    pub fn isomorphism_to(&self, other: &Graph) -> Option<Vec<usize>> {
        if self.m != other.m || self.edge_count() != other.edge_count() {
            return None;
        }
        let mut deg_a: Vec<usize> = (0..self.m).map(|v| self.degree(v)).collect();
        let mut deg_b: Vec<usize> = (0..other.m).map(|v| other.degree(v)).collect();
        deg_a.sort_unstable();
        deg_b.sort_unstable();
        if deg_a != deg_b {
            return None;
        }
        let mut map = vec![usize::MAX; self.m];
        let mut used = 0u64;
        fn extend(a: &Graph, b: &Graph, v: usize, map: &mut [usize], used: &mut u64) -> bool {
            if v == a.m {
                return true;
            }
            for w in 0..b.m {
                if *used & bit(w) != 0 || a.degree(v) != b.degree(w) {
                    continue;
                }
                let ok = (0..v).all(|u| a.has_edge(u, v) == b.has_edge(map[u], w));
                if ok {
                    map[v] = w;
                    *used |= bit(w);
                    if extend(a, b, v + 1, map, used) {
                        return true;
                    }
                    *used &= !bit(w);
                }
            }
            false
        }
        if extend(self, other, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            m: self.m,
            edges: self.edges().into_iter().map(|(i, j)| [i + 1, j + 1]).collect(),
            vertex_colors: None,
            edge_colors: None,
        }
    }
}

pub(crate) fn full_set(m: usize) -> VSet {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(m={}, edges=[", self.m)?;
        for (k, (i, j)) in self.edges().into_iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", i + 1, j + 1)?;
        }
        write!(f, "])")
    }
}

/// On-disk graph format with 1-based vertices and optional colour classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_colors: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_colors: Option<Vec<usize>>,
}

impl GraphJson {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))
    }

    pub fn graph(&self) -> Result<Graph, GraphError> {
        Graph::from_one_based(self.m, self.edges.iter().map(|e| (e[0], e[1])))
    }
}

/// Members of a vertex bitset in increasing order.
pub fn members_of(set: VSet) -> Vec<usize> {
    members(set).collect()
}

/// Sorted set of 0-based vertices, convenient for reporting.
pub(crate) fn sorted_members(set: VSet) -> Vec<usize> {
    members(set).collect::<BTreeSet<_>>().into_iter().collect()
}

use std::collections::BTreeSet;

use super::cliques::maximal_clique_sets;
use super::{members, set_of, sorted_members, Graph, VSet};

/// Candidate clique separators are subsets of maximal cliques; beyond this
/// many candidates the subgraph is treated as indecomposable.
const MAX_SEPARATOR_CANDIDATES: usize = 1 << 22;

/// A piece of a clique-sum decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    /// Vertices of the parent graph (0-based, ascending); local vertex `k`
    /// of `graph` is `vertices[k]`.
    pub vertices: Vec<usize>,
    pub graph: Graph,
}

/// Binary decomposition tree: every internal node glues two subtrees along
/// a clique separator of the parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitTree {
    Atom(Atom),
    Sum {
        separator: Vec<usize>,
        left: Box<SplitTree>,
        right: Box<SplitTree>,
    },
}

impl SplitTree {
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Atom>) {
        match self {
            SplitTree::Atom(a) => out.push(a.clone()),
            SplitTree::Sum { left, right, .. } => {
                left.collect(out);
                right.collect(out);
            }
        }
    }

    /// All vertices covered by this subtree.
    pub fn vertices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.atoms().into_iter().flat_map(|a| a.vertices).collect();
        set.into_iter().collect()
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, SplitTree::Atom(_))
    }
}

/// Decomposes `g` along clique separators until no piece has one.
pub fn clique_sum_split(g: &Graph) -> Vec<Atom> {
    clique_sum_tree(g).atoms()
}

pub fn clique_sum_tree(g: &Graph) -> SplitTree {
    split(g, g.vertex_set())
}

fn split(g: &Graph, within: VSet) -> SplitTree {
    if let Some(sep) = find_clique_separator(g, within) {
        let comps = g.components(within & !sep);
        let a = comps[0];
        let minimal = g.boundary(a) & within;
        let left = split(g, a | minimal);
        let right = split(g, within & !a);
        SplitTree::Sum {
            separator: sorted_members(minimal),
            left: Box::new(left),
            right: Box::new(right),
        }
    } else {
        let vertices = sorted_members(within);
        let graph = g.induced(&vertices);
        SplitTree::Atom(Atom { vertices, graph })
    }
}

/// Smallest (then lexicographically first) clique whose removal disconnects
/// the subgraph induced by `within`.
fn find_clique_separator(g: &Graph, within: VSet) -> Option<VSet> {
    if within.count_ones() < 3 {
        // Two vertices: either an edge (a clique) or two isolated vertices.
        return if within.count_ones() == 2 && g.components(within).len() == 2 {
            Some(0)
        } else {
            None
        };
    }
    let verts = sorted_members(within);
    let sub = g.induced(&verts);
    let maximal = maximal_clique_sets(&sub);
    let total: usize = maximal
        .iter()
        .map(|c| 1usize.checked_shl(c.count_ones()).unwrap_or(usize::MAX))
        .fold(0usize, |a, b| a.saturating_add(b));
    if total > MAX_SEPARATOR_CANDIDATES {
        return None;
    }
    let mut candidates: BTreeSet<(u32, Vec<usize>)> = BTreeSet::new();
    for &c in &maximal {
        let local: Vec<usize> = members(c).collect();
        for mask in 0u64..(1u64 << local.len()) {
            let subset: Vec<usize> = (0..local.len())
                .filter(|&k| mask & (1 << k) != 0)
                .map(|k| verts[local[k]])
                .collect();
            candidates.insert((subset.len() as u32, subset));
        }
    }
    candidates.into_iter().map(|(_, c)| set_of(&c)).find(|&c| {
        let rest = within & !c;
        rest != 0 && g.components(rest).len() >= 2
    })
}

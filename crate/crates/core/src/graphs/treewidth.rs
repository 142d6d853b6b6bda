use serde::Serialize;

use super::{bit, full_set, is_chordal, max_clique_size, members, Graph, GraphError, VSet};

/// Largest vertex count accepted by the exact searches (treewidth, induced
/// cycles).
pub const EXACT_SEARCH_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueCoverReport {
    /// Maximal clique size of the graph.
    pub q: usize,
    /// Maximal clique size of a minimal chordal cover.
    pub q_star: usize,
    pub treewidth: usize,
    /// Fill-in edges (0-based, `i < j`) turning the graph into a chordal cover
    /// with clique number `q_star`.
    pub cover_edges: Vec<(usize, usize)>,
    /// Elimination ordering that produced the cover.
    pub elimination_order: Vec<usize>,
}

impl CliqueCoverReport {
    pub fn cover(&self, g: &Graph) -> Graph {
        let mut h = g.clone();
        for &(i, j) in &self.cover_edges {
            h.add_edge(i, j);
        }
        h
    }
}

/// Exact minimal chordal cover by dynamic programming over vertex subsets:
/// `tw(S) = min_{v in S} max(tw(S - v), |Q(S - v, v)|)`, where `Q(S, v)` are
/// the vertices outside `S + v` reachable from `v` through `S`.
pub fn minimal_chordal_cover(g: &Graph) -> Result<CliqueCoverReport, GraphError> {
    let m = g.order();
    if m > EXACT_SEARCH_LIMIT {
        return Err(GraphError::TooLarge {
            m,
            limit: EXACT_SEARCH_LIMIT,
        });
    }
    let q = max_clique_size(g);
    if m == 0 {
        return Ok(CliqueCoverReport {
            q,
            q_star: q,
            treewidth: 0,
            cover_edges: Vec::new(),
            elimination_order: Vec::new(),
        });
    }
    let order = if is_chordal(g) {
        super::perfect_elimination_order(g).expect("chordal")
    } else {
        optimal_order(g)
    };
    let (cover_edges, width) = eliminate(g, &order);
    let q_star = width + 1;
    debug_assert!(q <= q_star);
    Ok(CliqueCoverReport {
        q,
        q_star,
        treewidth: width,
        cover_edges,
        elimination_order: order,
    })
}

fn reach_boundary(g: &Graph, s: VSet, v: usize) -> u32 {
    let mut reach = bit(v);
    let mut frontier = reach;
    while frontier != 0 {
        let mut next = 0;
        for u in members(frontier) {
            next |= g.neighbors(u);
        }
        next &= s & !reach;
        reach |= next;
        frontier = next;
    }
    (g.boundary(reach) & !s).count_ones()
}

fn optimal_order(g: &Graph) -> Vec<usize> {
    let m = g.order();
    let size = 1usize << m;
    let mut tw = vec![u8::MAX; size];
    let mut choice = vec![0u8; size];
    tw[0] = 0;
    for s in 1..size as u64 {
        let mut best = u8::MAX;
        let mut arg = 0u8;
        for v in members(s) {
            let rest = s & !bit(v);
            let cand = tw[rest as usize].max(reach_boundary(g, rest, v) as u8);
            if cand < best {
                best = cand;
                arg = v as u8;
            }
        }
        tw[s as usize] = best;
        choice[s as usize] = arg;
    }
    let mut order = Vec::with_capacity(m);
    let mut s = full_set(m);
    while s != 0 {
        let v = choice[s as usize] as usize;
        order.push(v);
        s &= !bit(v);
    }
    order.reverse();
    order
}

/// Plays the elimination game; returns the fill edges and the largest
/// elimination degree.
pub(crate) fn eliminate(g: &Graph, order: &[usize]) -> (Vec<(usize, usize)>, usize) {
    let mut h = g.clone();
    let mut remaining = g.vertex_set();
    let mut fill = Vec::new();
    let mut width = 0;
    for &v in order {
        remaining &= !bit(v);
        let nb: Vec<usize> = members(h.neighbors(v) & remaining).collect();
        width = width.max(nb.len());
        for (a, &x) in nb.iter().enumerate() {
            for &y in &nb[a + 1..] {
                if !h.has_edge(x, y) {
                    h.add_edge(x, y);
                    fill.push((x.min(y), x.max(y)));
                }
            }
        }
    }
    fill.sort_unstable();
    (fill, width)
}

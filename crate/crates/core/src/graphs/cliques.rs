use super::{bit, members, Graph, VSet};

/// Maximum-cardinality search; returns vertices in visit order. Ties are
/// broken towards the smallest label so the order is reproducible.
fn mcs_order(g: &Graph) -> Vec<usize> {
    let m = g.order();
    let mut weight = vec![0usize; m];
    let mut visited: VSet = 0;
    let mut order = Vec::with_capacity(m);
    for _ in 0..m {
        let v = (0..m)
            .filter(|&v| visited & bit(v) == 0)
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unvisited vertex");
        visited |= bit(v);
        order.push(v);
        for w in members(g.neighbors(v) & !visited) {
            weight[w] += 1;
        }
    }
    order
}

/// A perfect elimination ordering if `g` is chordal.
pub fn perfect_elimination_order(g: &Graph) -> Option<Vec<usize>> {
    let mut peo = mcs_order(g);
    peo.reverse();
    let mut later: VSet = g.vertex_set();
    for &v in &peo {
        later &= !bit(v);
        if !g.is_clique(g.neighbors(v) & later) {
            return None;
        }
    }
    Some(peo)
}

pub fn is_chordal(g: &Graph) -> bool {
    perfect_elimination_order(g).is_some()
}

/// Inclusion-maximal cliques as sorted 0-based vertex lists, in
/// lexicographic order.
pub fn maximal_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let mut sets = maximal_clique_sets(g);
    let mut out: Vec<Vec<usize>> = sets.drain(..).map(|s| members(s).collect()).collect();
    out.sort();
    out
}

pub(crate) fn maximal_clique_sets(g: &Graph) -> Vec<VSet> {
    let mut out = Vec::new();
    if g.order() > 0 {
        bron_kerbosch(g, 0, g.vertex_set(), 0, &mut out);
    }
    out
}

fn bron_kerbosch(g: &Graph, r: VSet, mut p: VSet, mut x: VSet, out: &mut Vec<VSet>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    // Tomita pivot: maximise |P ∩ N(u)|.
    let pivot = members(p | x)
        .max_by_key(|&u| (p & g.neighbors(u)).count_ones())
        .expect("non-empty P ∪ X");
    for v in members(p & !g.neighbors(pivot)) {
        let nv = g.neighbors(v);
        bron_kerbosch(g, r | bit(v), p & nv, x & nv, out);
        p &= !bit(v);
        x |= bit(v);
    }
}

pub fn max_clique_size(g: &Graph) -> usize {
    maximal_clique_sets(g)
        .into_iter()
        .map(|c| c.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::family;

    fn brute_force_maximal(g: &Graph) -> Vec<Vec<usize>> {
        let m = g.order();
        let cliques: Vec<VSet> = (1u64..(1 << m)).filter(|&s| g.is_clique(s)).collect();
        let mut out: Vec<Vec<usize>> = cliques
            .iter()
            .filter(|&&c| !cliques.iter().any(|&d| d != c && d & c == c))
            .map(|&c| members(c).collect())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn named_examples() {
        let c4 = family("cycle", &[4]).unwrap();
        assert!(!is_chordal(&c4));
        assert_eq!(maximal_cliques(&c4), vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]);
        let k4 = Graph::complete(4);
        assert!(is_chordal(&k4));
        assert_eq!(maximal_cliques(&k4), vec![vec![0, 1, 2, 3]]);
        let k23 = family("K", &[2, 3]).unwrap();
        assert_eq!(maximal_cliques(&k23).len(), 6);
        assert!(maximal_cliques(&k23).iter().all(|c| c.len() == 2));
        assert!(!is_chordal(&family("G_fig5", &[]).unwrap()));
    }

    #[test]
    fn matches_subset_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let m = rng.gen_range(1..=7);
            let mut g = Graph::empty(m);
            for i in 0..m {
                for j in (i + 1)..m {
                    if rng.gen_bool(0.5) {
                        g.add_edge(i, j);
                    }
                }
            }
            assert_eq!(maximal_cliques(&g), brute_force_maximal(&g));
        }
    }
}

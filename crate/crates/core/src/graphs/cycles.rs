use super::{bit, full_set, members, Graph, GraphError, VSet, EXACT_SEARCH_LIMIT};

/// All chordless cycles of length at least four.
///
/// Each cycle starts at its smallest vertex and continues towards the
/// smaller of that vertex's two cycle neighbours; the list is sorted.
pub fn induced_cycles(g: &Graph) -> Result<Vec<Vec<usize>>, GraphError> {
    if g.order() > EXACT_SEARCH_LIMIT {
        return Err(GraphError::TooLarge {
            m: g.order(),
            limit: EXACT_SEARCH_LIMIT,
        });
    }
    let mut out = Vec::new();
    for s in 0..g.order() {
        // Only vertices larger than the start may appear on the cycle.
        let allowed = !full_set(s + 1);
        for p1 in members(g.neighbors(s) & allowed) {
            let mut path = vec![s, p1];
            extend(g, allowed, &mut path, bit(s) | bit(p1), 0, &mut out);
        }
    }
    out.sort();
    Ok(out)
}

/// Extends the chordless path `path` (start `path[0]`, tip last). A new vertex
/// may touch the tip and, to close the cycle, the start; never `forbidden`.
fn extend(
    g: &Graph,
    allowed: VSet,
    path: &mut Vec<usize>,
    on_path: VSet,
    forbidden: VSet,
    out: &mut Vec<Vec<usize>>,
) {
    let s = path[0];
    let tip = *path.last().expect("non-empty path");
    for v in members(g.neighbors(tip) & allowed & !on_path) {
        let nv = g.neighbors(v);
        if nv & forbidden != 0 {
            continue;
        }
        if nv & bit(s) != 0 {
            if path.len() >= 3 && path[1] < v {
                let mut cyc = path.clone();
                cyc.push(v);
                out.push(cyc);
            }
            continue;
        }
        path.push(v);
        extend(g, allowed, path, on_path | bit(v), forbidden | bit(tip), out);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{family, is_chordal};

    fn one_based(cycles: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        cycles
            .into_iter()
            .map(|c| c.into_iter().map(|v| v + 1).collect())
            .collect()
    }

    #[test]
    fn named_examples() {
        let c5 = family("cycle", &[5]).unwrap();
        assert_eq!(one_based(induced_cycles(&c5).unwrap()), vec![vec![1, 2, 3, 4, 5]]);
        assert!(induced_cycles(&Graph::complete(4)).unwrap().is_empty());
        let k23 = family("K", &[2, 3]).unwrap();
        assert_eq!(
            one_based(induced_cycles(&k23).unwrap()),
            vec![vec![1, 3, 2, 4], vec![1, 3, 2, 5], vec![1, 4, 2, 5]]
        );
    }

    /// Brute force: every vertex subset of size >= 4 whose induced subgraph is
    /// a single cycle.
    fn brute_force_count(g: &Graph) -> usize {
        let m = g.order();
        (1u64..(1 << m))
            .filter(|s| s.count_ones() >= 4)
            .filter(|&s| {
                members(s).all(|v| (g.neighbors(v) & s).count_ones() == 2)
                    && g.components(s).len() == 1
            })
            .count()
    }

    #[test]
    fn agrees_with_brute_force_and_chordality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let m = rng.gen_range(1..=8);
            let density = rng.gen_range(0.2..0.8);
            let mut g = Graph::empty(m);
            for i in 0..m {
                for j in (i + 1)..m {
                    if rng.gen_bool(density) {
                        g.add_edge(i, j);
                    }
                }
            }
            let cycles = induced_cycles(&g).unwrap();
            assert_eq!(cycles.len(), brute_force_count(&g), "{g:?}");
            assert_eq!(is_chordal(&g), cycles.is_empty(), "{g:?}");
            for c in &cycles {
                assert_eq!(c[0], *c.iter().min().unwrap());
                assert!(c[1] < *c.last().unwrap());
            }
        }
    }
}

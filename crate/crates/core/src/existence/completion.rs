//! Positive definite completions built from pieces: chordal (clique tree)
//! completion and gluing along clique separators.

use crate::graphs::{maximal_cliques, Graph, SplitTree};
use crate::models::PartialMatrix;
use crate::numkernel::{cholesky, NumError, SymMatrix};

/// Cliques of a chordal graph in running-intersection order, each with the
/// separator it shares with the cliques before it.
pub(crate) fn clique_tree_order(g: &Graph) -> Vec<(Vec<usize>, Vec<usize>)> {
    let cliques = maximal_cliques(g);
    let k = cliques.len();
    if k == 0 {
        return Vec::new();
    }
    let inter = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().copied().filter(|v| b.contains(v)).collect() };
    // Prim on intersection sizes gives a clique tree for chordal graphs.
    let mut in_tree = vec![false; k];
    let mut best: Vec<(usize, usize)> = vec![(0, 0); k];
    in_tree[0] = true;
    for j in 1..k {
        best[j] = (inter(&cliques[0], &cliques[j]).len(), 0);
    }
    let mut out = vec![(cliques[0].clone(), Vec::new())];
    for _ in 1..k {
        let j = (0..k)
            .filter(|&j| !in_tree[j])
            .max_by(|&a, &b| best[a].0.cmp(&best[b].0).then(b.cmp(&a)))
            .expect("clique left");
        in_tree[j] = true;
        let parent = best[j].1;
        out.push((cliques[j].clone(), inter(&cliques[j], &cliques[parent])));
        for l in 0..k {
            if !in_tree[l] {
                let w = inter(&cliques[j], &cliques[l]).len();
                if w > best[l].0 {
                    best[l] = (w, j);
                }
            }
        }
    }
    out
}

/// Extends `sigma` (known on `known`) to `known ∪ new` where the block on
/// `sep ∪ new` is already filled: entries between `new` and
/// `known \ sep` become `Σ_{r,S} Σ_SS⁻¹ Σ_{S,u}`.
fn fill_across(sigma: &mut SymMatrix, known: &[usize], sep: &[usize], new: &[usize]) -> Result<(), NumError> {
    let outside: Vec<usize> = known.iter().copied().filter(|v| !sep.contains(v)).collect();
    if sep.is_empty() {
        for &r in new {
            for &u in &outside {
                sigma.set(r, u, 0.0);
            }
        }
        return Ok(());
    }
    let chol = cholesky(&sigma.submatrix(sep))?;
    for &u in &outside {
        let rhs: Vec<f64> = sep.iter().map(|&s| sigma.get(s, u)).collect();
        let w = chol.solve(&rhs);
        for &r in new {
            let v: f64 = sep.iter().zip(&w).map(|(&s, wk)| sigma.get(r, s) * wk).sum();
            sigma.set(r, u, v);
        }
    }
    Ok(())
}

/// Maximum-determinant completion of a partial matrix on a chordal graph.
/// Fails if a separator block is not PD.
pub fn chordal_completion(p: &PartialMatrix) -> Result<SymMatrix, NumError> {
    let mut sigma = SymMatrix::diagonal(&p.diag);
    for (&(i, j), &v) in &p.edge_vals {
        sigma.set(i, j, v);
    }
    let mut known: Vec<usize> = Vec::new();
    for (clique, sep) in clique_tree_order(&p.graph) {
        let new: Vec<usize> = clique.iter().copied().filter(|v| !known.contains(v)).collect();
        fill_across(&mut sigma, &known, &sep, &new)?;
        known.extend(new);
    }
    // Isolated vertices are their own cliques, so everything is covered.
    Ok(sigma)
}

/// Glues completions of the atoms of a split tree (given in atom order, on
/// the atoms' own vertex labels) into a completion of the whole graph.
pub fn glue(tree: &SplitTree, atom_completions: &[SymMatrix], m: usize) -> Result<SymMatrix, NumError> {
    let mut sigma = SymMatrix::zeros(m);
    let mut next = 0;
    glue_into(tree, atom_completions, &mut next, &mut sigma)?;
    Ok(sigma)
}

fn glue_into(tree: &SplitTree, parts: &[SymMatrix], next: &mut usize, sigma: &mut SymMatrix) -> Result<Vec<usize>, NumError> {
    match tree {
        SplitTree::Atom(a) => {
            let c = &parts[*next];
            *next += 1;
            for (x, &i) in a.vertices.iter().enumerate() {
                for (y, &j) in a.vertices.iter().enumerate().take(x + 1) {
                    sigma.set(i, j, c.get(x, y));
                }
            }
            Ok(a.vertices.clone())
        }
        SplitTree::Sum { separator, left, right } => {
            let lv = glue_into(left, parts, next, sigma)?;
            // The right part is filled in a scratch copy so it cannot clobber
            // entries between the left part and the separator.
            let mut scratch = sigma.clone();
            let rv = glue_into(right, parts, next, &mut scratch)?;
            for (x, &i) in rv.iter().enumerate() {
                for &j in rv.iter().take(x + 1) {
                    sigma.set(i, j, scratch.get(i, j));
                }
            }
            let new: Vec<usize> = rv.iter().copied().filter(|v| !separator.contains(v)).collect();
            fill_across(sigma, &lv, separator, &new)?;
            let mut all = lv;
            all.extend(new);
            all.sort_unstable();
            Ok(all)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{clique_sum_tree, family, is_chordal};
    use crate::models::project;
    use crate::numkernel::{inverse, is_pd};

    fn random_pd(m: usize, seed: u64) -> SymMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..m + 1)
            .map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        SymMatrix::from_fn(m, |i, j| {
            x.iter().map(|r| r[i] * r[j]).sum::<f64>() + if i == j { 0.05 } else { 0.0 }
        })
    }

    fn random_chordal(m: usize, seed: u64) -> Graph {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // Each new vertex joins a random clique of earlier vertices.
        let mut g = Graph::empty(m);
        for v in 1..m {
            let cliques = maximal_cliques(&g.induced(&(0..v).collect::<Vec<_>>()));
            let c = &cliques[rng.gen_range(0..cliques.len())];
            for &u in c {
                if rng.gen_bool(0.7) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    #[test]
    fn chordal_completion_is_pd_with_zero_inverse_pattern() {
        for seed in 0..40 {
            let m = 2 + (seed as usize % 6);
            let g = random_chordal(m, seed);
            assert!(is_chordal(&g));
            let s = random_pd(m, seed + 1000);
            let p = project(&s, &g).unwrap();
            let c = chordal_completion(&p).unwrap();
            assert!(is_pd(&c, 0.0));
            let k = inverse(&c).unwrap();
            for (i, j) in g.non_edges() {
                assert!(k.get(i, j).abs() < 1e-8 * k.max_abs(), "seed {seed} ({i},{j})");
            }
            for (&(i, j), &v) in &p.edge_vals {
                assert_eq!(c.get(i, j), v);
            }
        }
    }

    #[test]
    fn gluing_atoms_of_hprime() {
        let h = family("Hprime_fig5", &[]).unwrap();
        let tree = clique_sum_tree(&h);
        let s = random_pd(9, 77);
        let atoms = tree.atoms();
        let parts: Vec<SymMatrix> = atoms.iter().map(|a| s.submatrix(&a.vertices)).collect();
        let glued = glue(&tree, &parts, 9).unwrap();
        assert!(is_pd(&glued, 0.0));
        for a in &atoms {
            for &i in &a.vertices {
                for &j in &a.vertices {
                    assert!((glued.get(i, j) - s.get(i, j)).abs() < 1e-15);
                }
            }
        }
    }
}

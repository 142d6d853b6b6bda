//! Almost-sure existence certificates from the generic rank of the
//! differential of `X ↦ π(XXᵀ)`.
//!
//! If the differential has full rank at one rational point, the image of the
//! rank-`n` Gram map is full-dimensional, so the MLE exists with probability
//! one for `n` observations. A rank deficit at every sampled point proves
//! nothing, hence `Inconclusive`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{clique_sum_split, Graph};
use crate::models::{Cells, Model};
use crate::numkernel::{rational_rank, RationalMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error("point has {got_rows}x{got_cols} entries, expected {m}x{n}")]
    DimensionMismatch {
        m: usize,
        n: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("need at least one observation")]
    ZeroObservations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankVerdict {
    AlmostSurelyExists,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub n: usize,
    pub target_dim: usize,
    /// A priori bound on the rank from the dimension of the rank-`n` locus.
    pub dimension_bound: usize,
    pub generic_rank: usize,
    pub points_tested: usize,
    pub seed: u64,
    pub verdict: RankVerdict,
}

/// Rows of the statistic in terms of matrix cells with weights: plain models
/// use the entries of `π_G` directly, colored models the class sums with
/// off-diagonal cells counted twice.
fn stat_rows(model: &Model) -> Vec<Vec<((usize, usize), i64)>> {
    let weighted = |cells: &Cells, off: i64| cells.iter().map(|&(i, j)| ((i, j), if i == j { 1 } else { off })).collect();
    match model {
        Model::Plain(_) => model.generators().iter().map(|c| weighted(c, 1)).collect(),
        Model::Colored(_) => model.generators().iter().map(|c| weighted(c, 2)).collect(),
    }
}

/// Differential of `X ↦ stat(XXᵀ)` at `x` (an `m × n` matrix of rationals):
/// one row per statistic, column `k·n + l` for `X_{kl}`.
pub fn jacobian(model: &Model, x: &RationalMatrix) -> Result<RationalMatrix, RankError> {
    let m = model.order();
    if x.rows() != m || x.cols() == 0 {
        return Err(RankError::DimensionMismatch {
            m,
            n: x.cols(),
            got_rows: x.rows(),
            got_cols: x.cols(),
        });
    }
    let n = x.cols();
    let rows = stat_rows(model);
    let mut jac = RationalMatrix::zeros(rows.len(), m * n);
    for (r, cells) in rows.iter().enumerate() {
        for &((i, j), w) in cells {
            let w = BigRational::from_integer(BigInt::from(w));
            // ∂(XXᵀ)_ij / ∂X_kl = [k=i] X_jl + [k=j] X_il
            for l in 0..n {
                let a = jac.get(r, i * n + l) + &w * x.get(j, l);
                jac.set(r, i * n + l, a);
                let b = jac.get(r, j * n + l) + &w * x.get(i, l);
                jac.set(r, j * n + l, b);
            }
        }
    }
    Ok(jac)
}

/// `min(target_dim, dim of the rank-n locus)`: `n·m − n(n−1)/2` for plain
/// models, `n·m` for colored ones.
pub fn dimension_bound(model: &Model, n: usize) -> usize {
    let m = model.order();
    let locus = match model {
        Model::Plain(_) => {
            let k = n.min(m);
            k * m - k * (k.saturating_sub(1)) / 2
        }
        Model::Colored(_) => n * m,
    };
    model.target_dim().min(locus)
}

/// Random rational point: integer numerators in `[-1000, 1000]` over
/// denominators in `[1, 1000]`, entry by entry.
pub fn random_point(m: usize, n: usize, rng: &mut impl Rng) -> RationalMatrix {
    RationalMatrix::from_fn(m, n, |_, _| {
        let num: i64 = rng.gen_range(-1000..=1000);
        let den: i64 = rng.gen_range(1..=1000);
        BigRational::new(num.into(), den.into())
    })
}

/// Evaluates the Jacobian rank at up to `trials` random points, stopping at
/// the first full-rank one.
pub fn certify(model: &Model, n: usize, trials: usize, seed: u64) -> Result<RankReport, RankError> {
    if n == 0 {
        return Err(RankError::ZeroObservations);
    }
    let target_dim = model.target_dim();
    let bound = dimension_bound(model, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    let mut tested = 0;
    for _ in 0..trials.max(1) {
        let x = random_point(model.order(), n, &mut rng);
        tested += 1;
        best = best.max(rational_rank(&jacobian(model, &x)?));
        if best == target_dim || best == bound {
            break;
        }
    }
    Ok(RankReport {
        n,
        target_dim,
        dimension_bound: bound,
        generic_rank: best,
        points_tested: tested,
        seed,
        verdict: if best == target_dim {
            RankVerdict::AlmostSurelyExists
        } else {
            RankVerdict::Inconclusive
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomRankReport {
    /// 1-based vertex labels of the atom in the parent graph.
    pub vertices: Vec<usize>,
    pub report: RankReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueSumRankReport {
    pub atoms: Vec<AtomRankReport>,
    pub verdict: RankVerdict,
}

/// Certifies each atom of the clique-sum decomposition of `g`. Existence on
/// a clique sum is existence on every atom, so all atoms certified means the
/// whole graph is certified.
pub fn certify_by_atoms(g: &Graph, n: usize, trials: usize, seed: u64) -> Result<CliqueSumRankReport, RankError> {
    let mut atoms = Vec::new();
    for (k, a) in clique_sum_split(g).into_iter().enumerate() {
        let report = certify(&Model::plain(a.graph), n, trials, seed.wrapping_add(k as u64))?;
        atoms.push(AtomRankReport {
            vertices: a.vertices.iter().map(|v| v + 1).collect(),
            report,
        });
    }
    let verdict = if atoms.iter().all(|a| a.report.verdict == RankVerdict::AlmostSurelyExists) {
        RankVerdict::AlmostSurelyExists
    } else {
        RankVerdict::Inconclusive
    };
    Ok(CliqueSumRankReport { atoms, verdict })
}

/// Certifies `g` through a supergraph `h` on the same vertices: completions
/// on `h` restrict to completions on `g`, so almost-sure existence on `h`
/// carries over.
pub fn certify_via_supergraph(g: &Graph, h: &Graph, n: usize, trials: usize, seed: u64) -> Result<Option<CliqueSumRankReport>, RankError> {
    if !g.is_subgraph_of(h) {
        return Ok(None);
    }
    certify_by_atoms(h, n, trials, seed).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colored::FRETS_PATTERN;
    use crate::graphs::{family, is_chordal, max_clique_size, maximal_cliques, parse_family};
    use crate::models::ColoredModel;
    use num_traits::Zero;
    use proptest::prelude::{prop_assert_eq, prop_assume, proptest, ProptestConfig};

    fn r(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn frets() -> Model {
        let pat: Vec<Vec<usize>> = FRETS_PATTERN.iter().map(|r| r.to_vec()).collect();
        Model::Colored(ColoredModel::from_pattern(&pat).unwrap())
    }

    fn plain(name: &str) -> Model {
        Model::plain(parse_family(name).unwrap())
    }

    #[test]
    fn jacobian_examples() {
        let k2 = Model::plain(Graph::complete(2));
        assert!(jacobian(&k2, &RationalMatrix::zeros(2, 3)).unwrap().is_zero());
        let x = RationalMatrix::from_i64(&[vec![3], vec![5]]);
        let j = jacobian(&k2, &x).unwrap();
        // Rows: s11, s22, s12.
        assert_eq!(j, RationalMatrix::from_i64(&[vec![6, 0], vec![0, 10], vec![5, 3]]));
        let jf = jacobian(&frets(), &RationalMatrix::from_i64(&[vec![1], vec![2], vec![3], vec![4]])).unwrap();
        assert_eq!((jf.rows(), jf.cols()), (5, 4));
        assert!(matches!(
            jacobian(&k2, &RationalMatrix::zeros(3, 1)),
            Err(RankError::DimensionMismatch { .. })
        ));
    }

    /// Finite-difference oracle: the exact Jacobian times a direction equals
    /// `stat((X+H)(X+H)ᵀ) − stat(XXᵀ) − stat(HHᵀ)` split symmetrically.
    #[test]
    fn jacobian_matches_polarization() {
        let model = plain("G_fig5");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_point(6, 3, &mut rng);
        let h = random_point(6, 3, &mut rng);
        let j = jacobian(&model, &x).unwrap();
        let gram = |a: &RationalMatrix, b: &RationalMatrix, i: usize, k: usize| -> BigRational {
            (0..3).map(|l| a.get(i, l) * b.get(k, l)).fold(r(0), |s, v| s + v)
        };
        for (row, cells) in stat_rows(&model).iter().enumerate() {
            let (i, k) = cells[0].0;
            // d/dt (X+tH)(X+tH)ᵀ at t=0 is XHᵀ + HXᵀ.
            let expect = gram(&x, &h, i, k) + gram(&h, &x, i, k);
            let got = (0..6)
                .flat_map(|a| (0..3).map(move |l| (a, l)))
                .fold(r(0), |s, (a, l)| s + j.get(row, a * 3 + l) * h.get(a, l));
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn certify_examples() {
        let g = certify(&plain("G_fig5"), 3, 5, 1).unwrap();
        assert_eq!((g.target_dim, g.generic_rank, g.verdict), (14, 14, RankVerdict::AlmostSurelyExists));
        let f2 = certify(&frets(), 2, 5, 1).unwrap();
        assert_eq!((f2.target_dim, f2.generic_rank, f2.verdict), (5, 5, RankVerdict::AlmostSurelyExists));
        let f1 = certify(&frets(), 1, 5, 1).unwrap();
        assert_eq!((f1.generic_rank, f1.verdict), (4, RankVerdict::Inconclusive));
        let c4 = certify(&plain("cycle:4"), 2, 5, 1).unwrap();
        assert_eq!((c4.target_dim, c4.generic_rank, c4.verdict), (8, 7, RankVerdict::Inconclusive));
    }

    #[test]
    fn dimension_bound_examples() {
        assert_eq!(dimension_bound(&plain("cycle:4"), 2), 7);
        assert_eq!(dimension_bound(&plain("G_fig5"), 3), 14);
        assert_eq!(dimension_bound(&frets(), 1), 4);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = certify(&plain("wheel:5"), 3, 5, 99).unwrap();
        let b = certify(&plain("wheel:5"), 3, 5, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_through_hprime_atoms() {
        let grid = family("grid", &[3, 3]).unwrap();
        let hp = family("Hprime_fig5", &[]).unwrap();
        let rep = certify_via_supergraph(&grid, &hp, 3, 5, 4).unwrap().unwrap();
        assert_eq!(rep.atoms.len(), 2);
        assert_eq!(rep.verdict, RankVerdict::AlmostSurelyExists);
        let g = family("G_fig5", &[]).unwrap();
        for a in &rep.atoms {
            assert_eq!(a.report.target_dim, 14);
        }
        for a in clique_sum_split(&hp) {
            assert!(a.graph.isomorphism_to(&g).is_some());
        }
        // Grid at n = 2 is not certified (it has a cycle).
        assert_eq!(certify(&Model::plain(grid), 2, 5, 4).unwrap().verdict, RankVerdict::Inconclusive);
    }

    #[test]
    fn chordal_graphs_certified_at_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let m = rng.gen_range(2..=7);
            let mut g = Graph::empty(m);
            for v in 1..m {
                // Joining v to part of a clique of earlier vertices keeps g chordal.
                let cliques = maximal_cliques(&g.induced(&(0..v).collect::<Vec<_>>()));
                let c = &cliques[rng.gen_range(0..cliques.len())];
                for &u in c {
                    if rng.gen_bool(0.7) {
                        g.add_edge(u, v);
                    }
                }
            }
            assert!(is_chordal(&g));
            let q = max_clique_size(&g);
            assert_eq!(certify(&Model::plain(g), q, 5, 7).unwrap().verdict, RankVerdict::AlmostSurelyExists);
        }
    }

    #[test]
    fn monotone_in_n() {
        for name in ["cycle:4", "cycle:5", "K:2,3", "G_fig5", "wheel:5", "table1:f"] {
            let model = plain(name);
            let mut seen = false;
            for n in 1..=5 {
                let v = certify(&model, n, 5, 2).unwrap().verdict == RankVerdict::AlmostSurelyExists;
                assert!(!seen || v, "{name} n={n}");
                seen |= v;
            }
            assert!(seen, "{name}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn rank_invariant_under_right_multiplication(seed in 0u64..10_000) {
            let model = plain("cycle:5");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_point(5, 2, &mut rng);
            let a = random_point(2, 2, &mut rng);
            let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
            prop_assume!(!det.is_zero());
            let xa = RationalMatrix::from_fn(5, 2, |i, j| (0..2).fold(r(0), |s, k| s + x.get(i, k) * a.get(k, j)));
            let r1 = rational_rank(&jacobian(&model, &x).unwrap());
            let r2 = rational_rank(&jacobian(&model, &xa).unwrap());
            prop_assert_eq!(r1, r2);
        }
    }
}

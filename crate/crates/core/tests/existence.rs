use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ggmle::existence::{
    buhl_cycle, chordal_check, decide, general_feasibility, k2m_neighbor, k3m_pillow, line_angle, Evidence, ExistenceVerdict,
    FeasibilityOptions, Status, EPS_PD,
};
use ggmle::graphs::{family, is_chordal, maximal_cliques, parse_family, Graph};
use ggmle::models::{project, sample_cov, sample_gaussian_trial, Model, SampleData};
use ggmle::numkernel::SymMatrix;

const SKIP: f64 = 10.0 * EPS_PD;

fn decided_margin(v: &ExistenceVerdict) -> bool {
    v.status.is_decided() && v.margin.is_some_and(|m| m.abs() >= SKIP)
}

/// Runs `exact` against the general solver on `trials` datasets and returns
/// the number of trials compared.
fn agree(g: &Graph, n: usize, trials: u64, seed: u64, mut exact: impl FnMut(&SampleData) -> ExistenceVerdict) -> usize {
    let opts = FeasibilityOptions::default();
    let m = g.order();
    let mut compared = 0;
    for t in 0..trials {
        let d = sample_gaussian_trial(&SymMatrix::identity(m), n, seed, t).unwrap();
        let e = exact(&d);
        let p = project(&sample_cov(&d), g).unwrap();
        let f = general_feasibility(&p, &opts).unwrap();
        if !decided_margin(&e) || !decided_margin(&f) {
            continue;
        }
        assert_eq!(e.status, f.status, "{:?} n={n} trial {t}: {} vs {}", g.edges(), e.method, f.method);
        compared += 1;
    }
    compared
}

#[test]
fn cycle_condition_agrees_with_feasibility() {
    for m in 4..=7 {
        let g = family("cycle", &[m]).unwrap();
        let compared = agree(&g, 2, 1000, 10 + m as u64, |d| {
            let angles: Vec<f64> = (0..m).map(|v| line_angle([d.observation(0)[v], d.observation(1)[v]])).collect();
            buhl_cycle(&angles).unwrap()
        });
        assert!(compared > 950, "m={m}: {compared}");
    }
}

#[test]
fn k2m_lines_agree_with_feasibility() {
    for m in 2..=5 {
        let g = family("K", &[2, m]).unwrap();
        let red: Vec<usize> = (2..m + 2).collect();
        let compared = agree(&g, 2, 1000, 20 + m as u64, |d| k2m_neighbor(d, [0, 1], &red).unwrap());
        assert!(compared > 950, "m={m}: {compared}");
    }
}

#[test]
fn k3m_pillows_on_data_are_one_sided() {
    // Rank-deficient data makes every 4x4 block PSD and singular at the
    // sample values, so the best margin is never negative: the pillows can
    // only say Exists or sit on the boundary, where the data has no MLE.
    let opts = FeasibilityOptions::default();
    for (m, n) in [(2, 2), (3, 2), (4, 2), (4, 3)] {
        let g = family("K", &[3, m]).unwrap();
        let red: Vec<usize> = (3..m + 3).collect();
        let mut seen = [0usize; 2];
        for t in 0..500 {
            let d = sample_gaussian_trial(&SymMatrix::identity(m + 3), n, 30 + (10 * m + n) as u64, t).unwrap();
            let p = project(&sample_cov(&d), &g).unwrap();
            let v = k3m_pillow(&p, [0, 1, 2], &red, EPS_PD).unwrap();
            let f = general_feasibility(&p, &opts).unwrap();
            assert_ne!(v.status, Status::NotExists, "m={m} n={n} trial {t}");
            if !decided_margin(&f) {
                continue;
            }
            let exists = v.status == Status::Exists;
            assert_eq!(exists, f.status == Status::Exists, "m={m} n={n} trial {t}: {:?} {:?}", v.status, f.status);
            seen[exists as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0, "m={m} n={n}: {seen:?}");
    }
}

#[test]
fn k3m_pillows_agree_on_partial_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for m in 2..=4 {
        let g = family("K", &[3, m]).unwrap();
        let red: Vec<usize> = (3..m + 3).collect();
        let mut seen = [0usize; 2];
        for t in 0..300 {
            let mut s = SymMatrix::identity(m + 3);
            for (i, j) in g.edges() {
                s.set(i, j, rng.gen_range(-0.95..0.95));
            }
            let p = project(&s, &g).unwrap();
            let v = k3m_pillow(&p, [0, 1, 2], &red, EPS_PD).unwrap();
            let f = general_feasibility(&p, &FeasibilityOptions::default()).unwrap();
            if decided_margin(&v) && decided_margin(&f) {
                assert_eq!(v.status, f.status, "m={m} trial {t}");
                seen[(v.status == Status::Exists) as usize] += 1;
            }
        }
        assert!(seen[0] > 20 && seen[1] > 20, "m={m}: {seen:?}");
    }
}

fn random_chordal(m: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::empty(m);
    for v in 1..m {
        let cliques = maximal_cliques(&g.induced(&(0..v).collect::<Vec<_>>()));
        let c = &cliques[rng.gen_range(0..cliques.len())];
        for &u in c {
            if rng.gen_bool(0.75) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

#[test]
fn chordal_check_agrees_with_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut compared = 0;
    for k in 0..1000u64 {
        let m = rng.gen_range(3..=7);
        let g = random_chordal(m, &mut rng);
        assert!(is_chordal(&g));
        // Full-rank data always exists on a chordal graph, so mix in a
        // random symmetric matrix with unit diagonal to reach both sides.
        let mut s = SymMatrix::identity(m);
        for (i, j) in g.edges() {
            s.set(i, j, rng.gen_range(-0.7..0.7));
        }
        let p = project(&s, &g).unwrap();
        let e = chordal_check(&p, EPS_PD).unwrap();
        let f = general_feasibility(&p, &FeasibilityOptions::default()).unwrap();
        if decided_margin(&e) && decided_margin(&f) {
            assert_eq!(e.status, f.status, "graph {k}: {:?}", g.edges());
            compared += 1;
        }
    }
    assert!(compared > 900, "{compared}");
}

/// Disjoint union of `a` and `b` with `b`'s edge `(0, 1)` identified with
/// `a`'s edge `ea`. Returns the glued graph and `b`'s vertex labels in it.
fn glue_on_edge(a: &Graph, ea: (usize, usize), b: &Graph) -> (Graph, Vec<usize>) {
    assert!(b.has_edge(0, 1));
    let ma = a.order();
    let label: Vec<usize> = (0..b.order())
        .map(|v| match v {
            0 => ea.0,
            1 => ea.1,
            _ => ma + v - 2,
        })
        .collect();
    let mut edges = a.edges();
    edges.extend(b.edges().into_iter().filter(|&e| e != (0, 1)).map(|(i, j)| (label[i], label[j])));
    (Graph::new(ma + b.order() - 2, edges).unwrap(), label)
}

#[test]
fn clique_sum_is_conjunction_of_atoms() {
    let parts = ["cycle:4", "cycle:5", "K:2,3", "wheel:5", "table1:d", "G_fig5", "complete:3"];
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut seen = [0usize; 2];
    for t in 0..150u64 {
        let a = parse_family(parts[rng.gen_range(0..parts.len())]).unwrap();
        let b = parse_family(parts[rng.gen_range(0..parts.len())]).unwrap();
        let ea = a.edges()[rng.gen_range(0..a.edge_count())];
        // Put a random edge of b at positions 0, 1.
        let eb = b.edges()[rng.gen_range(0..b.edge_count())];
        let mut perm: Vec<usize> = vec![eb.0, eb.1];
        perm.extend((0..b.order()).filter(|&v| v != eb.0 && v != eb.1));
        let b = b.induced(&perm);
        let (g, label) = glue_on_edge(&a, ea, &b);
        let n = rng.gen_range(2..=3);
        let d = sample_gaussian_trial(&SymMatrix::identity(g.order()), n, 51, t).unwrap();
        let whole = decide(&Model::plain(g.clone()), Evidence::Data(&d)).unwrap();
        let in_a: Vec<usize> = (0..a.order()).collect();
        let va = decide(&Model::plain(a.clone()), Evidence::Data(&d.select(&in_a))).unwrap();
        let vb = decide(&Model::plain(b.clone()), Evidence::Data(&d.select(&label))).unwrap();
        if ![&whole, &va, &vb].iter().all(|v| v.status.is_decided()) {
            continue;
        }
        let both = va.status == Status::Exists && vb.status == Status::Exists;
        assert_eq!(whole.status == Status::Exists, both, "trial {t}: {} | {} | {}", whole.method, va.method, vb.method);
        seen[both as usize] += 1;
    }
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

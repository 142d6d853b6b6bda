use super::{Graph, GraphError};

pub const FAMILY_HELP: &str = "\
cycle:M        M-cycle 1-2-..-M-1
path:M         path 1-2-..-M
complete:M     complete graph K_M
K:P,Q          complete bipartite K_{P,Q}; parts {1..P} and {P+1..P+Q}
grid:R,C       R x C grid, row-major labels
wheel:M        M vertices: cycle 1-..-(M-1) plus hub M
G_fig5         6 vertices, non-edges 13 15 16 24 26 34 35
Hprime_fig5    3x3 grid plus edge 4-6 (two copies of G_fig5 glued on 456)
table1:a..g    the non-chordal graphs on at most five vertices";

fn bad(family: &str, reason: impl Into<String>) -> GraphError {
    GraphError::BadParams {
        family: family.to_string(),
        reason: reason.into(),
    }
}

fn want(family: &str, params: &[usize], n: usize) -> Result<(), GraphError> {
    if params.len() != n {
        return Err(bad(family, format!("expected {n} parameter(s), got {}", params.len())));
    }
    if params.contains(&0) {
        return Err(bad(family, "parameters must be positive"));
    }
    Ok(())
}

fn cycle_edges(m: usize) -> Vec<(usize, usize)> {
    (0..m).map(|i| (i.min((i + 1) % m), i.max((i + 1) % m))).collect()
}

/// Named graph constructors with fixed canonical labelling.
pub fn family(name: &str, params: &[usize]) -> Result<Graph, GraphError> {
    match name {
        "cycle" | "C" => {
            want(name, params, 1)?;
            if params[0] < 3 {
                return Err(bad(name, "a cycle needs at least 3 vertices"));
            }
            Graph::new(params[0], cycle_edges(params[0]))
        }
        "path" | "P" => {
            want(name, params, 1)?;
            Graph::new(params[0], (1..params[0]).map(|i| (i - 1, i)))
        }
        "complete" => {
            want(name, params, 1)?;
            Ok(Graph::complete(params[0]))
        }
        "K" if params.len() == 1 => family("complete", params),
        "K" => {
            want(name, params, 2)?;
            let (p, q) = (params[0], params[1]);
            let edges = (0..p).flat_map(|a| (p..p + q).map(move |b| (a, b)));
            Graph::new(p + q, edges)
        }
        "grid" => {
            want(name, params, 2)?;
            let (r, c) = (params[0], params[1]);
            let mut edges = Vec::new();
            for i in 0..r {
                for j in 0..c {
                    let v = i * c + j;
                    if j + 1 < c {
                        edges.push((v, v + 1));
                    }
                    if i + 1 < r {
                        edges.push((v, v + c));
                    }
                }
            }
            Graph::new(r * c, edges)
        }
        "wheel" => {
            want(name, params, 1)?;
            let m = params[0];
            if m < 4 {
                return Err(bad(name, "a wheel needs at least 4 vertices"));
            }
            let mut edges = cycle_edges(m - 1);
            edges.extend((0..m - 1).map(|v| (v, m - 1)));
            Graph::new(m, edges)
        }
        "G_fig5" => {
            want(name, params, 0)?;
            Graph::from_one_based(6, [(1, 2), (1, 4), (2, 3), (2, 5), (3, 6), (4, 5), (4, 6), (5, 6)])
        }
        "Hprime_fig5" => {
            want(name, params, 0)?;
            let mut g = family("grid", &[3, 3])?;
            g.add_edge(3, 5);
            Ok(g)
        }
        "table1" => {
            want(name, params, 1)?;
            table1(params[0])
        }
        other => Err(GraphError::UnknownFamily(other.to_string())),
    }
}

/// Row `k` (1 = (a), ..., 7 = (g)) of the list of non-chordal graphs on at
/// most five vertices. Rows (c), (d), (f), (g) attach a fifth vertex to the
/// 4-cycle 1-2-3-4 with neighbourhood {1}, {1,2}, {1,2,3}, {1,2,3,4}.
fn table1(k: usize) -> Result<Graph, GraphError> {
    let c4 = [(1, 2), (2, 3), (3, 4), (1, 4)];
    let attach = |nbrs: &[usize]| {
        Graph::from_one_based(5, c4.iter().copied().chain(nbrs.iter().map(|&v| (v, 5))))
    };
    match k {
        1 => family("cycle", &[4]),
        2 => family("cycle", &[5]),
        3 => attach(&[1]),
        4 => attach(&[1, 2]),
        5 => family("K", &[2, 3]),
        6 => attach(&[1, 2, 3]),
        7 => family("wheel", &[5]),
        _ => Err(bad("table1", "row must be a..g")),
    }
}

/// Parses `name:p1,p2,...` (or a bare name), e.g. `cycle:5`, `K:2,3`,
/// `table1:c`.
pub fn parse_family(spec: &str) -> Result<Graph, GraphError> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), a.trim()),
        None => (spec.trim(), ""),
    };
    if name == "table1" {
        let mut chars = args.chars();
        return match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='g'), None) => table1(c as usize - 'a' as usize + 1),
            _ => Err(bad("table1", format!("row must be a..g, got `{args}`"))),
        };
    }
    let params = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| bad(name, format!("`{p}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    family(name, &params)
}

//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use webdyn::graph::{ComponentLabel, HostGraph, MainSubLabel};
use webdyn::snapshot::SiteId;

pub fn node_name(i: usize) -> SiteId {
    SiteId::parse(&format!("n{i:04}.cl")).unwrap()
}

/// Graph over `n` nodes named so that hostname order equals index order.
pub fn graph(n: usize, arcs: &[(usize, usize)]) -> HostGraph {
    weighted_graph(n, &arcs.iter().map(|&(u, v)| (u, v, 1)).collect::<Vec<_>>())
}

pub fn weighted_graph(n: usize, arcs: &[(usize, usize, u64)]) -> HostGraph {
    HostGraph::from_arcs((0..n).map(node_name).collect(), vec![1; n], arcs.iter().copied()).unwrap()
}

pub fn random_arcs<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen::<f64>() < density {
                arcs.push((u, v));
            }
        }
    }
    arcs
}

/// `reach[u][v]`: a path of length >= 0 leads from `u` to `v`.
pub fn reachability(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
    }
    for &(u, v) in arcs {
        r[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Strongly connected components as sorted node lists ordered by their
/// smallest member.
pub fn oracle_scc(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let r = reachability(n, arcs);
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for u in 0..n {
        if assigned[u] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&v| r[u][v] && r[v][u]).collect();
        for &v in &comp {
            assigned[v] = true;
        }
        out.push(comp);
    }
    out
}

/// Component and MAIN sublabels straight from the definitions.
pub fn oracle_bowtie(n: usize, arcs: &[(usize, usize)]) -> (Vec<ComponentLabel>, Vec<Option<MainSubLabel>>) {
    let r = reachability(n, arcs);
    // Largest SCC of at least two nodes; the smallest index stands in for
    // the smallest hostname.
    let main: Vec<usize> = oracle_scc(n, arcs)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .fold(Vec::new(), |best, c| if c.len() > best.len() { c } else { best });
    let in_main = |v: usize| main.contains(&v);
    let mut label = vec![ComponentLabel::Island; n];
    for v in 0..n {
        if in_main(v) {
            label[v] = ComponentLabel::Main;
        } else if main.iter().any(|&m| r[v][m]) {
            label[v] = ComponentLabel::In;
        } else if main.iter().any(|&m| r[m][v]) {
            label[v] = ComponentLabel::Out;
        }
    }
    let ins: Vec<usize> = (0..n).filter(|&v| label[v] == ComponentLabel::In).collect();
    let outs: Vec<usize> = (0..n).filter(|&v| label[v] == ComponentLabel::Out).collect();
    for v in 0..n {
        if label[v] != ComponentLabel::Island {
            continue;
        }
        let f = ins.iter().any(|&i| r[i][v]);
        let b = outs.iter().any(|&o| r[v][o]);
        label[v] = match (f, b) {
            (true, true) => ComponentLabel::Tunnel,
            (true, false) => ComponentLabel::Tin,
            (false, true) => ComponentLabel::Tout,
            (false, false) => ComponentLabel::Island,
        };
    }
    let sub = (0..n)
        .map(|m| {
            if label[m] != ComponentLabel::Main {
                return None;
            }
            let has_in = arcs.iter().any(|&(u, v)| v == m && label[u] == ComponentLabel::In);
            let has_out = arcs.iter().any(|&(u, v)| u == m && label[v] == ComponentLabel::Out);
            Some(match (has_in, has_out) {
                (true, true) => MainSubLabel::MainMain,
                (true, false) => MainSubLabel::MainIn,
                (false, true) => MainSubLabel::MainOut,
                (false, false) => MainSubLabel::MainNorm,
            })
        })
        .collect();
    (label, sub)
}

/// PageRank by solving `(I - d M) x = (1 - d)/n * 1` with dangling columns
/// replaced by uniform ones.
pub fn oracle_pagerank(n: usize, arcs: &[(usize, usize, u64)], d: f64) -> Vec<f64> {
    let mut w = DMatrix::<f64>::zeros(n, n);
    for &(u, v, m) in arcs {
        if u != v {
            w[(v, u)] += m as f64;
        }
    }
    for u in 0..n {
        let col_sum: f64 = (0..n).map(|v| w[(v, u)]).sum();
        for v in 0..n {
            w[(v, u)] = if col_sum > 0.0 { w[(v, u)] / col_sum } else { 1.0 / n as f64 };
        }
    }
    let a = DMatrix::<f64>::identity(n, n) - w * d;
    let b = DVector::<f64>::from_element(n, (1.0 - d) / n as f64);
    let x = a.lu().solve(&b).expect("system is non-singular");
    x.iter().copied().collect()
}

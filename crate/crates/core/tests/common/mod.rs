//! Independent oracles shared by the integration tests. None of these reuse
//! the library's search code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepnn_core::generators::grid;
use sepnn_core::{Graph, NodeId};

/// Bellman-Ford over the out-arcs, iterating edge relaxation to a fixpoint.
pub fn bellman_ford(g: &Graph, source: NodeId) -> Vec<f64> {
    let arcs: Vec<(NodeId, NodeId, f64)> = (0..g.node_count() as NodeId)
        .flat_map(|u| {
            g.neighbors(u)
                .map(move |(v, w)| (u, v, w))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut dist = vec![f64::INFINITY; g.node_count()];
    dist[source as usize] = 0.0;
    loop {
        let mut changed = false;
        for &(u, v, w) in &arcs {
            let d = dist[u as usize] + w;
            if d < dist[v as usize] {
                dist[v as usize] = d;
                changed = true;
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Nearest enabled site by scanning a full distance vector; ties go to the
/// smallest id.
pub fn nearest_in(dist: &[f64], sites: impl IntoIterator<Item = NodeId>) -> Option<(NodeId, f64)> {
    let mut best: Option<(NodeId, f64)> = None;
    for s in sites {
        let d = dist[s as usize];
        if d == f64::INFINITY {
            continue;
        }
        if best.is_none_or(|(b, bd)| d < bd || (d == bd && s < b)) {
            best = Some((s, d));
        }
    }
    best
}

/// Greedy matching by repeatedly removing the globally closest pair, given
/// the full site distance matrix. Returns the matched pair distances sorted.
pub fn closest_pair_greedy(dist: &[Vec<f64>]) -> Vec<f64> {
    let k = dist.len();
    let mut alive = vec![true; k];
    let mut out = Vec::new();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..k {
            for j in i + 1..k {
                if alive[i] && alive[j] && best.is_none_or(|(d, _, _)| dist[i][j] < d) {
                    best = Some((dist[i][j], i, j));
                }
            }
        }
        let Some((d, i, j)) = best else { break };
        alive[i] = false;
        alive[j] = false;
        out.push(d);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Grid whose weights are near 1 with fine dyadic perturbations, so that
/// path sums stay exact while distinct paths almost never tie.
pub fn perturbed_grid(cols: usize, rows: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid(cols, rows, |_| {
        1.0 + rng.gen_range(1..1u32 << 20) as f64 / (1u64 << 24) as f64
    })
}

/// Least-squares slope of log(y) against log(x).
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

//! Synthetic networks for tests and benchmarks.
//!
//! Random weights are multiples of 1/256 in (0, 10]. Sums of such weights
//! are exact in `f64`, so distances computed along different routes compare
//! equal whenever the true path lengths do.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId, Point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform weight on the 1/256 lattice in (0, 10].
pub fn dyadic_weight(rng: &mut impl Rng) -> f64 {
    rng.gen_range(1..=2560u32) as f64 / 256.0
}

/// `cols` x `rows` grid with unit spacing. Node `(c, r)` has id `r * cols + c`
/// and coordinates `(c, r)`. `weight` receives the edge index.
pub fn grid(cols: usize, rows: usize, mut weight: impl FnMut(usize) -> f64) -> Graph {
    let id = |c: usize, r: usize| (r * cols + c) as NodeId;
    let mut edges = Vec::with_capacity(2 * cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(c, r), id(c + 1, r), weight(edges.len())));
            }
            if r + 1 < rows {
                edges.push((id(c, r), id(c, r + 1), weight(edges.len())));
            }
        }
    }
    let coords = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| Point::new(c as f64, r as f64)))
        .collect();
    Graph::undirected(cols * rows, &edges)
        .and_then(|g| g.with_coords(coords))
        .expect("grid is well formed")
}

/// Grid with random dyadic weights.
pub fn random_grid(cols: usize, rows: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    grid(cols, rows, |_| dyadic_weight(&mut r))
}

/// Random recursive tree on `n` nodes with randomly permuted labels.
/// Coordinates are random points so that either strategy can be used.
pub fn random_tree(n: usize, seed: u64, mut weight: impl FnMut(&mut ChaCha8Rng) -> f64) -> Graph {
    let mut r = rng(seed);
    let mut label: Vec<NodeId> = (0..n as NodeId).collect();
    label.shuffle(&mut r);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let parent = r.gen_range(0..i);
        let w = weight(&mut r);
        edges.push((label[parent], label[i], w));
    }
    let coords = random_points(n, &mut r);
    Graph::undirected(n, &edges)
        .and_then(|g| g.with_coords(coords))
        .expect("tree is well formed")
}

fn random_points(n: usize, r: &mut ChaCha8Rng) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(r.gen_range(0.0..1000.0), r.gen_range(0.0..1000.0)))
        .collect()
}

/// Strongly connected directed graph: a Hamiltonian cycle through a random
/// permutation plus `extra` random arcs between nearby nodes of a random
/// embedding, all with dyadic weights.
pub fn random_strongly_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let coords = random_points(n, &mut r);
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (coords[a as usize], coords[b as usize]);
        pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y))
    });
    let mut arcs = Vec::with_capacity(n + extra);
    for i in 0..n {
        arcs.push((order[i], order[(i + 1) % n], dyadic_weight(&mut r)));
    }
    for _ in 0..extra {
        let i = r.gen_range(0..n);
        let j = (i + r.gen_range(1..=8)) % n;
        arcs.push((order[j], order[i], dyadic_weight(&mut r)));
    }
    Graph::directed(n, &arcs)
        .and_then(|g| g.with_coords(coords))
        .expect("graph is well formed")
}

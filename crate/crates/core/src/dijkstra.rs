//! Dijkstra's algorithm: full and restricted single-source searches, reverse
//! searches for directed graphs, and the early-exit nearest-site search used
//! both by base-case leaves and by the baseline engine.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{Csr, Graph, NodeId};
use crate::reactive::{NnAnswer, SiteSet};

/// Total order on distances. Distances are never NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Key(pub f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Shortest-path distances from (or, for reverse searches, to) `source`.
/// Unreachable nodes hold `f64::INFINITY`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceArray {
    pub source: NodeId,
    pub dist: Vec<f64>,
}

impl DistanceArray {
    pub fn get(&self, v: NodeId) -> f64 {
        self.dist[v as usize]
    }
}

/// Single-source search over `adj`, writing into `dist` (must be all
/// infinity on entry). Nodes for which `allowed` is false are never entered.
pub(crate) fn sssp(adj: &Csr, source: u32, allowed: impl Fn(u32) -> bool, dist: &mut [f64]) {
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(Reverse((Key(0.0), source)));
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for (v, w) in adj.neighbors(u) {
            let nd = d + w;
            if nd < dist[v as usize] && allowed(v) {
                dist[v as usize] = nd;
                heap.push(Reverse((Key(nd), v)));
            }
        }
    }
}

fn check_source(g: &Graph, source: NodeId, restrict: Option<&[bool]>) -> Result<()> {
    if !g.contains(source) {
        return Err(Error::UnknownNode(source));
    }
    if let Some(r) = restrict {
        if r.len() != g.node_count() {
            return Err(Error::Config(format!(
                "restriction mask has {} entries for {} nodes",
                r.len(),
                g.node_count()
            )));
        }
        if !r[source as usize] {
            return Err(Error::Config(format!(
                "restriction excludes source {source}"
            )));
        }
    }
    Ok(())
}

fn run(adj: &Csr, g: &Graph, source: NodeId, restrict: Option<&[bool]>) -> Result<DistanceArray> {
    check_source(g, source, restrict)?;
    let mut dist = vec![f64::INFINITY; g.node_count()];
    match restrict {
        Some(mask) => sssp(adj, source, |v| mask[v as usize], &mut dist),
        None => sssp(adj, source, |_| true, &mut dist),
    }
    Ok(DistanceArray { source, dist })
}

/// Distances from `source`, using only nodes flagged in `restrict` when given.
pub fn dijkstra(g: &Graph, source: NodeId, restrict: Option<&[bool]>) -> Result<DistanceArray> {
    run(g.out_adjacency(), g, source, restrict)
}

/// Distances from every node to `source`.
pub fn dijkstra_reverse(
    g: &Graph,
    source: NodeId,
    restrict: Option<&[bool]>,
) -> Result<DistanceArray> {
    run(g.in_adjacency(), g, source, restrict)
}

/// Nearest enabled site to `q` by a fresh search. Ties go to the smallest id.
pub fn nearest_by_dijkstra(g: &Graph, q: NodeId, sites: &SiteSet) -> Result<Option<NnAnswer>> {
    if !g.contains(q) {
        return Err(Error::UnknownNode(q));
    }
    let mut ws = DijkstraWorkspace::new(g.node_count());
    Ok(ws.nearest(g, q, sites))
}

/// Reusable buffers for repeated nearest-site searches. Resetting costs time
/// proportional to the nodes touched by the previous search, not to `n`.
#[derive(Debug, Default)]
pub struct DijkstraWorkspace {
    dist: Vec<f64>,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<(Key, u32)>>,
}

impl DijkstraWorkspace {
    pub fn new(n: usize) -> Self {
        DijkstraWorkspace {
            dist: vec![f64::INFINITY; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    pub fn nearest(&mut self, g: &Graph, q: NodeId, sites: &SiteSet) -> Option<NnAnswer> {
        self.nearest_on(g.out_adjacency(), q, |v| sites.contains(v))
            .map(|(site, dist)| NnAnswer { site, dist })
    }

    /// Early-exit search on `adj`. Returns `(node, dist)` for the closest node
    /// with `is_site`, smallest id among equidistant ones.
    pub(crate) fn nearest_on(
        &mut self,
        adj: &Csr,
        q: u32,
        is_site: impl Fn(u32) -> bool,
    ) -> Option<(u32, f64)> {
        if self.dist.len() < adj.node_count() {
            self.dist.resize(adj.node_count(), f64::INFINITY);
        }
        for &v in &self.touched {
            self.dist[v as usize] = f64::INFINITY;
        }
        self.touched.clear();
        self.heap.clear();

        self.dist[q as usize] = 0.0;
        self.touched.push(q);
        self.heap.push(Reverse((Key(0.0), q)));
        let mut best: Option<(u32, f64)> = None;
        while let Some(Reverse((Key(d), u))) = self.heap.pop() {
            if d > self.dist[u as usize] {
                continue;
            }
            if let Some((site, bd)) = best {
                // every node at the winning distance has been settled
                if d > bd {
                    break;
                }
                if u < site && is_site(u) {
                    best = Some((u, d));
                }
            } else if is_site(u) {
                best = Some((u, d));
            }
            for (v, w) in adj.neighbors(u) {
                let nd = d + w;
                if nd < self.dist[v as usize] {
                    if self.dist[v as usize] == f64::INFINITY {
                        self.touched.push(v);
                    }
                    self.dist[v as usize] = nd;
                    self.heap.push(Reverse((Key(nd), v)));
                }
            }
        }
        best
    }
}

//! Greedy metric stable-roommates matching on graph sites, driven by the
//! nearest-neighbor chain over a [`ReactiveNn`].

use crate::dijkstra::dijkstra;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::reactive::ReactiveNn;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    /// Matched pairs `(a, b)` with `a < b`, in the order they were formed.
    pub pairs: Vec<(NodeId, NodeId)>,
    /// The leftover site when the site count is odd.
    pub unmatched: Option<NodeId>,
}

impl Matching {
    pub fn sites(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.pairs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain(self.unmatched)
    }
}

/// Operation counts of one matching run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainStats {
    pub nearest_calls: usize,
    pub disables: usize,
}

/// Greedy matching: repeatedly pairs mutual nearest neighbors found by the
/// nearest-neighbor chain, which yields the same pairs as repeatedly removing
/// the closest pair. Every matched site is disabled in `nn`.
///
/// `sites` must be exactly the enabled sites of `nn` and must be mutually
/// reachable; the graph must be undirected.
pub fn greedy_stable_matching(nn: &mut ReactiveNn, sites: &[NodeId]) -> Result<Matching> {
    greedy_stable_matching_counted(nn, sites).map(|(m, _)| m)
}

pub fn greedy_stable_matching_counted(
    nn: &mut ReactiveNn,
    sites: &[NodeId],
) -> Result<(Matching, ChainStats)> {
    let g = nn.hierarchy().graph();
    if g.is_directed() {
        return Err(Error::Config(
            "stable matching needs an undirected graph".into(),
        ));
    }
    let mut order = sites.to_vec();
    order.sort_unstable();
    order.dedup();
    for &s in &order {
        if !g.contains(s) {
            return Err(Error::UnknownNode(s));
        }
        if !nn.is_enabled(s) {
            return Err(Error::Config(format!("site {s} is not enabled")));
        }
    }
    if nn.sites().len() != order.len() {
        return Err(Error::Config(format!(
            "{} sites enabled but {} given",
            nn.sites().len(),
            order.len()
        )));
    }
    if let Some(&first) = order.first() {
        let d = dijkstra(g, first, None)?;
        if let Some(&far) = order.iter().find(|&&s| d.get(s) == f64::INFINITY) {
            return Err(Error::Unreachable(first, far));
        }
    }

    let mut stats = ChainStats::default();
    let mut matching = Matching::default();
    // (site, distance to the element beneath it)
    let mut stack: Vec<(NodeId, f64)> = Vec::new();
    let mut cursor = 0;
    loop {
        if stack.is_empty() {
            while cursor < order.len() && !nn.is_enabled(order[cursor]) {
                cursor += 1;
            }
            let Some(&start) = order.get(cursor) else {
                break;
            };
            stack.push((start, f64::INFINITY));
        }
        let (top, to_prev) = *stack.last().unwrap();
        stats.nearest_calls += 1;
        let Some(next) = nn.nearest_other(top)? else {
            matching.unmatched = Some(top);
            stack.pop();
            nn.disable(top)?;
            stats.disables += 1;
            break;
        };
        // ties with the previous element count as mutual, so chains terminate
        let mutual =
            stack.len() >= 2 && (next.site == stack[stack.len() - 2].0 || next.dist == to_prev);
        if mutual {
            stack.pop();
            let (prev, _) = stack.pop().unwrap();
            nn.disable(top)?;
            nn.disable(prev)?;
            stats.disables += 2;
            matching.pairs.push((top.min(prev), top.max(prev)));
        } else {
            stack.push((next.site, next.dist));
        }
    }
    Ok((matching, stats))
}

/// Pairs `(p, q)`, `p < q`, not matched to each other that are each strictly
/// closer to the other than to their partner. An unmatched site counts as
/// infinitely far from its partner.
pub fn verify_stability(g: &Graph, m: &Matching) -> Result<Vec<(NodeId, NodeId)>> {
    let mut sites: Vec<NodeId> = m.sites().collect();
    sites.sort_unstable();
    let dist: Vec<Vec<f64>> = sites
        .iter()
        .map(|&s| {
            let d = dijkstra(g, s, None)?;
            Ok(sites.iter().map(|&t| d.get(t)).collect())
        })
        .collect::<Result<_>>()?;
    let index = |v: NodeId| sites.binary_search(&v).expect("site listed");
    let mut partner_dist = vec![f64::INFINITY; sites.len()];
    let mut partner = vec![usize::MAX; sites.len()];
    for &(a, b) in &m.pairs {
        let (i, j) = (index(a), index(b));
        partner[i] = j;
        partner[j] = i;
        partner_dist[i] = dist[i][j];
        partner_dist[j] = dist[j][i];
    }
    let mut blocking = Vec::new();
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            if partner[i] == j {
                continue;
            }
            if dist[i][j] < partner_dist[i] && dist[j][i] < partner_dist[j] {
                blocking.push((sites[i], sites[j]));
            }
        }
    }
    Ok(blocking)
}

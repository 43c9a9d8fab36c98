//! Reactive nearest-neighbor structure over a separator hierarchy.
//!
//! Each separator node `s` of each internal hierarchy node `H` owns a queue
//! holding the enabled sites of `H`, keyed by their distance from `s` inside
//! `H`. A query for `q` walks `q`'s chain bottom-up: the base leaf (if any)
//! is searched directly, and at every internal node the best path through a
//! separator costs `d(q, s) + min key of Q_s`.

use rayon::prelude::*;

use crate::dijkstra::DijkstraWorkspace;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::hierarchy::{HNodeId, Hierarchy, HierarchyNode};
use crate::pq::{HeapEntry, QueueBank};

/// A nearest-site answer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NnAnswer {
    pub site: NodeId,
    pub dist: f64,
}

impl NnAnswer {
    /// Strict order by distance, then site id.
    #[inline]
    pub fn better_than(&self, other: &NnAnswer) -> bool {
        self.dist < other.dist || (self.dist == other.dist && self.site < other.site)
    }
}

#[inline]
fn keep_best(best: &mut Option<NnAnswer>, cand: NnAnswer) {
    if best.is_none_or(|b| cand.better_than(&b)) {
        *best = Some(cand);
    }
}

/// Membership flags for the enabled sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteSet {
    enabled: Vec<bool>,
    count: usize,
}

impl SiteSet {
    pub fn new(n: usize) -> Self {
        SiteSet {
            enabled: vec![false; n],
            count: 0,
        }
    }

    /// Panics if a node is `>= n`.
    pub fn from_nodes(n: usize, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut s = SiteSet::new(n);
        for v in nodes {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.enabled[v as usize]
    }

    pub fn insert(&mut self, v: NodeId) -> bool {
        let slot = &mut self.enabled[v as usize];
        let fresh = !*slot;
        *slot = true;
        self.count += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, v: NodeId) -> bool {
        let slot = &mut self.enabled[v as usize];
        let was = *slot;
        *slot = false;
        self.count -= was as usize;
        was
    }

    pub fn clear(&mut self) {
        self.enabled.iter_mut().for_each(|b| *b = false);
        self.count = 0;
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of nodes in the universe.
    pub fn universe(&self) -> usize {
        self.enabled.len()
    }

    /// Enabled sites, ascending.
    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.enabled
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(v, _)| v as NodeId)
    }
}

/// The live structure: site set plus one queue per separator node per
/// hierarchy node. The queues of a hierarchy node form one [`QueueBank`].
///
/// Queries take `&self` and may run concurrently; updates need `&mut self`.
#[derive(Clone, Debug)]
pub struct ReactiveNn<'h> {
    hierarchy: &'h Hierarchy,
    sites: SiteSet,
    queues: Vec<QueueBank>,
}

fn fill_queues(h: &HierarchyNode, sites: &SiteSet, queues: &mut QueueBank) {
    let members: Vec<u32> = h
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, &v)| sites.contains(v))
        .map(|(local, _)| local as u32)
        .collect();
    for i in 0..queues.queue_count() {
        queues.rebuild(
            i,
            members.iter().map(|&local| HeapEntry {
                key: h.dist_from(i, local),
                site: h.nodes()[local as usize],
                local,
            }),
        );
    }
}

impl<'h> ReactiveNn<'h> {
    /// Builds every separator queue for the initial site set.
    pub fn new(
        hierarchy: &'h Hierarchy,
        initial: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        let n = hierarchy.graph().node_count();
        let mut sites = SiteSet::new(n);
        for v in initial {
            if v as usize >= n {
                return Err(Error::UnknownNode(v));
            }
            sites.insert(v);
        }
        let queues = hierarchy
            .nodes()
            .par_iter()
            .map(|h| {
                let mut qs = QueueBank::new(h.separator().len(), h.len());
                fill_queues(h, &sites, &mut qs);
                qs
            })
            .collect();
        Ok(ReactiveNn {
            hierarchy,
            sites,
            queues,
        })
    }

    /// Replaces the site set, reusing the queue allocations.
    pub fn reset(&mut self, sites: impl IntoIterator<Item = NodeId>) -> Result<()> {
        let n = self.sites.universe();
        let mut next = SiteSet::new(n);
        for v in sites {
            if v as usize >= n {
                return Err(Error::UnknownNode(v));
            }
            next.insert(v);
        }
        self.sites = next;
        let sites = &self.sites;
        self.queues
            .par_iter_mut()
            .zip(self.hierarchy.nodes().par_iter())
            .for_each(|(qs, h)| fill_queues(h, sites, qs));
        Ok(())
    }

    pub fn hierarchy(&self) -> &'h Hierarchy {
        self.hierarchy
    }

    pub fn sites(&self) -> &SiteSet {
        &self.sites
    }

    pub fn is_enabled(&self, v: NodeId) -> bool {
        (v as usize) < self.sites.universe() && self.sites.contains(v)
    }

    /// The separator queues of a hierarchy node, indexed by position in its
    /// separator list.
    pub fn queues(&self, node: HNodeId) -> &QueueBank {
        &self.queues[node as usize]
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.sites.universe() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    /// Enables `p` as a site. Returns false if it already was one.
    pub fn enable(&mut self, p: NodeId) -> Result<bool> {
        self.check(p)?;
        if !self.sites.insert(p) {
            return Ok(false);
        }
        for &(id, local) in self.hierarchy.chain_of(p) {
            let row = self.hierarchy.node(id).dist_from_row(local);
            self.queues[id as usize].insert_all(p, local, row);
        }
        Ok(true)
    }

    /// Disables `p`. Returns false if it was not a site.
    pub fn disable(&mut self, p: NodeId) -> Result<bool> {
        self.check(p)?;
        if !self.sites.remove(p) {
            return Ok(false);
        }
        for &(id, local) in self.hierarchy.chain_of(p) {
            self.queues[id as usize].remove_all(local);
        }
        Ok(true)
    }

    /// Nearest enabled site to `q`, ties by smallest site id; `None` when no
    /// site is reachable. With `optimized`, separators are scanned in order
    /// of distance from `q` and the scan stops once that distance exceeds the
    /// best answer so far.
    pub fn nearest(&self, q: NodeId, optimized: bool) -> Result<Option<NnAnswer>> {
        self.check(q)?;
        let mut best = None;
        for &(id, local) in self.hierarchy.chain_of(q).iter().rev() {
            let h = self.hierarchy.node(id);
            if let Some(adj) = h.leaf_adjacency() {
                let sites = &self.sites;
                let nodes = h.nodes();
                best = DijkstraWorkspace::new(h.len())
                    .nearest_on(adj, local, |v| sites.contains(nodes[v as usize]))
                    .map(|(v, dist)| NnAnswer {
                        site: nodes[v as usize],
                        dist,
                    });
                continue;
            }
            let row = h.query_row(local);
            let queues = &self.queues[id as usize];
            if optimized {
                for &i in h.sorted_separators(local) {
                    let d = row[i as usize];
                    // equal distances may still yield a smaller site id
                    if d == f64::INFINITY || best.is_some_and(|b: NnAnswer| d > b.dist) {
                        break;
                    }
                    if let Some(top) = queues.peek(i as usize) {
                        separator_candidate(&mut best, d, top);
                    }
                }
            } else {
                for (i, &d) in row.iter().enumerate() {
                    if let Some(top) = queues.peek(i) {
                        separator_candidate(&mut best, d, top);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Nearest enabled site other than `q` itself. Leaves the structure as
    /// it found it.
    pub fn nearest_other(&mut self, q: NodeId) -> Result<Option<NnAnswer>> {
        let was = self.disable(q)?;
        let ans = self.nearest(q, true);
        if was {
            self.enable(q)?;
        }
        ans
    }
}

#[inline]
fn separator_candidate(best: &mut Option<NnAnswer>, d: f64, top: &HeapEntry) {
    let dist = d + top.key;
    if dist < f64::INFINITY {
        keep_best(
            best,
            NnAnswer {
                site: top.site,
                dist,
            },
        );
    }
}

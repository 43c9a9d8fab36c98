//! Separator hierarchy and the site-independent precomputation.
//!
//! Every internal hierarchy node stores, for each of its nodes `v` and each
//! separator node `s`, the distance between `s` and `v` inside the node's
//! induced subgraph, plus the separators of `v` sorted by that distance.
//! Children are the connected components left after removing the separator.
//!
//! Tables are laid out node-major (`[v * seps + i]`): queries and updates
//! both touch every separator for one fixed node.

mod io;

pub use io::{MAGIC, VERSION};

use rayon::prelude::*;

use crate::dijkstra::sssp;
use crate::error::{Error, Result};
use crate::graph::{Csr, Graph, NodeId, SubgraphView, NONE};
use crate::separator::{Separation, SeparatorStrategy};

/// Index of a hierarchy node in [`Hierarchy::nodes`]; the root is 0.
pub type HNodeId = u32;

/// Base-case size used in the road-network experiments.
pub const DEFAULT_BASE_CASE: usize = 20;

/// Bytes per (separator, node) table entry: distance, sorted-order index and
/// the matching queue position slot.
pub const TABLE_ENTRY_BYTES: u64 = 8 + 4 + 4;
/// Extra bytes per table entry in directed mode (distance to the separator).
pub const DIRECTED_ENTRY_BYTES: u64 = 8;
/// Bytes per node per level: global id, child index and the locate chain.
pub const NODE_LEVEL_BYTES: u64 = 4 + 4 + 8;

#[derive(Clone, Debug)]
pub struct HierarchyNode {
    nodes: Vec<NodeId>,
    separator: Vec<u32>,
    children: Vec<HNodeId>,
    child_of: Vec<u32>,
    dist_from: Vec<f64>,
    dist_to: Option<Vec<f64>>,
    sorted_seps: Vec<u32>,
    leaf: Option<Csr>,
    level: u32,
}

impl HierarchyNode {
    /// Global ids of the subgraph's nodes, ascending. Local id = position.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Separator as local ids, ascending.
    pub fn separator(&self) -> &[u32] {
        &self.separator
    }

    pub fn separator_global(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.separator.iter().map(|&s| self.nodes[s as usize])
    }

    pub fn children(&self) -> &[HNodeId] {
        &self.children
    }

    pub fn is_base(&self) -> bool {
        self.leaf.is_some()
    }

    /// Level in the hierarchy, root at 0.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn local_id(&self, v: NodeId) -> Option<u32> {
        self.nodes.binary_search(&v).ok().map(|i| i as u32)
    }

    /// Index into `children` of the child holding `local`; `None` for
    /// separator nodes and base leaves.
    pub fn child_of(&self, local: u32) -> Option<usize> {
        self.child_of
            .get(local as usize)
            .copied()
            .filter(|&c| c != NONE)
            .map(|c| c as usize)
    }

    /// Distance from separator `sep` (index into `separator()`) to `local`
    /// within this subgraph.
    #[inline]
    pub fn dist_from(&self, sep: usize, local: u32) -> f64 {
        self.dist_from[local as usize * self.separator.len() + sep]
    }

    /// Distance from `local` to separator `sep`; directed mode only.
    pub fn dist_to(&self, sep: usize, local: u32) -> Option<f64> {
        self.dist_to
            .as_ref()
            .map(|d| d[local as usize * self.separator.len() + sep])
    }

    /// Distances from every separator to `local`, by separator index.
    #[inline]
    pub fn dist_from_row(&self, local: u32) -> &[f64] {
        let s = self.separator.len();
        &self.dist_from[local as usize * s..(local as usize + 1) * s]
    }

    /// Distances from `local` to every separator, by separator index.
    #[inline]
    pub fn query_row(&self, local: u32) -> &[f64] {
        let s = self.separator.len();
        let table = self.dist_to.as_ref().unwrap_or(&self.dist_from);
        &table[local as usize * s..(local as usize + 1) * s]
    }

    /// Separator indices ordered by distance from `local` to the separator,
    /// ties by separator id.
    #[inline]
    pub fn sorted_separators(&self, local: u32) -> &[u32] {
        let s = self.separator.len();
        &self.sorted_seps[local as usize * s..(local as usize + 1) * s]
    }

    pub(crate) fn leaf_adjacency(&self) -> Option<&Csr> {
        self.leaf.as_ref()
    }

    fn table_entries(&self) -> usize {
        self.nodes.len() * self.separator.len()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub base_case_size: usize,
    /// Refuse to build when the memory estimate exceeds this many bytes.
    pub mem_cap: Option<u64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            base_case_size: DEFAULT_BASE_CASE,
            mem_cap: None,
        }
    }
}

/// Summary figures of a built hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HierarchyStats {
    pub graph_count: usize,
    pub total_nodes: usize,
    pub depth: usize,
    pub max_separator: usize,
    pub base_leaves: usize,
    pub table_entries: usize,
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    graph: Graph,
    nodes: Vec<HierarchyNode>,
    chain_offsets: Vec<u32>,
    chain: Vec<(HNodeId, u32)>,
    base_case_size: usize,
    strategy: String,
}

/// Upper bound on the number of levels of a hierarchy whose children shrink
/// to at most two thirds of their parent.
pub fn depth_bound(n: usize) -> usize {
    if n <= 1 {
        1
    } else {
        (n as f64).log(1.5).ceil() as usize + 1
    }
}

/// Estimated bytes for the distance tables, sorted separator lists and queue
/// position maps of an undirected hierarchy.
///
/// Every level holds each node at most once. A level-`l` subgraph has at most
/// `(2/3)^l n` nodes, and separator sizes are modeled as scaling with the
/// square root of subgraph size, so level `l` is charged
/// `max(1, ceil(separator_bound * (2/3)^(l/2)))` separator entries per node.
pub fn memory_estimate(n: u64, separator_bound: u64, depth_bound: u64) -> u64 {
    estimate(n, separator_bound, depth_bound, false)
}

pub(crate) fn estimate(n: u64, separator_bound: u64, depth_bound: u64, directed: bool) -> u64 {
    let per_entry = TABLE_ENTRY_BYTES + if directed { DIRECTED_ENTRY_BYTES } else { 0 };
    let shrink = (2.0f64 / 3.0).sqrt();
    let per_node_entries: u64 = (0..depth_bound)
        .map(|level| ((separator_bound as f64 * shrink.powi(level as i32)).ceil() as u64).max(1))
        .sum();
    n * (per_node_entries * per_entry + depth_bound * NODE_LEVEL_BYTES)
}

struct Built {
    node: HierarchyNode,
    children: Vec<Built>,
}

fn leaf(view: SubgraphView, level: u32) -> Built {
    let n = view.len();
    Built {
        node: HierarchyNode {
            nodes: view.global_ids().to_vec(),
            separator: Vec::new(),
            children: Vec::new(),
            child_of: vec![NONE; n],
            dist_from: Vec::new(),
            dist_to: None,
            sorted_seps: Vec::new(),
            leaf: Some(view.into_out()),
            level,
        },
        children: Vec::new(),
    }
}

/// Runs one search per separator node and stores the result node-major.
fn separator_table(adj: &Csr, separator: &[u32]) -> Vec<f64> {
    let k = adj.node_count();
    let s = separator.len();
    let rows: Vec<Vec<f64>> = separator
        .par_iter()
        .map(|&src| {
            let mut row = vec![f64::INFINITY; k];
            sssp(adj, src, |_| true, &mut row);
            row
        })
        .collect();
    let mut table = vec![0.0; k * s];
    for (i, row) in rows.iter().enumerate() {
        for (v, &d) in row.iter().enumerate() {
            table[v * s + i] = d;
        }
    }
    table
}

fn sort_separators(table: &[f64], k: usize, s: usize) -> Vec<u32> {
    let mut sorted = vec![0u32; k * s];
    sorted
        .par_chunks_mut(s.max(1))
        .enumerate()
        .for_each(|(v, out)| {
            if s == 0 {
                return;
            }
            let row = &table[v * s..(v + 1) * s];
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = i as u32;
            }
            // separator index order is separator id order
            out.sort_unstable_by(|&a, &b| {
                row[a as usize].total_cmp(&row[b as usize]).then(a.cmp(&b))
            });
        });
    sorted
}

fn makes_progress(sep: &Separation, n: usize) -> bool {
    sep.parts.iter().all(|p| p.len() < n) && (!sep.separator.is_empty() || sep.parts.len() > 1)
}

/// Separates `view`, mapping strategy failures to `None` (base case).
fn separate(strategy: &dyn SeparatorStrategy, view: &SubgraphView) -> Result<Option<Separation>> {
    match strategy.separate(view) {
        Ok(sep) if makes_progress(&sep, view.len()) => Ok(Some(sep)),
        Ok(_) | Err(Error::Strategy(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn build_rec(
    view: SubgraphView,
    sep: Option<Separation>,
    strategy: &dyn SeparatorStrategy,
    base: usize,
    level: u32,
) -> Result<Built> {
    let k = view.len();
    if k <= base {
        return Ok(leaf(view, level));
    }
    let sep = match sep {
        Some(s) => s,
        None => match separate(strategy, &view)? {
            Some(s) => s,
            None => return Ok(leaf(view, level)),
        },
    };
    let s = sep.separator.len();
    let dist_from = separator_table(view.out_adjacency(), &sep.separator);
    let dist_to = view
        .is_directed()
        .then(|| separator_table(view.in_adjacency(), &sep.separator));
    let mut child_of = vec![NONE; k];
    for (c, part) in sep.parts.iter().enumerate() {
        for &v in part {
            child_of[v as usize] = c as u32;
        }
    }
    let sorted_seps = sort_separators(dist_to.as_ref().unwrap_or(&dist_from), k, s);
    let children = view
        .split(&sep.parts)
        .into_par_iter()
        .map(|child| build_rec(child, None, strategy, base, level + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(Built {
        node: HierarchyNode {
            nodes: view.global_ids().to_vec(),
            separator: sep.separator,
            children: Vec::new(),
            child_of,
            dist_from,
            dist_to,
            sorted_seps,
            leaf: None,
            level,
        },
        children,
    })
}

fn flatten(built: Built, arena: &mut Vec<HierarchyNode>) -> HNodeId {
    let id = arena.len() as HNodeId;
    arena.push(built.node);
    let ids: Vec<HNodeId> = built
        .children
        .into_iter()
        .map(|c| flatten(c, arena))
        .collect();
    arena[id as usize].children = ids;
    id
}

/// Root-to-leaf chains for every graph node, in CSR form. Arena order is
/// pre-order, so ancestors are visited before descendants.
fn chains(n: usize, arena: &[HierarchyNode]) -> (Vec<u32>, Vec<(HNodeId, u32)>) {
    let mut offsets = vec![0u32; n + 1];
    for h in arena {
        for &v in &h.nodes {
            offsets[v as usize + 1] += 1;
        }
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut chain = vec![(0, 0); offsets[n] as usize];
    for (id, h) in arena.iter().enumerate() {
        for (local, &v) in h.nodes.iter().enumerate() {
            chain[fill[v as usize] as usize] = (id as HNodeId, local as u32);
            fill[v as usize] += 1;
        }
    }
    (offsets, chain)
}

impl Hierarchy {
    /// Builds the hierarchy by recursive separation until subgraphs have at
    /// most `base_case_size` nodes, computing all separator distance tables.
    /// Directed graphs get tables in both directions; separators are then
    /// found on the underlying undirected graph.
    pub fn build(
        g: &Graph,
        strategy: &dyn SeparatorStrategy,
        opts: BuildOptions,
    ) -> Result<Hierarchy> {
        if opts.base_case_size == 0 {
            return Err(Error::Config("base case size must be at least 1".into()));
        }
        let n = g.node_count();
        let view = SubgraphView::whole(g);
        let root_sep = if n > opts.base_case_size {
            separate(strategy, &view)?
        } else {
            None
        };
        if let Some(cap) = opts.mem_cap {
            let sep_bound = root_sep.as_ref().map_or(1, |s| s.separator.len().max(1));
            let est = estimate(
                n as u64,
                sep_bound as u64,
                depth_bound(n) as u64,
                g.is_directed(),
            );
            if est > cap {
                return Err(Error::MemoryCap { estimate: est, cap });
            }
        }
        let built = match root_sep {
            Some(sep) => build_rec(view, Some(sep), strategy, opts.base_case_size, 0)?,
            None => leaf(view, 0),
        };
        let mut arena = Vec::new();
        flatten(built, &mut arena);
        Ok(Hierarchy::assemble(
            g.clone(),
            arena,
            opts.base_case_size,
            strategy.name().to_string(),
        ))
    }

    fn assemble(
        graph: Graph,
        nodes: Vec<HierarchyNode>,
        base_case_size: usize,
        strategy: String,
    ) -> Hierarchy {
        let (chain_offsets, chain) = chains(graph.node_count(), &nodes);
        Hierarchy {
            graph,
            nodes,
            chain_offsets,
            chain,
            base_case_size,
            strategy,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_directed(&self) -> bool {
        self.graph.is_directed()
    }

    pub fn base_case_size(&self) -> usize {
        self.base_case_size
    }

    pub fn strategy_name(&self) -> &str {
        &self.strategy
    }

    pub fn root(&self) -> &HierarchyNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: HNodeId) -> &HierarchyNode {
        &self.nodes[id as usize]
    }

    /// All hierarchy nodes in pre-order.
    pub fn nodes(&self) -> &[HierarchyNode] {
        &self.nodes
    }

    /// The root-to-leaf chain of hierarchy nodes containing `v`, with `v`'s
    /// local id in each. The chain ends where `v` is a separator node or at a
    /// base leaf.
    pub fn locate(&self, v: NodeId) -> Result<&[(HNodeId, u32)]> {
        if !self.graph.contains(v) {
            return Err(Error::UnknownNode(v));
        }
        Ok(self.chain_of(v))
    }

    #[inline]
    pub(crate) fn chain_of(&self, v: NodeId) -> &[(HNodeId, u32)] {
        let (a, b) = (
            self.chain_offsets[v as usize],
            self.chain_offsets[v as usize + 1],
        );
        &self.chain[a as usize..b as usize]
    }

    pub fn stats(&self) -> HierarchyStats {
        HierarchyStats {
            graph_count: self.nodes.len(),
            total_nodes: self.nodes.iter().map(HierarchyNode::len).sum(),
            depth: self
                .nodes
                .iter()
                .map(|h| h.level as usize + 1)
                .max()
                .unwrap_or(0),
            max_separator: self
                .nodes
                .iter()
                .map(|h| h.separator.len())
                .max()
                .unwrap_or(0),
            base_leaves: self.nodes.iter().filter(|h| h.is_base()).count(),
            table_entries: self.nodes.iter().map(HierarchyNode::table_entries).sum(),
        }
    }

    /// Memory estimate for this hierarchy's measured separator size and depth.
    pub fn memory_estimate(&self) -> u64 {
        let st = self.stats();
        estimate(
            self.graph.node_count() as u64,
            st.max_separator.max(1) as u64,
            st.depth.max(1) as u64,
            self.is_directed(),
        )
    }
}

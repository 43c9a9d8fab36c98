//! Weighted graphs, induced subgraph views and connected components.
//!
//! Adjacency is stored in compressed sparse row form. Undirected graphs keep
//! both arc directions, so `out` adjacency is symmetric. Directed graphs
//! additionally keep the reverse adjacency for backward searches.

use crate::error::{Error, Result};

pub type NodeId = u32;

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Compressed adjacency lists. Neighbors of a node are sorted by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Csr {
    /// Builds from arcs sorted by `(from, to)` with no duplicates.
    fn from_sorted_arcs(n: usize, arcs: &[(u32, u32, f64)]) -> Csr {
        let mut offsets = vec![0u32; n + 1];
        for &(u, _, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: arcs.iter().map(|a| a.1).collect(),
            weights: arcs.iter().map(|a| a.2).collect(),
        }
    }

    pub(crate) fn from_parts(offsets: Vec<u32>, targets: Vec<u32>, weights: Vec<f64>) -> Csr {
        Csr {
            offsets,
            targets,
            weights,
        }
    }

    pub(crate) fn parts(&self) -> (&[u32], &[u32], &[f64]) {
        (&self.offsets, &self.targets, &self.weights)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn neighbors(&self, u: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let range = self.offsets[u as usize] as usize..self.offsets[u as usize + 1] as usize;
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    #[inline]
    pub fn degree(&self, u: u32) -> usize {
        (self.offsets[u as usize + 1] - self.offsets[u as usize]) as usize
    }

    /// Induced sub-adjacency on `keep` (old ids, in new id order). `map`
    /// gives the new id of an old node, or `None` when it is dropped.
    fn induced(&self, keep: &[u32], map: impl Fn(u32) -> Option<u32>) -> Csr {
        let mut offsets = Vec::with_capacity(keep.len() + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for &old in keep {
            let start = targets.len();
            for (v, w) in self.neighbors(old) {
                if let Some(nv) = map(v) {
                    targets.push(nv);
                    weights.push(w);
                }
            }
            // keep neighbor lists sorted under the new numbering
            if targets[start..].windows(2).any(|p| p[0] > p[1]) {
                let mut pairs: Vec<_> = targets[start..]
                    .iter()
                    .copied()
                    .zip(weights[start..].iter().copied())
                    .collect();
                pairs.sort_by_key(|p| p.0);
                for (i, (t, w)) in pairs.into_iter().enumerate() {
                    targets[start + i] = t;
                    weights[start + i] = w;
                }
            }
            offsets.push(targets.len() as u32);
        }
        Csr {
            offsets,
            targets,
            weights,
        }
    }
}

/// An immutable weighted graph with nonnegative finite weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    directed: bool,
    out: Csr,
    rev: Option<Csr>,
    coords: Option<Vec<Point>>,
}

fn check_arc(n: usize, u: u32, v: u32, w: f64) -> Result<()> {
    if u as usize >= n || v as usize >= n {
        return Err(Error::InvalidGraph(format!(
            "edge ({u}, {v}) references a node outside 0..{n}"
        )));
    }
    if !(w.is_finite() && w >= 0.0) {
        return Err(Error::InvalidGraph(format!(
            "edge ({u}, {v}) has weight {w}; weights must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Sorts arcs, drops self-loops and collapses parallel arcs to the minimum weight.
fn normalize(mut arcs: Vec<(u32, u32, f64)>) -> Vec<(u32, u32, f64)> {
    arcs.retain(|a| a.0 != a.1);
    arcs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    arcs.dedup_by(|later, first| later.0 == first.0 && later.1 == first.1);
    arcs
}

impl Graph {
    /// Builds an undirected graph. Parallel edges keep the minimum weight.
    pub fn undirected(n: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Graph> {
        let mut arcs = Vec::with_capacity(edges.len() * 2);
        for &(u, v, w) in edges {
            check_arc(n, u, v, w)?;
            arcs.push((u, v, w));
            arcs.push((v, u, w));
        }
        let arcs = normalize(arcs);
        Ok(Graph {
            directed: false,
            out: Csr::from_sorted_arcs(n, &arcs),
            rev: None,
            coords: None,
        })
    }

    /// Builds a directed graph. Parallel arcs keep the minimum weight.
    pub fn directed(n: usize, arcs: &[(NodeId, NodeId, f64)]) -> Result<Graph> {
        for &(u, v, w) in arcs {
            check_arc(n, u, v, w)?;
        }
        let fwd = normalize(arcs.to_vec());
        let back = normalize(fwd.iter().map(|&(u, v, w)| (v, u, w)).collect());
        Ok(Graph {
            directed: true,
            out: Csr::from_sorted_arcs(n, &fwd),
            rev: Some(Csr::from_sorted_arcs(n, &back)),
            coords: None,
        })
    }

    pub(crate) fn from_csr(directed: bool, out: Csr, coords: Option<Vec<Point>>) -> Result<Graph> {
        let n = out.node_count();
        let mut arcs = Vec::with_capacity(out.arc_count());
        for u in 0..n as u32 {
            for (v, w) in out.neighbors(u) {
                check_arc(n, u, v, w)?;
                arcs.push((u, v, w));
            }
        }
        let g = if directed {
            Graph::directed(n, &arcs)?
        } else {
            let g = Graph::undirected(n, &arcs)?;
            if g.out != out {
                return Err(Error::InvalidGraph("adjacency is not symmetric".into()));
            }
            g
        };
        match coords {
            Some(c) => g.with_coords(c),
            None => Ok(g),
        }
    }

    pub fn with_coords(mut self, coords: Vec<Point>) -> Result<Graph> {
        if coords.len() != self.node_count() {
            return Err(Error::InvalidGraph(format!(
                "{} coordinates for {} nodes",
                coords.len(),
                self.node_count()
            )));
        }
        if coords.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidGraph("non-finite coordinate".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.out.node_count()
    }

    /// Number of edges; each undirected edge counts once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.out.arc_count()
        } else {
            self.out.arc_count() / 2
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn contains(&self, v: NodeId) -> bool {
        (v as usize) < self.node_count()
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    pub fn out_adjacency(&self) -> &Csr {
        &self.out
    }

    /// Reverse adjacency; the same lists as `out_adjacency` when undirected.
    pub fn in_adjacency(&self) -> &Csr {
        self.rev.as_ref().unwrap_or(&self.out)
    }

    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.out.neighbors(u)
    }

    /// Edges as `(u, v, w)`. Undirected edges are reported once with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        let directed = self.directed;
        (0..self.node_count() as u32).flat_map(move |u| {
            self.out
                .neighbors(u)
                .filter(move |&(v, _)| directed || u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }
}

/// The largest connected component of a graph together with the original id
/// of every retained node.
#[derive(Clone, Debug)]
pub struct Component {
    pub graph: Graph,
    pub original_ids: Vec<NodeId>,
}

/// Extracts the largest (weakly) connected component. Among components of
/// equal size the one holding the smallest original id wins.
pub fn largest_connected_component(g: &Graph) -> Component {
    let n = g.node_count();
    let mut label = vec![NONE; n];
    let mut best: Option<(u32, usize)> = None;
    let mut stack = Vec::new();
    let mut next = 0u32;
    for start in 0..n as u32 {
        if label[start as usize] != NONE {
            continue;
        }
        let id = next;
        next += 1;
        label[start as usize] = id;
        stack.push(start);
        let mut size = 0usize;
        while let Some(u) = stack.pop() {
            size += 1;
            for (v, _) in g
                .out_adjacency()
                .neighbors(u)
                .chain(g.in_adjacency().neighbors(u))
            {
                if label[v as usize] == NONE {
                    label[v as usize] = id;
                    stack.push(v);
                }
            }
        }
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((id, size));
        }
    }
    let Some((keep, _)) = best else {
        return Component {
            graph: g.clone(),
            original_ids: Vec::new(),
        };
    };
    let original_ids: Vec<NodeId> = (0..n as u32)
        .filter(|&v| label[v as usize] == keep)
        .collect();
    let view = SubgraphView::induced(g, &original_ids);
    let graph = Graph {
        directed: g.directed,
        out: view.out,
        rev: view.rev,
        coords: view.coords,
    };
    Component {
        graph,
        original_ids,
    }
}

/// An induced subgraph with compact local ids `0..len`.
///
/// Local ids follow ascending global id, so ordering by local id is the same
/// as ordering by global id. For directed graphs `sym` holds the underlying
/// undirected adjacency used for separation and connectivity.
#[derive(Clone, Debug)]
pub struct SubgraphView {
    global: Vec<NodeId>,
    out: Csr,
    rev: Option<Csr>,
    sym: Option<Csr>,
    coords: Option<Vec<Point>>,
}

fn symmetric_closure(out: &Csr, rev: &Csr) -> Csr {
    let n = out.node_count();
    let mut arcs = Vec::with_capacity(out.arc_count() * 2);
    for u in 0..n as u32 {
        arcs.extend(out.neighbors(u).map(|(v, w)| (u, v, w)));
        arcs.extend(rev.neighbors(u).map(|(v, w)| (u, v, w)));
    }
    Csr::from_sorted_arcs(n, &normalize(arcs))
}

impl SubgraphView {
    pub fn whole(g: &Graph) -> SubgraphView {
        SubgraphView {
            global: (0..g.node_count() as u32).collect(),
            out: g.out.clone(),
            rev: g.rev.clone(),
            sym: g.rev.as_ref().map(|r| symmetric_closure(&g.out, r)),
            coords: g.coords.clone(),
        }
    }

    /// View induced by `nodes` (any order, duplicates ignored).
    pub fn induced(g: &Graph, nodes: &[NodeId]) -> SubgraphView {
        let mut global = nodes.to_vec();
        global.sort_unstable();
        global.dedup();
        let mut map = vec![NONE; g.node_count()];
        for (i, &v) in global.iter().enumerate() {
            map[v as usize] = i as u32;
        }
        let lookup = |v: u32| Some(map[v as usize]).filter(|&x| x != NONE);
        let out = g.out.induced(&global, lookup);
        let rev = g.rev.as_ref().map(|r| r.induced(&global, lookup));
        let sym = rev.as_ref().map(|r| symmetric_closure(&out, r));
        let coords = g
            .coords
            .as_ref()
            .map(|c| global.iter().map(|&v| c[v as usize]).collect());
        SubgraphView {
            global,
            out,
            rev,
            sym,
            coords,
        }
    }

    pub fn len(&self) -> usize {
        self.global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    pub fn global_id(&self, local: u32) -> NodeId {
        self.global[local as usize]
    }

    pub fn global_ids(&self) -> &[NodeId] {
        &self.global
    }

    pub fn is_directed(&self) -> bool {
        self.rev.is_some()
    }

    /// Undirected neighborhood, used for separation and connectivity.
    pub fn neighbors(&self, u: u32) -> impl Iterator<Item = u32> + '_ {
        self.sym
            .as_ref()
            .unwrap_or(&self.out)
            .neighbors(u)
            .map(|(v, _)| v)
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.sym.as_ref().unwrap_or(&self.out).arc_count() / 2
    }

    pub fn out_adjacency(&self) -> &Csr {
        &self.out
    }

    pub fn in_adjacency(&self) -> &Csr {
        self.rev.as_ref().unwrap_or(&self.out)
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    /// Connected components after deleting the nodes flagged in `removed`.
    /// Components are listed by smallest member; members ascend.
    pub fn components(&self, removed: &[bool]) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut seen = removed.to_vec();
        let mut comps = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n as u32 {
            if seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for v in self.neighbors(u) {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Splits into one view per part. Each part is a sorted list of local ids
    /// and parts must be disjoint.
    pub(crate) fn split(&self, parts: &[Vec<u32>]) -> Vec<SubgraphView> {
        let mut part_of = vec![NONE; self.len()];
        let mut local_of = vec![NONE; self.len()];
        for (p, part) in parts.iter().enumerate() {
            for (i, &v) in part.iter().enumerate() {
                part_of[v as usize] = p as u32;
                local_of[v as usize] = i as u32;
            }
        }
        parts
            .iter()
            .enumerate()
            .map(|(p, part)| {
                let p = p as u32;
                let lookup = |v: u32| (part_of[v as usize] == p).then(|| local_of[v as usize]);
                SubgraphView {
                    global: part.iter().map(|&v| self.global[v as usize]).collect(),
                    out: self.out.induced(part, lookup),
                    rev: self.rev.as_ref().map(|r| r.induced(part, lookup)),
                    sym: self.sym.as_ref().map(|s| s.induced(part, lookup)),
                    coords: self
                        .coords
                        .as_ref()
                        .map(|c| part.iter().map(|&v| c[v as usize]).collect()),
                }
            })
            .collect()
    }

    pub(crate) fn into_out(self) -> Csr {
        self.out
    }
}

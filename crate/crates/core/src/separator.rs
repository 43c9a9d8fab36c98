//! Node separators for subgraphs.
//!
//! A [`Separation`] splits a subgraph into a separator set and parts with no
//! edges between distinct parts. Two strategies are provided: median-line
//! splits for embedded networks and centroids for forests.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SubgraphView, NONE};

/// Separator and parts, as sorted local ids of the separated view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separation {
    pub separator: Vec<u32>,
    pub parts: Vec<Vec<u32>>,
}

/// Largest part size allowed for a subgraph of `n` nodes: `ceil(2n/3)`.
pub fn balance_limit(n: usize) -> usize {
    (2 * n).div_ceil(3)
}

pub trait SeparatorStrategy: Sync {
    fn name(&self) -> &'static str;

    /// Separates a view with at least two nodes.
    fn separate(&self, view: &SubgraphView) -> Result<Separation>;
}

/// Cheaper of the vertical and horizontal median splits.
#[derive(Clone, Copy, Debug, Default)]
pub struct MedianLine;

/// Centroid of the largest tree. Forests only.
#[derive(Clone, Copy, Debug, Default)]
pub struct Centroid;

impl SeparatorStrategy for MedianLine {
    fn name(&self) -> &'static str {
        "median"
    }

    fn separate(&self, view: &SubgraphView) -> Result<Separation> {
        median_line_separator(view)
    }
}

impl SeparatorStrategy for Centroid {
    fn name(&self) -> &'static str {
        "centroid"
    }

    fn separate(&self, view: &SubgraphView) -> Result<Separation> {
        centroid_separator(view)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

/// Splits `members` at the median along `axis` and returns the low-side
/// endpoints of edges crossing the median line.
fn axis_separator(view: &SubgraphView, members: &[u32], axis: Axis) -> Vec<u32> {
    let coords = view.coords().expect("checked by caller");
    let coord = |v: u32| match axis {
        Axis::X => coords[v as usize].x,
        Axis::Y => coords[v as usize].y,
    };
    let mut order = members.to_vec();
    order.sort_by(|&a, &b| coord(a).total_cmp(&coord(b)).then(a.cmp(&b)));
    let low_len = members.len().div_ceil(2);
    let mut low = vec![false; view.len()];
    for &v in &order[..low_len] {
        low[v as usize] = true;
    }
    let mut sep: Vec<u32> = order[..low_len]
        .iter()
        .copied()
        .filter(|&u| view.neighbors(u).any(|v| !low[v as usize]))
        .collect();
    sep.sort_unstable();
    sep
}

fn separation_without(view: &SubgraphView, separator: Vec<u32>) -> Separation {
    let mut removed = vec![false; view.len()];
    for &s in &separator {
        removed[s as usize] = true;
    }
    Separation {
        parts: view.components(&removed),
        separator,
    }
}

fn is_balanced(s: &Separation, n: usize) -> bool {
    let limit = balance_limit(n);
    s.parts.iter().all(|p| p.len() <= limit)
}

/// Median-line separator for an embedded subgraph.
///
/// For each axis the nodes are ordered by coordinate (ties by id) and the
/// first `ceil(n/2)` form the low half. The separator is the set of low-half
/// endpoints of edges into the high half; the axis giving the smaller set is
/// used, preferring the vertical line. Parts are the connected components of
/// what remains.
///
/// A disconnected subgraph whose components all fit the balance limit is
/// returned as-is with an empty separator; otherwise only the oversized
/// component is split.
pub fn median_line_separator(view: &SubgraphView) -> Result<Separation> {
    if view.coords().is_none() {
        return Err(Error::Config(
            "median-line separator requires node coordinates".into(),
        ));
    }
    let n = view.len();
    if n < 2 {
        return Err(Error::Strategy(format!(
            "cannot separate a graph of {n} node(s)"
        )));
    }
    let comps = view.components(&vec![false; n]);
    let limit = balance_limit(n);
    let members = if comps.len() > 1 {
        match comps.iter().find(|c| c.len() > limit) {
            None => {
                return Ok(Separation {
                    separator: Vec::new(),
                    parts: comps,
                })
            }
            Some(big) => big.clone(),
        }
    } else {
        comps.into_iter().next().expect("n >= 2")
    };

    let vertical = axis_separator(view, &members, Axis::X);
    let horizontal = axis_separator(view, &members, Axis::Y);
    let (first, second) = if horizontal.len() < vertical.len() {
        (horizontal, vertical)
    } else {
        (vertical, horizontal)
    };
    for candidate in [first, second] {
        let s = separation_without(view, candidate);
        if is_balanced(&s, n) {
            return Ok(s);
        }
    }
    Err(Error::Strategy(format!(
        "no balanced median split for a subgraph of {n} nodes"
    )))
}

/// Centroid separator for a forest: the node of the largest tree minimizing
/// the largest remaining component (ties by smallest id).
pub fn centroid_separator(view: &SubgraphView) -> Result<Separation> {
    let n = view.len();
    if n == 0 {
        return Err(Error::Strategy("cannot separate an empty graph".into()));
    }
    let comps = view.components(&vec![false; n]);
    if view.undirected_edge_count() + comps.len() != n {
        return Err(Error::Strategy(
            "centroid separator requires a forest; input has a cycle".into(),
        ));
    }
    let mut tree = &comps[0];
    for c in &comps[1..] {
        if c.len() > tree.len() {
            tree = c;
        }
    }

    // subtree sizes rooted at the tree's smallest node
    let root = tree[0];
    let mut parent = vec![NONE; n];
    let mut order = Vec::with_capacity(tree.len());
    let mut stack = vec![root];
    parent[root as usize] = root;
    while let Some(u) = stack.pop() {
        order.push(u);
        for v in view.neighbors(u) {
            if parent[v as usize] == NONE {
                parent[v as usize] = u;
                stack.push(v);
            }
        }
    }
    let mut size = vec![1usize; n];
    let mut heaviest_child = vec![0usize; n];
    for &u in order.iter().rev() {
        if u != root {
            let p = parent[u as usize] as usize;
            size[p] += size[u as usize];
            heaviest_child[p] = heaviest_child[p].max(size[u as usize]);
        }
    }
    let total = tree.len();
    let centroid = tree
        .iter()
        .copied()
        .min_by_key(|&v| (heaviest_child[v as usize].max(total - size[v as usize]), v))
        .expect("tree is nonempty");
    Ok(separation_without(view, vec![centroid]))
}

/// A broken separation invariant, with a witness. Node ids are global.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A listed id is not a node of the subgraph.
    UnknownNode(u32),
    /// A node appears more than once across separator and parts.
    Overlap(NodeId),
    /// A node is in neither the separator nor any part.
    Uncovered(NodeId),
    /// An edge joins two distinct parts.
    CrossingEdge(NodeId, NodeId),
    /// A part exceeds `ceil(2n/3)` nodes.
    Balance {
        part: usize,
        size: usize,
        limit: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownNode(v) => write!(f, "local id {v} is not in the subgraph"),
            Violation::Overlap(v) => write!(f, "node {v} assigned more than once"),
            Violation::Uncovered(v) => write!(f, "node {v} not covered"),
            Violation::CrossingEdge(u, v) => write!(f, "crossing edge ({u}, {v})"),
            Violation::Balance { part, size, limit } => {
                write!(f, "part {part} has {size} nodes, limit {limit}")
            }
        }
    }
}

/// Checks a separation against `view`; empty means valid.
pub fn validate_separation(view: &SubgraphView, s: &Separation) -> Vec<Violation> {
    const SEP: u32 = NONE - 1;
    let n = view.len();
    let mut out = Vec::new();
    let mut owner = vec![NONE; n];
    let groups = std::iter::once((SEP, &s.separator))
        .chain(s.parts.iter().enumerate().map(|(i, p)| (i as u32, p)));
    for (tag, nodes) in groups {
        for &v in nodes {
            match owner.get_mut(v as usize) {
                None => out.push(Violation::UnknownNode(v)),
                Some(o) if *o != NONE => out.push(Violation::Overlap(view.global_id(v))),
                Some(o) => *o = tag,
            }
        }
    }
    for v in 0..n as u32 {
        if owner[v as usize] == NONE {
            out.push(Violation::Uncovered(view.global_id(v)));
        }
    }
    for u in 0..n as u32 {
        for v in view.neighbors(u).filter(|&v| u < v) {
            let (a, b) = (owner[u as usize], owner[v as usize]);
            if a != b && a < SEP && b < SEP {
                out.push(Violation::CrossingEdge(
                    view.global_id(u),
                    view.global_id(v),
                ));
            }
        }
    }
    let limit = balance_limit(n);
    for (part, p) in s.parts.iter().enumerate() {
        if p.len() > limit {
            out.push(Violation::Balance {
                part,
                size: p.len(),
                limit,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{grid, random_tree};
    use crate::graph::{Graph, Point};

    fn line(n: usize) -> SubgraphView {
        let edges: Vec<_> = (0..n as u32 - 1).map(|i| (i, i + 1, 1.0)).collect();
        let coords = (0..n).map(|i| Point::new(i as f64, 0.0)).collect();
        SubgraphView::whole(
            &Graph::undirected(n, &edges)
                .unwrap()
                .with_coords(coords)
                .unwrap(),
        )
    }

    #[test]
    fn three_node_path() {
        let s = median_line_separator(&line(3)).unwrap();
        assert_eq!(s.separator, vec![1]);
        assert_eq!(s.parts, vec![vec![0], vec![2]]);
    }

    #[test]
    fn two_nodes() {
        let s = median_line_separator(&line(2)).unwrap();
        assert_eq!(s.separator, vec![0]);
        assert_eq!(s.parts, vec![vec![1]]);
    }

    #[test]
    fn grid_4x4() {
        let g = grid(4, 4, |_| 1.0);
        let view = SubgraphView::whole(&g);
        let s = median_line_separator(&view).unwrap();
        assert!(s.separator.len() <= 4);
        assert!(s.parts.iter().all(|p| p.len() <= 10));
        assert!(validate_separation(&view, &s).is_empty());
    }

    #[test]
    fn grid_separator_at_most_one_line() {
        for k in 2..12 {
            let g = grid(k, k, |_| 1.0);
            let view = SubgraphView::whole(&g);
            let s = median_line_separator(&view).unwrap();
            assert!(s.separator.len() <= k, "k={k}");
            assert!(validate_separation(&view, &s).is_empty());
        }
    }

    #[test]
    fn requires_coordinates() {
        let g = Graph::undirected(2, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            median_line_separator(&SubgraphView::whole(&g)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn disconnected_small_components_need_no_separator() {
        let coords = (0..4).map(|i| Point::new(i as f64, 0.0)).collect();
        let g = Graph::undirected(4, &[(0, 1, 1.0), (2, 3, 1.0)])
            .unwrap()
            .with_coords(coords)
            .unwrap();
        let s = median_line_separator(&SubgraphView::whole(&g)).unwrap();
        assert!(s.separator.is_empty());
        assert_eq!(s.parts, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn disconnected_splits_only_the_big_component() {
        // path 0..=6 plus isolated node 7
        let edges: Vec<_> = (0..6u32).map(|i| (i, i + 1, 1.0)).collect();
        let coords = (0..8).map(|i| Point::new(i as f64, 0.0)).collect();
        let g = Graph::undirected(8, &edges)
            .unwrap()
            .with_coords(coords)
            .unwrap();
        let view = SubgraphView::whole(&g);
        let s = median_line_separator(&view).unwrap();
        assert_eq!(s.separator, vec![3]);
        assert_eq!(s.parts, vec![vec![0, 1, 2], vec![4, 5, 6], vec![7]]);
        assert!(validate_separation(&view, &s).is_empty());
    }

    #[test]
    fn coincident_coordinates_break_ties_by_id() {
        let g = grid(3, 3, |_| 1.0);
        let same = vec![Point::new(0.0, 0.0); 9];
        let g = g.with_coords(same).unwrap();
        let view = SubgraphView::whole(&g);
        let a = median_line_separator(&view).unwrap();
        assert_eq!(a, median_line_separator(&view).unwrap());
        assert!(validate_separation(&view, &a).is_empty());
    }

    #[test]
    fn centroid_of_path_and_star() {
        let s = centroid_separator(&line(5)).unwrap();
        assert_eq!(s.separator, vec![2]);
        assert_eq!(s.parts, vec![vec![0, 1], vec![3, 4]]);

        let star: Vec<_> = (1..=6u32).map(|i| (0, i, 1.0)).collect();
        let g = Graph::undirected(7, &star).unwrap();
        let s = centroid_separator(&SubgraphView::whole(&g)).unwrap();
        assert_eq!(s.separator, vec![0]);
        assert_eq!(s.parts.len(), 6);
        assert!(s.parts.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn centroid_rejects_cycles() {
        let g = Graph::undirected(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert!(matches!(
            centroid_separator(&SubgraphView::whole(&g)),
            Err(Error::Strategy(_))
        ));
    }

    /// Largest remaining component after deleting `v`, by plain search.
    fn worst_part(view: &SubgraphView, v: u32) -> usize {
        let mut removed = vec![false; view.len()];
        removed[v as usize] = true;
        view.components(&removed)
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn centroid_matches_exhaustive_search() {
        for seed in 0..20 {
            let g = random_tree(100, seed, |_| 1.0);
            let view = SubgraphView::whole(&g);
            let s = centroid_separator(&view).unwrap();
            let best = (0..100u32)
                .map(|v| (worst_part(&view, v), v))
                .min()
                .unwrap();
            assert_eq!(s.separator, vec![best.1]);
            assert!(s.parts.iter().all(|p| p.len() <= 50));
            assert!(validate_separation(&view, &s).is_empty());
        }
    }

    #[test]
    fn planted_violations() {
        let view = line(5);
        let crossing = Separation {
            separator: vec![],
            parts: vec![vec![0, 1], vec![2, 3, 4]],
        };
        assert_eq!(
            validate_separation(&view, &crossing),
            vec![Violation::CrossingEdge(1, 2)]
        );

        // 4 of 5 is exactly ceil(10/3)
        let tight = Separation {
            separator: vec![0],
            parts: vec![vec![1, 2, 3, 4]],
        };
        assert!(validate_separation(&view, &tight).is_empty());

        let view6 = line(6);
        let unbalanced = Separation {
            separator: vec![0],
            parts: vec![vec![1, 2, 3, 4, 5]],
        };
        assert_eq!(
            validate_separation(&view6, &unbalanced),
            vec![Violation::Balance {
                part: 0,
                size: 5,
                limit: 4
            }]
        );

        let sloppy = Separation {
            separator: vec![0, 0],
            parts: vec![vec![9]],
        };
        let v = validate_separation(&view, &sloppy);
        assert!(v.contains(&Violation::Overlap(0)));
        assert!(v.contains(&Violation::UnknownNode(9)));
        assert!(v.contains(&Violation::Uncovered(4)));
    }
}

//! Reader and writer for the 9th DIMACS Implementation Challenge formats:
//! `.gr` arc lists (`p sp <n> <m>`, `a <u> <v> <w>`) and `.co` coordinate
//! files (`p aux sp co <n>`, `v <id> <x> <y>`). Ids are 1-based on disk.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Point};

struct Arcs {
    n: usize,
    arcs: Vec<(NodeId, NodeId, f64)>,
}

fn parse_id(tok: Option<&str>, n: usize, line: usize) -> Result<NodeId> {
    let tok = tok.ok_or_else(|| Error::parse(line, "missing node id"))?;
    let id: u64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad node id `{tok}`")))?;
    if id == 0 || id > n as u64 {
        return Err(Error::parse(line, format!("node id {id} outside 1..={n}")));
    }
    Ok((id - 1) as NodeId)
}

fn parse_real(tok: Option<&str>, what: &str, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    let x: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))?;
    if !x.is_finite() {
        return Err(Error::parse(line, format!("non-finite {what}")));
    }
    Ok(x)
}

fn parse_arcs(text: &str) -> Result<Arcs> {
    let mut n: Option<usize> = None;
    let mut arcs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                if n.is_some() {
                    return Err(Error::parse(line, "duplicate problem line"));
                }
                let (kind, nodes, edges) = (toks.next(), toks.next(), toks.next());
                let (Some("sp"), Some(nodes), Some(edges), None) =
                    (kind, nodes, edges, toks.next())
                else {
                    return Err(Error::parse(
                        line,
                        "malformed header, expected `p sp <n> <m>`",
                    ));
                };
                let nodes = nodes
                    .parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("bad node count `{nodes}`")))?;
                edges
                    .parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("bad arc count `{edges}`")))?;
                if nodes > u32::MAX as usize - 1 {
                    return Err(Error::parse(line, "too many nodes"));
                }
                n = Some(nodes);
            }
            Some("a") => {
                let n = n.ok_or_else(|| Error::parse(line, "arc before problem line"))?;
                let u = parse_id(toks.next(), n, line)?;
                let v = parse_id(toks.next(), n, line)?;
                let w = parse_real(toks.next(), "weight", line)?;
                if w < 0.0 {
                    return Err(Error::parse(line, format!("negative weight {w}")));
                }
                arcs.push((u, v, w));
            }
            Some(other) => {
                return Err(Error::parse(line, format!("unknown line type `{other}`")));
            }
        }
    }
    let n = n.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing problem line"))?;
    Ok(Arcs { n, arcs })
}

fn parse_coords(text: &str, n: usize) -> Result<Vec<Point>> {
    let mut coords: Vec<Option<Point>> = vec![None; n];
    let mut header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                let rest: Vec<&str> = toks.collect();
                let ["aux", "sp", "co", count] = rest[..] else {
                    return Err(Error::parse(
                        line,
                        "malformed header, expected `p aux sp co <n>`",
                    ));
                };
                let count: usize = count
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad node count `{count}`")))?;
                if count != n {
                    return Err(Error::parse(
                        line,
                        format!("coordinate file has {count} nodes, graph has {n}"),
                    ));
                }
                header = true;
            }
            Some("v") => {
                if !header {
                    return Err(Error::parse(line, "coordinate before problem line"));
                }
                let id = parse_id(toks.next(), n, line)?;
                let x = parse_real(toks.next(), "x coordinate", line)?;
                let y = parse_real(toks.next(), "y coordinate", line)?;
                coords[id as usize] = Some(Point::new(x, y));
            }
            Some(other) => {
                return Err(Error::parse(line, format!("unknown line type `{other}`")));
            }
        }
    }
    coords
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            p.ok_or_else(|| Error::InvalidGraph(format!("node {} has no coordinates", i + 1)))
        })
        .collect()
}

/// Parses a `.gr` file (and optional `.co` file) as an undirected graph.
/// Every arc becomes an undirected edge; parallel arcs in either direction
/// collapse to the minimum weight.
pub fn parse_dimacs(gr: &str, co: Option<&str>) -> Result<Graph> {
    let Arcs { n, arcs } = parse_arcs(gr)?;
    let g = Graph::undirected(n, &arcs)?;
    attach(g, co)
}

/// Parses a `.gr` file as a directed graph, keeping arc orientation.
pub fn parse_dimacs_directed(gr: &str, co: Option<&str>) -> Result<Graph> {
    let Arcs { n, arcs } = parse_arcs(gr)?;
    let g = Graph::directed(n, &arcs)?;
    attach(g, co)
}

fn attach(g: Graph, co: Option<&str>) -> Result<Graph> {
    match co {
        Some(text) => {
            let coords = parse_coords(text, g.node_count())?;
            g.with_coords(coords)
        }
        None => Ok(g),
    }
}

/// Writes the graph in `.gr` format. Undirected edges are written as two arcs.
pub fn write_gr(g: &Graph) -> String {
    let arcs = g.out_adjacency().arc_count();
    let mut out = String::with_capacity(arcs * 16 + 32);
    let _ = writeln!(out, "p sp {} {}", g.node_count(), arcs);
    for u in 0..g.node_count() as u32 {
        for (v, w) in g.neighbors(u) {
            let _ = writeln!(out, "a {} {} {}", u + 1, v + 1, w);
        }
    }
    out
}

/// Writes coordinates in `.co` format, if the graph has any.
pub fn write_co(g: &Graph) -> Option<String> {
    let coords = g.coords()?;
    let mut out = String::with_capacity(coords.len() * 24 + 32);
    let _ = writeln!(out, "p aux sp co {}", coords.len());
    for (i, p) in coords.iter().enumerate() {
        let _ = writeln!(out, "v {} {} {}", i + 1, p.x, p.y);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_file() {
        let g = parse_dimacs("p sp 2 1\na 1 2 5\n", None).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 5.0)]);
    }

    #[test]
    fn out_of_range_id_names_line() {
        let err = parse_dimacs("c comment\np sp 2 1\na 1 3 5\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn negative_weight_and_bad_header() {
        assert!(matches!(
            parse_dimacs("p sp 2 1\na 1 2 -1\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("p sp x 1\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p max 2 1\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("a 1 2 3\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_dimacs("c nothing\n", None).is_err());
    }

    #[test]
    fn both_directions_collapse_to_minimum() {
        let g = parse_dimacs("p sp 3 4\na 1 2 7\na 2 1 4\na 2 3 2.5\na 2 3 9\n", None).unwrap();
        assert!(!g.is_directed());
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1, 4.0), (1, 2, 2.5)]
        );
    }

    #[test]
    fn directed_keeps_orientation() {
        let g = parse_dimacs_directed("p sp 2 2\na 1 2 7\na 2 1 4\n", None).unwrap();
        assert!(g.is_directed());
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1, 7.0), (1, 0, 4.0)]
        );
    }

    #[test]
    fn coordinates() {
        let g = parse_dimacs(
            "p sp 2 1\na 1 2 5\n",
            Some("c co\np aux sp co 2\nv 2 10 -3\nv 1 0.5 7\n"),
        )
        .unwrap();
        assert_eq!(
            g.coords().unwrap(),
            &[Point::new(0.5, 7.0), Point::new(10.0, -3.0)]
        );
        assert!(parse_dimacs("p sp 2 1\na 1 2 5\n", Some("p aux sp co 2\nv 1 0 0\n")).is_err());
        assert!(matches!(
            parse_dimacs("p sp 2 1\na 1 2 5\n", Some("p aux sp co 3\n")),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    fn edge_multiset(g: &Graph) -> Vec<(u32, u32, u64)> {
        let mut e: Vec<_> = g.edges().map(|(u, v, w)| (u, v, w.to_bits())).collect();
        e.sort_unstable();
        e
    }

    proptest! {
        #[test]
        fn parse_write_parse_is_fixed_point(
            n in 1usize..30,
            raw in prop::collection::vec((0u32..30, 0u32..30, 0u32..1000), 0..80),
            directed in any::<bool>(),
        ) {
            let mut text = format!("p sp {n} {}\n", raw.len());
            for (u, v, w) in &raw {
                let (u, v) = (u % n as u32 + 1, v % n as u32 + 1);
                text.push_str(&format!("a {u} {v} {}\n", *w as f64 / 8.0));
            }
            let coords: String = (1..=n).map(|i| format!("v {i} {} {}\n", i * 3, i % 7)).collect();
            let co = format!("p aux sp co {n}\n{coords}");
            let parse = if directed { parse_dimacs_directed } else { parse_dimacs };
            let g1 = parse(&text, Some(&co)).unwrap();
            let g2 = parse(&write_gr(&g1), write_co(&g1).as_deref()).unwrap();
            prop_assert_eq!(g1.node_count(), g2.node_count());
            prop_assert_eq!(edge_multiset(&g1), edge_multiset(&g2));
            prop_assert_eq!(g1.coords(), g2.coords());
        }
    }
}

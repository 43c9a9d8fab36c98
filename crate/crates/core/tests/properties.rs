mod common;

use common::{bellman_ford, nearest_in};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepnn_core::generators::{dyadic_weight, random_grid, random_strongly_connected, random_tree};
use sepnn_core::{
    dijkstra, nearest_by_dijkstra, BuildOptions, Centroid, Graph, Hierarchy, MedianLine, NodeId,
    Point, ReactiveNn, SeparatorStrategy, SiteSet,
};

fn random_graph(n: usize, m: usize, directed: bool, seed: u64) -> Graph {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(NodeId, NodeId, f64)> = (0..m)
        .map(|_| {
            let u = r.gen_range(0..n) as NodeId;
            let v = r.gen_range(0..n) as NodeId;
            // zero weights are legal and exercise tie handling
            let w = if r.gen_bool(0.05) {
                0.0
            } else {
                dyadic_weight(&mut r)
            };
            (u, v, w)
        })
        .collect();
    let coords = (0..n)
        .map(|_| Point::new(r.gen_range(0.0..100.0), r.gen_range(0.0..100.0)))
        .collect();
    let g = if directed {
        Graph::directed(n, &edges)
    } else {
        Graph::undirected(n, &edges)
    };
    g.unwrap().with_coords(coords).unwrap()
}

/// Runs `ops` random operations, checking every answer of both query modes
/// against a fresh Bellman-Ford oracle.
fn check_against_oracle(
    g: &Graph,
    strategy: &dyn SeparatorStrategy,
    base: usize,
    ops: usize,
    seed: u64,
) {
    let n = g.node_count();
    let h = Hierarchy::build(
        g,
        strategy,
        BuildOptions {
            base_case_size: base,
            mem_cap: None,
        },
    )
    .unwrap();
    let oracle: Vec<Vec<f64>> = (0..n as NodeId).map(|q| bellman_ford(g, q)).collect();
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = SiteSet::new(n);
    let mut nn = ReactiveNn::new(&h, []).unwrap();
    for _ in 0..ops {
        let v = r.gen_range(0..n) as NodeId;
        match r.gen_range(0..3) {
            0 => assert_eq!(nn.enable(v).unwrap(), sites.insert(v)),
            1 => assert_eq!(nn.disable(v).unwrap(), sites.remove(v)),
            _ => {
                let expect = nearest_in(&oracle[v as usize], sites.iter());
                for optimized in [false, true] {
                    let got = nn.nearest(v, optimized).unwrap().map(|a| (a.site, a.dist));
                    assert_eq!(got, expect, "query {v} optimized={optimized}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dijkstra_equals_bellman_ford(n in 1usize..120, density in 0usize..4, directed: bool, seed: u64) {
        let g = random_graph(n, n * density, directed, seed);
        for s in [0, (n / 2) as NodeId, (n - 1) as NodeId] {
            let d = dijkstra(&g, s, None).unwrap();
            let bf = bellman_ford(&g, s);
            for v in 0..n as NodeId {
                prop_assert_eq!(d.get(v), bf[v as usize]);
                // edge relaxation holds at every arc
                for (w, len) in g.neighbors(v) {
                    prop_assert!(d.get(w) <= d.get(v) + len);
                }
            }
        }
    }

    #[test]
    fn nearest_by_dijkstra_is_min_over_sites(n in 1usize..80, seed: u64, mask: u64) {
        let g = random_graph(n, 2 * n, false, seed);
        let sites = SiteSet::from_nodes(n, (0..n as NodeId).filter(|v| mask >> (v % 64) & 1 == 1));
        for q in 0..n as NodeId {
            let expect = nearest_in(&bellman_ford(&g, q), sites.iter());
            let got = nearest_by_dijkstra(&g, q, &sites).unwrap().map(|a| (a.site, a.dist));
            prop_assert_eq!(got, expect);
        }
    }

    #[test]
    fn reactive_matches_oracle_on_random_graphs(n in 1usize..70, density in 0usize..3, base in 1usize..8, seed: u64) {
        // sparse random graphs are typically disconnected
        let g = random_graph(n, n * density, false, seed);
        check_against_oracle(&g, &MedianLine, base, 300, seed);
    }

    #[test]
    fn reactive_matches_oracle_on_directed_graphs(n in 2usize..120, extra in 0usize..200, base in 1usize..10, seed: u64) {
        let g = random_strongly_connected(n, extra, seed);
        check_against_oracle(&g, &MedianLine, base, 300, seed);
    }

    #[test]
    fn reactive_matches_oracle_on_trees(n in 1usize..150, base in 1usize..6, seed: u64) {
        let g = random_tree(n, seed, dyadic_weight);
        check_against_oracle(&g, &Centroid, base, 300, seed);
    }

    #[test]
    fn reversibility(cols in 2usize..16, rows in 2usize..16, seed: u64) {
        let g = random_grid(cols, rows, seed);
        let n = g.node_count();
        let h = Hierarchy::build(&g, &MedianLine, BuildOptions::default()).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut nn = ReactiveNn::new(&h, (0..n as NodeId).filter(|_| r.gen_bool(0.2))).unwrap();
        let before: Vec<_> = (0..n as NodeId).map(|q| nn.nearest(q, true).unwrap()).collect();
        for _ in 0..200 {
            let v = r.gen_range(0..n) as NodeId;
            if nn.is_enabled(v) {
                prop_assert!(nn.disable(v).unwrap());
                prop_assert!(nn.enable(v).unwrap());
            } else {
                prop_assert!(nn.enable(v).unwrap());
                prop_assert!(nn.disable(v).unwrap());
            }
        }
        let after: Vec<_> = (0..n as NodeId).map(|q| nn.nearest(q, true).unwrap()).collect();
        prop_assert_eq!(before, after);
    }
}

#[test]
fn optimized_and_unoptimized_agree_on_1000_instances() {
    for seed in 0..1000u64 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = match seed % 3 {
            0 => random_grid(r.gen_range(2..12), r.gen_range(2..12), seed),
            1 => random_tree(r.gen_range(1..120), seed, dyadic_weight),
            _ => random_strongly_connected(r.gen_range(2..80), r.gen_range(0..100), seed),
        };
        let n = g.node_count();
        let strategy: &dyn SeparatorStrategy = if seed % 3 == 1 {
            &Centroid
        } else {
            &MedianLine
        };
        let base = r.gen_range(1..10);
        let h = Hierarchy::build(
            &g,
            strategy,
            BuildOptions {
                base_case_size: base,
                mem_cap: None,
            },
        )
        .unwrap();
        let density = r.gen_range(0.0..0.5);
        let nn = ReactiveNn::new(&h, (0..n as NodeId).filter(|_| r.gen_bool(density))).unwrap();
        for q in 0..n as NodeId {
            assert_eq!(
                nn.nearest(q, true).unwrap(),
                nn.nearest(q, false).unwrap(),
                "seed {seed} q {q}"
            );
        }
    }
}

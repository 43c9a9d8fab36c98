//! Fixtures shared by the criterion benchmarks.

use sepnn_core::generators::random_grid;
use sepnn_core::{
    generate_workload, BuildOptions, Graph, Hierarchy, MedianLine, NodeId, WorkloadKind,
    WorkloadSpec,
};

/// Random-weight `side` x `side` grid with its default hierarchy.
pub fn grid_with_hierarchy(side: usize) -> (Graph, Hierarchy) {
    let g = random_grid(side, side, side as u64);
    let h = Hierarchy::build(&g, &MedianLine, BuildOptions::default()).expect("grid hierarchy");
    (g, h)
}

/// `count` distinct seeded random nodes.
pub fn random_sites(n: usize, count: usize, seed: u64) -> Vec<NodeId> {
    let spec = WorkloadSpec {
        kind: WorkloadKind::Queries,
        op_count: 1,
        site_counts: vec![count],
        runs: 1,
        seed,
    };
    generate_workload(&spec, n, count, 0)
        .expect("count <= n")
        .initial_sites
}

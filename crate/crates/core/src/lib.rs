//! Reactive nearest-neighbor queries on road-like graphs.
//!
//! A [`Hierarchy`] recursively splits a graph with small vertex separators and
//! stores, for every node, distances to the separators along its chain of
//! ancestors. [`ReactiveNn`] keeps one priority queue per separator node so
//! that sites can be enabled and disabled cheaply while nearest-site queries
//! only scan a node's chain.

pub mod dijkstra;
pub mod dimacs;
pub mod error;
pub mod generators;
pub mod graph;
pub mod hierarchy;
pub mod matching;
pub mod pq;
pub mod reactive;
pub mod separator;
pub mod workload;

pub use dijkstra::{
    dijkstra, dijkstra_reverse, nearest_by_dijkstra, DijkstraWorkspace, DistanceArray,
};
pub use dimacs::{parse_dimacs, parse_dimacs_directed, write_co, write_gr};
pub use error::{Error, Result};
pub use graph::{largest_connected_component, Component, Graph, NodeId, Point, SubgraphView};
pub use hierarchy::{
    depth_bound, memory_estimate, BuildOptions, HNodeId, Hierarchy, HierarchyNode, HierarchyStats,
    DEFAULT_BASE_CASE,
};
pub use matching::{
    greedy_stable_matching, greedy_stable_matching_counted, verify_stability, ChainStats, Matching,
};
pub use reactive::{NnAnswer, ReactiveNn, SiteSet};
pub use separator::{
    balance_limit, centroid_separator, median_line_separator, validate_separation, Centroid,
    MedianLine, Separation, SeparatorStrategy, Violation,
};
pub use workload::{
    generate_workload, run_benchmark, EngineKind, NnEngine, Op, ReportRow, Workload, WorkloadKind,
    WorkloadReport, WorkloadSpec,
};

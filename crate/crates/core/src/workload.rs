//! Seeded workloads and the timing harness comparing the separator
//! structure against a plain Dijkstra baseline.
//!
//! Workloads are drawn from ChaCha8 streams: the stream for a
//! `(site_count, run)` cell is `seed` with stream id
//! `(site_count << 32) | run`, so every engine replays identical site sets
//! and operation lists.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dijkstra::DijkstraWorkspace;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NONE};
use crate::hierarchy::Hierarchy;
use crate::reactive::{NnAnswer, ReactiveNn, SiteSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WorkloadKind {
    Queries,
    Updates,
    Mixed,
}

impl FromStr for WorkloadKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "queries" => Ok(WorkloadKind::Queries),
            "updates" => Ok(WorkloadKind::Updates),
            "mixed" => Ok(WorkloadKind::Mixed),
            _ => Err(Error::Config(format!("unknown workload kind `{s}`"))),
        }
    }
}

impl fmt::Display for WorkloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkloadKind::Queries => "queries",
            WorkloadKind::Updates => "updates",
            WorkloadKind::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    pub op_count: usize,
    pub site_counts: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.op_count == 0 {
            return Err(Error::Config("operation count must be positive".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("run count must be positive".into()));
        }
        if self.site_counts.is_empty() {
            return Err(Error::Config("no site counts given".into()));
        }
        if let Some(&k) = self.site_counts.iter().find(|&&k| k > n) {
            return Err(Error::Config(format!("site count {k} exceeds {n} nodes")));
        }
        if n == 0 {
            return Err(Error::Config("graph has no nodes".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Query(NodeId),
    Enable(NodeId),
    Disable(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Workload {
    pub initial_sites: Vec<NodeId>,
    pub ops: Vec<Op>,
}

/// Enabled set with O(1) uniform sampling.
struct Sampler {
    list: Vec<NodeId>,
    pos: Vec<u32>,
}

impl Sampler {
    fn insert(&mut self, v: NodeId) {
        self.pos[v as usize] = self.list.len() as u32;
        self.list.push(v);
    }

    fn remove(&mut self, v: NodeId) {
        let i = self.pos[v as usize] as usize;
        self.pos[v as usize] = NONE;
        self.list.swap_remove(i);
        if let Some(&moved) = self.list.get(i) {
            self.pos[moved as usize] = i as u32;
        }
    }

    fn contains(&self, v: NodeId) -> bool {
        self.pos[v as usize] != NONE
    }
}

/// Generates the workload of one `(site_count, run)` cell.
///
/// Initial sites are distinct uniform nodes; queries target uniform nodes;
/// enables pick a uniform disabled node and disables a uniform enabled site.
/// Updates alternate enable/disable starting with enable; mixed workloads
/// alternate query/update. An enable with every node enabled (or a disable
/// with none) targets a uniform node and is a no-op.
pub fn generate_workload(
    spec: &WorkloadSpec,
    n: usize,
    site_count: usize,
    run: usize,
) -> Result<Workload> {
    if site_count > n {
        return Err(Error::Config(format!(
            "site count {site_count} exceeds {n} nodes"
        )));
    }
    if n == 0 {
        return Err(Error::Config("graph has no nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(((site_count as u64) << 32) | run as u64);

    let initial_sites: Vec<NodeId> = index::sample(&mut rng, n, site_count)
        .into_iter()
        .map(|v| v as NodeId)
        .collect();
    let mut live = Sampler {
        list: Vec::with_capacity(n),
        pos: vec![NONE; n],
    };
    for &v in &initial_sites {
        live.insert(v);
    }

    let mut ops = Vec::with_capacity(spec.op_count);
    let mut updates = 0usize;
    for i in 0..spec.op_count {
        let is_query = match spec.kind {
            WorkloadKind::Queries => true,
            WorkloadKind::Updates => false,
            WorkloadKind::Mixed => i % 2 == 0,
        };
        if is_query {
            ops.push(Op::Query(rng.gen_range(0..n) as NodeId));
            continue;
        }
        let enable = updates.is_multiple_of(2);
        updates += 1;
        let op = if enable {
            if live.list.len() == n {
                Op::Enable(rng.gen_range(0..n) as NodeId)
            } else {
                let v = loop {
                    let v = rng.gen_range(0..n) as NodeId;
                    if !live.contains(v) {
                        break v;
                    }
                };
                live.insert(v);
                Op::Enable(v)
            }
        } else if live.list.is_empty() {
            Op::Disable(rng.gen_range(0..n) as NodeId)
        } else {
            let v = live.list[rng.gen_range(0..live.list.len())];
            live.remove(v);
            Op::Disable(v)
        };
        ops.push(op);
    }
    Ok(Workload { initial_sites, ops })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    DijkstraBaseline,
    Separator,
    SeparatorOptimized,
}

impl EngineKind {
    pub const ALL: [EngineKind; 3] = [
        EngineKind::DijkstraBaseline,
        EngineKind::Separator,
        EngineKind::SeparatorOptimized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::DijkstraBaseline => "dijkstra-baseline",
            EngineKind::Separator => "separator",
            EngineKind::SeparatorOptimized => "separator-optimized",
        }
    }

    pub fn needs_hierarchy(self) -> bool {
        self != EngineKind::DijkstraBaseline
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EngineKind::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown engine `{s}`")))
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Anything that answers nearest-site queries under enable/disable updates.
pub trait NnEngine {
    fn load_sites(&mut self, sites: &[NodeId]) -> Result<()>;
    fn enable(&mut self, v: NodeId) -> Result<bool>;
    fn disable(&mut self, v: NodeId) -> Result<bool>;
    fn nearest(&mut self, q: NodeId) -> Result<Option<NnAnswer>>;
}

/// Answers every query with a fresh early-exit Dijkstra search; updates only
/// flip membership flags.
pub struct DijkstraBaseline<'g> {
    graph: &'g Graph,
    sites: SiteSet,
    workspace: DijkstraWorkspace,
}

impl<'g> DijkstraBaseline<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        DijkstraBaseline {
            graph,
            sites: SiteSet::new(graph.node_count()),
            workspace: DijkstraWorkspace::new(graph.node_count()),
        }
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if self.graph.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }
}

impl NnEngine for DijkstraBaseline<'_> {
    fn load_sites(&mut self, sites: &[NodeId]) -> Result<()> {
        self.sites.clear();
        for &v in sites {
            self.check(v)?;
            self.sites.insert(v);
        }
        Ok(())
    }

    fn enable(&mut self, v: NodeId) -> Result<bool> {
        self.check(v)?;
        Ok(self.sites.insert(v))
    }

    fn disable(&mut self, v: NodeId) -> Result<bool> {
        self.check(v)?;
        Ok(self.sites.remove(v))
    }

    fn nearest(&mut self, q: NodeId) -> Result<Option<NnAnswer>> {
        self.check(q)?;
        Ok(self.workspace.nearest(self.graph, q, &self.sites))
    }
}

/// The separator-hierarchy structure, with or without the sorted-separator
/// early exit.
pub struct SeparatorEngine<'h> {
    nn: ReactiveNn<'h>,
    optimized: bool,
}

impl<'h> SeparatorEngine<'h> {
    pub fn new(hierarchy: &'h Hierarchy, optimized: bool) -> Result<Self> {
        Ok(SeparatorEngine {
            nn: ReactiveNn::new(hierarchy, [])?,
            optimized,
        })
    }
}

impl NnEngine for SeparatorEngine<'_> {
    fn load_sites(&mut self, sites: &[NodeId]) -> Result<()> {
        self.nn.reset(sites.iter().copied())
    }

    fn enable(&mut self, v: NodeId) -> Result<bool> {
        self.nn.enable(v)
    }

    fn disable(&mut self, v: NodeId) -> Result<bool> {
        self.nn.disable(v)
    }

    fn nearest(&mut self, q: NodeId) -> Result<Option<NnAnswer>> {
        self.nn.nearest(q, self.optimized)
    }
}

/// FNV-1a over the query answers, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checksum(u64);

impl Default for Checksum {
    fn default() -> Self {
        Checksum(0xcbf2_9ce4_8422_2325)
    }
}

impl Checksum {
    fn bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn add(&mut self, answer: Option<NnAnswer>) {
        match answer {
            None => self.bytes(&[0]),
            Some(a) => {
                self.bytes(&[1]);
                self.bytes(&a.site.to_le_bytes());
                self.bytes(&a.dist.to_bits().to_le_bytes());
            }
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

/// Runs one workload on `engine`, timing only the operation loop.
/// Returns elapsed milliseconds and the query answers in order.
pub fn time_workload(
    engine: &mut dyn NnEngine,
    w: &Workload,
) -> Result<(f64, Vec<Option<NnAnswer>>)> {
    engine.load_sites(&w.initial_sites)?;
    let mut answers = Vec::with_capacity(w.ops.len());
    let start = Instant::now();
    for &op in &w.ops {
        match op {
            Op::Query(q) => answers.push(engine.nearest(q)?),
            Op::Enable(v) => {
                engine.enable(v)?;
            }
            Op::Disable(v) => {
                engine.disable(v)?;
            }
        }
    }
    let ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((ms, answers))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub site_count: usize,
    pub engine: EngineKind,
    pub avg_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub checksum: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WorkloadReport {
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: [&str; 6] = [
    "site_count",
    "engine",
    "avg_ms",
    "min_ms",
    "max_ms",
    "checksum",
];

impl WorkloadReport {
    pub fn row(&self, site_count: usize, engine: EngineKind) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.site_count == site_count && r.engine == engine)
    }

    /// True when all engines produced the same answers for every site count.
    pub fn checksums_agree(&self) -> bool {
        self.rows.iter().all(|r| {
            self.rows
                .iter()
                .filter(|o| o.site_count == r.site_count)
                .all(|o| o.checksum == r.checksum)
        })
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.site_count.to_string(),
                r.engine.name().to_string(),
                format!("{:.3}", r.avg_ms),
                format!("{:.3}", r.min_ms),
                format!("{:.3}", r.max_ms),
                format!("{:016x}", r.checksum),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Times every engine on every `(site_count, run)` cell. Each engine sees
/// the same site sets and operation lists.
pub fn run_benchmark(
    graph: &Graph,
    hierarchy: Option<&Hierarchy>,
    spec: &WorkloadSpec,
    engines: &[EngineKind],
) -> Result<WorkloadReport> {
    let n = graph.node_count();
    spec.validate(n)?;
    if engines.is_empty() {
        return Err(Error::Config("no engines selected".into()));
    }
    let mut instances: Vec<(EngineKind, Box<dyn NnEngine + '_>)> = Vec::new();
    for &kind in engines {
        let engine: Box<dyn NnEngine> = match kind {
            EngineKind::DijkstraBaseline => Box::new(DijkstraBaseline::new(graph)),
            EngineKind::Separator | EngineKind::SeparatorOptimized => {
                let h = hierarchy.ok_or_else(|| {
                    Error::Config(format!(
                        "engine `{kind}` needs a hierarchy; run `build` first"
                    ))
                })?;
                if h.graph().node_count() != n {
                    return Err(Error::Config(
                        "hierarchy was built for a different graph".into(),
                    ));
                }
                Box::new(SeparatorEngine::new(
                    h,
                    kind == EngineKind::SeparatorOptimized,
                )?)
            }
        };
        instances.push((kind, engine));
    }

    let mut report = WorkloadReport::default();
    for &site_count in &spec.site_counts {
        let workloads = (0..spec.runs)
            .map(|run| generate_workload(spec, n, site_count, run))
            .collect::<Result<Vec<_>>>()?;
        for (kind, engine) in &mut instances {
            let mut times = Vec::with_capacity(spec.runs);
            let mut sum = Checksum::default();
            for w in &workloads {
                let (ms, answers) = time_workload(engine.as_mut(), w)?;
                times.push(ms);
                answers.into_iter().for_each(|a| sum.add(a));
            }
            report.rows.push(ReportRow {
                site_count,
                engine: *kind,
                avg_ms: times.iter().sum::<f64>() / times.len() as f64,
                min_ms: times.iter().copied().fold(f64::INFINITY, f64::min),
                max_ms: times.iter().copied().fold(0.0, f64::max),
                checksum: sum.value(),
            });
        }
    }
    Ok(report)
}

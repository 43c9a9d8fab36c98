use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sepnn_core::hierarchy::MAGIC;
use sepnn_core::{
    generate_workload, greedy_stable_matching, largest_connected_component, parse_dimacs,
    run_benchmark, verify_stability, BuildOptions, Centroid, EngineKind, Graph, Hierarchy,
    MedianLine, ReactiveNn, SeparatorStrategy, WorkloadKind, WorkloadSpec, DEFAULT_BASE_CASE,
};

/// Reactive nearest-neighbor queries on road networks.
#[derive(Parser)]
#[command(name = "sepnn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a separator hierarchy for the largest component of a network.
    Build {
        /// DIMACS arc file (.gr)
        gr: PathBuf,
        /// DIMACS coordinate file (.co)
        co: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BASE_CASE)]
        base_case: usize,
        #[arg(long, value_enum, default_value_t = Strategy::Median)]
        strategy: Strategy,
        /// Refuse to build if the memory estimate exceeds this many bytes
        #[arg(long)]
        mem_cap: Option<u64>,
    },
    /// Time the engines on seeded workloads and write CSV.
    Bench {
        /// DIMACS arc file (.gr)
        gr: PathBuf,
        /// Coordinate file, or a hierarchy written by `build`
        source: PathBuf,
        /// queries, updates or mixed
        #[arg(long, default_value = "mixed")]
        kind: WorkloadKind,
        #[arg(long, default_value_t = 1000)]
        ops: usize,
        /// Comma-separated site counts; `2,4,...,16384` extends a geometric
        /// progression
        #[arg(long, default_value = "2,4,...,16384", value_parser = parse_counts)]
        sites: SiteCounts,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated subset of dijkstra-baseline, separator,
        /// separator-optimized
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "dijkstra-baseline,separator,separator-optimized"
        )]
        engines: Vec<EngineKind>,
        /// Output file; standard output if omitted
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Greedy stable matching of random sites, verified for blocking pairs.
    Match {
        /// DIMACS arc file (.gr)
        gr: PathBuf,
        /// Coordinate file, or a hierarchy written by `build`
        source: PathBuf,
        #[arg(long)]
        sites: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print hierarchy totals.
    Stats { hier: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Median,
    Centroid,
}

impl Strategy {
    fn get(self) -> &'static dyn SeparatorStrategy {
        match self {
            Strategy::Median => &MedianLine,
            Strategy::Centroid => &Centroid,
        }
    }
}

#[derive(Clone, Debug)]
struct SiteCounts(Vec<usize>);

fn parse_counts(s: &str) -> Result<SiteCounts, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| usize::from_str(p).map_err(|_| format!("bad site count `{p}`"));
    let Some(dots) = parts.iter().position(|&p| p == "...") else {
        return parts
            .iter()
            .map(|p| num(p))
            .collect::<Result<_, _>>()
            .map(SiteCounts);
    };
    if dots < 2 || dots + 2 != parts.len() {
        return Err("`...` needs two leading terms and one final term".into());
    }
    let mut out: Vec<usize> = parts[..dots]
        .iter()
        .map(|p| num(p))
        .collect::<Result<_, _>>()?;
    let last = num(parts[dots + 1])?;
    let (a, b) = (out[dots - 2], out[dots - 1]);
    if a == 0 || b <= a || b % a != 0 {
        return Err(format!(
            "`{a},{b},...` is not an increasing geometric progression"
        ));
    }
    let mut next = b * (b / a);
    while next <= last {
        out.push(next);
        next *= b / a;
    }
    if out.last() != Some(&last) {
        return Err(format!("{last} is not a term of the progression"));
    }
    Ok(SiteCounts(out))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn is_hierarchy_file(path: &Path) -> Result<bool> {
    let mut head = [0u8; 8];
    let mut f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let n = f.read(&mut head)?;
    Ok(n == 8 && &head == MAGIC)
}

fn load_network(gr: &Path, co: &Path) -> Result<Graph> {
    let g = parse_dimacs(&read(gr)?, Some(&read(co)?))
        .with_context(|| format!("parsing {}", gr.display()))?;
    let lcc = largest_connected_component(&g);
    if lcc.graph.node_count() < g.node_count() {
        eprintln!(
            "using largest component: {} of {} nodes",
            lcc.graph.node_count(),
            g.node_count()
        );
    }
    Ok(lcc.graph)
}

fn load_hierarchy(path: &Path) -> Result<Hierarchy> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Hierarchy::read_from(BufReader::new(f)).with_context(|| format!("loading {}", path.display()))
}

/// Checks that a stored hierarchy belongs to the network in `gr`.
fn check_matches(gr: &Path, h: &Hierarchy) -> Result<()> {
    let g = parse_dimacs(&read(gr)?, None).with_context(|| format!("parsing {}", gr.display()))?;
    let lcc = largest_connected_component(&g);
    ensure!(
        lcc.graph.node_count() == h.graph().node_count() && lcc.graph.edge_count() == h.graph().edge_count(),
        "hierarchy was built for a different network ({} nodes, {} edges) than {} ({} nodes, {} edges)",
        h.graph().node_count(),
        h.graph().edge_count(),
        gr.display(),
        lcc.graph.node_count(),
        lcc.graph.edge_count()
    );
    Ok(())
}

/// A network with its hierarchy, either loaded or built on demand.
enum Network {
    Stored(Hierarchy),
    Fresh(Graph, Option<Hierarchy>),
}

impl Network {
    fn open(gr: &Path, source: &Path, need_hierarchy: bool) -> Result<Network> {
        if is_hierarchy_file(source)? {
            let h = load_hierarchy(source)?;
            check_matches(gr, &h)?;
            return Ok(Network::Stored(h));
        }
        let g = load_network(gr, source)?;
        let h = if need_hierarchy {
            Some(Hierarchy::build(&g, &MedianLine, BuildOptions::default())?)
        } else {
            None
        };
        Ok(Network::Fresh(g, h))
    }

    fn graph(&self) -> &Graph {
        match self {
            Network::Stored(h) => h.graph(),
            Network::Fresh(g, _) => g,
        }
    }

    fn hierarchy(&self) -> Option<&Hierarchy> {
        match self {
            Network::Stored(h) => Some(h),
            Network::Fresh(_, h) => h.as_ref(),
        }
    }
}

fn build(
    gr: &Path,
    co: &Path,
    out: &Path,
    base_case: usize,
    strategy: Strategy,
    mem_cap: Option<u64>,
) -> Result<()> {
    let g = load_network(gr, co)?;
    let start = Instant::now();
    let h = Hierarchy::build(
        &g,
        strategy.get(),
        BuildOptions {
            base_case_size: base_case,
            mem_cap,
        },
    )?;
    let st = h.stats();
    let f = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = BufWriter::new(f);
    h.write_to(&mut w)?;
    w.flush()?;
    println!(
        "built {} graphs, {} nodes total, depth {}, max separator {} in {:.1}s",
        st.graph_count,
        st.total_nodes,
        st.depth,
        st.max_separator,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    gr: &Path,
    source: &Path,
    kind: WorkloadKind,
    ops: usize,
    sites: SiteCounts,
    runs: usize,
    seed: u64,
    engines: Vec<EngineKind>,
    csv: Option<&Path>,
) -> Result<()> {
    let need = engines.iter().any(|e| e.needs_hierarchy());
    let net = Network::open(gr, source, need)?;
    let spec = WorkloadSpec {
        kind,
        op_count: ops,
        site_counts: sites.0,
        runs,
        seed,
    };
    let report = run_benchmark(net.graph(), net.hierarchy(), &spec, &engines)?;
    if !report.checksums_agree() {
        bail!("engines disagree on query answers");
    }
    match csv {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report.write_csv(BufWriter::new(f))?;
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn matching(gr: &Path, source: &Path, sites: usize, seed: u64) -> Result<()> {
    let net = Network::open(gr, source, true)?;
    let (g, h) = (net.graph(), net.hierarchy().expect("hierarchy requested"));
    let spec = WorkloadSpec {
        kind: WorkloadKind::Queries,
        op_count: 1,
        site_counts: vec![sites],
        runs: 1,
        seed,
    };
    let chosen = generate_workload(&spec, g.node_count(), sites, 0)?.initial_sites;
    let mut nn = ReactiveNn::new(h, chosen.iter().copied())?;
    let m = greedy_stable_matching(&mut nn, &chosen)?;
    let blocking = verify_stability(g, &m)?;
    for &(a, b) in &m.pairs {
        println!("{a} {b}");
    }
    println!(
        "{} pairs, unmatched {}, {} blocking pairs",
        m.pairs.len(),
        m.unmatched.map_or("none".to_string(), |v| v.to_string()),
        blocking.len()
    );
    ensure!(
        blocking.is_empty(),
        "matching is not stable: blocking pair {:?}",
        blocking[0]
    );
    Ok(())
}

fn stats(path: &Path) -> Result<()> {
    let h = load_hierarchy(path)?;
    let st = h.stats();
    println!("nodes: {}", h.graph().node_count());
    println!("edges: {}", h.graph().edge_count());
    println!("strategy: {}", h.strategy_name());
    println!("base case: {}", h.base_case_size());
    println!("graphs: {}", st.graph_count);
    println!("total nodes: {}", st.total_nodes);
    println!("depth: {}", st.depth);
    println!("max separator: {}", st.max_separator);
    println!("base leaves: {}", st.base_leaves);
    println!("table entries: {}", st.table_entries);
    println!("memory estimate: {} bytes", h.memory_estimate());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            gr,
            co,
            out,
            base_case,
            strategy,
            mem_cap,
        } => build(&gr, &co, &out, base_case, strategy, mem_cap),
        Command::Bench {
            gr,
            source,
            kind,
            ops,
            sites,
            runs,
            seed,
            engines,
            csv,
        } => bench(
            &gr,
            &source,
            kind,
            ops,
            sites,
            runs,
            seed,
            engines,
            csv.as_deref(),
        ),
        Command::Match {
            gr,
            source,
            sites,
            seed,
        } => matching(&gr, &source, sites, seed),
        Command::Stats { hier } => stats(&hier),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

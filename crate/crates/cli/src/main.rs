//! Command-line runner: load or generate a graph, run one algorithm variant,
//! write the per-vertex result dump and the run report.

mod genspec;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};
use pregel_channels::algorithms::*;
use pregel_channels::engine::RunReport;
use pregel_channels::graph::{load_edge_list, load_partition_map, Directedness, Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Pagerank,
    #[value(alias = "pointer-jumping")]
    Pj,
    Wcc,
    Sv,
    Scc,
    Msf,
}

impl Algo {
    fn variants(self) -> Vec<&'static str> {
        match self {
            Algo::Pagerank => PageRankVariant::ALL.iter().map(|v| v.name()).collect(),
            Algo::Pj => PointerJumpingVariant::ALL.iter().map(|v| v.name()).collect(),
            Algo::Wcc => WccVariant::ALL.iter().map(|v| v.name()).collect(),
            Algo::Sv => SvVariant::ALL.iter().map(|v| v.name()).collect(),
            Algo::Scc => SccVariant::ALL.iter().map(|v| v.name()).collect(),
            Algo::Msf => MsfVariant::ALL.iter().map(|v| v.name()).collect(),
        }
    }

    fn directed(self) -> bool {
        !matches!(self, Algo::Sv | Algo::Msf)
    }

    fn weighted(self) -> bool {
        self == Algo::Msf
    }
}

#[derive(Debug, Parser)]
#[command(name = "pregel-channels", version, about = "Run a channel-based vertex program on a graph")]
struct Cli {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Channel variant; defaults to the algorithm's first (plainest) variant.
    #[arg(long)]
    variant: Option<String>,
    /// Edge-list file: `src dst [weight]` per line, `#` comments.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Inline generator spec, e.g. `rmat:scale=10,ef=16,seed=1`, `chain:n=1024`,
    /// `tree:n=1000,seed=3`, `gnp:n=500,p=0.01`.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Explicit partition map: `vertex_id worker_id` per line.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// PageRank iterations.
    #[arg(long, default_value_t = 30)]
    iters: u64,
    /// Seed for generators whose spec does not give one.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Result dump path; standard output if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run report (JSON) path.
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    max_supersteps: Option<u64>,
}

/// Result dump lines plus the report, independent of the algorithm.
struct Finished {
    lines: Vec<String>,
    report: RunReport,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let variant = match &cli.variant {
        None => cli.algo.variants()[0].to_string(),
        Some(v) if cli.algo.variants().contains(&v.as_str()) => v.clone(),
        Some(v) => Cli::command()
            .error(
                ErrorKind::InvalidValue,
                format!(
                    "unknown variant {v:?} for {}; expected one of: {}",
                    cli.algo.to_possible_value().expect("no skipped algos").get_name(),
                    cli.algo.variants().join(", ")
                ),
            )
            .exit(),
    };
    match execute(&cli, &variant) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: &Cli, variant: &str) -> Result<()> {
    let graph = load_graph(cli)?;
    let mut setup = Setup::new(cli.workers as usize);
    if let Some(path) = &cli.partition {
        let map = load_partition_map(path).with_context(|| format!("reading {}", path.display()))?;
        setup = setup.with_map(map);
    }
    setup.max_supersteps = cli.max_supersteps;

    let done = run_algorithm(cli.algo, variant, &graph, cli.iters, &setup)?;

    match &cli.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_lines(BufWriter::new(file), &done.lines)?;
        }
        None => write_lines(io::stdout().lock(), &done.lines)?,
    }
    if let Some(path) = &cli.metrics {
        std::fs::write(path, done.report.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let r = &done.report;
    eprintln!(
        "{}/{}: {} supersteps, {} exchange rounds, {} payload bytes, digest {}",
        r.algorithm,
        r.variant,
        r.supersteps,
        r.exchange_rounds,
        r.payload_bytes(),
        r.result_digest
    );
    Ok(())
}

fn load_graph(cli: &Cli) -> Result<Graph> {
    let (directed, weighted) = (cli.algo.directed(), cli.algo.weighted());
    if let Some(spec) = &cli.gen {
        let defaults = genspec::Defaults { seed: cli.seed, directed, weighted };
        return genspec::generate(spec, &defaults).with_context(|| format!("generator {spec:?}"));
    }
    let path = cli.input.as_ref().expect("clap requires --input or --gen");
    let dir = if directed { Directedness::Directed } else { Directedness::Undirected };
    load_edge_list(path, dir, weighted).with_context(|| format!("reading {}", path.display()))
}

fn labels(pairs: &[(VertexId, VertexId)]) -> Vec<String> {
    pairs.iter().map(|(v, l)| format!("{v} {l}")).collect()
}

fn run_algorithm(algo: Algo, variant: &str, g: &Graph, iters: u64, setup: &Setup) -> Result<Finished> {
    let parse_err = |e: String| anyhow::anyhow!(e);
    Ok(match algo {
        Algo::Pagerank => {
            let r = pagerank(g, iters, variant.parse().map_err(parse_err)?, setup)?;
            let lines = r.output.iter().map(|(v, x)| format!("{v} {}", sig12(*x))).collect();
            Finished { lines, report: r.outcome.report }
        }
        Algo::Pj => {
            let r = pointer_jumping(g, variant.parse().map_err(parse_err)?, setup)?;
            Finished { lines: labels(&r.output), report: r.outcome.report }
        }
        Algo::Wcc => {
            let r = wcc(g, variant.parse().map_err(parse_err)?, setup)?;
            Finished { lines: labels(&r.output), report: r.outcome.report }
        }
        Algo::Sv => {
            let r = sv(g, variant.parse().map_err(parse_err)?, setup)?;
            Finished { lines: labels(&r.output), report: r.outcome.report }
        }
        Algo::Scc => {
            let r = scc(g, variant.parse().map_err(parse_err)?, setup)?;
            Finished { lines: labels(&r.output), report: r.outcome.report }
        }
        Algo::Msf => {
            let r = msf(g, variant.parse().map_err(parse_err)?, setup)?;
            let f = &r.output;
            let mut lines = vec![format!("# msf edges {} total_weight {}", f.edges.len(), f.total_weight)];
            lines.extend(f.edges.iter().map(|(a, b, w)| format!("# edge {a} {b} {w}")));
            lines.extend(labels(&f.components));
            Finished { lines, report: r.outcome.report }
        }
    })
}

fn write_lines(mut w: impl Write, lines: &[String]) -> Result<()> {
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

/// `x` with 12 significant digits, like C's `%.12g`.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..12).contains(&exp) {
        trim(format!("{x:.*}", (11 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

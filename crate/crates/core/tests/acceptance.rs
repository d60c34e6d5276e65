//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use common::*;
use pregel_channels::algorithms::*;
use pregel_channels::channels::{Aggregator, Combiner};
use pregel_channels::engine::{run, EngineConfig, Program, RunOutcome};
use pregel_channels::graph::*;
use pregel_channels::optimized::{check_fixpoint, Propagation};
use pregel_channels::oracles::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Engine-level observations collected from every run of the suite.
#[derive(Default)]
struct Conformance {
    runs: usize,
    failures: Vec<String>,
}

static CONFORMANCE: Mutex<Conformance> = Mutex::new(Conformance { runs: 0, failures: Vec::new() });

fn observe<P: Program>(label: &str, o: &RunOutcome<P>) {
    let mut c = CONFORMANCE.lock().unwrap();
    c.runs += 1;
    if let Some(w) = o.traces.iter().position(|t| t != &o.traces[0]) {
        c.failures.push(format!("{label}: barrier trace of worker {w} differs from worker 0"));
    }
    let counted = o.report.payload_bytes() + o.report.framing_bytes();
    if counted != o.total_bytes {
        c.failures.push(format!("{label}: counters say {counted} bytes, buffers held {}", o.total_bytes));
    }
    if !o.wire.is_empty() {
        let wire: u64 = o.wire.iter().map(|s| s.bytes.len() as u64).sum();
        if wire != o.report.payload_bytes() {
            c.failures.push(format!("{label}: captured {wire} payload bytes, counted {}", o.report.payload_bytes()));
        }
    }
}

fn observed<P: Program, O>(label: &str, r: AlgoRun<P, O>) -> AlgoRun<P, O> {
    observe(label, &r.outcome);
    r
}

// ---------------------------------------------------------------- inputs

fn rmat(scale: u32, ef: usize, seed: u64) -> Graph {
    gen_rmat(&RmatParams::new(scale, ef, seed)).unwrap()
}

/// Sparse power-law digraph with average out-degree near 9.4 and a
/// flatter quadrant split than the default R-MAT setting.
fn wiki_like(seed: u64) -> Graph {
    let mut p = RmatParams::new(10, 9, seed);
    (p.a, p.b, p.c, p.d) = (0.45, 0.22, 0.22, 0.11);
    gen_rmat(&p).unwrap()
}

fn weighted_rmat(scale: u32, ef: usize, seed: u64) -> Graph {
    let mut p = RmatParams::new(scale, ef, seed);
    p.weighted = true;
    p.directed = false;
    gen_rmat(&p).unwrap()
}

/// Fifty graphs with up to 1000 vertices, mostly near the connectivity threshold.
fn random_family() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..50)
        .map(|i| {
            let n = rng.gen_range(20..=1000);
            let degree = rng.gen_range(0.3..3.0);
            gen_gnp(n, (degree / n as f64).min(1.0), 100 + i, Directedness::Directed)
        })
        .collect()
}

fn with_weights(g: &Graph, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g.edges().iter().map(|e| Edge::weighted(e.src, e.dst, rng.gen_range(1..=20))).collect();
    Graph::with_vertex_count(g.n(), edges, Directedness::Undirected, true).unwrap()
}

fn undirected(g: &Graph) -> Graph {
    g.clone().with_directedness(Directedness::Undirected)
}

/// Contiguous blocks of ids per worker.
fn blocks(g: &Graph, workers: usize) -> PartitionMap {
    let n = g.n().max(1);
    PartitionMap::Explicit(g.vertices().iter().map(|&v| (v, v as usize * workers / n)).collect())
}

fn setups(g: &Graph) -> Vec<(String, Setup)> {
    let mut out: Vec<(String, Setup)> = [1, 2, 4, 8].iter().map(|&m| (format!("M={m} hash"), Setup::new(m))).collect();
    for m in [2, 4] {
        out.push((format!("M={m} blocks"), Setup::new(m).with_map(blocks(g, m))));
    }
    out
}

fn max_abs(a: &[(VertexId, f64)], b: &[(VertexId, f64)]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.1 - y.1).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- digests for criteria 2 and 3

/// `digests[algorithm/graph][variant][setup] = digest`
type DigestTable = BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>;

fn collect_digests() -> Result<DigestTable, String> {
    let mut t = DigestTable::new();
    let mut put = |key: &str, variant: &str, setup: &str, d: &str| {
        t.entry(key.to_string())
            .or_default()
            .entry(variant.to_string())
            .or_default()
            .insert(setup.to_string(), d.to_string());
    };
    let err = |e: pregel_channels::engine::EngineError| e.to_string();

    for (name, g) in [("rmat(10,16)", rmat(10, 16, 1)), ("wiki-like", wiki_like(5))] {
        for (s, setup) in setups(&g) {
            for v in PageRankVariant::ALL {
                let r = observed("pagerank", pagerank(&g, 30, *v, &setup).map_err(err)?);
                put(&format!("pagerank {name}"), v.name(), &s, r.digest());
            }
        }
    }
    for (name, g) in [("chain(1024)", gen_chain(1024)), ("tree(3000)", gen_random_tree(3000, 8))] {
        for (s, setup) in setups(&g) {
            for v in PointerJumpingVariant::ALL {
                let r = observed("pj", pointer_jumping(&g, *v, &setup).map_err(err)?);
                put(&format!("pj {name}"), v.name(), &s, r.digest());
            }
        }
    }
    let family = random_family();
    for (name, g) in [("rmat(9,2)", rmat(9, 2, 3)), ("gnp-7", family[7].clone())] {
        for (s, setup) in setups(&g) {
            for v in WccVariant::ALL {
                let r = observed("wcc", wcc(&g, *v, &setup).map_err(err)?);
                put(&format!("wcc {name}"), v.name(), &s, r.digest());
            }
            for v in SccVariant::ALL {
                let r = observed("scc", scc(&g, *v, &setup).map_err(err)?);
                put(&format!("scc {name}"), v.name(), &s, r.digest());
            }
            let u = undirected(&g);
            for v in SvVariant::ALL {
                let r = observed("sv", sv(&u, *v, &setup).map_err(err)?);
                put(&format!("sv {name}"), v.name(), &s, r.digest());
            }
        }
    }
    for (name, g) in [("weighted rmat(9,4)", weighted_rmat(9, 4, 6)), ("weighted gnp-3", with_weights(&family[3], 3))] {
        for (s, setup) in setups(&g) {
            for v in MsfVariant::ALL {
                let r = observed("msf", msf(&g, *v, &setup).map_err(err)?);
                put(&format!("msf {name}"), v.name(), &s, r.digest());
            }
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Check {
    let err = |e: pregel_channels::engine::EngineError| e.to_string();
    let setup = Setup::new(4);

    for (name, g) in [("rmat(10,16)", rmat(10, 16, 1)), ("wiki-like a", wiki_like(5)), ("wiki-like b", wiki_like(6))] {
        let oracle = oracle_pagerank(&g, 30);
        for v in PageRankVariant::ALL {
            let r = observed("pagerank", pagerank(&g, 30, *v, &setup).map_err(err)?);
            let d = max_abs(&r.output, &oracle);
            ensure!(d <= 1e-9, "pagerank/{v} on {name}: max abs error {d:e}");
        }
    }

    for (i, g) in random_family().iter().enumerate() {
        let oracle = oracle_components(g);
        for v in WccVariant::ALL {
            let r = observed("wcc", wcc(g, *v, &setup).map_err(err)?);
            ensure!(same_partition(&r.output, &oracle), "wcc/{v} differs from union-find on graph {i}");
        }
        let u = undirected(g);
        for v in SvVariant::ALL {
            let r = observed("sv", sv(&u, *v, &setup).map_err(err)?);
            ensure!(same_partition(&r.output, &oracle), "sv/{v} differs from union-find on graph {i}");
        }
    }

    let mut scc_inputs = vec![("rmat(10,4)".to_string(), rmat(10, 4, 2))];
    for (i, g) in random_family().into_iter().enumerate().step_by(5) {
        scc_inputs.push((format!("gnp-{i}"), g));
    }
    for (name, g) in &scc_inputs {
        let oracle = oracle_scc(g);
        for v in SccVariant::ALL {
            let r = observed("scc", scc(g, *v, &setup).map_err(err)?);
            ensure!(r.output == oracle, "scc/{v} differs from Tarjan on {name}");
        }
    }

    let family = random_family();
    let msf_inputs = [
        ("weighted rmat(10,4)".to_string(), weighted_rmat(10, 4, 4)),
        ("weighted gnp-11".to_string(), with_weights(&family[11], 11)),
        ("weighted gnp-23".to_string(), with_weights(&family[23], 23)),
    ];
    for (name, g) in &msf_inputs {
        let (edges, total) = oracle_msf(g);
        for v in MsfVariant::ALL {
            let r = observed("msf", msf(g, *v, &setup).map_err(err)?);
            ensure!(r.output.edges == edges, "msf/{v} edge set differs from Kruskal on {name}");
            ensure!(r.output.total_weight == total, "msf/{v} weight differs on {name}");
        }
    }

    let mut pj_inputs = vec![("chain(2^16)".to_string(), gen_chain(1 << 16))];
    for seed in [1, 2, 3] {
        pj_inputs.push((format!("tree(5000, {seed})"), gen_random_tree(5000, seed)));
    }
    for (name, g) in &pj_inputs {
        let oracle = oracle_root(g);
        for v in PointerJumpingVariant::ALL {
            let r = observed("pj", pointer_jumping(g, *v, &setup).map_err(err)?);
            ensure!(r.output == oracle, "pj/{v} differs from parent walk on {name}");
        }
    }
    Ok(())
}

fn criterion_2(t: &DigestTable) -> Check {
    for (key, variants) in t {
        let mut setups: Vec<&String> = variants.values().flat_map(|m| m.keys()).collect();
        setups.sort();
        setups.dedup();
        for s in setups {
            let mut seen: Vec<(&String, &String)> = Vec::new();
            for (v, m) in variants {
                if let Some(d) = m.get(s) {
                    seen.push((v, d));
                }
            }
            if let Some((v, d)) = seen.iter().find(|(_, d)| *d != seen[0].1) {
                return Err(format!("{key} at {s}: {v} gives {d}, {} gives {}", seen[0].0, seen[0].1));
            }
        }
    }
    Ok(())
}

fn criterion_3(t: &DigestTable) -> Check {
    for (key, variants) in t {
        for (v, m) in variants {
            let first = m.values().next().ok_or_else(|| format!("{key}/{v}: no runs"))?;
            if let Some((s, d)) = m.iter().find(|(_, d)| *d != first) {
                return Err(format!("{key}/{v}: digest {d} at {s} differs from {first}"));
            }
        }
    }
    Ok(())
}

fn criterion_4() -> Check {
    let err = |e: pregel_channels::engine::EngineError| e.to_string();
    let g = rmat(12, 16, 1);
    let setup = Setup::new(4);
    let combined = observed("pagerank", pagerank(&g, 30, PageRankVariant::Combined, &setup).map_err(err)?);
    let scatter = observed("pagerank", pagerank(&g, 30, PageRankVariant::Scatter, &setup).map_err(err)?);
    let (c, s) = (combined.report().payload_bytes(), scatter.report().payload_bytes());
    ensure!(s as f64 <= 0.8 * c as f64, "scatter pagerank {s} bytes vs combined {c}");

    let u = undirected(&g);
    let mut bytes = HashMap::new();
    for v in SvVariant::ALL {
        let r = observed("sv", sv(&u, *v, &setup.clone().capturing()).map_err(err)?);
        bytes.insert(*v, r.report().payload_bytes());
        if *v == SvVariant::ReqResp || *v == SvVariant::Both {
            response_segments_are_id_free(&r.outcome, "fetch")?;
        }
    }
    let b = |v| bytes[&v];
    use SvVariant::*;
    ensure!(
        b(Both) <= b(Scatter) && b(Scatter) <= b(Basic),
        "sv bytes: both {} scatter {} basic {}",
        b(Both),
        b(Scatter),
        b(Basic)
    );
    ensure!(
        b(Both) <= b(ReqResp) && b(ReqResp) <= b(Basic),
        "sv bytes: both {} reqresp {} basic {}",
        b(Both),
        b(ReqResp),
        b(Basic)
    );
    let chain = gen_chain(1 << 12);
    let r = observed(
        "pj",
        pointer_jumping(&chain, PointerJumpingVariant::ReqResp, &setup.clone().capturing()).map_err(err)?,
    );
    response_segments_are_id_free(&r.outcome, "jump")?;
    println!(
        "    pagerank payload combined={c} scatter={s} ({:.2}x); sv payload basic={} reqresp={} scatter={} both={}",
        s as f64 / c as f64,
        b(Basic),
        b(ReqResp),
        b(Scatter),
        b(Both)
    );
    Ok(())
}

/// Every round-2 segment answers the round-1 id list sent the other way
/// with exactly one 4-byte value per id.
fn response_segments_are_id_free<P: Program>(o: &RunOutcome<P>, channel: &str) -> Check {
    let mut requests = HashMap::new();
    for s in o.wire.iter().filter(|s| s.channel == channel && s.round == 1) {
        requests.insert((s.step, s.from, s.to), s.bytes.len());
    }
    let mut checked = 0;
    for s in o.wire.iter().filter(|s| s.channel == channel && s.round == 2) {
        let ids = requests.get(&(s.step, s.to, s.from)).copied().unwrap_or(0) / 4;
        ensure!(
            s.bytes.len() == ids * 4,
            "{channel} response {} -> {} at step {}: {} bytes for {ids} ids",
            s.from,
            s.to,
            s.step,
            s.bytes.len()
        );
        checked += ids;
    }
    ensure!(checked > 0, "{channel}: no remote responses observed");
    Ok(())
}

fn criterion_5() -> Check {
    let err = |e: pregel_channels::engine::EngineError| e.to_string();
    for k in 4..=14u32 {
        let g = gen_chain(1 << k);
        for v in PointerJumpingVariant::ALL {
            let r = observed("pj", pointer_jumping(&g, *v, &Setup::new(4)).map_err(err)?);
            let it = r.outcome.programs[0].jump_iterations();
            ensure!(it == k as u64 + 1, "pj/{v} on chain(2^{k}): {it} iterations, expected {}", k + 1);
        }
    }
    let mut graphs: Vec<Graph> = random_family().iter().map(undirected).collect();
    graphs.push(undirected(&rmat(12, 16, 1)));
    graphs.push(gen_chain(1000).with_directedness(Directedness::Undirected));
    for (i, g) in graphs.iter().enumerate() {
        let bound = sv::iteration_bound(g.n());
        for v in SvVariant::ALL {
            let r = observed("sv", sv(g, *v, &Setup::new(4)).map_err(err)?);
            let it = r.outcome.programs[0].iterations();
            ensure!(it <= bound, "sv/{v} on graph {i}: {it} iterations > {bound}");
        }
    }
    let mut wcc_graphs: Vec<Graph> = random_family();
    wcc_graphs.push(rmat(10, 4, 2));
    wcc_graphs.push(gen_chain(500));
    for (i, g) in wcc_graphs.iter().enumerate().filter(|(_, g)| g.m() > 0) {
        for setup in [Setup::new(4), Setup::new(4).with_map(blocks(g, 4))] {
            let c = observed("wcc", wcc(g, WccVariant::Combined, &setup).map_err(err)?);
            let p = observed("wcc", wcc(g, WccVariant::Propagation, &setup).map_err(err)?);
            let (rounds, steps) = (p.report().exchange_rounds, c.report().supersteps);
            ensure!(rounds <= steps, "wcc graph {i}: propagation used {rounds} rounds, combined {steps} supersteps");
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    // combined = fold(direct)
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sets = 0usize;
    while sets < 1000 {
        let n: u32 = rng.gen_range(1..40);
        let workers = rng.gen_range(1..=4);
        let mut sends: HashMap<VertexId, Vec<(VertexId, i64)>> = HashMap::new();
        for _ in 0..rng.gen_range(0..120) {
            let (src, dst) = (rng.gen_range(0..n), rng.gen_range(0..n));
            sends.entry(src).or_default().push((dst, rng.gen_range(-1000..1000)));
        }
        let out = run_twin(&vertices(n), &PartitionMap::hash(workers), workers, Arc::new(sends), false);
        observe("twin", &out);
        for (v, seen) in &out.values {
            if seen.computes < 2 {
                continue;
            }
            sets += 1;
            ensure!(seen.sum == seen.bag.iter().sum::<i64>(), "sum combiner differs from fold at {v}");
            ensure!(Some(&seen.min) == seen.bag.iter().min(), "min combiner differs from fold at {v}");
        }
    }

    // aggregator agreement
    for workers in 1..=8 {
        let n = 100;
        let g = vertices(n);
        let map = PartitionMap::hash(workers);
        let parts = partition(&g, workers, &map).unwrap();
        let table: Arc<HashMap<VertexId, f64>> =
            Arc::new((0..n).map(|v| (v, rng.gen_range(-1.0..1.0))).collect());
        let out = run(&parts, &map, &EngineConfig::default(), |_| Summing {
            agg: Aggregator::new("agg", Combiner::sum()),
            any: Aggregator::new("any", Combiner::or()),
            contributions: table.clone(),
            flag_from: 17,
            results: Vec::new(),
        })
        .map_err(|e| e.to_string())?;
        observe("aggregator", &out);
        let first = out.programs[0].results.clone();
        ensure!(first[1].1, "or-aggregator missed a contribution");
        for (w, p) in out.programs.iter().enumerate() {
            let same = p.results.iter().zip(&first).all(|(a, b)| a.0.to_bits() == b.0.to_bits() && a.1 == b.1);
            ensure!(same, "aggregator results on worker {w} differ from worker 0 (M={workers})");
        }
    }

    // scatter and request record uniqueness
    let err = |e: pregel_channels::engine::EngineError| e.to_string();
    let g = rmat(10, 16, 9);
    let setup = Setup::new(4).capturing();
    let pr = observed("pagerank", pagerank(&g, 5, PageRankVariant::Scatter, &setup).map_err(err)?);
    let mut id_lists = 0;
    let mut firsts = std::collections::HashSet::new();
    let mut segs: Vec<_> = pr.outcome.wire.iter().filter(|s| s.channel == "scatter" && !s.bytes.is_empty()).collect();
    segs.sort_by_key(|s| s.step);
    for s in segs {
        if firsts.insert((s.from, s.to)) {
            let count = u32::from_le_bytes(s.bytes[..4].try_into().unwrap()) as usize;
            let ids: Vec<u32> =
                (0..count).map(|i| u32::from_le_bytes(s.bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap())).collect();
            ensure!(ids.windows(2).all(|w| w[0] < w[1]), "scatter ids {} -> {} repeat", s.from, s.to);
            id_lists += 1;
        }
    }
    ensure!(id_lists == 12, "expected an id list per ordered worker pair, saw {id_lists}");
    let sv_run = observed("sv", sv(&undirected(&g), SvVariant::Both, &setup).map_err(err)?);
    let mut request_lists = 0;
    for s in sv_run.outcome.wire.iter().filter(|s| s.channel == "fetch" && s.round == 1 && !s.bytes.is_empty()) {
        let ids: Vec<u32> = s.bytes.chunks(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
        ensure!(ids.windows(2).all(|w| w[0] < w[1]), "request ids {} -> {} at step {} repeat", s.from, s.to, s.step);
        request_lists += 1;
    }
    ensure!(request_lists > 0, "no request lists observed");

    // propagation fixpoint scan
    let mut scanned = 0;
    let mut graphs = random_family();
    graphs.push(rmat(10, 4, 2));
    for g in &graphs {
        for setup in [Setup::new(4), Setup::new(3).with_map(blocks(g, 3))] {
            let parts = partition(g, setup.workers, setup.map.as_ref().unwrap_or(&PartitionMap::hash(setup.workers)))
                .map_err(|e| e.to_string())?;
            let w = observed("wcc", wcc(g, WccVariant::Propagation, &setup).map_err(err)?);
            let chans: Vec<&Propagation<VertexId>> =
                w.outcome.programs.iter().map(|p| p.propagation().expect("propagation variant")).collect();
            scanned += check_fixpoint(&chans, &parts)?;
            let s = observed("scc", scc(g, SccVariant::Propagation, &setup).map_err(err)?);
            for pick in [0, 1] {
                let chans: Vec<&Propagation<VertexId>> = s
                    .outcome
                    .programs
                    .iter()
                    .map(|p| {
                        let (f, b) = p.propagation().expect("propagation variant");
                        if pick == 0 {
                            f
                        } else {
                            b
                        }
                    })
                    .collect();
                scanned += check_fixpoint(&chans, &parts)?;
            }
        }
    }
    ensure!(scanned > 0, "fixpoint scan saw no edges");
    Ok(())
}

fn criterion_7() -> Check {
    let c = CONFORMANCE.lock().unwrap();
    ensure!(c.runs > 0, "no runs observed");
    if let Some(f) = c.failures.first() {
        return Err(format!("{} of {} runs failed; first: {f}", c.failures.len(), c.runs));
    }
    println!("    {} runs checked", c.runs);
    Ok(())
}

fn report(n: usize, what: &str, started: Instant, result: std::thread::Result<Check>) -> bool {
    let secs = started.elapsed().as_secs_f64();
    match result {
        Ok(Ok(())) => {
            println!("PASS criterion {n}: {what} ({secs:.1}s)");
            true
        }
        Ok(Err(e)) => {
            println!("FAIL criterion {n}: {what}: {e}");
            false
        }
        Err(_) => {
            println!("FAIL criterion {n}: {what}: panicked");
            false
        }
    }
}

fn main() {
    let t0 = Instant::now();
    let mut ok = true;

    let t = Instant::now();
    ok &= report(1, "oracle equivalence", t, catch_unwind(criterion_1));

    let t = Instant::now();
    let digests = catch_unwind(collect_digests);
    let table = match &digests {
        Ok(Ok(table)) => Some(table),
        _ => None,
    };
    let fail = || match &digests {
        Ok(Err(e)) => Ok(Err(format!("run failed: {e}"))),
        _ => Ok(Err("digest collection panicked".to_string())),
    };
    let c2 = table.map(|tb| catch_unwind(AssertUnwindSafe(|| criterion_2(tb)))).unwrap_or_else(fail);
    ok &= report(2, "variant equivalence", t, c2);
    let t = Instant::now();
    let c3 = table.map(|tb| catch_unwind(AssertUnwindSafe(|| criterion_3(tb)))).unwrap_or_else(fail);
    ok &= report(3, "worker and partition independence", t, c3);

    let t = Instant::now();
    ok &= report(4, "message-reduction directionality", t, catch_unwind(criterion_4));
    let t = Instant::now();
    ok &= report(5, "structural bounds", t, catch_unwind(criterion_5));
    let t = Instant::now();
    ok &= report(6, "channel unit properties", t, catch_unwind(criterion_6));
    let t = Instant::now();
    ok &= report(7, "engine conformance", t, catch_unwind(criterion_7));

    println!("acceptance finished in {:.1}s", t0.elapsed().as_secs_f64());
    if !ok {
        std::process::exit(1);
    }
}

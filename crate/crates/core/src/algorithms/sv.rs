use super::fetch::Fetch;
use super::{execute, log2_ceil, AlgoRun, Setup};
use crate::channels::{Aggregator, CombinedMessage, Combiner};
use crate::engine::{Channel, ComputeError, EngineError, Program, ResultDigest, Vertex};
use crate::graph::{Directedness, Graph, VertexId};
use crate::optimized::ScatterCombine;

super::variants!(SvVariant {
    Basic = "basic",
    ReqResp = "reqresp",
    Scatter = "scatter",
    Both = "both",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Fixpoint check; ask for `D[D[u]]`; with request-respond also send `D[u]` to neighbors.
    Ask,
    /// Direct-message variants only: parents answer, `D[u]` goes to neighbors.
    Serve,
    /// Tree merging or pointer jumping.
    Hook,
    /// Roots take the minimum merge proposal.
    Merge,
}

enum Neighborhood {
    Combined(CombinedMessage<VertexId>),
    Scatter(ScatterCombine<VertexId>),
}

/// Shiloach-Vishkin connected components over a disjoint-set forest `D`.
///
/// One iteration is three supersteps with request-respond fetching
/// (ask, hook, merge) and four with direct messages (ask, serve, hook,
/// merge). Pointers only ever decrease, so `D[x] <= x` holds throughout and
/// the structure stays a forest; at the fixpoint every vertex points to the
/// minimum id of its component.
pub struct ShiloachVishkin {
    nbr: Neighborhood,
    fetch: Fetch<VertexId>,
    merge: CombinedMessage<VertexId>,
    fix: Aggregator<bool>,
    phase: Phase,
    iteration: u64,
    changed_in_hook: bool,
    halt: bool,
    max_iterations: u64,
}

impl ShiloachVishkin {
    pub fn new(variant: SvVariant, num_vertices: usize) -> Self {
        let scatter = matches!(variant, SvVariant::Scatter | SvVariant::Both);
        let reqresp = matches!(variant, SvVariant::ReqResp | SvVariant::Both);
        let nbr = if scatter {
            Neighborhood::Scatter(ScatterCombine::new("nbr", Combiner::min()))
        } else {
            Neighborhood::Combined(CombinedMessage::new("nbr", Combiner::min()))
        };
        let fetch = if reqresp { Fetch::reqresp("fetch", |d: &VertexId| *d) } else { Fetch::direct("fetch") };
        ShiloachVishkin {
            nbr,
            fetch,
            merge: CombinedMessage::new("merge", Combiner::min()),
            fix: Aggregator::new("fix", Combiner::or()),
            phase: Phase::Merge,
            iteration: 0,
            changed_in_hook: false,
            halt: false,
            max_iterations: iteration_bound(num_vertices),
        }
    }

    /// Completed or started iterations, counting the final confirming one.
    pub fn iterations(&self) -> u64 {
        self.iteration
    }

    fn disseminate(&mut self, v: &Vertex<'_, VertexId>) {
        let d = *v.value();
        match &mut self.nbr {
            Neighborhood::Combined(c) => {
                for e in v.out_edges() {
                    c.send_message(e.dst, d);
                }
            }
            Neighborhood::Scatter(s) => {
                if !v.out_edges().is_empty() {
                    s.set_message(v, d);
                }
            }
        }
    }

    fn neighbor_min(&self, v: &Vertex<'_, VertexId>) -> VertexId {
        match &self.nbr {
            Neighborhood::Combined(c) => c.get_message(v),
            Neighborhood::Scatter(s) => s.get_message(v),
        }
    }

    fn dissemination_phase(&self) -> Phase {
        if self.fetch.needs_serve() {
            Phase::Serve
        } else {
            Phase::Ask
        }
    }
}

/// Loose envelope on the iteration count: `3 * ceil(log2 n) + 5`.
pub fn iteration_bound(n: usize) -> u64 {
    3 * log2_ceil(n) + 5
}

impl Program for ShiloachVishkin {
    type Value = VertexId;

    fn channels(&mut self) -> Vec<&mut dyn Channel<VertexId>> {
        let mut out: Vec<&mut dyn Channel<VertexId>> = Vec::new();
        match &mut self.nbr {
            Neighborhood::Combined(c) => out.push(c),
            Neighborhood::Scatter(s) => out.push(s),
        }
        self.fetch.register(&mut out);
        out.push(&mut self.merge);
        out.push(&mut self.fix);
        out
    }

    fn before_superstep(&mut self, _step: u64) {
        self.phase = match self.phase {
            Phase::Merge => Phase::Ask,
            Phase::Ask if self.fetch.needs_serve() => Phase::Serve,
            Phase::Ask | Phase::Serve => Phase::Hook,
            Phase::Hook => Phase::Merge,
        };
        match self.phase {
            Phase::Ask => {
                if self.iteration > 0 && !(self.changed_in_hook || self.fix.result()) {
                    self.halt = true;
                } else {
                    self.iteration += 1;
                }
            }
            Phase::Merge => self.changed_in_hook = self.fix.result(),
            _ => {}
        }
        let on = self.phase == self.dissemination_phase();
        if let Neighborhood::Scatter(s) = &mut self.nbr {
            s.set_enabled(on);
        }
    }

    fn compute(&mut self, v: &mut Vertex<'_, VertexId>) -> Result<(), ComputeError> {
        if self.halt {
            v.vote_to_halt();
            return Ok(());
        }
        let me = v.id();
        if v.step() == 1 {
            *v.value_mut() = me;
            if let Neighborhood::Scatter(s) = &mut self.nbr {
                for e in v.out_edges() {
                    s.add_edge(v, e.dst)?;
                }
            }
        }
        let d = *v.value();
        match self.phase {
            Phase::Ask => {
                if self.iteration > self.max_iterations {
                    return Err(ComputeError::Guard(format!(
                        "S-V exceeded {} iterations",
                        self.max_iterations
                    )));
                }
                if d != me {
                    self.fetch.request(v, d)?;
                }
                if self.phase == self.dissemination_phase() {
                    self.disseminate(v);
                }
            }
            Phase::Serve => {
                self.fetch.serve(v, d);
                self.disseminate(v);
            }
            Phase::Hook => {
                let grand = if d == me { d } else { self.fetch.response(v)? };
                if grand == d {
                    let t = self.neighbor_min(v);
                    if t < d {
                        self.merge.send_message(d, t);
                    }
                } else {
                    *v.value_mut() = grand;
                    self.fix.add(true);
                }
            }
            Phase::Merge => {
                if self.merge.has_message(v) {
                    let t = self.merge.get_message(v);
                    if t < d {
                        *v.value_mut() = t;
                        self.fix.add(true);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Component labels (minimum vertex id). Directed input is treated as undirected.
pub fn sv(
    g: &Graph,
    variant: SvVariant,
    setup: &Setup,
) -> Result<AlgoRun<ShiloachVishkin, Vec<(VertexId, VertexId)>>, EngineError> {
    let undirected;
    let g = if g.is_directed() {
        undirected = g.clone().with_directedness(Directedness::Undirected);
        &undirected
    } else {
        g
    };
    let n = g.n();
    let outcome = execute(g, setup, "sv", variant.name(), |_| ShiloachVishkin::new(variant, n))?;
    let labels = outcome.values.clone();
    let digest = ResultDigest::of_ints(labels.iter().map(|&(v, l)| (v, l as i64)));
    Ok(AlgoRun::new(outcome, labels, digest))
}

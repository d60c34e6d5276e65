use super::{execute, AlgoRun, Setup};
use crate::channels::{Aggregator, CombinedMessage, Combiner};
use crate::engine::{Channel, ComputeError, EngineError, Program, ResultDigest, Vertex};
use crate::graph::{Graph, VertexId};
use crate::optimized::ScatterCombine;

super::variants!(PageRankVariant { Combined = "combined", Scatter = "scatter" });

enum Links {
    Combined(CombinedMessage<f64>),
    Scatter(ScatterCombine<f64>),
}

/// PageRank with damping 0.85. Sinks hand their rank to an aggregator,
/// which is spread uniformly over all vertices in the next superstep.
pub struct PageRank {
    iters: u64,
    links: Links,
    sink: Aggregator<f64>,
}

impl PageRank {
    pub fn new(variant: PageRankVariant, iters: u64) -> Self {
        let links = match variant {
            PageRankVariant::Combined => Links::Combined(CombinedMessage::new("msg", Combiner::sum())),
            PageRankVariant::Scatter => Links::Scatter(ScatterCombine::new("scatter", Combiner::sum())),
        };
        PageRank { iters, links, sink: Aggregator::new("aggregator", Combiner::sum()) }
    }
}

impl Program for PageRank {
    type Value = f64;

    fn channels(&mut self) -> Vec<&mut dyn Channel<f64>> {
        let links: &mut dyn Channel<f64> = match &mut self.links {
            Links::Combined(c) => c,
            Links::Scatter(s) => s,
        };
        vec![links, &mut self.sink]
    }

    fn compute(&mut self, v: &mut Vertex<'_, f64>) -> Result<(), ComputeError> {
        let n = v.num_vertices() as f64;
        if v.step() == 1 {
            *v.value_mut() = 1.0 / n;
            if let Links::Scatter(s) = &mut self.links {
                for e in v.out_edges() {
                    s.add_edge(v, e.dst)?;
                }
            }
        } else {
            let s = self.sink.result() / n;
            let incoming = match &self.links {
                Links::Combined(c) => c.get_message(v),
                Links::Scatter(sc) => sc.get_message(v),
            };
            *v.value_mut() = 0.15 / n + 0.85 * (incoming + s);
        }
        if v.step() > self.iters {
            v.vote_to_halt();
            return Ok(());
        }
        let deg = v.out_edges().len();
        if deg == 0 {
            self.sink.add(*v.value());
            return Ok(());
        }
        let share = *v.value() / deg as f64;
        match &mut self.links {
            Links::Combined(c) => {
                for e in v.out_edges() {
                    c.send_message(e.dst, share);
                }
            }
            Links::Scatter(s) => s.set_message(v, share),
        }
        Ok(())
    }
}

/// Runs `iters` PageRank iterations (`iters + 1` supersteps).
pub fn pagerank(
    g: &Graph,
    iters: u64,
    variant: PageRankVariant,
    setup: &Setup,
) -> Result<AlgoRun<PageRank, Vec<(VertexId, f64)>>, EngineError> {
    let outcome = execute(g, setup, "pagerank", variant.name(), |_| PageRank::new(variant, iters))?;
    let ranks = outcome.values.clone();
    let digest = ResultDigest::of_floats(ranks.iter().copied());
    Ok(AlgoRun::new(outcome, ranks, digest))
}

use super::{execute, AlgoRun, Setup};
use crate::channels::{CombinedMessage, Combiner};
use crate::engine::{Channel, ComputeError, EngineError, Program, ResultDigest, Vertex};
use crate::graph::{Graph, VertexId};
use crate::optimized::Propagation;

super::variants!(WccVariant { Combined = "combined", Propagation = "propagation" });

enum Labels {
    /// Hash-min: one hop per superstep.
    Combined(CombinedMessage<VertexId>),
    /// The whole fixpoint inside superstep 1.
    Propagation(Propagation<VertexId>),
}

/// Weakly connected components labelled by their minimum vertex id. Edges
/// are followed in both directions.
pub struct Wcc {
    labels: Labels,
}

impl Wcc {
    pub fn new(variant: WccVariant) -> Self {
        let labels = match variant {
            WccVariant::Combined => Labels::Combined(CombinedMessage::new("msg", Combiner::min())),
            WccVariant::Propagation => Labels::Propagation(Propagation::new("prop", Combiner::min())),
        };
        Wcc { labels }
    }

    pub fn propagation(&self) -> Option<&Propagation<VertexId>> {
        match &self.labels {
            Labels::Propagation(p) => Some(p),
            Labels::Combined(_) => None,
        }
    }
}

impl Program for Wcc {
    type Value = VertexId;

    fn channels(&mut self) -> Vec<&mut dyn Channel<VertexId>> {
        match &mut self.labels {
            Labels::Combined(c) => vec![c],
            Labels::Propagation(p) => vec![p],
        }
    }

    fn compute(&mut self, v: &mut Vertex<'_, VertexId>) -> Result<(), ComputeError> {
        match &mut self.labels {
            Labels::Combined(c) => {
                let label = if v.step() == 1 { v.id() } else { c.get_message(v).min(*v.value()) };
                if v.step() == 1 || label < *v.value() {
                    *v.value_mut() = label;
                    for e in v.neighbors() {
                        c.send_message(e.dst, label);
                    }
                }
                v.vote_to_halt();
            }
            Labels::Propagation(p) => {
                if v.step() == 1 {
                    *v.value_mut() = v.id();
                    p.set_value(v, v.id());
                    for e in v.neighbors() {
                        p.add_edge(v, e.dst);
                    }
                } else {
                    *v.value_mut() = p.get_value(v)?;
                    v.vote_to_halt();
                }
            }
        }
        Ok(())
    }
}

pub fn wcc(
    g: &Graph,
    variant: WccVariant,
    setup: &Setup,
) -> Result<AlgoRun<Wcc, Vec<(VertexId, VertexId)>>, EngineError> {
    let outcome = execute(g, setup, "wcc", variant.name(), |_| Wcc::new(variant))?;
    let labels = outcome.values.clone();
    let digest = ResultDigest::of_ints(labels.iter().map(|&(v, l)| (v, l as i64)));
    Ok(AlgoRun::new(outcome, labels, digest))
}

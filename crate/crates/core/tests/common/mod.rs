//! Programs shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use pregel_channels::channels::{Aggregator, CombinedMessage, Combiner, DirectMessage};
use pregel_channels::engine::*;
use pregel_channels::graph::*;

pub type Sends = Arc<HashMap<VertexId, Vec<(VertexId, i64)>>>;

pub fn vertices(n: u32) -> Graph {
    Graph::with_vertex_count(n as usize, vec![], Directedness::Directed, false).unwrap()
}

pub fn explicit(pairs: &[(VertexId, usize)]) -> PartitionMap {
    PartitionMap::Explicit(pairs.iter().copied().collect())
}

/// Sends the same messages through a direct and two combined channels, then
/// records what each receiver saw.
pub struct Twin {
    pub sends: Sends,
    pub direct: DirectMessage<i64>,
    pub sum: CombinedMessage<i64>,
    pub min: CombinedMessage<i64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Seen {
    pub computes: u32,
    pub bag: Vec<i64>,
    pub sum: i64,
    pub min: i64,
    pub has: bool,
}

impl Program for Twin {
    type Value = Seen;
    fn channels(&mut self) -> Vec<&mut dyn Channel<Seen>> {
        vec![&mut self.direct, &mut self.sum, &mut self.min]
    }
    fn compute(&mut self, v: &mut Vertex<'_, Seen>) -> Result<(), ComputeError> {
        v.value_mut().computes += 1;
        if v.step() == 1 {
            for &(dst, m) in self.sends.get(&v.id()).into_iter().flatten() {
                self.direct.send_message(dst, m);
                self.sum.send_message(dst, m);
                self.min.send_message(dst, m);
            }
        } else {
            let mut bag = self.direct.get_iterator(v).to_vec();
            bag.sort_unstable();
            let (sum, min, has) = (self.sum.get_message(v), self.min.get_message(v), self.sum.has_message(v));
            let seen = v.value_mut();
            seen.bag = bag;
            seen.sum = sum;
            seen.min = min;
            seen.has = has;
        }
        v.vote_to_halt();
        Ok(())
    }
}

pub fn run_twin(g: &Graph, map: &PartitionMap, workers: usize, sends: Sends, capture: bool) -> RunOutcome<Twin> {
    let parts = partition(g, workers, map).unwrap();
    let config = EngineConfig { capture_wire: capture, ..Default::default() };
    run(&parts, map, &config, |_| Twin {
        sends: sends.clone(),
        direct: DirectMessage::new("direct"),
        sum: CombinedMessage::new("sum", Combiner::sum()),
        min: CombinedMessage::new("min", Combiner::min()),
    })
    .unwrap()
}

pub struct Summing {
    pub agg: Aggregator<f64>,
    pub any: Aggregator<bool>,
    pub contributions: Arc<HashMap<VertexId, f64>>,
    pub flag_from: VertexId,
    pub results: Vec<(f64, bool)>,
}

impl Program for Summing {
    type Value = ();
    fn channels(&mut self) -> Vec<&mut dyn Channel<()>> {
        vec![&mut self.agg, &mut self.any]
    }
    fn before_superstep(&mut self, _step: u64) {
        self.results.push((self.agg.result(), self.any.result()));
    }
    fn compute(&mut self, v: &mut Vertex<'_, ()>) -> Result<(), ComputeError> {
        if v.step() == 1 {
            if let Some(x) = self.contributions.get(&v.id()) {
                self.agg.add(*x);
            }
            if v.id() == self.flag_from {
                self.any.add(true);
            }
        } else {
            v.vote_to_halt();
        }
        Ok(())
    }
}


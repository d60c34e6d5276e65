use super::fetch::Fetch;
use super::{execute, AlgoRun, Setup};
use crate::channels::{Aggregator, Combiner};
use crate::engine::{Channel, ComputeError, EngineError, Program, ResultDigest, Vertex};
use crate::graph::{Graph, VertexId};

super::variants!(PointerJumpingVariant { Direct = "direct", ReqResp = "reqresp" });

/// Root finding in a parent forest by repeated `P[u] := P[P[u]]`.
///
/// Each vertex's single out-edge is its parent; vertices without one are
/// roots. With request-respond every superstep after the first reads the
/// grandparent, updates and asks again; with direct messages each jump
/// spans two supersteps. The run stops after a jump in which no pointer
/// changed.
pub struct PointerJumping {
    fetch: Fetch<VertexId>,
    changed: Aggregator<bool>,
    jumps: u64,
    halt: bool,
    reading: bool,
}

impl PointerJumping {
    pub fn new(variant: PointerJumpingVariant) -> Self {
        let fetch = match variant {
            PointerJumpingVariant::Direct => Fetch::direct("jump"),
            PointerJumpingVariant::ReqResp => Fetch::reqresp("jump", |p: &VertexId| *p),
        };
        PointerJumping {
            fetch,
            changed: Aggregator::new("changed", Combiner::or()),
            jumps: 0,
            halt: false,
            reading: false,
        }
    }

    /// Supersteps in which pointers were updated, including the final one
    /// that changed nothing.
    pub fn jump_iterations(&self) -> u64 {
        self.jumps
    }
}

impl Program for PointerJumping {
    type Value = VertexId;

    fn channels(&mut self) -> Vec<&mut dyn Channel<VertexId>> {
        let mut out: Vec<&mut dyn Channel<VertexId>> = Vec::new();
        self.fetch.register(&mut out);
        out.push(&mut self.changed);
        out
    }

    fn before_superstep(&mut self, step: u64) {
        // Read steps: 2, 3, 4, ... for request-respond; 3, 5, 7, ... for direct.
        let (read, first_check) = if self.fetch.needs_serve() {
            (step >= 3 && step % 2 == 1, 4)
        } else {
            (step >= 2, 3)
        };
        let check = if self.fetch.needs_serve() { step.is_multiple_of(2) } else { true };
        if step >= first_check && check && !self.changed.result() {
            self.halt = true;
        }
        self.reading = read && !self.halt;
        if self.reading {
            self.jumps += 1;
        }
    }

    fn compute(&mut self, v: &mut Vertex<'_, VertexId>) -> Result<(), ComputeError> {
        if self.halt {
            v.vote_to_halt();
            return Ok(());
        }
        let me = v.id();
        if v.step() == 1 {
            *v.value_mut() = v.out_edges().first().map_or(me, |e| e.dst);
        } else if self.reading {
            if *v.value() != me {
                let g = self.fetch.response(v)?;
                let changed = g != *v.value();
                *v.value_mut() = g;
                self.changed.add(changed);
            }
        } else {
            let p = *v.value();
            self.fetch.serve(v, p);
            return Ok(());
        }
        let p = *v.value();
        if p != me {
            self.fetch.request(v, p)?;
        }
        Ok(())
    }
}

/// Root id of every vertex of a parent forest (edges point child to parent).
pub fn pointer_jumping(
    g: &Graph,
    variant: PointerJumpingVariant,
    setup: &Setup,
) -> Result<AlgoRun<PointerJumping, Vec<(VertexId, VertexId)>>, EngineError> {
    let mut setup = setup.clone();
    let guard = 4 * (super::log2_ceil(g.n()) + 4);
    setup.max_supersteps.get_or_insert(guard);
    let outcome = execute(g, &setup, "pj", variant.name(), |_| PointerJumping::new(variant))?;
    let roots = outcome.values.clone();
    let digest = ResultDigest::of_ints(roots.iter().map(|&(v, r)| (v, r as i64)));
    Ok(AlgoRun::new(outcome, roots, digest))
}

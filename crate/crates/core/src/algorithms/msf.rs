use super::fetch::Fetch;
use super::{execute, log2_ceil, AlgoRun, Setup};
use crate::channels::{Aggregator, CombinedMessage, Combiner, DirectMessage};
use crate::engine::{Channel, ComputeError, EngineError, Program, ResultDigest, Vertex};
use crate::graph::{Directedness, Graph, VertexId, Weight};

super::variants!(MsfVariant { Direct = "direct", ReqResp = "reqresp" });

/// `(weight, lower endpoint, higher endpoint, target component)`.
pub type EdgeRecord = (Weight, VertexId, VertexId, VertexId);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MsfState {
    pub comp: VertexId,
    ptr: VertexId,
    chosen: Option<(Weight, VertexId, VertexId)>,
    asked: bool,
    /// Forest edges `(u, v, weight)` with `u <= v` recorded by this vertex
    /// while it was a component root.
    pub edges: Vec<(VertexId, VertexId, Weight)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Tell neighbors my component.
    Announce,
    /// Send my lightest edge leaving the component to the component root.
    Pick,
    /// Roots point at the component across their lightest edge.
    Hook,
    /// Resolve mutual pairs: the smaller root stays, the other records the edge.
    Break,
    /// Pointer jumping over root pointers until stable.
    Jump,
    /// Every vertex adopts its root's final root.
    Relabel,
    /// Direct-message fetch only: targets answer requests.
    Serve,
    Done,
}

/// Borůvka minimum spanning forest. Ties between equal weights are broken
/// by endpoint ids, so the forest is unique.
pub struct Boruvka {
    announce: DirectMessage<(VertexId, VertexId)>,
    pick: CombinedMessage<EdgeRecord>,
    fetch: Fetch<MsfState>,
    progress: Aggregator<bool>,
    jumped: Aggregator<bool>,
    phase: Phase,
    after_serve: Phase,
    iteration: u64,
    max_iterations: u64,
}

impl Boruvka {
    pub fn new(variant: MsfVariant, num_vertices: usize) -> Self {
        let fetch = match variant {
            MsfVariant::Direct => Fetch::direct("ptr"),
            MsfVariant::ReqResp => Fetch::reqresp("ptr", |s: &MsfState| s.ptr),
        };
        Boruvka {
            announce: DirectMessage::new("announce"),
            pick: CombinedMessage::new("pick", Combiner::min()),
            fetch,
            progress: Aggregator::new("progress", Combiner::or()),
            jumped: Aggregator::new("jumped", Combiner::or()),
            phase: Phase::Announce,
            after_serve: Phase::Announce,
            iteration: 1,
            max_iterations: 2 * log2_ceil(num_vertices) + 5,
        }
    }

    /// Borůvka iterations started.
    pub fn iterations(&self) -> u64 {
        self.iteration
    }

    fn then(&mut self, next: Phase) -> Phase {
        if self.fetch.needs_serve() {
            self.after_serve = next;
            Phase::Serve
        } else {
            next
        }
    }
}

impl Program for Boruvka {
    type Value = MsfState;

    fn channels(&mut self) -> Vec<&mut dyn Channel<MsfState>> {
        let mut out: Vec<&mut dyn Channel<MsfState>> = vec![&mut self.announce, &mut self.pick];
        self.fetch.register(&mut out);
        out.push(&mut self.progress);
        out.push(&mut self.jumped);
        out
    }

    fn before_superstep(&mut self, step: u64) {
        if step == 1 {
            return;
        }
        self.phase = match self.phase {
            Phase::Announce => Phase::Pick,
            Phase::Pick => Phase::Hook,
            Phase::Hook if !self.progress.result() => Phase::Done,
            Phase::Hook => self.then(Phase::Break),
            Phase::Break => self.then(Phase::Jump),
            Phase::Jump => {
                let next = if self.jumped.result() { Phase::Jump } else { Phase::Relabel };
                self.then(next)
            }
            Phase::Relabel => self.then(Phase::Announce),
            Phase::Serve => self.after_serve,
            Phase::Done => Phase::Done,
        };
        if self.phase == Phase::Announce {
            self.iteration += 1;
        }
    }

    fn compute(&mut self, v: &mut Vertex<'_, MsfState>) -> Result<(), ComputeError> {
        let me = v.id();
        match self.phase {
            Phase::Announce => {
                if v.step() == 1 {
                    *v.value_mut() = MsfState { comp: me, ptr: me, ..Default::default() };
                } else if v.value().asked {
                    let c = self.fetch.response(v)?;
                    let s = v.value_mut();
                    s.comp = c;
                    s.asked = false;
                }
                if self.iteration > self.max_iterations {
                    return Err(ComputeError::Guard(format!(
                        "Borůvka exceeded {} iterations",
                        self.max_iterations
                    )));
                }
                let mut nbrs: Vec<VertexId> = v.out_edges().iter().map(|e| e.dst).collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                let comp = v.value().comp;
                for n in nbrs {
                    self.announce.send_message(n, (me, comp));
                }
            }
            Phase::Pick => {
                let mut known: Vec<(VertexId, VertexId)> = self.announce.get_iterator(v).to_vec();
                known.sort_unstable();
                let comp = v.value().comp;
                let mut best: Option<EdgeRecord> = None;
                for e in v.out_edges() {
                    let i = known.partition_point(|(id, _)| *id < e.dst);
                    let Some(&(_, c)) = known.get(i).filter(|(id, _)| *id == e.dst) else { continue };
                    if c == comp {
                        continue;
                    }
                    let rec = (e.weight.unwrap_or(0), me.min(e.dst), me.max(e.dst), c);
                    if best.is_none_or(|b| rec < b) {
                        best = Some(rec);
                    }
                }
                if let Some(rec) = best {
                    self.pick.send_message(comp, rec);
                }
            }
            Phase::Hook => {
                if v.value().comp != me {
                    return Ok(());
                }
                if self.pick.has_message(v) {
                    let (w, a, b, target) = self.pick.get_message(v);
                    let s = v.value_mut();
                    s.ptr = target;
                    s.chosen = Some((w, a, b));
                    self.progress.add(true);
                    self.fetch.request(v, target)?;
                } else {
                    v.value_mut().ptr = me;
                }
            }
            Phase::Serve => {
                let p = v.value().ptr;
                self.fetch.serve(v, p);
            }
            Phase::Break => {
                let s = v.value();
                if s.comp != me || s.ptr == me {
                    return Ok(());
                }
                let g = self.fetch.response(v)?;
                let s = v.value_mut();
                if g == me && me < s.ptr {
                    s.ptr = me;
                } else if let Some((w, a, b)) = s.chosen.take() {
                    s.edges.push((a, b, w));
                }
                s.chosen = None;
                let p = s.ptr;
                if p != me {
                    self.fetch.request(v, p)?;
                }
            }
            Phase::Jump => {
                let s = v.value();
                if s.comp != me || s.ptr == me {
                    return Ok(());
                }
                let g = self.fetch.response(v)?;
                let s = v.value_mut();
                if g != s.ptr {
                    s.ptr = g;
                    self.jumped.add(true);
                }
                let p = s.ptr;
                self.fetch.request(v, p)?;
            }
            Phase::Relabel => {
                let s = v.value_mut();
                if s.comp == me {
                    s.comp = s.ptr;
                } else {
                    s.asked = true;
                    let c = s.comp;
                    self.fetch.request(v, c)?;
                }
            }
            Phase::Done => v.vote_to_halt(),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    /// `(u, v, weight)` with `u <= v`, sorted.
    pub edges: Vec<(VertexId, VertexId, Weight)>,
    pub total_weight: u64,
    /// Component representative of every vertex.
    pub components: Vec<(VertexId, VertexId)>,
}

/// Minimum spanning forest of a weighted graph; edges are taken as undirected.
pub fn msf(
    g: &Graph,
    variant: MsfVariant,
    setup: &Setup,
) -> Result<AlgoRun<Boruvka, Forest>, EngineError> {
    if !g.is_weighted() {
        return Err(EngineError::Config("minimum spanning forest needs a weighted graph".into()));
    }
    let undirected;
    let g = if g.is_directed() {
        undirected = g.clone().with_directedness(Directedness::Undirected);
        &undirected
    } else {
        g
    };
    let n = g.n();
    let outcome = execute(g, setup, "msf", variant.name(), |_| Boruvka::new(variant, n))?;
    let mut edges: Vec<_> = outcome.values.iter().flat_map(|(_, s)| s.edges.iter().copied()).collect();
    edges.sort_unstable();
    let total_weight = edges.iter().map(|e| e.2 as u64).sum();
    let components = outcome.values.iter().map(|(v, s)| (*v, s.comp)).collect();
    let digest = ResultDigest::of_ints(
        edges.iter().map(|&(a, b, w)| (a, ((b as i64) << 32) | w as i64)),
    );
    Ok(AlgoRun::new(outcome, Forest { edges, total_weight, components }, digest))
}

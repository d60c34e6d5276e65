use super::{execute, AlgoRun, Setup};
use crate::channels::{Aggregator, CombinedMessage, Combiner, DirectMessage};
use crate::engine::{Channel, ComputeError, EngineError, Program, ResultDigest, Vertex};
use crate::graph::{Graph, VertexId, NO_VERTEX};
use crate::optimized::Propagation;

super::variants!(SccVariant { Plain = "plain", Propagation = "propagation" });

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SccState {
    /// Minimum id of the vertex's SCC once known, else `NO_VERTEX`.
    pub scc: VertexId,
    pub removed: bool,
    fwd: VertexId,
    bwd: VertexId,
    /// `(neighbor, live)` for out- and in-edges.
    out: Vec<(VertexId, bool)>,
    inn: Vec<(VertexId, bool)>,
}

impl SccState {
    fn live_neighbors(&self) -> Vec<VertexId> {
        let mut ids: Vec<VertexId> = self
            .out
            .iter()
            .chain(&self.inn)
            .filter(|(_, live)| *live)
            .map(|(d, _)| *d)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    fn kill(&mut self, other: VertexId) {
        for (d, live) in self.out.iter_mut().chain(self.inn.iter_mut()) {
            if *d == other {
                *live = false;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Trim,
    LabelInit,
    LabelStep,
    Recognize,
    Done,
}

enum Labels {
    Plain { fwd: CombinedMessage<VertexId>, bwd: CombinedMessage<VertexId>, changed: Aggregator<bool> },
    Propagation { fwd: Propagation<VertexId>, bwd: Propagation<VertexId> },
}

/// Min-label strongly connected components.
///
/// Rounds of: trim vertices with no live in- or out-edge (repeated until
/// nothing is trimmed), propagate the minimum id forward and backward along
/// live edges, then retire every vertex whose two labels agree as a member
/// of the SCC named by that label. Edges between vertices with different
/// label pairs cannot lie inside an SCC and are dropped.
pub struct MinLabelScc {
    /// `(sender, fwd, bwd, sender retired)`.
    notice: DirectMessage<(VertexId, VertexId, VertexId, bool)>,
    trimmed: Aggregator<bool>,
    live: Aggregator<bool>,
    labels: Labels,
    phase: Phase,
    rounds: u64,
    max_rounds: u64,
}

impl MinLabelScc {
    pub fn new(variant: SccVariant, num_vertices: usize) -> Self {
        let labels = match variant {
            SccVariant::Plain => Labels::Plain {
                fwd: CombinedMessage::new("fwd", Combiner::min()),
                bwd: CombinedMessage::new("bwd", Combiner::min()),
                changed: Aggregator::new("changed", Combiner::or()),
            },
            SccVariant::Propagation => Labels::Propagation {
                fwd: Propagation::new("fwd", Combiner::min()),
                bwd: Propagation::new("bwd", Combiner::min()),
            },
        };
        MinLabelScc {
            notice: DirectMessage::new("notice"),
            trimmed: Aggregator::new("trimmed", Combiner::or()),
            live: Aggregator::new("live", Combiner::or()),
            labels,
            phase: Phase::Trim,
            rounds: 0,
            max_rounds: num_vertices as u64 + 1,
        }
    }

    /// Label-propagation rounds run.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Forward and backward propagation channels, for the propagation variant.
    pub fn propagation(&self) -> Option<(&Propagation<VertexId>, &Propagation<VertexId>)> {
        match &self.labels {
            Labels::Propagation { fwd, bwd } => Some((fwd, bwd)),
            Labels::Plain { .. } => None,
        }
    }

    fn notify(&mut self, v: &Vertex<'_, SccState>) {
        let s = v.value();
        for n in s.live_neighbors() {
            self.notice.send_message(n, (v.id(), s.fwd, s.bwd, s.removed));
        }
    }

    fn trim(&mut self, v: &mut Vertex<'_, SccState>) {
        let me = v.id();
        let notes: Vec<_> = self.notice.get_iterator(v).to_vec();
        let s = v.value_mut();
        for (from, f, b, retired) in notes {
            if retired || (f, b) != (s.fwd, s.bwd) {
                s.kill(from);
            }
        }
        s.fwd = NO_VERTEX;
        s.bwd = NO_VERTEX;
        if s.removed {
            return;
        }
        let live_out = s.out.iter().any(|(_, l)| *l);
        let live_in = s.inn.iter().any(|(_, l)| *l);
        if !live_out || !live_in {
            s.removed = true;
            s.scc = me;
            self.trimmed.add(true);
            self.notify(v);
        } else {
            self.live.add(true);
        }
    }

    fn send_labels(&mut self, v: &Vertex<'_, SccState>, fwd_changed: bool, bwd_changed: bool) {
        let Labels::Plain { fwd, bwd, .. } = &mut self.labels else { return };
        let s = v.value();
        if fwd_changed {
            for &(d, live) in &s.out {
                if live {
                    fwd.send_message(d, s.fwd);
                }
            }
        }
        if bwd_changed {
            for &(d, live) in &s.inn {
                if live {
                    bwd.send_message(d, s.bwd);
                }
            }
        }
    }
}

impl Program for MinLabelScc {
    type Value = SccState;

    fn channels(&mut self) -> Vec<&mut dyn Channel<SccState>> {
        let mut out: Vec<&mut dyn Channel<SccState>> =
            vec![&mut self.notice, &mut self.trimmed, &mut self.live];
        match &mut self.labels {
            Labels::Plain { fwd, bwd, changed } => {
                out.push(fwd);
                out.push(bwd);
                out.push(changed);
            }
            Labels::Propagation { fwd, bwd } => {
                out.push(fwd);
                out.push(bwd);
            }
        }
        out
    }

    fn before_superstep(&mut self, step: u64) {
        if step == 1 {
            return;
        }
        self.phase = match self.phase {
            Phase::Trim if self.trimmed.result() => Phase::Trim,
            Phase::Trim if !self.live.result() => Phase::Done,
            Phase::Trim => {
                self.rounds += 1;
                Phase::LabelInit
            }
            Phase::LabelInit => match self.labels {
                Labels::Plain { .. } => Phase::LabelStep,
                Labels::Propagation { .. } => Phase::Recognize,
            },
            Phase::LabelStep => match &self.labels {
                Labels::Plain { changed, .. } if changed.result() => Phase::LabelStep,
                _ => Phase::Recognize,
            },
            Phase::Recognize => Phase::Trim,
            Phase::Done => Phase::Done,
        };
    }

    fn compute(&mut self, v: &mut Vertex<'_, SccState>) -> Result<(), ComputeError> {
        let me = v.id();
        if v.step() == 1 {
            let out = v.out_edges().iter().map(|e| (e.dst, true)).collect();
            let inn = v.in_edges().iter().map(|e| (e.dst, true)).collect();
            *v.value_mut() =
                SccState { scc: NO_VERTEX, removed: false, fwd: NO_VERTEX, bwd: NO_VERTEX, out, inn };
        }
        if self.phase == Phase::Done {
            v.vote_to_halt();
            return Ok(());
        }
        if self.rounds > self.max_rounds {
            return Err(ComputeError::Guard(format!("SCC exceeded {} label rounds", self.max_rounds)));
        }
        if self.phase == Phase::Trim {
            self.trim(v);
            return Ok(());
        }
        if v.value().removed {
            return Ok(());
        }
        match self.phase {
            Phase::LabelInit => {
                let s = v.value_mut();
                s.fwd = me;
                s.bwd = me;
                match &mut self.labels {
                    Labels::Plain { .. } => {}
                    Labels::Propagation { fwd, bwd } => {
                        fwd.set_value(v, me);
                        bwd.set_value(v, me);
                        for &(d, live) in &v.value().out {
                            if live {
                                fwd.add_edge(v, d);
                            }
                        }
                        for &(d, live) in &v.value().inn {
                            if live {
                                bwd.add_edge(v, d);
                            }
                        }
                    }
                }
                self.send_labels(v, true, true);
            }
            Phase::LabelStep => {
                let Labels::Plain { fwd, bwd, changed } = &mut self.labels else { unreachable!() };
                let (fm, bm) = (fwd.get_message(v), bwd.get_message(v));
                let s = v.value_mut();
                let fc = fm < s.fwd;
                let bc = bm < s.bwd;
                s.fwd = s.fwd.min(fm);
                s.bwd = s.bwd.min(bm);
                if fc || bc {
                    changed.add(true);
                }
                self.send_labels(v, fc, bc);
            }
            Phase::Recognize => {
                if let Labels::Propagation { fwd, bwd } = &self.labels {
                    let (f, b) = (fwd.get_value(v)?, bwd.get_value(v)?);
                    let s = v.value_mut();
                    s.fwd = f;
                    s.bwd = b;
                }
                let s = v.value_mut();
                if s.fwd == s.bwd {
                    s.removed = true;
                    s.scc = s.fwd;
                }
                self.notify(v);
            }
            Phase::Trim | Phase::Done => unreachable!(),
        }
        Ok(())
    }
}

/// SCC id (minimum member id) of every vertex of a directed graph.
pub fn scc(
    g: &Graph,
    variant: SccVariant,
    setup: &Setup,
) -> Result<AlgoRun<MinLabelScc, Vec<(VertexId, VertexId)>>, EngineError> {
    let n = g.n();
    let outcome = execute(g, setup, "scc", variant.name(), |_| MinLabelScc::new(variant, n))?;
    let ids: Vec<(VertexId, VertexId)> = outcome.values.iter().map(|(v, s)| (*v, s.scc)).collect();
    let digest = ResultDigest::of_ints(ids.iter().map(|&(v, c)| (v, c as i64)));
    Ok(AlgoRun::new(outcome, ids, digest))
}

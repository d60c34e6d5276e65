use std::collections::{HashMap, VecDeque};

use crate::channels::wire::Reader;
use crate::channels::{Combiner, Wire};
use crate::engine::{Channel, ChannelEnv, ContractError, Inbound, Outbox, Vertex};
use crate::graph::{GraphPartition, VertexId, Weight};

/// Fixpoint of `value[w] = h(value[w], f(value[u], weight))` over every
/// registered edge `u -> w`, computed inside one superstep.
///
/// `h` must be commutative, associative and idempotent (min, max). Vertices
/// take part by calling [`set_value`](Propagation::set_value); edges into
/// non-participants are ignored. Registering in a later superstep starts a
/// fresh session and discards the previous one.
///
/// Each round, a worker drains its worklist locally, then sends the updates
/// for remote targets (folded per target). Another round runs while any
/// worker still has work queued after delivery.
pub struct Propagation<T> {
    name: String,
    h: Combiner<T>,
    edge_fn: Option<fn(T, Weight) -> T>,
    session: u64,
    values: Vec<T>,
    member: Vec<bool>,
    members: Vec<usize>,
    staged: Vec<(usize, VertexId, Weight)>,
    offsets: Vec<usize>,
    adj: Vec<(VertexId, Weight)>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl<T: Wire + PartialEq> Propagation<T> {
    pub fn new(name: impl Into<String>, h: Combiner<T>) -> Self {
        Propagation {
            name: name.into(),
            h,
            edge_fn: None,
            session: 0,
            values: Vec::new(),
            member: Vec::new(),
            members: Vec::new(),
            staged: Vec::new(),
            offsets: Vec::new(),
            adj: Vec::new(),
            queue: VecDeque::new(),
            queued: Vec::new(),
        }
    }

    /// Applies `f(value, weight)` to what travels along each edge.
    pub fn with_edge_fn(mut self, f: fn(T, Weight) -> T) -> Self {
        self.edge_fn = Some(f);
        self
    }

    fn touch(&mut self, step: u64) {
        if self.session == step {
            return;
        }
        for idx in self.members.drain(..) {
            self.member[idx] = false;
            self.values[idx] = self.h.identity;
        }
        self.staged.clear();
        self.adj.clear();
        self.offsets.clear();
        self.queue.clear();
        self.session = step;
    }

    pub fn add_edge<V>(&mut self, v: &Vertex<'_, V>, dst: VertexId) {
        self.add_weighted_edge(v, dst, 0);
    }

    pub fn add_weighted_edge<V>(&mut self, v: &Vertex<'_, V>, dst: VertexId, w: Weight) {
        self.touch(v.step());
        self.staged.push((v.local(), dst, w));
    }

    pub fn set_value<V>(&mut self, v: &Vertex<'_, V>, m: T) {
        self.touch(v.step());
        let idx = v.local();
        if !self.member[idx] {
            self.member[idx] = true;
            self.members.push(idx);
        }
        self.values[idx] = m;
    }

    /// The fixpoint value of `v`, readable in any superstep after the one
    /// that registered it.
    pub fn get_value<V>(&self, v: &Vertex<'_, V>) -> Result<T, ContractError> {
        let idx = v.local();
        if self.session == 0 || self.session >= v.step() || !self.member[idx] {
            return Err(ContractError::NotConverged { channel: self.name.clone(), vertex: v.id() });
        }
        Ok(self.values[idx])
    }

    /// The current session's registered edges as `(src local index, dst, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, VertexId, Weight)> + '_ {
        (0..self.offsets.len().saturating_sub(1)).flat_map(move |idx| {
            self.adj[self.offsets[idx]..self.offsets[idx + 1]].iter().map(move |&(d, w)| (idx, d, w))
        })
    }

    /// Superstep that registered the current session (0 before any).
    pub fn session(&self) -> u64 {
        self.session
    }

    /// Participant value by local index, for fixpoint checks after a run.
    pub fn value_at(&self, idx: usize) -> Option<T> {
        self.member.get(idx).copied().unwrap_or(false).then(|| self.values[idx])
    }

    pub fn combiner(&self) -> &Combiner<T> {
        &self.h
    }

    pub fn edge_fn(&self) -> Option<fn(T, Weight) -> T> {
        self.edge_fn
    }

    fn build(&mut self, numv: usize) {
        let mut staged = std::mem::take(&mut self.staged);
        staged.sort_by_key(|(idx, _, _)| *idx);
        self.offsets = vec![0; numv + 1];
        for &(idx, _, _) in &staged {
            self.offsets[idx + 1] += 1;
        }
        for i in 0..numv {
            self.offsets[i + 1] += self.offsets[i];
        }
        self.adj = staged.into_iter().map(|(_, d, w)| (d, w)).collect();
    }

    fn push(&mut self, idx: usize) {
        if !self.queued[idx] {
            self.queued[idx] = true;
            self.queue.push_back(idx);
        }
    }

    fn improve(&mut self, idx: usize, m: T) {
        let next = self.h.apply(self.values[idx], m);
        if next != self.values[idx] {
            self.values[idx] = next;
            self.push(idx);
        }
    }
}

impl<V, T: Wire + PartialEq> Channel<V> for Propagation<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn initialize(&mut self, env: &mut ChannelEnv<'_, V>) {
        let n = env.numv();
        self.values = vec![self.h.identity; n];
        self.member = vec![false; n];
        self.queued = vec![false; n];
    }

    fn serialize(&mut self, env: &mut ChannelEnv<'_, V>, out: &mut Outbox) -> Result<(), ContractError> {
        if self.session != env.step() {
            return Ok(());
        }
        if env.round() == 1 {
            self.build(env.numv());
            for i in 0..self.members.len() {
                let idx = self.members[i];
                env.wake(idx);
                self.push(idx);
            }
        }
        let me = env.worker();
        let mut remote: Vec<Vec<(VertexId, T)>> = vec![Vec::new(); env.workers()];
        while let Some(u) = self.queue.pop_front() {
            self.queued[u] = false;
            let val = self.values[u];
            for e in self.offsets[u]..self.offsets[u + 1] {
                let (dst, w) = self.adj[e];
                let m = match self.edge_fn {
                    Some(f) => f(val, w),
                    None => val,
                };
                match env.owner(dst) {
                    Some(owner) if owner == me => match env.local_index(dst) {
                        Some(t) if self.member[t] => self.improve(t, m),
                        Some(_) => {}
                        None => env.note_unknown(),
                    },
                    Some(owner) => remote[owner].push((dst, m)),
                    None => env.note_unknown(),
                }
            }
        }
        for (w, mut recs) in remote.into_iter().enumerate() {
            recs.sort_by_key(|(d, _)| *d);
            let mut folded: Vec<(VertexId, T)> = Vec::new();
            for (d, m) in recs {
                match folded.last_mut() {
                    Some((fd, acc)) if *fd == d => *acc = self.h.apply(*acc, m),
                    _ => folded.push((d, m)),
                }
            }
            let buf = out.buffer(w);
            for (d, m) in &folded {
                crate::channels::wire::put_id(buf, *d);
                m.put(buf);
            }
            out.add_records(w, folded.len() as u64);
        }
        Ok(())
    }

    fn deserialize(&mut self, env: &mut ChannelEnv<'_, V>, inbound: &Inbound<'_>) -> Result<(), ContractError> {
        if self.session != env.step() {
            return Ok(());
        }
        let name = std::mem::take(&mut self.name);
        let result = self.absorb(&name, env, inbound);
        self.name = name;
        result
    }

    fn again(&self) -> bool {
        !self.queue.is_empty()
    }
}

impl<T: Wire + PartialEq> Propagation<T> {
    fn absorb<V>(
        &mut self,
        name: &str,
        env: &mut ChannelEnv<'_, V>,
        inbound: &Inbound<'_>,
    ) -> Result<(), ContractError> {
        for (src, seg) in inbound.iter() {
            let mut r = Reader::new(name, src, seg);
            while !r.is_empty() {
                let (dst, m) = r.record::<T>()?;
                match env.local_index(dst) {
                    Some(t) if self.member[t] => self.improve(t, m),
                    Some(_) => {}
                    None => env.note_unknown(),
                }
            }
        }
        Ok(())
    }
}

/// Checks that every registered edge `u -> w` between participants of the
/// latest session is stable, i.e. `h(value[w], f(value[u])) == value[w]`.
/// Workers that sat out the latest session still hold an older one, which
/// is ignored.
///
/// `channels[i]` must be the channel instance of the worker owning
/// `parts[i]`. Returns the number of edges checked.
pub fn check_fixpoint<T: Wire + PartialEq + std::fmt::Debug>(
    channels: &[&Propagation<T>],
    parts: &[GraphPartition],
) -> Result<usize, String> {
    let mut home = HashMap::new();
    for (w, p) in parts.iter().enumerate() {
        for (idx, &v) in p.owned().iter().enumerate() {
            home.insert(v, (w, idx));
        }
    }
    let latest = channels.iter().map(|c| c.session).max().unwrap_or(0);
    let mut checked = 0;
    for (w, ch) in channels.iter().enumerate().filter(|(_, c)| c.session == latest) {
        for (idx, dst, weight) in ch.edges() {
            let Some(src_val) = ch.value_at(idx) else { continue };
            let Some(&(dw, di)) = home.get(&dst) else { continue };
            if channels[dw].session != latest {
                continue;
            }
            let Some(dst_val) = channels[dw].value_at(di) else { continue };
            let m = match ch.edge_fn {
                Some(f) => f(src_val, weight),
                None => src_val,
            };
            if ch.h.apply(dst_val, m) != dst_val {
                return Err(format!(
                    "edge {} -> {dst}: source value {src_val:?} still improves {dst_val:?}",
                    parts[w].vertex(idx)
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

use super::combiner::Combiner;
use super::wire::{Reader, Wire};
use crate::engine::{Channel, ChannelEnv, ContractError, Inbound, Outbox, Vertex};
use crate::graph::VertexId;

/// Per-vertex combined receive slots, reset between supersteps.
pub(crate) struct Inbox<T> {
    values: Vec<T>,
    has: Vec<bool>,
    touched: Vec<usize>,
}

impl<T: Copy> Inbox<T> {
    pub fn new() -> Self {
        Inbox { values: Vec::new(), has: Vec::new(), touched: Vec::new() }
    }

    pub fn resize(&mut self, numv: usize, identity: T) {
        self.values = vec![identity; numv];
        self.has = vec![false; numv];
        self.touched.clear();
    }

    pub fn reset(&mut self, identity: T) {
        for idx in self.touched.drain(..) {
            self.values[idx] = identity;
            self.has[idx] = false;
        }
    }

    pub fn fold(&mut self, idx: usize, m: T, comb: &Combiner<T>) {
        if !self.has[idx] {
            self.has[idx] = true;
            self.touched.push(idx);
        }
        self.values[idx] = comb.apply(self.values[idx], m);
    }

    pub fn get(&self, idx: usize) -> T {
        self.values[idx]
    }

    pub fn has(&self, idx: usize) -> bool {
        self.has[idx]
    }

    /// Folds every `(dst, value)` record of `inbound`, in source-worker order,
    /// waking each receiver.
    pub fn absorb<V>(
        &mut self,
        name: &str,
        comb: &Combiner<T>,
        env: &mut ChannelEnv<'_, V>,
        inbound: &Inbound<'_>,
    ) -> Result<(), ContractError>
    where
        T: Wire,
    {
        for (src, seg) in inbound.iter() {
            let mut r = Reader::new(name, src, seg);
            while !r.is_empty() {
                let (dst, m) = r.record::<T>()?;
                match env.local_index(dst) {
                    Some(idx) => {
                        self.fold(idx, m, comb);
                        env.wake(idx);
                    }
                    None => env.note_unknown(),
                }
            }
        }
        Ok(())
    }
}

/// Messages folded per receiver with a combiner, both on the sending worker
/// and across workers.
pub struct CombinedMessage<T> {
    name: String,
    comb: Combiner<T>,
    outbox: Vec<(VertexId, T)>,
    inbox: Inbox<T>,
}

impl<T: Wire> CombinedMessage<T> {
    pub fn new(name: impl Into<String>, comb: Combiner<T>) -> Self {
        CombinedMessage { name: name.into(), comb, outbox: Vec::new(), inbox: Inbox::new() }
    }

    pub fn send_message(&mut self, dst: VertexId, m: T) {
        self.outbox.push((dst, m));
    }

    /// The fold of everything sent to `v` last superstep, or the identity.
    pub fn get_message<V>(&self, v: &Vertex<'_, V>) -> T {
        self.inbox.get(v.local())
    }

    pub fn has_message<V>(&self, v: &Vertex<'_, V>) -> bool {
        self.inbox.has(v.local())
    }

    pub fn combiner(&self) -> &Combiner<T> {
        &self.comb
    }
}

impl<V, T: Wire> Channel<V> for CombinedMessage<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn initialize(&mut self, env: &mut ChannelEnv<'_, V>) {
        self.inbox.resize(env.numv(), self.comb.identity);
    }

    fn serialize(&mut self, env: &mut ChannelEnv<'_, V>, out: &mut Outbox) -> Result<(), ContractError> {
        self.inbox.reset(self.comb.identity);
        // Stable sort keeps send order within each destination.
        self.outbox.sort_by_key(|(dst, _)| *dst);
        let mut folded: Vec<(VertexId, T)> = Vec::new();
        for &(dst, m) in &self.outbox {
            match folded.last_mut() {
                Some((d, acc)) if *d == dst => *acc = self.comb.apply(*acc, m),
                _ => folded.push((dst, self.comb.apply(self.comb.identity, m))),
            }
        }
        self.outbox.clear();
        super::route_records(env, out, folded);
        Ok(())
    }

    fn deserialize(&mut self, env: &mut ChannelEnv<'_, V>, inbound: &Inbound<'_>) -> Result<(), ContractError> {
        self.inbox.absorb(&self.name, &self.comb, env, inbound)
    }
}

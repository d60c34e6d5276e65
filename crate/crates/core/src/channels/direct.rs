use super::wire::{Reader, Wire};
use crate::engine::{Channel, ChannelEnv, ContractError, Inbound, Outbox, Vertex};
use crate::graph::VertexId;

/// Point-to-point messages delivered as an unordered bag per receiver.
pub struct DirectMessage<T> {
    name: String,
    outbox: Vec<(VertexId, T)>,
    inbox: Vec<Vec<T>>,
    touched: Vec<usize>,
}

impl<T: Wire> DirectMessage<T> {
    pub fn new(name: impl Into<String>) -> Self {
        DirectMessage { name: name.into(), outbox: Vec::new(), inbox: Vec::new(), touched: Vec::new() }
    }

    pub fn send_message(&mut self, dst: VertexId, m: T) {
        self.outbox.push((dst, m));
    }

    /// Messages delivered to `v` at the end of the previous superstep.
    pub fn get_iterator<V>(&self, v: &Vertex<'_, V>) -> &[T] {
        &self.inbox[v.local()]
    }
}

impl<V, T: Wire> Channel<V> for DirectMessage<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn initialize(&mut self, env: &mut ChannelEnv<'_, V>) {
        self.inbox = vec![Vec::new(); env.numv()];
    }

    fn serialize(&mut self, env: &mut ChannelEnv<'_, V>, out: &mut Outbox) -> Result<(), ContractError> {
        for idx in self.touched.drain(..) {
            self.inbox[idx].clear();
        }
        super::route_records(env, out, self.outbox.drain(..));
        Ok(())
    }

    fn deserialize(&mut self, env: &mut ChannelEnv<'_, V>, inbound: &Inbound<'_>) -> Result<(), ContractError> {
        for (src, seg) in inbound.iter() {
            let mut r = Reader::new(&self.name, src, seg);
            while !r.is_empty() {
                let (dst, m) = r.record::<T>()?;
                let Some(idx) = env.local_index(dst) else {
                    env.note_unknown();
                    continue;
                };
                if self.inbox[idx].is_empty() {
                    self.touched.push(idx);
                }
                self.inbox[idx].push(m);
                env.wake(idx);
            }
        }
        Ok(())
    }
}

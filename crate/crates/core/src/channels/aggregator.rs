use super::combiner::Combiner;
use super::wire::{Reader, Wire};
use crate::engine::{Channel, ChannelEnv, ContractError, Inbound, Outbox};

/// Global fold of per-vertex contributions, visible everywhere one superstep later.
///
/// Every worker sends its local partial to every worker, so each receives
/// all `M` partials and folds them in worker order.
pub struct Aggregator<T> {
    name: String,
    comb: Combiner<T>,
    partial: T,
    result: T,
}

impl<T: Wire> Aggregator<T> {
    pub fn new(name: impl Into<String>, comb: Combiner<T>) -> Self {
        Aggregator { name: name.into(), partial: comb.identity, result: comb.identity, comb }
    }

    pub fn add(&mut self, v: T) {
        self.partial = self.comb.apply(self.partial, v);
    }

    /// Fold of every `add` from the previous superstep; the identity in superstep 1.
    pub fn result(&self) -> T {
        self.result
    }
}

impl<V, T: Wire> Channel<V> for Aggregator<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn serialize(&mut self, env: &mut ChannelEnv<'_, V>, out: &mut Outbox) -> Result<(), ContractError> {
        for w in 0..env.workers() {
            self.partial.put(out.buffer(w));
            out.add_records(w, 1);
        }
        self.partial = self.comb.identity;
        Ok(())
    }

    fn deserialize(&mut self, _env: &mut ChannelEnv<'_, V>, inbound: &Inbound<'_>) -> Result<(), ContractError> {
        let mut acc = self.comb.identity;
        for (src, seg) in inbound.iter() {
            let mut r = Reader::new(&self.name, src, seg);
            acc = self.comb.apply(acc, r.value::<T>()?);
            r.finish()?;
        }
        self.result = acc;
        Ok(())
    }
}

use crate::channels::wire::{put_id, Reader};
use crate::channels::{Combiner, Inbox, Wire};
use crate::engine::{Channel, ChannelEnv, ContractError, Inbound, Outbox, Vertex};
use crate::graph::VertexId;

struct Table {
    /// `(dst, local source index)`, sorted.
    edges: Vec<(VertexId, usize)>,
    /// `(dst, start, end)` runs of `edges`, per destination worker.
    runs: Vec<Vec<(VertexId, usize, usize)>>,
}

/// Static-pattern scatter: each vertex sends one value to all of its
/// registered out-neighbors.
///
/// The edge table is sorted by destination when the channel first fires and
/// is immutable from then on. Values are folded per destination on the
/// sending worker. Destination ids go over the wire once per pair of workers,
/// with the first firing; afterwards only the values are sent, in the same
/// order.
pub struct ScatterCombine<T> {
    name: String,
    comb: Combiner<T>,
    staged: Vec<(VertexId, usize)>,
    table: Option<Table>,
    has_edges: Vec<bool>,
    out: Vec<Option<T>>,
    set: Vec<usize>,
    enabled: bool,
    ids_sent: Vec<bool>,
    ids_recv: Vec<Option<Vec<Option<usize>>>>,
    inbox: Inbox<T>,
}

impl<T: Wire> ScatterCombine<T> {
    pub fn new(name: impl Into<String>, comb: Combiner<T>) -> Self {
        ScatterCombine {
            name: name.into(),
            comb,
            staged: Vec::new(),
            table: None,
            has_edges: Vec::new(),
            out: Vec::new(),
            set: Vec::new(),
            enabled: true,
            ids_sent: Vec::new(),
            ids_recv: Vec::new(),
            inbox: Inbox::new(),
        }
    }

    /// Registers the edge `v -> dst`. Duplicates are kept.
    pub fn add_edge<V>(&mut self, v: &Vertex<'_, V>, dst: VertexId) -> Result<(), ContractError> {
        if self.table.is_some() {
            return Err(ContractError::TopologyFrozen { channel: self.name.clone(), vertex: v.id() });
        }
        self.staged.push((dst, v.local()));
        self.has_edges[v.local()] = true;
        Ok(())
    }

    /// The value `v` sends along all its edges this superstep.
    pub fn set_message<V>(&mut self, v: &Vertex<'_, V>, m: T) {
        let idx = v.local();
        if self.out[idx].is_none() {
            self.set.push(idx);
        }
        self.out[idx] = Some(m);
    }

    /// Fold over every in-neighbor's value from the last firing, or the identity.
    pub fn get_message<V>(&self, v: &Vertex<'_, V>) -> T {
        self.inbox.get(v.local())
    }

    pub fn has_message<V>(&self, v: &Vertex<'_, V>) -> bool {
        self.inbox.has(v.local())
    }

    pub fn set_enabled(&mut self, on: bool) {
        self.enabled = on;
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn is_frozen(&self) -> bool {
        self.table.is_some()
    }

    fn freeze<V>(&mut self, env: &mut ChannelEnv<'_, V>) {
        let mut edges = std::mem::take(&mut self.staged);
        edges.sort_unstable();
        let mut runs = vec![Vec::new(); env.workers()];
        let mut start = 0;
        while start < edges.len() {
            let dst = edges[start].0;
            let mut end = start;
            while end < edges.len() && edges[end].0 == dst {
                end += 1;
            }
            match env.owner(dst) {
                Some(w) => runs[w].push((dst, start, end)),
                None => env.note_unknown(),
            }
            start = end;
        }
        self.table = Some(Table { edges, runs });
    }
}

impl<V, T: Wire> Channel<V> for ScatterCombine<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn initialize(&mut self, env: &mut ChannelEnv<'_, V>) {
        let n = env.numv();
        self.has_edges = vec![false; n];
        self.out = vec![None; n];
        self.ids_sent = vec![false; env.workers()];
        self.ids_recv = vec![None; env.workers()];
        self.inbox.resize(n, self.comb.identity);
    }

    fn serialize(&mut self, env: &mut ChannelEnv<'_, V>, out: &mut Outbox) -> Result<(), ContractError> {
        self.inbox.reset(self.comb.identity);
        if !self.enabled || self.set.is_empty() {
            for idx in self.set.drain(..) {
                self.out[idx] = None;
            }
            return Ok(());
        }
        if let Some(idx) = (0..env.numv()).find(|&i| self.has_edges[i] && self.out[i].is_none()) {
            return Err(ContractError::MissingScatterValue {
                channel: self.name.clone(),
                vertex: env.vertex(idx),
            });
        }
        if self.table.is_none() {
            self.freeze(env);
        }
        let table = self.table.as_ref().expect("frozen above");
        for (w, runs) in table.runs.iter().enumerate() {
            if runs.is_empty() {
                continue;
            }
            let buf = out.buffer(w);
            if !self.ids_sent[w] {
                (runs.len() as u32).put(buf);
                for &(dst, _, _) in runs {
                    put_id(buf, dst);
                }
                self.ids_sent[w] = true;
            }
            for &(_, start, end) in runs {
                let mut acc = self.comb.identity;
                for &(_, idx) in &table.edges[start..end] {
                    acc = self.comb.apply(acc, self.out[idx].expect("checked above"));
                }
                acc.put(buf);
            }
            out.add_records(w, runs.len() as u64);
        }
        for idx in self.set.drain(..) {
            self.out[idx] = None;
        }
        Ok(())
    }

    fn deserialize(&mut self, env: &mut ChannelEnv<'_, V>, inbound: &Inbound<'_>) -> Result<(), ContractError> {
        for (src, seg) in inbound.iter() {
            if seg.is_empty() {
                continue;
            }
            let mut r = Reader::new(&self.name, src, seg);
            if self.ids_recv[src].is_none() {
                let n = r.value::<u32>()? as usize;
                let mut ids = Vec::with_capacity(n);
                for _ in 0..n {
                    ids.push(env.local_index(r.id()?));
                }
                self.ids_recv[src] = Some(ids);
            }
            for slot in self.ids_recv[src].as_ref().expect("set above") {
                let m = r.value::<T>()?;
                match *slot {
                    Some(idx) => {
                        self.inbox.fold(idx, m, &self.comb);
                        env.wake(idx);
                    }
                    None => env.note_unknown(),
                }
            }
            r.finish()?;
        }
        Ok(())
    }
}

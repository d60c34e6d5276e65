//! The worker runtime.
//!
//! Each worker owns one [`GraphPartition`], one [`Program`] instance (which in
//! turn owns its channels) and the vertex values of its partition. A
//! superstep runs `compute` on every active vertex, then drives the
//! registered channels through as many serialize / exchange / deserialize
//! rounds as any of them requests via [`Channel::again`].
//!
//! Buffer framing: in every round, the buffer worker `i` sends to worker `j`
//! is the concatenation of one segment per registered channel, in
//! registration order, each prefixed by its length as a 4-byte little-endian
//! integer. Channels that are inactive in a round contribute an empty segment.

mod report;
mod transport;
mod worker;

pub use report::{ChannelMetrics, ResultDigest, RunReport};
pub use transport::{BarrierKind, BarrierTag};
pub use worker::{run, EngineConfig, RunOutcome, WireSegment, WorkerInfo};

use thiserror::Error;

use crate::graph::{AdjEntry, Directedness, GraphError, GraphPartition, PartitionMap, VertexId};

/// Violations of a channel's usage contract.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ContractError {
    #[error("channel `{channel}`: add_edge from vertex {vertex} after the edge table was frozen")]
    TopologyFrozen { channel: String, vertex: VertexId },
    #[error("channel `{channel}`: vertex {vertex} has registered edges but set no message")]
    MissingScatterValue { channel: String, vertex: VertexId },
    #[error("channel `{channel}`: vertex {vertex} issued more than one request in a superstep")]
    DuplicateRequest { channel: String, vertex: VertexId },
    #[error("channel `{channel}`: vertex {vertex} has no response from the previous superstep")]
    NoResponse { channel: String, vertex: VertexId },
    #[error("channel `{channel}`: value of vertex {vertex} read before its propagation converged")]
    NotConverged { channel: String, vertex: VertexId },
    #[error("channel `{channel}`: request targets vertex {target}, which is not in the graph")]
    UnknownTarget { channel: String, target: VertexId },
    #[error("channel `{channel}`: malformed segment from worker {from}: {detail}")]
    Malformed { channel: String, from: usize, detail: String },
}

/// Errors a vertex program may raise from `compute`.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ComputeError {
    #[error(transparent)]
    Contract(#[from] ContractError),
    /// An algorithm-level structural guard fired (e.g. an iteration cap).
    #[error("{0}")]
    Guard(String),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("channel registration differs across workers: worker {worker} registered {found:?}, worker 0 registered {expected:?}")]
    RegistrationMismatch { worker: usize, expected: Vec<String>, found: Vec<String> },
    #[error("worker {worker}: {source}")]
    Compute { worker: usize, source: ComputeError },
    #[error("worker {worker}: {source}")]
    Contract { worker: usize, source: ContractError },
    #[error("lockstep violated on worker {worker}: local tag {local:?}, worker {peer} sent {remote:?}")]
    Lockstep { worker: usize, peer: usize, local: BarrierTag, remote: BarrierTag },
    #[error("no termination within {0} supersteps")]
    SuperstepLimit(u64),
    #[error("worker {0} terminated abnormally")]
    WorkerFailed(usize),
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Outgoing segments of one channel for one round, one per destination worker.
pub struct Outbox {
    bufs: Vec<Vec<u8>>,
    records: Vec<u64>,
}

impl Outbox {
    pub(crate) fn new(workers: usize) -> Self {
        Outbox { bufs: vec![Vec::new(); workers], records: vec![0; workers] }
    }

    pub fn workers(&self) -> usize {
        self.bufs.len()
    }

    /// The segment destined for `worker`.
    pub fn buffer(&mut self, worker: usize) -> &mut Vec<u8> {
        &mut self.bufs[worker]
    }

    /// Records how many logical messages were written for `worker`.
    pub fn add_records(&mut self, worker: usize, n: u64) {
        self.records[worker] += n;
    }
}

/// Segments of one channel delivered to this worker in one round, by source.
pub struct Inbound<'a> {
    segs: Vec<&'a [u8]>,
}

impl<'a> Inbound<'a> {
    pub(crate) fn new(segs: Vec<&'a [u8]>) -> Self {
        Inbound { segs }
    }

    pub fn from(&self, worker: usize) -> &'a [u8] {
        self.segs[worker]
    }

    /// `(source worker, segment)` in ascending worker order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &'a [u8])> + '_ {
        self.segs.iter().copied().enumerate()
    }
}

/// What a channel may see and do during its hooks.
pub struct ChannelEnv<'a, V> {
    worker: usize,
    workers: usize,
    step: u64,
    round: u32,
    partition: &'a GraphPartition,
    map: &'a PartitionMap,
    values: &'a [V],
    woken: &'a mut [bool],
    ignored_activations: &'a mut u64,
}

impl<'a, V> ChannelEnv<'a, V> {
    pub fn worker(&self) -> usize {
        self.worker
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Current superstep (1-based; 0 during `initialize`).
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Current exchange round within the superstep (1-based).
    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn numv(&self) -> usize {
        self.partition.numv()
    }

    pub fn partition(&self) -> &GraphPartition {
        self.partition
    }

    pub fn owner(&self, v: VertexId) -> Option<usize> {
        self.map.owner(v).filter(|&w| w < self.workers)
    }

    pub fn local_index(&self, v: VertexId) -> Option<usize> {
        self.partition.local_index(v)
    }

    pub fn vertex(&self, idx: usize) -> VertexId {
        self.partition.vertex(idx)
    }

    /// Value of a local vertex as of the end of this superstep's compute phase.
    pub fn value(&self, idx: usize) -> &V {
        &self.values[idx]
    }

    /// Activates a local vertex for the next superstep.
    pub fn wake(&mut self, idx: usize) {
        self.woken[idx] = true;
    }

    /// Activates a vertex by id. Ids this worker does not own are counted and
    /// ignored; returns whether the activation applied.
    pub fn activate(&mut self, v: VertexId) -> bool {
        match self.partition.local_index(v) {
            Some(idx) => {
                self.woken[idx] = true;
                true
            }
            None => {
                *self.ignored_activations += 1;
                false
            }
        }
    }

    /// Counts a delivery addressed to a vertex that does not exist here.
    pub fn note_unknown(&mut self) {
        *self.ignored_activations += 1;
    }
}

/// The four-hook contract every channel implements.
///
/// `serialize` and `deserialize` are paired: the segment written for worker
/// `j` in a round is exactly what `j`'s deserialize sees from this worker in
/// that round.
pub trait Channel<V>: Send {
    /// Name used in metrics and in the cross-worker registration check.
    fn name(&self) -> &str;

    /// Called once before the first superstep.
    fn initialize(&mut self, _env: &mut ChannelEnv<'_, V>) {}

    fn serialize(&mut self, env: &mut ChannelEnv<'_, V>, out: &mut Outbox)
        -> Result<(), ContractError>;

    fn deserialize(
        &mut self,
        env: &mut ChannelEnv<'_, V>,
        inbound: &Inbound<'_>,
    ) -> Result<(), ContractError>;

    /// Whether another exchange round is needed. Evaluated after deserialize
    /// and OR-reduced across workers.
    fn again(&self) -> bool {
        false
    }
}

/// Handle on the vertex currently being computed.
pub struct Vertex<'a, V> {
    idx: usize,
    step: u64,
    partition: &'a GraphPartition,
    value: &'a mut V,
    halted: bool,
}

impl<'a, V> Vertex<'a, V> {
    pub fn id(&self) -> VertexId {
        self.partition.vertex(self.idx)
    }

    pub fn local(&self) -> usize {
        self.idx
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Number of vertices in the whole graph.
    pub fn num_vertices(&self) -> usize {
        self.partition.global_vertices()
    }

    pub fn value(&self) -> &V {
        self.value
    }

    pub fn value_mut(&mut self) -> &mut V {
        self.value
    }

    pub fn out_edges(&self) -> &'a [AdjEntry] {
        self.partition.out_edges(self.idx)
    }

    pub fn in_edges(&self) -> &'a [AdjEntry] {
        self.partition.in_edges(self.idx)
    }

    /// Every incident edge regardless of direction (out then in for directed graphs).
    pub fn neighbors(&self) -> impl Iterator<Item = &'a AdjEntry> + 'a {
        let out = self.partition.out_edges(self.idx);
        let inc: &'a [AdjEntry] = match self.partition.directedness() {
            Directedness::Directed => self.partition.in_edges(self.idx),
            Directedness::Undirected => &[],
        };
        out.iter().chain(inc.iter())
    }

    pub fn vote_to_halt(&mut self) {
        self.halted = true;
    }
}

/// A vertex program: the per-worker object owning the channels, plus the
/// per-vertex `compute` logic.
pub trait Program: Send {
    type Value: Default + Clone + Send;

    /// Registered channels, in registration order. Must return the same
    /// channels in the same order on every call.
    fn channels(&mut self) -> Vec<&mut dyn Channel<Self::Value>>;

    /// Worker-level hook before the compute phase of `step`. Only global
    /// information (step number, aggregator results) may drive decisions
    /// here so that all workers stay in agreement.
    fn before_superstep(&mut self, _step: u64) {}

    fn compute(&mut self, v: &mut Vertex<'_, Self::Value>) -> Result<(), ComputeError>;
}

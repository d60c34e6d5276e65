use std::collections::HashMap;

use super::{Directedness, Graph, GraphError, VertexId, Weight};

/// Maps each vertex to the worker that owns it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionMap {
    /// `owner(v) = v mod workers`.
    HashModulo { workers: usize },
    /// Precomputed assignment, e.g. from an external partitioner.
    Explicit(HashMap<VertexId, usize>),
}

impl PartitionMap {
    pub fn hash(workers: usize) -> Self {
        PartitionMap::HashModulo { workers: workers.max(1) }
    }

    pub fn owner(&self, v: VertexId) -> Option<usize> {
        match self {
            PartitionMap::HashModulo { workers } => Some(v as usize % workers),
            PartitionMap::Explicit(map) => map.get(&v).copied(),
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, PartitionMap::Explicit(_))
    }
}

/// One adjacency record: neighbor id plus optional weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjEntry {
    pub dst: VertexId,
    pub weight: Option<Weight>,
}

#[derive(Debug, Clone)]
struct Csr {
    offsets: Vec<usize>,
    entries: Vec<AdjEntry>,
}

impl Csr {
    fn build(numv: usize, mut pairs: Vec<(usize, AdjEntry)>) -> Self {
        // Stable sort keeps the edge-list order within each vertex.
        pairs.sort_by_key(|(idx, _)| *idx);
        let mut offsets = vec![0; numv + 1];
        for (idx, _) in &pairs {
            offsets[idx + 1] += 1;
        }
        for i in 0..numv {
            offsets[i + 1] += offsets[i];
        }
        Csr { offsets, entries: pairs.into_iter().map(|(_, e)| e).collect() }
    }

    fn row(&self, idx: usize) -> &[AdjEntry] {
        &self.entries[self.offsets[idx]..self.offsets[idx + 1]]
    }
}

/// One worker's slice of the graph: owned vertices (ascending) and their
/// adjacency. The local index of a vertex is its position in `owned`.
#[derive(Debug, Clone)]
pub struct GraphPartition {
    worker_id: usize,
    owned: Vec<VertexId>,
    directedness: Directedness,
    out: Csr,
    // Only present for directed graphs; undirected rows already hold both directions.
    incoming: Option<Csr>,
    global_vertices: usize,
}

impl GraphPartition {
    pub fn worker_id(&self) -> usize {
        self.worker_id
    }

    pub fn owned(&self) -> &[VertexId] {
        &self.owned
    }

    pub fn numv(&self) -> usize {
        self.owned.len()
    }

    /// Number of vertices in the whole graph.
    pub fn global_vertices(&self) -> usize {
        self.global_vertices
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn local_index(&self, v: VertexId) -> Option<usize> {
        self.owned.binary_search(&v).ok()
    }

    pub fn vertex(&self, idx: usize) -> VertexId {
        self.owned[idx]
    }

    /// Outgoing edges; for undirected graphs, every incident edge.
    pub fn out_edges(&self, idx: usize) -> &[AdjEntry] {
        self.out.row(idx)
    }

    /// Incoming edges; for undirected graphs, the same rows as `out_edges`.
    pub fn in_edges(&self, idx: usize) -> &[AdjEntry] {
        match &self.incoming {
            Some(csr) => csr.row(idx),
            None => self.out.row(idx),
        }
    }
}

/// Splits `g` into `workers` disjoint partitions according to `map`.
pub fn partition(
    g: &Graph,
    workers: usize,
    map: &PartitionMap,
) -> Result<Vec<GraphPartition>, GraphError> {
    if workers == 0 {
        return Err(GraphError::InvalidParameter("worker count must be at least 1".into()));
    }
    let mut owned: Vec<Vec<VertexId>> = vec![Vec::new(); workers];
    let mut home: HashMap<VertexId, (usize, usize)> = HashMap::with_capacity(g.n());
    for &v in g.vertices() {
        let w = map.owner(v).ok_or(GraphError::UnmappedVertex(v))?;
        if w >= workers {
            return Err(GraphError::WorkerOutOfRange { vertex: v, worker: w, workers });
        }
        home.insert(v, (w, owned[w].len()));
        owned[w].push(v);
    }

    let undirected = g.directedness() == Directedness::Undirected;
    let mut out_pairs: Vec<Vec<(usize, AdjEntry)>> = vec![Vec::new(); workers];
    let mut in_pairs: Vec<Vec<(usize, AdjEntry)>> = vec![Vec::new(); workers];
    for e in g.edges() {
        let (sw, si) = home[&e.src];
        let (dw, di) = home[&e.dst];
        out_pairs[sw].push((si, AdjEntry { dst: e.dst, weight: e.weight }));
        let back = (di, AdjEntry { dst: e.src, weight: e.weight });
        if undirected {
            out_pairs[dw].push(back);
        } else {
            in_pairs[dw].push(back);
        }
    }

    let parts = owned
        .into_iter()
        .zip(out_pairs.into_iter().zip(in_pairs))
        .enumerate()
        .map(|(worker_id, (owned, (outs, ins)))| {
            let numv = owned.len();
            GraphPartition {
                worker_id,
                owned,
                directedness: g.directedness(),
                out: Csr::build(numv, outs),
                incoming: (!undirected).then(|| Csr::build(numv, ins)),
                global_vertices: g.n(),
            }
        })
        .collect();
    Ok(parts)
}

//! Graph representation, partitioning, edge-list I/O and synthetic generators.
//!
//! A [`Graph`] is an immutable edge list over an explicit vertex set. Workers
//! never see a `Graph` directly; they receive a [`GraphPartition`] produced by
//! [`partition`], which holds the owned vertices and their adjacency in CSR
//! form.

mod generators;
mod io;
mod partition;

pub use generators::{gen_chain, gen_gnp, gen_random_tree, gen_rmat, RmatParams};
pub use io::{load_edge_list, load_partition_map, parse_edge_list, parse_partition_map};
pub use partition::{partition, AdjEntry, GraphPartition, PartitionMap};

use thiserror::Error;

/// Global vertex identifier. Ids travel as 4 little-endian bytes on the wire.
pub type VertexId = u32;

/// Reserved "no vertex" marker. Loaders and generators reject it as a real id.
pub const NO_VERTEX: VertexId = u32::MAX;

/// Edge weight. Weights are nonnegative integers.
pub type Weight = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Directedness {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Option<Weight>,
}

impl Edge {
    pub fn new(src: VertexId, dst: VertexId) -> Self {
        Edge { src, dst, weight: None }
    }

    pub fn weighted(src: VertexId, dst: VertexId, weight: Weight) -> Self {
        Edge { src, dst, weight: Some(weight) }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("vertex id {0} is reserved")]
    ReservedId(u64),
    #[error("edge weight present = {present} but graph weighted = {weighted}")]
    WeightMismatch { present: bool, weighted: bool },
    #[error("edge ({0}, {1}) references a vertex outside the vertex set")]
    DanglingEdge(VertexId, VertexId),
    #[error("partition map has no entry for vertex {0}")]
    UnmappedVertex(VertexId),
    #[error("partition map assigns vertex {vertex} to worker {worker}, but only {workers} workers exist")]
    WorkerOutOfRange { vertex: VertexId, worker: usize, workers: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// An immutable graph: a sorted vertex set plus an edge list.
///
/// Undirected graphs store each edge once; [`partition`] materializes both
/// directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    directedness: Directedness,
    weighted: bool,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph whose vertex set is `vertices` plus every edge endpoint.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: Vec<Edge>,
        directedness: Directedness,
        weighted: bool,
    ) -> Result<Self, GraphError> {
        let mut vs: Vec<VertexId> = vertices.into_iter().collect();
        for e in &edges {
            if e.weight.is_some() != weighted {
                return Err(GraphError::WeightMismatch { present: e.weight.is_some(), weighted });
            }
            vs.push(e.src);
            vs.push(e.dst);
        }
        vs.sort_unstable();
        vs.dedup();
        if vs.last() == Some(&NO_VERTEX) {
            return Err(GraphError::ReservedId(NO_VERTEX as u64));
        }
        Ok(Graph { vertices: vs, directedness, weighted, edges })
    }

    /// Dense graph over `0..n`.
    pub fn with_vertex_count(
        n: usize,
        edges: Vec<Edge>,
        directedness: Directedness,
        weighted: bool,
    ) -> Result<Self, GraphError> {
        if n as u64 >= NO_VERTEX as u64 {
            return Err(GraphError::ReservedId(n as u64));
        }
        let g = Graph::new(0..n as VertexId, edges, directedness, weighted)?;
        if g.vertices.len() != n {
            let bad = g.edges.iter().find(|e| e.src as usize >= n || e.dst as usize >= n).unwrap();
            return Err(GraphError::DanglingEdge(bad.src, bad.dst));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn is_directed(&self) -> bool {
        self.directedness == Directedness::Directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Same vertices and edge records, reinterpreted with another directedness.
    pub fn with_directedness(mut self, directedness: Directedness) -> Self {
        self.directedness = directedness;
        self
    }
}

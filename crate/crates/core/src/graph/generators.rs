use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Directedness, Edge, Graph, GraphError, VertexId, Weight};

/// Directed chain: vertex `i` points to its parent `i - 1`; vertex 0 is the root.
pub fn gen_chain(n: usize) -> Graph {
    let edges = (1..n as VertexId).map(|i| Edge::new(i, i - 1)).collect();
    Graph::with_vertex_count(n, edges, Directedness::Directed, false).expect("chain is well formed")
}

/// Random rooted tree: vertex `i` picks its parent uniformly from `0..i`.
pub fn gen_random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (1..n as VertexId).map(|i| Edge::new(i, rng.gen_range(0..i))).collect();
    Graph::with_vertex_count(n, edges, Directedness::Directed, false).expect("tree is well formed")
}

/// Erdős–Rényi G(n, p). For undirected graphs each unordered pair is tried once.
pub fn gen_gnp(n: usize, p: f64, seed: u64, directedness: Directedness) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            let take = match directedness {
                Directedness::Directed => u != v,
                Directedness::Undirected => u < v,
            };
            if take && rng.gen_bool(p) {
                edges.push(Edge::new(u, v));
            }
        }
    }
    Graph::with_vertex_count(n, edges, directedness, false).expect("gnp is well formed")
}

/// R-MAT generator parameters. Defaults follow the usual skewed setting
/// `(a, b, c, d) = (0.57, 0.19, 0.19, 0.05)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RmatParams {
    pub scale: u32,
    pub edge_factor: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub seed: u64,
    pub weighted: bool,
    /// Inclusive weight range used when `weighted` is set.
    pub weight_range: (Weight, Weight),
    pub directed: bool,
}

impl RmatParams {
    pub fn new(scale: u32, edge_factor: usize, seed: u64) -> Self {
        RmatParams {
            scale,
            edge_factor,
            a: 0.57,
            b: 0.19,
            c: 0.19,
            d: 0.05,
            seed,
            weighted: false,
            weight_range: (1, 100),
            directed: true,
        }
    }
}

/// Samples `edge_factor * 2^scale` edges by recursive quadrant descent.
/// Duplicate edges and self-loops are kept.
pub fn gen_rmat(p: &RmatParams) -> Result<Graph, GraphError> {
    let total = p.a + p.b + p.c + p.d;
    if (total - 1.0).abs() > 1e-9 || [p.a, p.b, p.c, p.d].iter().any(|x| *x < 0.0) {
        return Err(GraphError::InvalidParameter(format!(
            "R-MAT probabilities must be nonnegative and sum to 1, got {total}"
        )));
    }
    if p.scale == 0 || p.scale > 31 {
        return Err(GraphError::InvalidParameter(format!("R-MAT scale {} out of 1..=31", p.scale)));
    }
    let (wlo, whi) = p.weight_range;
    if p.weighted && wlo > whi {
        return Err(GraphError::InvalidParameter("empty weight range".into()));
    }
    let n = 1usize << p.scale;
    let m = p.edge_factor * n;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (ab, abc) = (p.a + p.b, p.a + p.b + p.c);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (mut src, mut dst) = (0 as VertexId, 0 as VertexId);
        for _ in 0..p.scale {
            let r: f64 = rng.gen();
            let (sbit, dbit) = if r < p.a {
                (0, 0)
            } else if r < ab {
                (0, 1)
            } else if r < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            src = (src << 1) | sbit;
            dst = (dst << 1) | dbit;
        }
        let weight = p.weighted.then(|| rng.gen_range(wlo..=whi));
        edges.push(Edge { src, dst, weight });
    }
    let dir = if p.directed { Directedness::Directed } else { Directedness::Undirected };
    Graph::with_vertex_count(n, edges, dir, p.weighted)
}

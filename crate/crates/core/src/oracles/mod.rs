//! Sequential reference implementations. They read only [`Graph`] and share
//! no code with the engine or the channels.

use std::collections::HashMap;

use crate::graph::{Graph, VertexId, Weight};

fn dense_index(g: &Graph) -> HashMap<VertexId, usize> {
    g.vertices().iter().enumerate().map(|(i, &v)| (v, i)).collect()
}

/// Dense power iteration with damping 0.85; sink mass is spread uniformly.
pub fn oracle_pagerank(g: &Graph, iters: u64) -> Vec<(VertexId, f64)> {
    let n = g.n();
    let idx = dense_index(g);
    let mut deg = vec![0usize; n];
    let mut in_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut add = |s: VertexId, d: VertexId, deg: &mut Vec<usize>| {
        deg[idx[&s]] += 1;
        in_adj[idx[&d]].push(idx[&s]);
    };
    for e in g.edges() {
        add(e.src, e.dst, &mut deg);
        if !g.is_directed() {
            add(e.dst, e.src, &mut deg);
        }
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    for _ in 0..iters {
        let sink: f64 = (0..n).filter(|&u| deg[u] == 0).map(|u| rank[u]).sum();
        let next = (0..n)
            .map(|v| {
                let inc: f64 = in_adj[v].iter().map(|&u| rank[u] / deg[u] as f64).sum();
                0.15 / nf + 0.85 * (inc + sink / nf)
            })
            .collect();
        rank = next;
    }
    g.vertices().iter().copied().zip(rank).collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Keep the smaller index as root so roots are component minima.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Weakly connected components; each vertex is labelled with the minimum id
/// of its component.
pub fn oracle_components(g: &Graph) -> Vec<(VertexId, VertexId)> {
    let idx = dense_index(g);
    let mut uf = UnionFind::new(g.n());
    for e in g.edges() {
        uf.union(idx[&e.src], idx[&e.dst]);
    }
    let vs = g.vertices();
    (0..g.n()).map(|i| (vs[i], vs[uf.find(i)])).collect()
}

/// Strongly connected components (Tarjan, iterative); each vertex is
/// labelled with the minimum id of its SCC.
pub fn oracle_scc(g: &Graph) -> Vec<(VertexId, VertexId)> {
    let n = g.n();
    let idx = dense_index(g);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in g.edges() {
        adj[idx[&e.src]].push(idx[&e.dst]);
        if !g.is_directed() {
            adj[idx[&e.dst]].push(idx[&e.src]);
        }
    }
    const UNSEEN: usize = usize::MAX;
    let mut order = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut counter = 0;
    for root in 0..n {
        if order[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        order[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut next)) = call.last_mut() {
            if *next < adj[u].len() {
                let w = adj[u][*next];
                *next += 1;
                if order[w] == UNSEEN {
                    order[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[u] = low[u].min(order[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == order[u] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    members.push(w);
                    if w == u {
                        break;
                    }
                }
                let label = *members.iter().min().expect("nonempty");
                for w in members {
                    comp[w] = label;
                }
            }
        }
    }
    let vs = g.vertices();
    (0..n).map(|i| (vs[i], vs[comp[i]])).collect()
}

/// Kruskal over edges ordered by `(weight, lower endpoint, higher endpoint)`.
/// Returns the forest edges as `(u, v, weight)` with `u <= v`, sorted, and
/// the total weight.
pub fn oracle_msf(g: &Graph) -> (Vec<(VertexId, VertexId, Weight)>, u64) {
    let idx = dense_index(g);
    let mut edges: Vec<(Weight, VertexId, VertexId)> = g
        .edges()
        .iter()
        .map(|e| (e.weight.unwrap_or(0), e.src.min(e.dst), e.src.max(e.dst)))
        .collect();
    edges.sort_unstable();
    let mut uf = UnionFind::new(g.n());
    let mut forest = Vec::new();
    let mut total = 0u64;
    for (w, a, b) in edges {
        if uf.union(idx[&a], idx[&b]) {
            forest.push((a, b, w));
            total += w as u64;
        }
    }
    forest.sort_unstable();
    (forest, total)
}

/// Root of every vertex of a parent forest (edges point child to parent) by
/// walking parent pointers.
pub fn oracle_root(g: &Graph) -> Vec<(VertexId, VertexId)> {
    let mut parent: HashMap<VertexId, VertexId> = HashMap::new();
    for e in g.edges() {
        parent.entry(e.src).or_insert(e.dst);
    }
    let mut root: HashMap<VertexId, VertexId> = HashMap::new();
    let mut path = Vec::new();
    g.vertices()
        .iter()
        .map(|&v| {
            let mut r = v;
            path.clear();
            loop {
                if let Some(&known) = root.get(&r) {
                    r = known;
                    break;
                }
                match parent.get(&r) {
                    Some(&p) if p != r => {
                        path.push(r);
                        assert!(path.len() <= g.n(), "parent walk from {v} does not terminate");
                        r = p;
                    }
                    _ => break,
                }
            }
            for &u in &path {
                root.insert(u, r);
            }
            root.insert(r, r);
            (v, r)
        })
        .collect()
}

/// True iff the two labelings induce the same partition of the vertices.
pub fn same_partition(a: &[(VertexId, VertexId)], b: &[(VertexId, VertexId)]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ab: HashMap<VertexId, VertexId> = HashMap::new();
    let mut ba: HashMap<VertexId, VertexId> = HashMap::new();
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    for (&(va, la), &(vb, lb)) in sa.iter().zip(&sb) {
        if va != vb {
            return false;
        }
        if *ab.entry(la).or_insert(lb) != lb || *ba.entry(lb).or_insert(la) != la {
            return false;
        }
    }
    true
}

/// Connected components with each component labelled by its minimum id,
/// computed by breadth-first search; used to cross-check the union-find oracle.
#[cfg(test)]
fn bfs_components(g: &Graph) -> Vec<(VertexId, VertexId)> {
    let idx = dense_index(g);
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[idx[&e.src]].push(idx[&e.dst]);
        adj[idx[&e.dst]].push(idx[&e.src]);
    }
    let mut label = vec![usize::MAX; n];
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([s]);
        label[s] = s;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if label[w] == usize::MAX {
                    label[w] = s;
                    queue.push_back(w);
                }
            }
        }
    }
    let vs = g.vertices();
    (0..n).map(|i| (vs[i], vs[label[i]])).collect()
}

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use super::{Directedness, Edge, Graph, GraphError, PartitionMap, VertexId, Weight, NO_VERTEX};

/// Reads a whitespace-separated edge list (`src dst [weight]`, `#` comments).
pub fn load_edge_list(
    path: impl AsRef<Path>,
    directedness: Directedness,
    weighted: bool,
) -> Result<Graph, GraphError> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, directedness, weighted)
}

pub fn parse_edge_list(
    text: &str,
    directedness: Directedness,
    weighted: bool,
) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    let mut seen: HashSet<(VertexId, VertexId)> = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let (src, dst, weight) = match (fields.len(), weighted) {
            (2, false) => (parse_id(fields[0], line)?, parse_id(fields[1], line)?, None),
            (3, true) => (
                parse_id(fields[0], line)?,
                parse_id(fields[1], line)?,
                Some(parse_weight(fields[2], line)?),
            ),
            (3, false) => {
                return Err(GraphError::Parse {
                    line,
                    message: "weight given but the graph is loaded as unweighted".into(),
                })
            }
            (2, true) => {
                return Err(GraphError::Parse { line, message: "missing edge weight".into() })
            }
            (k, _) => {
                return Err(GraphError::Parse {
                    line,
                    message: format!("expected 2 or 3 fields, found {k}"),
                })
            }
        };
        if directedness == Directedness::Undirected {
            let key = (src.min(dst), src.max(dst));
            if !seen.insert(key) {
                continue;
            }
        }
        edges.push(Edge { src, dst, weight });
    }
    Graph::new(std::iter::empty(), edges, directedness, weighted)
}

fn parse_id(tok: &str, line: usize) -> Result<VertexId, GraphError> {
    let v: u64 = tok.parse().map_err(|_| GraphError::Parse {
        line,
        message: format!("invalid vertex id {tok:?}"),
    })?;
    if v >= NO_VERTEX as u64 {
        return Err(GraphError::Parse { line, message: format!("vertex id {v} out of range") });
    }
    Ok(v as VertexId)
}

fn parse_weight(tok: &str, line: usize) -> Result<Weight, GraphError> {
    tok.parse().map_err(|_| GraphError::Parse { line, message: format!("invalid weight {tok:?}") })
}

/// Reads an explicit partition map: one `vertex_id worker_id` pair per line.
pub fn load_partition_map(path: impl AsRef<Path>) -> Result<PartitionMap, GraphError> {
    let text = fs::read_to_string(path)?;
    parse_partition_map(&text)
}

pub fn parse_partition_map(text: &str) -> Result<PartitionMap, GraphError> {
    let mut owners = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(GraphError::Parse {
                line,
                message: format!("expected `vertex_id worker_id`, found {} fields", fields.len()),
            });
        }
        let v = parse_id(fields[0], line)?;
        let w: usize = fields[1].parse().map_err(|_| GraphError::Parse {
            line,
            message: format!("invalid worker id {:?}", fields[1]),
        })?;
        owners.insert(v, w);
    }
    Ok(PartitionMap::Explicit(owners))
}

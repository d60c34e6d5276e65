//! The benchmark programs, each with its channel variants.
//!
//! Every variant of an algorithm computes the same output; only the
//! channels carrying its communication differ.

mod fetch;
pub mod msf;
pub mod pagerank;
pub mod pointer_jumping;
pub mod scc;
pub mod sv;
pub mod wcc;

pub use fetch::Fetch;
pub use msf::{msf, Boruvka, Forest, MsfVariant};
pub use pagerank::{pagerank, PageRank, PageRankVariant};
pub use pointer_jumping::{pointer_jumping, PointerJumping, PointerJumpingVariant};
pub use scc::{scc, MinLabelScc, SccVariant};
pub use sv::{sv, ShiloachVishkin, SvVariant};
pub use wcc::{wcc, Wcc, WccVariant};

use crate::engine::{run, EngineConfig, EngineError, Program, RunOutcome, RunReport, WorkerInfo};
use crate::graph::{partition, Graph, PartitionMap};

/// Declares a variant enum with string names and `FromStr`.
macro_rules! variants {
    ($name:ident { $($v:ident = $s:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name {
            $($v),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$v),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$v => $s),+
                }
            }
        }

        impl std::str::FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($name::$v),)+
                    other => Err(format!(
                        "unknown variant {other:?}, expected one of: {}",
                        [$($s),+].join(", ")
                    )),
                }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}
pub(crate) use variants;

/// How to distribute and run a program.
#[derive(Debug, Clone)]
pub struct Setup {
    pub workers: usize,
    /// Defaults to hash-modulo over `workers`.
    pub map: Option<PartitionMap>,
    pub max_supersteps: Option<u64>,
    pub capture_wire: bool,
}

impl Setup {
    pub fn new(workers: usize) -> Self {
        Setup { workers, map: None, max_supersteps: None, capture_wire: false }
    }

    pub fn with_map(mut self, map: PartitionMap) -> Self {
        self.map = Some(map);
        self
    }

    pub fn capturing(mut self) -> Self {
        self.capture_wire = true;
        self
    }
}

/// Output of an algorithm run, plus everything the engine reported.
pub struct AlgoRun<P: Program, O> {
    pub output: O,
    pub outcome: RunOutcome<P>,
}

impl<P: Program, O> AlgoRun<P, O> {
    fn new(mut outcome: RunOutcome<P>, output: O, digest: String) -> Self {
        outcome.report.result_digest = digest;
        AlgoRun { output, outcome }
    }

    pub fn report(&self) -> &RunReport {
        &self.outcome.report
    }

    pub fn digest(&self) -> &str {
        &self.outcome.report.result_digest
    }
}

fn execute<P, F>(
    g: &Graph,
    setup: &Setup,
    algorithm: &str,
    variant: &str,
    factory: F,
) -> Result<RunOutcome<P>, EngineError>
where
    P: Program,
    F: Fn(&WorkerInfo<'_>) -> P + Sync,
{
    let map = setup.map.clone().unwrap_or_else(|| PartitionMap::hash(setup.workers));
    let parts = partition(g, setup.workers, &map)?;
    let config = EngineConfig { max_supersteps: setup.max_supersteps, capture_wire: setup.capture_wire };
    let mut outcome = run(&parts, &map, &config, factory)?;
    outcome.report.algorithm = algorithm.to_string();
    outcome.report.variant = variant.to_string();
    Ok(outcome)
}

/// `ceil(log2 n)`, with `log2_ceil(0) = log2_ceil(1) = 0`.
pub fn log2_ceil(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}

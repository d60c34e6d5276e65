use serde::{Deserialize, Serialize};

use crate::graph::VertexId;

/// Counters for one registered channel, summed over workers. Only bytes and
/// records that cross a worker boundary are counted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelMetrics {
    pub name: String,
    pub messages: u64,
    pub payload_bytes: u64,
    pub framing_bytes: u64,
    /// Exchange rounds in which the channel was active.
    pub rounds: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub variant: String,
    pub workers: usize,
    pub supersteps: u64,
    pub exchange_rounds: u64,
    pub wall_ms: f64,
    pub channels: Vec<ChannelMetrics>,
    pub result_digest: String,
}

impl RunReport {
    pub fn channel(&self, name: &str) -> Option<&ChannelMetrics> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn payload_bytes(&self) -> u64 {
        self.channels.iter().map(|c| c.payload_bytes).sum()
    }

    pub fn framing_bytes(&self) -> u64 {
        self.channels.iter().map(|c| c.framing_bytes).sum()
    }

    pub fn messages(&self) -> u64 {
        self.channels.iter().map(|c| c.messages).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a fold over `(vertex, value)` pairs fed in ascending vertex order.
///
/// Each pair contributes the vertex id as 4 little-endian bytes followed by
/// the value as an 8-byte little-endian signed integer. Floats are rounded
/// to a multiple of 1e-9 first.
#[derive(Debug, Clone)]
pub struct ResultDigest {
    state: u64,
}

impl Default for ResultDigest {
    fn default() -> Self {
        Self::new()
    }
}

impl ResultDigest {
    pub fn new() -> Self {
        ResultDigest { state: FNV_OFFSET }
    }

    fn bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state ^= b as u64;
            self.state = self.state.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn push_int(&mut self, v: VertexId, x: i64) {
        self.bytes(&v.to_le_bytes());
        self.bytes(&x.to_le_bytes());
    }

    pub fn push_float(&mut self, v: VertexId, x: f64) {
        self.push_int(v, (x * 1e9).round() as i64);
    }

    pub fn finish(&self) -> String {
        format!("{:016x}", self.state)
    }

    pub fn of_ints(pairs: impl IntoIterator<Item = (VertexId, i64)>) -> String {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        let mut d = ResultDigest::new();
        for (v, x) in pairs {
            d.push_int(v, x);
        }
        d.finish()
    }

    pub fn of_floats(pairs: impl IntoIterator<Item = (VertexId, f64)>) -> String {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_by_key(|(v, _)| *v);
        let mut d = ResultDigest::new();
        for (v, x) in pairs {
            d.push_float(v, x);
        }
        d.finish()
    }
}

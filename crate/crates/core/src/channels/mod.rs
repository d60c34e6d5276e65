//! The standard channels: direct messages, combined messages and aggregators.

mod aggregator;
mod combined;
mod combiner;
mod direct;
pub mod wire;

pub use aggregator::Aggregator;
pub use combined::CombinedMessage;
pub(crate) use combined::Inbox;
pub use combiner::{Bounded, Combiner, Zero};
pub use direct::DirectMessage;
pub use wire::Wire;

use crate::engine::{ChannelEnv, Outbox};
use crate::graph::VertexId;

/// Appends `(dst, value)` records to the segment of each destination's owner.
/// Records for ids with no owner are counted as ignored activations.
pub(crate) fn route_records<V, T: Wire>(
    env: &mut ChannelEnv<'_, V>,
    out: &mut Outbox,
    records: impl IntoIterator<Item = (VertexId, T)>,
) {
    for (dst, m) in records {
        match env.owner(dst) {
            Some(w) => {
                let buf = out.buffer(w);
                wire::put_id(buf, dst);
                m.put(buf);
                out.add_records(w, 1);
            }
            None => env.note_unknown(),
        }
    }
}

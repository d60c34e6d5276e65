//! Channels specialized for one communication pattern each.
//!
//! - [`ScatterCombine`]: every vertex sends one value along a fixed set of
//!   out-edges each time the channel fires.
//! - [`RequestRespond`]: vertices fetch an attribute of arbitrary vertices
//!   in two rounds, with requests merged per worker.
//! - [`Propagation`]: a min/max-style fixpoint over registered edges,
//!   computed within a single superstep.

mod propagation;
mod reqresp;
mod scatter;

pub use propagation::{check_fixpoint, Propagation};
pub use reqresp::RequestRespond;
pub use scatter::ScatterCombine;

//! A vertex-centric BSP graph engine whose communication layer is a set of
//! composable channels.
//!
//! A [`Program`](engine::Program) owns the channels it needs and registers
//! them in a fixed order. Each superstep, the engine runs `compute` on every
//! active vertex and then drives every channel through one or more buffer
//! exchange rounds. The standard channels live in [`channels`], the
//! pattern-specific ones in [`optimized`].

pub mod algorithms;
pub mod channels;
pub mod engine;
pub mod graph;
pub mod optimized;
pub mod oracles;

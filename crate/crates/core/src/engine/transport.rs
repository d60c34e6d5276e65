//! In-process all-to-all exchange between worker threads.
//!
//! Every collective operation is a full mesh handoff: each worker posts one
//! message to every peer and then receives exactly one message from every
//! peer. Per-pair channels are FIFO, so posts from consecutive collectives
//! cannot overtake each other and no separate barrier is needed.

use std::sync::mpsc::{channel, Receiver, Sender};

use serde::Serialize;

/// Which synchronization point of the superstep loop a collective belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BarrierKind {
    Startup,
    /// Buffer exchange of one round.
    Exchange,
    /// OR-reduction of per-channel `again()` flags after a round.
    ChannelVote,
    /// OR-reduction of "any vertex active" at the end of a superstep.
    HaltVote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BarrierTag {
    pub step: u64,
    pub round: u32,
    pub kind: BarrierKind,
}

pub(crate) struct Post {
    tag: BarrierTag,
    data: Vec<u8>,
    flags: Vec<bool>,
    abort: bool,
}

pub(crate) struct Gathered {
    /// Data received from each worker, indexed by source (own post included).
    pub data: Vec<Vec<u8>>,
    /// Element-wise OR of every worker's flags.
    pub flags: Vec<bool>,
}

#[derive(Debug)]
pub(crate) enum Collapse {
    /// Some worker posted an abort.
    Aborted,
    /// A peer disappeared without posting.
    Disconnected,
    Lockstep { peer: usize, remote: BarrierTag },
}

pub(crate) struct Endpoint {
    me: usize,
    tx: Vec<Option<Sender<Post>>>,
    rx: Vec<Option<Receiver<Post>>>,
    trace: Vec<BarrierTag>,
}

/// Builds one endpoint per worker, fully connected.
pub(crate) fn mesh(workers: usize) -> Vec<Endpoint> {
    let mut tx: Vec<Vec<Option<Sender<Post>>>> = (0..workers).map(|_| Vec::new()).collect();
    let mut rx: Vec<Vec<Option<Receiver<Post>>>> = (0..workers).map(|_| Vec::new()).collect();
    for src in 0..workers {
        for dst in 0..workers {
            if src == dst {
                tx[src].push(None);
                rx[dst].push(None);
            } else {
                let (s, r) = channel();
                tx[src].push(Some(s));
                rx[dst].push(Some(r));
            }
        }
    }
    // rx[dst] was filled in src order, so rx[dst][src] is the pipe from src.
    tx.into_iter()
        .zip(rx)
        .enumerate()
        .map(|(me, (tx, rx))| Endpoint { me, tx, rx, trace: Vec::new() })
        .collect()
}

impl Endpoint {
    pub fn into_trace(self) -> Vec<BarrierTag> {
        self.trace
    }

    /// Posts `data[j]` to every worker `j`, then gathers one post from each.
    pub fn collective(
        &mut self,
        tag: BarrierTag,
        mut data: Vec<Vec<u8>>,
        flags: Vec<bool>,
        abort: bool,
    ) -> Result<Gathered, Collapse> {
        let workers = self.tx.len();
        debug_assert_eq!(data.len(), workers);
        self.trace.push(tag);
        let own = std::mem::take(&mut data[self.me]);
        for (dst, buf) in data.into_iter().enumerate() {
            if let Some(tx) = &self.tx[dst] {
                // A peer that already left is reported through its receiver side.
                let _ = tx.send(Post { tag, data: buf, flags: flags.clone(), abort });
            }
        }
        let mut gathered = Gathered { data: Vec::with_capacity(workers), flags: flags.clone() };
        let mut aborted = abort;
        let mut fault = None;
        for src in 0..workers {
            let Some(rx) = &self.rx[src] else {
                gathered.data.push(Vec::new());
                continue;
            };
            match rx.recv() {
                Ok(post) => {
                    if post.tag != tag && fault.is_none() {
                        fault = Some(Collapse::Lockstep { peer: src, remote: post.tag });
                    }
                    aborted |= post.abort;
                    for (acc, f) in gathered.flags.iter_mut().zip(&post.flags) {
                        *acc |= *f;
                    }
                    gathered.data.push(post.data);
                }
                Err(_) => {
                    fault.get_or_insert(Collapse::Disconnected);
                    gathered.data.push(Vec::new());
                }
            }
        }
        gathered.data[self.me] = own;
        if let Some(f) = fault {
            return Err(f);
        }
        if aborted {
            return Err(Collapse::Aborted);
        }
        Ok(gathered)
    }
}

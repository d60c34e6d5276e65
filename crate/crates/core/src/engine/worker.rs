use std::time::Instant;

use super::report::{ChannelMetrics, RunReport};
use super::transport::{mesh, BarrierKind, BarrierTag, Collapse, Endpoint, Gathered};
use super::{ChannelEnv, ComputeError, ContractError, EngineError, Inbound, Outbox, Program, Vertex};
use crate::graph::{GraphPartition, PartitionMap, VertexId};

#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    /// Abort with [`EngineError::SuperstepLimit`] if the run has not halted
    /// after this many supersteps.
    pub max_supersteps: Option<u64>,
    /// Keep a copy of every remote channel segment in [`RunOutcome::wire`].
    pub capture_wire: bool,
}

/// What a program factory gets to know about the worker it is built for.
pub struct WorkerInfo<'a> {
    pub worker: usize,
    pub workers: usize,
    pub partition: &'a GraphPartition,
}

/// One channel's segment from one worker to another in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireSegment {
    pub step: u64,
    pub round: u32,
    pub channel: String,
    pub from: usize,
    pub to: usize,
    pub bytes: Vec<u8>,
}

pub struct RunOutcome<P: Program> {
    pub report: RunReport,
    /// Final vertex values, sorted by vertex id.
    pub values: Vec<(VertexId, P::Value)>,
    /// Program instances by worker, for inspecting channel state after the run.
    pub programs: Vec<P>,
    /// Barrier tags each worker passed, in order.
    pub traces: Vec<Vec<BarrierTag>>,
    pub wire: Vec<WireSegment>,
    pub ignored_activations: u64,
    /// Bytes actually handed to other workers across all exchanges.
    pub total_bytes: u64,
}

impl<P: Program> RunOutcome<P> {
    pub fn value_of(&self, v: VertexId) -> Option<&P::Value> {
        self.values.binary_search_by_key(&v, |(id, _)| *id).ok().map(|i| &self.values[i].1)
    }
}

enum Link {
    Solo(Vec<BarrierTag>),
    Mesh(Endpoint),
}

impl Link {
    fn collective(
        &mut self,
        tag: BarrierTag,
        data: Vec<Vec<u8>>,
        flags: Vec<bool>,
        abort: bool,
    ) -> Result<Gathered, Collapse> {
        match self {
            Link::Solo(trace) => {
                trace.push(tag);
                if abort {
                    return Err(Collapse::Aborted);
                }
                Ok(Gathered { data, flags })
            }
            Link::Mesh(ep) => ep.collective(tag, data, flags, abort),
        }
    }

    fn into_trace(self) -> Vec<BarrierTag> {
        match self {
            Link::Solo(trace) => trace,
            Link::Mesh(ep) => ep.into_trace(),
        }
    }
}

struct Done<P: Program> {
    program: P,
    values: Vec<(VertexId, P::Value)>,
    trace: Vec<BarrierTag>,
    wire: Vec<WireSegment>,
    metrics: Vec<ChannelMetrics>,
    supersteps: u64,
    rounds: u64,
    ignored: u64,
    sent_bytes: u64,
}

enum Failure {
    Root(EngineError),
    /// Stopped because some other worker failed.
    Follower,
}

struct Worker<'a> {
    me: usize,
    workers: usize,
    partition: &'a GraphPartition,
    map: &'a PartitionMap,
    config: &'a EngineConfig,
    link: Link,
}

impl<'a> Worker<'a> {
    fn collapse(&self, c: Collapse, local: BarrierTag) -> Failure {
        match c {
            Collapse::Aborted => Failure::Follower,
            Collapse::Disconnected => Failure::Follower,
            Collapse::Lockstep { peer, remote } => {
                Failure::Root(EngineError::Lockstep { worker: self.me, peer, local, remote })
            }
        }
    }

    fn sync(
        &mut self,
        tag: BarrierTag,
        data: Vec<Vec<u8>>,
        flags: Vec<bool>,
        pending: &mut Option<EngineError>,
    ) -> Result<Gathered, Failure> {
        let abort = pending.is_some();
        match self.link.collective(tag, data, flags, abort) {
            Ok(g) => Ok(g),
            Err(c) => match pending.take() {
                Some(e) => Err(Failure::Root(e)),
                None => Err(self.collapse(c, tag)),
            },
        }
    }

    fn run<P: Program>(mut self, mut program: P) -> Result<Done<P>, Failure> {
        let m = self.workers;
        let me = self.me;
        let names: Vec<String> =
            program.channels().iter().map(|c| c.name().to_string()).collect();
        let nchan = names.len();

        let startup = BarrierTag { step: 0, round: 0, kind: BarrierKind::Startup };
        let encoded = names.join("\n").into_bytes();
        let mut none = None;
        let g = self.sync(startup, vec![encoded; m], Vec::new(), &mut none)?;
        let expected: Vec<String> = decode_names(&g.data[0]);
        for (w, data) in g.data.iter().enumerate() {
            let found = decode_names(data);
            if found != expected {
                return Err(Failure::Root(EngineError::RegistrationMismatch {
                    worker: w,
                    expected,
                    found,
                }));
            }
        }

        let numv = self.partition.numv();
        let mut values: Vec<P::Value> = vec![P::Value::default(); numv];
        let mut active = vec![true; numv];
        let mut woken = vec![false; numv];
        let mut ignored = 0u64;
        let mut metrics: Vec<ChannelMetrics> = names
            .iter()
            .map(|n| ChannelMetrics { name: n.clone(), ..Default::default() })
            .collect();
        let mut wire = Vec::new();
        let mut sent_bytes = 0u64;
        let mut total_rounds = 0u64;

        {
            let mut env = ChannelEnv {
                worker: me,
                workers: m,
                step: 0,
                round: 0,
                partition: self.partition,
                map: self.map,
                values: &values,
                woken: &mut woken,
                ignored_activations: &mut ignored,
            };
            for ch in program.channels() {
                ch.initialize(&mut env);
            }
        }
        woken.iter_mut().for_each(|w| *w = false);

        let mut step = 1u64;
        loop {
            let mut pending: Option<EngineError> = None;
            program.before_superstep(step);
            for idx in 0..numv {
                if !active[idx] {
                    continue;
                }
                let mut v = Vertex {
                    idx,
                    step,
                    partition: self.partition,
                    value: &mut values[idx],
                    halted: false,
                };
                if let Err(e) = program.compute(&mut v) {
                    pending = Some(match e {
                        ComputeError::Contract(source) => {
                            EngineError::Contract { worker: me, source }
                        }
                        other => EngineError::Compute { worker: me, source: other },
                    });
                    break;
                }
                active[idx] = !v.halted;
            }

            let mut chan_active = vec![true; nchan];
            let mut round = 0u32;
            loop {
                round += 1;
                total_rounds += 1;
                let mut bufs: Vec<Vec<u8>> = vec![Vec::new(); m];
                let mut channels = program.channels();
                let mut env = ChannelEnv {
                    worker: me,
                    workers: m,
                    step,
                    round,
                    partition: self.partition,
                    map: self.map,
                    values: &values,
                    woken: &mut woken,
                    ignored_activations: &mut ignored,
                };
                for (c, ch) in channels.iter_mut().enumerate() {
                    let mut out = Outbox::new(m);
                    if chan_active[c] && pending.is_none() {
                        metrics[c].rounds += 1;
                        if let Err(e) = ch.serialize(&mut env, &mut out) {
                            pending = Some(EngineError::Contract { worker: me, source: e });
                        }
                    }
                    for (j, seg) in out.bufs.iter().enumerate() {
                        bufs[j].extend_from_slice(&(seg.len() as u32).to_le_bytes());
                        bufs[j].extend_from_slice(seg);
                        if j != me {
                            metrics[c].payload_bytes += seg.len() as u64;
                            metrics[c].framing_bytes += 4;
                            metrics[c].messages += out.records[j];
                            if self.config.capture_wire {
                                wire.push(WireSegment {
                                    step,
                                    round,
                                    channel: names[c].clone(),
                                    from: me,
                                    to: j,
                                    bytes: seg.clone(),
                                });
                            }
                        }
                    }
                }
                sent_bytes += bufs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != me)
                    .map(|(_, b)| b.len() as u64)
                    .sum::<u64>();
                drop(channels);

                let tag = BarrierTag { step, round, kind: BarrierKind::Exchange };
                let gathered = self.sync(tag, bufs, Vec::new(), &mut pending)?;
                let mut split: Vec<Vec<&[u8]>> = vec![Vec::with_capacity(m); nchan];
                for (src, data) in gathered.data.iter().enumerate() {
                    match split_segments(data, nchan) {
                        Ok(segs) => {
                            for (c, s) in segs.into_iter().enumerate() {
                                split[c].push(s);
                            }
                        }
                        Err(detail) => {
                            pending = Some(EngineError::Contract {
                                worker: me,
                                source: ContractError::Malformed {
                                    channel: "<frame>".into(),
                                    from: src,
                                    detail,
                                },
                            });
                            split.iter_mut().for_each(|s| s.push(&[]));
                        }
                    }
                }

                let mut channels = program.channels();
                let mut env = ChannelEnv {
                    worker: me,
                    workers: m,
                    step,
                    round,
                    partition: self.partition,
                    map: self.map,
                    values: &values,
                    woken: &mut woken,
                    ignored_activations: &mut ignored,
                };
                let mut again = vec![false; nchan];
                for (c, ch) in channels.iter_mut().enumerate() {
                    if !chan_active[c] || pending.is_some() {
                        continue;
                    }
                    let inbound = Inbound::new(std::mem::take(&mut split[c]));
                    if let Err(e) = ch.deserialize(&mut env, &inbound) {
                        pending = Some(EngineError::Contract { worker: me, source: e });
                        continue;
                    }
                    again[c] = ch.again();
                }
                drop(channels);
                drop(gathered);

                let tag = BarrierTag { step, round, kind: BarrierKind::ChannelVote };
                let vote = self.sync(tag, vec![Vec::new(); m], again, &mut pending)?;
                chan_active = vote.flags;
                if !chan_active.iter().any(|&a| a) {
                    break;
                }
            }

            for (a, w) in active.iter_mut().zip(woken.iter_mut()) {
                *a |= *w;
                *w = false;
            }
            let any = active.iter().any(|&a| a);
            let tag = BarrierTag { step, round: 0, kind: BarrierKind::HaltVote };
            let vote = self.sync(tag, vec![Vec::new(); m], vec![any], &mut pending)?;
            if !vote.flags[0] {
                break;
            }
            if self.config.max_supersteps.is_some_and(|cap| step >= cap) {
                return Err(Failure::Root(EngineError::SuperstepLimit(step)));
            }
            step += 1;
        }

        let values = self.partition.owned().iter().copied().zip(values).collect();
        Ok(Done {
            program,
            values,
            trace: self.link.into_trace(),
            wire,
            metrics,
            supersteps: step,
            rounds: total_rounds,
            ignored,
            sent_bytes,
        })
    }
}

fn decode_names(data: &[u8]) -> Vec<String> {
    let s = String::from_utf8_lossy(data);
    if s.is_empty() {
        Vec::new()
    } else {
        s.split('\n').map(str::to_string).collect()
    }
}

fn split_segments(data: &[u8], nchan: usize) -> Result<Vec<&[u8]>, String> {
    let mut segs = Vec::with_capacity(nchan);
    let mut pos = 0usize;
    for c in 0..nchan {
        let Some(head) = data.get(pos..pos + 4) else {
            return Err(format!("truncated length prefix for channel {c}"));
        };
        let len = u32::from_le_bytes(head.try_into().unwrap()) as usize;
        pos += 4;
        let Some(body) = data.get(pos..pos + len) else {
            return Err(format!("segment of channel {c} overruns the buffer"));
        };
        segs.push(body);
        pos += len;
    }
    if pos != data.len() {
        return Err(format!("{} trailing bytes", data.len() - pos));
    }
    Ok(segs)
}

/// Runs one program instance per partition until every vertex has halted.
///
/// `map` must be the map the partitions were built from. With a single
/// partition the run happens on the calling thread.
pub fn run<P, F>(
    partitions: &[GraphPartition],
    map: &PartitionMap,
    config: &EngineConfig,
    factory: F,
) -> Result<RunOutcome<P>, EngineError>
where
    P: Program,
    F: Fn(&WorkerInfo<'_>) -> P + Sync,
{
    let m = partitions.len();
    if m == 0 {
        return Err(EngineError::Config("at least one partition is required".into()));
    }
    if let Some((w, p)) = partitions.iter().enumerate().find(|(w, p)| p.worker_id() != *w) {
        return Err(EngineError::Config(format!(
            "partition at position {w} claims worker id {}",
            p.worker_id()
        )));
    }
    let started = Instant::now();
    let build = |w: usize| {
        factory(&WorkerInfo { worker: w, workers: m, partition: &partitions[w] })
    };

    let results: Vec<Result<Done<P>, Failure>> = if m == 1 {
        let worker = Worker {
            me: 0,
            workers: 1,
            partition: &partitions[0],
            map,
            config,
            link: Link::Solo(Vec::new()),
        };
        vec![worker.run(build(0))]
    } else {
        let endpoints = mesh(m);
        std::thread::scope(|s| {
            let handles: Vec<_> = endpoints
                .into_iter()
                .enumerate()
                .map(|(w, ep)| {
                    let build = &build;
                    s.spawn(move || {
                        let worker = Worker {
                            me: w,
                            workers: m,
                            partition: &partitions[w],
                            map,
                            config,
                            link: Link::Mesh(ep),
                        };
                        worker.run(build(w))
                    })
                })
                .collect();
            handles
                .into_iter()
                .enumerate()
                .map(|(w, h)| h.join().unwrap_or(Err(Failure::Root(EngineError::WorkerFailed(w)))))
                .collect()
        })
    };

    let mut done = Vec::with_capacity(m);
    let mut first_err = None;
    let mut followers = false;
    for r in results {
        match r {
            Ok(d) => done.push(d),
            Err(Failure::Root(e)) => {
                // Prefer a concrete cause over a crashed-worker report.
                let replace = match (&first_err, &e) {
                    (None, _) => true,
                    (Some(EngineError::WorkerFailed(_)), EngineError::WorkerFailed(_)) => false,
                    (Some(EngineError::WorkerFailed(_)), _) => true,
                    _ => false,
                };
                if replace {
                    first_err = Some(e);
                }
            }
            Err(Failure::Follower) => followers = true,
        }
    }
    if let Some(e) = first_err {
        return Err(e);
    }
    if followers {
        return Err(EngineError::WorkerFailed(0));
    }

    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let supersteps = done[0].supersteps;
    let exchange_rounds = done[0].rounds;
    let mut channels = done[0].metrics.clone();
    for d in &done[1..] {
        for (acc, c) in channels.iter_mut().zip(&d.metrics) {
            acc.messages += c.messages;
            acc.payload_bytes += c.payload_bytes;
            acc.framing_bytes += c.framing_bytes;
            acc.rounds = acc.rounds.max(c.rounds);
        }
    }
    let mut values = Vec::new();
    let mut programs = Vec::with_capacity(m);
    let mut traces = Vec::with_capacity(m);
    let mut wire = Vec::new();
    let mut ignored_activations = 0;
    let mut total_bytes = 0;
    for d in done {
        values.extend(d.values);
        programs.push(d.program);
        traces.push(d.trace);
        wire.extend(d.wire);
        ignored_activations += d.ignored;
        total_bytes += d.sent_bytes;
    }
    values.sort_by_key(|(v, _)| *v);
    let report = RunReport {
        algorithm: String::new(),
        variant: String::new(),
        workers: m,
        supersteps,
        exchange_rounds,
        wall_ms,
        channels,
        result_digest: String::new(),
    };
    Ok(RunOutcome { report, values, programs, traces, wire, ignored_activations, total_bytes })
}

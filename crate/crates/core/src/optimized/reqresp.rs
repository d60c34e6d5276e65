use crate::channels::wire::{put_id, Reader};
use crate::channels::Wire;
use crate::engine::{Channel, ChannelEnv, ContractError, Inbound, Outbox, Vertex};
use crate::graph::VertexId;

/// Two-round fetch of `f(value)` from arbitrary vertices.
///
/// Round 1 sends, per destination worker, the sorted list of distinct
/// requested ids. The responder evaluates `f` on each requested vertex's
/// value as of the end of the requesting superstep's compute phase. Round 2
/// returns the responses as bare values in request-list order.
pub struct RequestRespond<V, R> {
    name: String,
    f: fn(&V) -> R,
    req_step: Vec<u64>,
    req_dst: Vec<VertexId>,
    requesters: Vec<usize>,
    sent: Vec<Vec<VertexId>>,
    serve: Vec<Vec<R>>,
    resp: Vec<Option<R>>,
    resp_step: Vec<u64>,
    again: bool,
}

impl<V, R: Wire> RequestRespond<V, R> {
    pub fn new(name: impl Into<String>, f: fn(&V) -> R) -> Self {
        RequestRespond {
            name: name.into(),
            f,
            req_step: Vec::new(),
            req_dst: Vec::new(),
            requesters: Vec::new(),
            sent: Vec::new(),
            serve: Vec::new(),
            resp: Vec::new(),
            resp_step: Vec::new(),
            again: false,
        }
    }

    /// Asks for `f` of `dst`'s value; the answer is readable next superstep.
    /// At most one request per vertex per superstep.
    pub fn add_request<W>(&mut self, v: &Vertex<'_, W>, dst: VertexId) -> Result<(), ContractError> {
        let idx = v.local();
        if self.req_step[idx] == v.step() {
            return Err(ContractError::DuplicateRequest { channel: self.name.clone(), vertex: v.id() });
        }
        self.req_step[idx] = v.step();
        self.req_dst[idx] = dst;
        self.requesters.push(idx);
        Ok(())
    }

    /// The response to the request `v` made in the previous superstep.
    pub fn get_respond<W>(&self, v: &Vertex<'_, W>) -> Result<R, ContractError> {
        let idx = v.local();
        match self.resp[idx] {
            Some(r) if self.resp_step[idx] + 1 == v.step() => Ok(r),
            _ => Err(ContractError::NoResponse { channel: self.name.clone(), vertex: v.id() }),
        }
    }

    fn unknown(&self, target: VertexId) -> ContractError {
        ContractError::UnknownTarget { channel: self.name.clone(), target }
    }
}

impl<V, R: Wire> Channel<V> for RequestRespond<V, R>
where
    V: 'static,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn initialize(&mut self, env: &mut ChannelEnv<'_, V>) {
        let n = env.numv();
        self.req_step = vec![0; n];
        self.req_dst = vec![0; n];
        self.resp = vec![None; n];
        self.resp_step = vec![0; n];
        self.sent = vec![Vec::new(); env.workers()];
        self.serve = vec![Vec::new(); env.workers()];
    }

    fn serialize(&mut self, env: &mut ChannelEnv<'_, V>, out: &mut Outbox) -> Result<(), ContractError> {
        if env.round() == 1 {
            for list in &mut self.sent {
                list.clear();
            }
            for &idx in &self.requesters {
                let dst = self.req_dst[idx];
                let w = env.owner(dst).ok_or_else(|| self.unknown(dst))?;
                self.sent[w].push(dst);
            }
            for (w, list) in self.sent.iter_mut().enumerate() {
                list.sort_unstable();
                list.dedup();
                let buf = out.buffer(w);
                for &dst in list.iter() {
                    put_id(buf, dst);
                }
                out.add_records(w, list.len() as u64);
            }
        } else {
            for (w, answers) in self.serve.iter_mut().enumerate() {
                let buf = out.buffer(w);
                for r in answers.iter() {
                    r.put(buf);
                }
                out.add_records(w, answers.len() as u64);
                answers.clear();
            }
        }
        Ok(())
    }

    fn deserialize(&mut self, env: &mut ChannelEnv<'_, V>, inbound: &Inbound<'_>) -> Result<(), ContractError> {
        if env.round() == 1 {
            let mut incoming = false;
            for (src, seg) in inbound.iter() {
                let mut r = Reader::new(&self.name, src, seg);
                while !r.is_empty() {
                    let dst = r.id()?;
                    let idx = env.local_index(dst).ok_or_else(|| self.unknown(dst))?;
                    self.serve[src].push((self.f)(env.value(idx)));
                    incoming = true;
                }
            }
            self.again = incoming || !self.requesters.is_empty();
            return Ok(());
        }
        let mut answers: Vec<Vec<R>> = Vec::with_capacity(env.workers());
        for (src, seg) in inbound.iter() {
            let mut r = Reader::new(&self.name, src, seg);
            let mut vals = Vec::with_capacity(self.sent[src].len());
            for _ in 0..self.sent[src].len() {
                vals.push(r.value::<R>()?);
            }
            r.finish()?;
            answers.push(vals);
        }
        let step = env.step();
        for idx in std::mem::take(&mut self.requesters) {
            let dst = self.req_dst[idx];
            let w = env.owner(dst).expect("routed in round 1");
            let pos = self.sent[w].binary_search(&dst).expect("requested in round 1");
            self.resp[idx] = Some(answers[w][pos]);
            self.resp_step[idx] = step;
            env.wake(idx);
        }
        self.again = false;
        Ok(())
    }

    fn again(&self) -> bool {
        self.again
    }
}

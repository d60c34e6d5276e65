use crate::channels::DirectMessage;
use crate::engine::{Channel, ContractError, Vertex};
use crate::graph::VertexId;
use crate::optimized::RequestRespond;

/// "Read an id-valued attribute of another vertex", either as two direct
/// message hops or through a request-respond channel.
///
/// With direct messages the exchange takes three supersteps: request, serve
/// (the target replies from its compute), read. With request-respond it
/// takes two: request, read.
pub enum Fetch<V> {
    Direct { req: DirectMessage<VertexId>, reply: DirectMessage<VertexId> },
    ReqResp(RequestRespond<V, VertexId>),
}

impl<V: 'static> Fetch<V> {
    pub fn direct(prefix: &str) -> Self {
        Fetch::Direct {
            req: DirectMessage::new(format!("{prefix}_req")),
            reply: DirectMessage::new(format!("{prefix}_reply")),
        }
    }

    pub fn reqresp(name: &str, f: fn(&V) -> VertexId) -> Self {
        Fetch::ReqResp(RequestRespond::new(name, f))
    }

    /// Whether a serve superstep sits between request and read.
    pub fn needs_serve(&self) -> bool {
        matches!(self, Fetch::Direct { .. })
    }

    pub fn request<W>(&mut self, v: &Vertex<'_, W>, target: VertexId) -> Result<(), ContractError> {
        match self {
            Fetch::Direct { req, .. } => {
                req.send_message(target, v.id());
                Ok(())
            }
            Fetch::ReqResp(rr) => rr.add_request(v, target),
        }
    }

    /// Answers requests that arrived at `v` with `answer`. No-op for request-respond.
    pub fn serve<W>(&mut self, v: &Vertex<'_, W>, answer: VertexId) {
        if let Fetch::Direct { req, reply } = self {
            for &from in req.get_iterator(v) {
                reply.send_message(from, answer);
            }
        }
    }

    pub fn response<W>(&self, v: &Vertex<'_, W>) -> Result<VertexId, ContractError> {
        match self {
            Fetch::Direct { reply, .. } => reply.get_iterator(v).first().copied().ok_or_else(|| {
                ContractError::NoResponse { channel: "reply".into(), vertex: v.id() }
            }),
            Fetch::ReqResp(rr) => rr.get_respond(v),
        }
    }

    pub fn register<'a>(&'a mut self, out: &mut Vec<&'a mut dyn Channel<V>>) {
        match self {
            Fetch::Direct { req, reply } => {
                out.push(req);
                out.push(reply);
            }
            Fetch::ReqResp(rr) => out.push(rr),
        }
    }
}

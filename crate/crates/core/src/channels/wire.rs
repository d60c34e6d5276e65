//! Fixed-width little-endian encoding of message values.
//!
//! Widths: `u32` 4, `u64`/`i64`/`f64` 8, `bool` 1, tuples the sum of their
//! fields. A record addressed to a vertex is its 4-byte id followed by the
//! value.

use crate::engine::ContractError;
use crate::graph::VertexId;

pub trait Wire: Copy + Send + 'static {
    const WIDTH: usize;
    fn put(&self, out: &mut Vec<u8>);
    /// Decodes from exactly `WIDTH` bytes.
    fn get(bytes: &[u8]) -> Self;
}

macro_rules! wire_num {
    ($($t:ty),*) => {$(
        impl Wire for $t {
            const WIDTH: usize = std::mem::size_of::<$t>();
            fn put(&self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.to_le_bytes());
            }
            fn get(bytes: &[u8]) -> Self {
                <$t>::from_le_bytes(bytes.try_into().expect("width checked by reader"))
            }
        }
    )*};
}

wire_num!(u32, u64, i64, f64);

impl Wire for bool {
    const WIDTH: usize = 1;
    fn put(&self, out: &mut Vec<u8>) {
        out.push(*self as u8);
    }
    fn get(bytes: &[u8]) -> Self {
        bytes[0] != 0
    }
}

macro_rules! wire_tuple {
    ($($name:ident $idx:tt),+) => {
        impl<$($name: Wire),+> Wire for ($($name,)+) {
            const WIDTH: usize = 0 $(+ $name::WIDTH)+;
            fn put(&self, out: &mut Vec<u8>) {
                $(self.$idx.put(out);)+
            }
            #[allow(unused_assignments)]
            fn get(bytes: &[u8]) -> Self {
                let mut pos = 0;
                ($({
                    let v = $name::get(&bytes[pos..pos + $name::WIDTH]);
                    pos += $name::WIDTH;
                    v
                },)+)
            }
        }
    };
}

wire_tuple!(A 0, B 1);
wire_tuple!(A 0, B 1, C 2);
wire_tuple!(A 0, B 1, C 2, D 3);

pub fn put_id(out: &mut Vec<u8>, v: VertexId) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Sequential decoder over one channel segment.
pub struct Reader<'a> {
    channel: &'a str,
    from: usize,
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(channel: &'a str, from: usize, buf: &'a [u8]) -> Self {
        Reader { channel, from, buf, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8], ContractError> {
        let end = self.pos + n;
        if end > self.buf.len() {
            return Err(self.malformed(format!(
                "needed {n} bytes at offset {}, segment has {}",
                self.pos,
                self.buf.len()
            )));
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn id(&mut self) -> Result<VertexId, ContractError> {
        self.value::<u32>()
    }

    pub fn value<T: Wire>(&mut self) -> Result<T, ContractError> {
        Ok(T::get(self.bytes(T::WIDTH)?))
    }

    /// A destination id followed by a value.
    pub fn record<T: Wire>(&mut self) -> Result<(VertexId, T), ContractError> {
        Ok((self.id()?, self.value()?))
    }

    pub fn malformed(&self, detail: String) -> ContractError {
        ContractError::Malformed { channel: self.channel.to_string(), from: self.from, detail }
    }

    pub fn finish(&self) -> Result<(), ContractError> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(self.malformed(format!("{} unread bytes", self.buf.len() - self.pos)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip<T: Wire + PartialEq + std::fmt::Debug>(x: T) {
        let mut out = Vec::new();
        x.put(&mut out);
        assert_eq!(out.len(), T::WIDTH);
        assert_eq!(T::get(&out), x);
    }

    #[test]
    fn widths() {
        assert_eq!(<(u32, u32, u32, u32)>::WIDTH, 16);
        assert_eq!(<(f64, bool)>::WIDTH, 9);
        assert_eq!(<(u32, u32, u32)>::WIDTH, 12);
    }

    #[test]
    fn truncated_segment_is_malformed() {
        let mut r = Reader::new("c", 1, &[1, 2, 3]);
        assert!(matches!(r.id(), Err(ContractError::Malformed { from: 1, .. })));
    }

    proptest! {
        #[test]
        fn tuples_roundtrip(a in any::<u32>(), b in any::<i64>(), c in any::<f64>(), d in any::<bool>()) {
            roundtrip(a);
            roundtrip(b);
            roundtrip(d);
            roundtrip((a, b));
            roundtrip((a, b, d));
            roundtrip((a, a, b, d));
            let mut out = Vec::new();
            c.put(&mut out);
            prop_assert_eq!(f64::get(&out).to_bits(), c.to_bits());
        }
    }
}

//! Protocol messages and their wire framing.
//!
//! ```text
//! frame   = len:u32be  tag:u8  payload[len]
//! tag     = 0 Start | 1 Reveal | 2 Ack | 3 Nack | 4 Abort
//! Start   = n:u32 m:u32 r0:f64 delta:f64 q:u16 position_seed:u64
//!           syndrome: ceil(m/8) bytes, MSB first, zero padded
//! Reveal  = round:u16 count:u32 (position:u32 bit:u8){count}, ascending
//! Abort   = UTF-8 reason
//! ```
//!
//! All integers and floats are big-endian; `len` counts payload bytes only.

use std::io::{Read, Write};

use thiserror::Error;

/// Upper bound on accepted payload sizes.
pub const MAX_PAYLOAD: u32 = 1 << 26;

const TAG_START: u8 = 0;
const TAG_REVEAL: u8 = 1;
const TAG_ACK: u8 = 2;
const TAG_NACK: u8 = 3;
const TAG_ABORT: u8 = 4;

const START_FIXED: usize = 4 + 4 + 8 + 8 + 2 + 8;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("payload of {0} bytes exceeds limit")]
    TooLarge(u32),
    #[error("unknown message tag {0}")]
    UnknownTag(u8),
    #[error("malformed {what}: {reason}")]
    Malformed { what: &'static str, reason: String },
}

fn malformed(what: &'static str, reason: impl Into<String>) -> WireError {
    WireError::Malformed {
        what,
        reason: reason.into(),
    }
}

/// Session parameters and syndrome sent by Alice to open a session.
#[derive(Debug, Clone, PartialEq)]
pub struct Start {
    pub n: u32,
    pub m: u32,
    pub r0: f64,
    pub delta: f64,
    pub q_rounds: u16,
    pub position_seed: u64,
    /// One 0/1 byte per check.
    pub syndrome: Vec<u8>,
}

/// Punctured symbols turned into shortened ones when entering `round`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reveal {
    pub round: u16,
    /// `(position, bit)` sorted by position.
    pub entries: Vec<(u32, u8)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Start(Start),
    Reveal(Reveal),
    Ack,
    Nack,
    Abort(String),
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Start(_) => "Start",
            Message::Reveal(_) => "Reveal",
            Message::Ack => "Ack",
            Message::Nack => "Nack",
            Message::Abort(_) => "Abort",
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Message::Start(_) => TAG_START,
            Message::Reveal(_) => TAG_REVEAL,
            Message::Ack => TAG_ACK,
            Message::Nack => TAG_NACK,
            Message::Abort(_) => TAG_ABORT,
        }
    }

    fn payload(&self) -> Vec<u8> {
        match self {
            Message::Start(s) => {
                let mut out = Vec::with_capacity(START_FIXED + s.syndrome.len().div_ceil(8));
                out.extend_from_slice(&s.n.to_be_bytes());
                out.extend_from_slice(&s.m.to_be_bytes());
                out.extend_from_slice(&s.r0.to_be_bytes());
                out.extend_from_slice(&s.delta.to_be_bytes());
                out.extend_from_slice(&s.q_rounds.to_be_bytes());
                out.extend_from_slice(&s.position_seed.to_be_bytes());
                out.extend(pack_bits(&s.syndrome));
                out
            }
            Message::Reveal(r) => {
                let mut out = Vec::with_capacity(6 + 5 * r.entries.len());
                out.extend_from_slice(&r.round.to_be_bytes());
                out.extend_from_slice(&(r.entries.len() as u32).to_be_bytes());
                for &(pos, bit) in &r.entries {
                    out.extend_from_slice(&pos.to_be_bytes());
                    out.push(bit);
                }
                out
            }
            Message::Ack | Message::Nack => Vec::new(),
            Message::Abort(reason) => reason.as_bytes().to_vec(),
        }
    }

    /// Full frame: length prefix, tag and payload.
    pub fn encode(&self) -> Vec<u8> {
        let payload = self.payload();
        let mut out = Vec::with_capacity(5 + payload.len());
        out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
        out.push(self.tag());
        out.extend(payload);
        out
    }

    /// Parses one message from a tag and its payload.
    pub fn from_parts(tag: u8, payload: &[u8]) -> Result<Self, WireError> {
        match tag {
            TAG_START => decode_start(payload).map(Message::Start),
            TAG_REVEAL => decode_reveal(payload).map(Message::Reveal),
            TAG_ACK | TAG_NACK => {
                if !payload.is_empty() {
                    return Err(malformed("Ack/Nack", "unexpected payload"));
                }
                Ok(if tag == TAG_ACK {
                    Message::Ack
                } else {
                    Message::Nack
                })
            }
            TAG_ABORT => String::from_utf8(payload.to_vec())
                .map(Message::Abort)
                .map_err(|_| malformed("Abort", "reason is not UTF-8")),
            other => Err(WireError::UnknownTag(other)),
        }
    }

    /// Decodes a complete frame, rejecting trailing bytes.
    pub fn decode(frame: &[u8]) -> Result<Self, WireError> {
        let mut cursor = frame;
        let msg = read_message(&mut cursor)?;
        if !cursor.is_empty() {
            return Err(malformed("frame", "trailing bytes"));
        }
        Ok(msg)
    }
}

pub fn write_message<W: Write>(w: &mut W, msg: &Message) -> Result<(), WireError> {
    w.write_all(&msg.encode())?;
    w.flush()?;
    Ok(())
}

pub fn read_message<R: Read>(r: &mut R) -> Result<Message, WireError> {
    let mut header = [0u8; 5];
    r.read_exact(&mut header)?;
    let len = u32::from_be_bytes(header[..4].try_into().unwrap());
    if len > MAX_PAYLOAD {
        return Err(WireError::TooLarge(len));
    }
    let mut payload = vec![0u8; len as usize];
    r.read_exact(&mut payload)?;
    Message::from_parts(header[4], &payload)
}

fn pack_bits(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect()
}

fn unpack_bits(bytes: &[u8], count: usize) -> Vec<u8> {
    (0..count)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
        .collect()
}

struct Reader<'a> {
    buf: &'a [u8],
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], WireError> {
        if self.buf.len() < N {
            return Err(malformed(self.what, "truncated"));
        }
        let (head, rest) = self.buf.split_at(N);
        self.buf = rest;
        Ok(head.try_into().unwrap())
    }
}

fn decode_start(payload: &[u8]) -> Result<Start, WireError> {
    let mut r = Reader {
        buf: payload,
        what: "Start",
    };
    let n = u32::from_be_bytes(r.take()?);
    let m = u32::from_be_bytes(r.take()?);
    let r0 = f64::from_be_bytes(r.take()?);
    let delta = f64::from_be_bytes(r.take()?);
    let q_rounds = u16::from_be_bytes(r.take()?);
    let position_seed = u64::from_be_bytes(r.take()?);
    let expected = (m as usize).div_ceil(8);
    if r.buf.len() != expected {
        return Err(malformed(
            "Start",
            format!("{} syndrome bytes for m = {m}", r.buf.len()),
        ));
    }
    let syndrome = unpack_bits(r.buf, m as usize);
    if pack_bits(&syndrome) != r.buf {
        return Err(malformed("Start", "non-zero syndrome padding"));
    }
    Ok(Start {
        n,
        m,
        r0,
        delta,
        q_rounds,
        position_seed,
        syndrome,
    })
}

fn decode_reveal(payload: &[u8]) -> Result<Reveal, WireError> {
    let mut r = Reader {
        buf: payload,
        what: "Reveal",
    };
    let round = u16::from_be_bytes(r.take()?);
    let count = u32::from_be_bytes(r.take()?) as usize;
    if r.buf.len() != count * 5 {
        return Err(malformed(
            "Reveal",
            format!("{} entry bytes for {count} entries", r.buf.len()),
        ));
    }
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let pos = u32::from_be_bytes(r.take()?);
        let [bit] = r.take::<1>()?;
        if bit > 1 {
            return Err(malformed("Reveal", format!("bit value {bit}")));
        }
        if let Some(&(prev, _)) = entries.last() {
            if pos <= prev {
                return Err(malformed("Reveal", "positions not strictly ascending"));
            }
        }
        entries.push((pos, bit));
    }
    Ok(Reveal { round, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_start() -> Start {
        Start {
            n: 16,
            m: 10,
            r0: 0.375,
            delta: 0.125,
            q_rounds: 2,
            position_seed: 0x0102_0304_0506_0708,
            syndrome: vec![1, 0, 1, 1, 0, 0, 0, 1, 1, 1],
        }
    }

    #[test]
    fn start_layout_is_bit_exact() {
        let frame = Message::Start(sample_start()).encode();
        let mut expected = vec![0, 0, 0, 36, 0];
        expected.extend_from_slice(&16u32.to_be_bytes());
        expected.extend_from_slice(&10u32.to_be_bytes());
        expected.extend_from_slice(&0.375f64.to_be_bytes());
        expected.extend_from_slice(&0.125f64.to_be_bytes());
        expected.extend_from_slice(&[0, 2]);
        expected.extend_from_slice(&[1, 2, 3, 4, 5, 6, 7, 8]);
        expected.extend_from_slice(&[0b1011_0001, 0b1100_0000]);
        assert_eq!(frame, expected);
        assert_eq!(Message::decode(&frame).unwrap(), Message::Start(sample_start()));
    }

    #[test]
    fn reveal_and_control_layouts() {
        let reveal = Message::Reveal(Reveal {
            round: 3,
            entries: vec![(7, 1), (300, 0)],
        });
        assert_eq!(
            reveal.encode(),
            vec![0, 0, 0, 16, 1, 0, 3, 0, 0, 0, 2, 0, 0, 0, 7, 1, 0, 0, 1, 44, 0]
        );
        assert_eq!(Message::Ack.encode(), vec![0, 0, 0, 0, 2]);
        assert_eq!(Message::Nack.encode(), vec![0, 0, 0, 0, 3]);
        assert_eq!(Message::Abort("no".into()).encode(), vec![0, 0, 0, 2, 4, b'n', b'o']);
    }

    #[test]
    fn rejects_malformed_frames() {
        assert!(matches!(Message::decode(&[0, 0, 0, 0, 9]), Err(WireError::UnknownTag(9))));
        assert!(Message::decode(&[0, 0, 0, 1, 2, 0]).is_err());
        // unsorted reveal
        let bad = [0, 0, 0, 16, 1, 0, 1, 0, 0, 0, 2, 0, 0, 0, 9, 1, 0, 0, 0, 8, 0];
        assert!(Message::decode(&bad).is_err());
        // count disagrees with body
        let bad = [0, 0, 0, 11, 1, 0, 1, 0, 0, 0, 2, 0, 0, 0, 9, 1];
        assert!(Message::decode(&bad).is_err());
        // truncated stream
        assert!(matches!(Message::decode(&[0, 0, 0, 5, 1]), Err(WireError::Io(_))));
        // non-zero padding in syndrome
        let mut frame = Message::Start(sample_start()).encode();
        *frame.last_mut().unwrap() |= 1;
        assert!(Message::decode(&frame).is_err());
        assert!(matches!(
            Message::decode(&[0xff, 0xff, 0xff, 0xff, 0]),
            Err(WireError::TooLarge(_))
        ));
    }

    proptest! {
        #[test]
        fn frames_round_trip(
            syndrome in proptest::collection::vec(0u8..2, 0..200),
            seed in any::<u64>(),
            positions in proptest::collection::btree_set(any::<u32>(), 0..50),
            bits in proptest::collection::vec(0u8..2, 50),
            round in any::<u16>(),
        ) {
            let start = Message::Start(Start {
                n: 4000,
                m: syndrome.len() as u32,
                r0: 0.6,
                delta: 0.1,
                q_rounds: 6,
                position_seed: seed,
                syndrome,
            });
            prop_assert_eq!(Message::decode(&start.encode()).unwrap(), start);
            let reveal = Message::Reveal(Reveal {
                round,
                entries: positions.into_iter().zip(bits).collect(),
            });
            prop_assert_eq!(Message::decode(&reveal.encode()).unwrap(), reveal);
        }
    }
}

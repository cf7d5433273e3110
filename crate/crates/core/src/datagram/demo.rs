//! Two-node sender/receiver demo over an in-memory queue or loopback UDP.
//!
//! Node A turns each script step into a frame and puts it on the wire. Node B
//! authenticates it, enforces the replay rule and answers with a 5-byte
//! acknowledgement: `[status, seq (4 bytes BE)]`, status 1 = accepted,
//! 0 = rejected. Every step yields one [`TranscriptEntry`].

use std::collections::VecDeque;
use std::io;
use std::net::UdpSocket;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::datagram::frame::{
    FrameCodec, FrameError, RecvSession, SendSession, HEADER_LEN, TAG_LEN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportKind {
    InMemory,
    UdpDatagram,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ScriptStep {
    /// Encode and send a new message.
    Send { text: String },
    /// Re-send the exact bytes of an earlier frame (1-based frame number).
    Replay { frame: usize },
    /// Send a new message but flip one bit of the encoded frame in transit.
    Corrupt { bit: usize, text: String },
}

impl FromStr for ScriptStep {
    type Err = String;

    /// Line forms: `send <text>`, `replay <n>`, `corrupt <bit> <text>`.
    fn from_str(line: &str) -> Result<Self, String> {
        let line = line.trim();
        let (op, rest) = line.split_once(' ').unwrap_or((line, ""));
        match op {
            "send" => Ok(ScriptStep::Send {
                text: rest.to_string(),
            }),
            "replay" => rest
                .trim()
                .parse()
                .map(|frame| ScriptStep::Replay { frame })
                .map_err(|_| format!("bad frame number in {line:?}")),
            "corrupt" => {
                let (bit, text) = rest.split_once(' ').unwrap_or((rest, ""));
                let bit = bit
                    .parse()
                    .map_err(|_| format!("bad bit index in {line:?}"))?;
                Ok(ScriptStep::Corrupt {
                    bit,
                    text: text.to_string(),
                })
            }
            _ => Err(format!("unknown script step {line:?}")),
        }
    }
}

/// Parses one step per non-empty line; lines starting with `#` are skipped.
pub fn parse_script(text: &str) -> Result<Vec<ScriptStep>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Delivered {
        plaintext: String,
    },
    Rejected {
        error: FrameError,
    },
    /// The step never produced a frame or the transport failed.
    Failed {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub frame: usize,
    pub step: ScriptStep,
    pub seq: Option<u32>,
    pub wire_bytes: usize,
    pub payload_bytes: usize,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Whether node A received an acknowledgement reporting acceptance.
    pub acked: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn delivered(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.verdict, Verdict::Delivered { .. }))
            .count()
    }

    pub fn rejected(&self) -> usize {
        self.entries.len() - self.delivered()
    }

    pub fn to_json_lines(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("transcript entries serialize") + "\n")
            .collect()
    }
}

/// Bidirectional datagram link between node A and node B.
trait Transport {
    fn send_to_b(&mut self, datagram: &[u8]) -> io::Result<()>;
    fn recv_at_b(&mut self) -> io::Result<Vec<u8>>;
    fn send_to_a(&mut self, datagram: &[u8]) -> io::Result<()>;
    fn recv_at_a(&mut self) -> io::Result<Vec<u8>>;
}

#[derive(Default)]
struct InMemory {
    to_b: VecDeque<Vec<u8>>,
    to_a: VecDeque<Vec<u8>>,
}

fn empty() -> io::Error {
    io::Error::new(io::ErrorKind::WouldBlock, "no datagram queued")
}

impl Transport for InMemory {
    fn send_to_b(&mut self, d: &[u8]) -> io::Result<()> {
        self.to_b.push_back(d.to_vec());
        Ok(())
    }
    fn recv_at_b(&mut self) -> io::Result<Vec<u8>> {
        self.to_b.pop_front().ok_or_else(empty)
    }
    fn send_to_a(&mut self, d: &[u8]) -> io::Result<()> {
        self.to_a.push_back(d.to_vec());
        Ok(())
    }
    fn recv_at_a(&mut self) -> io::Result<Vec<u8>> {
        self.to_a.pop_front().ok_or_else(empty)
    }
}

struct Udp {
    a: UdpSocket,
    b: UdpSocket,
    buf: Vec<u8>,
}

impl Udp {
    fn loopback() -> io::Result<Self> {
        let a = UdpSocket::bind("127.0.0.1:0")?;
        let b = UdpSocket::bind("127.0.0.1:0")?;
        a.connect(b.local_addr()?)?;
        b.connect(a.local_addr()?)?;
        for s in [&a, &b] {
            s.set_read_timeout(Some(Duration::from_secs(2)))?;
        }
        Ok(Udp {
            a,
            b,
            buf: vec![0; 2048],
        })
    }
}

impl Transport for Udp {
    fn send_to_b(&mut self, d: &[u8]) -> io::Result<()> {
        self.a.send(d).map(|_| ())
    }
    fn recv_at_b(&mut self) -> io::Result<Vec<u8>> {
        let n = self.b.recv(&mut self.buf)?;
        Ok(self.buf[..n].to_vec())
    }
    fn send_to_a(&mut self, d: &[u8]) -> io::Result<()> {
        self.b.send(d).map(|_| ())
    }
    fn recv_at_a(&mut self) -> io::Result<Vec<u8>> {
        let n = self.a.recv(&mut self.buf)?;
        Ok(self.buf[..n].to_vec())
    }
}

/// Node identifiers used by the demo.
pub const NODE_A: u16 = 0x00a1;
pub const NODE_B: u16 = 0x00b2;

/// Runs `script` between two nodes sharing `codec`'s keys.
///
/// Per-frame problems (rejections, transport errors) are recorded in the
/// transcript; only failing to open the transport is an error.
pub fn demo_nodes(
    transport: TransportKind,
    script: &[ScriptStep],
    codec: &FrameCodec,
) -> io::Result<Transcript> {
    let mut link: Box<dyn Transport> = match transport {
        TransportKind::InMemory => Box::new(InMemory::default()),
        TransportKind::UdpDatagram => Box::new(Udp::loopback()?),
    };
    let mut sender = SendSession::new(codec.clone(), NODE_A, NODE_B);
    let mut receiver = RecvSession::new(codec.clone());
    // Untampered bytes of each step's frame, indexed by step.
    let mut sent: Vec<Option<Vec<u8>>> = Vec::new();
    let mut transcript = Transcript::default();

    for (i, step) in script.iter().enumerate() {
        let frame_no = i + 1;
        let mut entry = TranscriptEntry {
            frame: frame_no,
            step: step.clone(),
            seq: None,
            wire_bytes: 0,
            payload_bytes: 0,
            verdict: Verdict::Failed {
                reason: String::new(),
            },
            acked: false,
        };

        let mut original = None;
        let wire = match step {
            ScriptStep::Send { text } | ScriptStep::Corrupt { text, .. } => {
                match sender.send(text.as_bytes()) {
                    Ok((seq, mut frame)) => {
                        entry.seq = Some(seq);
                        entry.payload_bytes = text.len();
                        original = Some(frame.clone());
                        if let ScriptStep::Corrupt { bit, .. } = step {
                            let bit = bit % (frame.len() * 8);
                            frame[bit / 8] ^= 0x80 >> (bit % 8);
                        }
                        Some(frame)
                    }
                    Err(e) => {
                        entry.verdict = Verdict::Rejected { error: e };
                        None
                    }
                }
            }
            ScriptStep::Replay { frame } => match frame
                .checked_sub(1)
                .and_then(|k| sent.get(k))
                .and_then(Option::as_ref)
            {
                Some(bytes) => {
                    entry.seq = Some(u32::from_be_bytes(bytes[6..10].try_into().expect("header")));
                    entry.payload_bytes = bytes.len() - HEADER_LEN - TAG_LEN;
                    original = Some(bytes.clone());
                    Some(bytes.clone())
                }
                None => {
                    entry.verdict = Verdict::Failed {
                        reason: format!("no earlier frame {frame} to replay"),
                    };
                    None
                }
            },
        };
        sent.push(original);

        if let Some(wire) = wire {
            entry.wire_bytes = wire.len();
            entry.verdict = match exchange(link.as_mut(), &mut receiver, &wire) {
                Ok((verdict, acked)) => {
                    entry.acked = acked;
                    verdict
                }
                Err(e) => Verdict::Failed {
                    reason: e.to_string(),
                },
            };
        }
        transcript.entries.push(entry);
    }
    Ok(transcript)
}

fn exchange(
    link: &mut dyn Transport,
    receiver: &mut RecvSession,
    wire: &[u8],
) -> io::Result<(Verdict, bool)> {
    link.send_to_b(wire)?;
    let datagram = link.recv_at_b()?;
    let (verdict, ack) = match receiver.accept(&datagram) {
        Ok(frame) => {
            let mut ack = vec![1u8];
            ack.extend_from_slice(&frame.header.seq_nonce.to_be_bytes());
            (
                Verdict::Delivered {
                    plaintext: String::from_utf8_lossy(&frame.plaintext).into_owned(),
                },
                ack,
            )
        }
        Err(error) => (Verdict::Rejected { error }, vec![0u8, 0, 0, 0, 0]),
    };
    link.send_to_a(&ack)?;
    let ack = link.recv_at_a()?;
    Ok((verdict, ack.first() == Some(&1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::Key128;
    use crate::datagram::mode::LinkKeys;
    use crate::profile::ConventionProfile;

    fn codec() -> FrameCodec {
        FrameCodec::new(
            LinkKeys::derive(Key128(0xabcdef)),
            ConventionProfile::verified(),
        )
    }

    #[test]
    fn parses_script_lines() {
        let s = parse_script("# demo\nsend hello there\n\nreplay 1\ncorrupt 100 oops\n").unwrap();
        assert_eq!(
            s,
            vec![
                ScriptStep::Send {
                    text: "hello there".into()
                },
                ScriptStep::Replay { frame: 1 },
                ScriptStep::Corrupt {
                    bit: 100,
                    text: "oops".into()
                },
            ]
        );
        assert!(parse_script("jump 3").is_err());
        assert!(parse_script("replay x").is_err());
    }

    #[test]
    fn three_messages_in_memory() {
        let script = parse_script("send one\nsend two\nsend three").unwrap();
        let t = demo_nodes(TransportKind::InMemory, &script, &codec()).unwrap();
        assert_eq!(t.delivered(), 3);
        assert_eq!(t.rejected(), 0);
        assert!(t.entries.iter().all(|e| e.acked));
        assert_eq!(t.entries[2].wire_bytes, 12 + 5 + 8);
        assert_eq!(t.to_json_lines().lines().count(), 3);
    }

    #[test]
    fn replay_is_rejected() {
        let script = parse_script("send one\nsend two\nreplay 2\nsend four").unwrap();
        let t = demo_nodes(TransportKind::InMemory, &script, &codec()).unwrap();
        assert_eq!(
            t.entries[2].verdict,
            Verdict::Rejected {
                error: FrameError::ReplayDetected { seq: 2, last: 2 }
            }
        );
        assert!(!t.entries[2].acked);
        assert!(matches!(t.entries[3].verdict, Verdict::Delivered { .. }));
    }

    #[test]
    fn corruption_does_not_poison_later_frames() {
        let script = parse_script("send one\ncorrupt 140 two\nsend three").unwrap();
        let t = demo_nodes(TransportKind::InMemory, &script, &codec()).unwrap();
        assert_eq!(
            t.entries[1].verdict,
            Verdict::Rejected {
                error: FrameError::TagMismatch
            }
        );
        assert_eq!(
            t.entries[2].verdict,
            Verdict::Delivered {
                plaintext: "three".into()
            }
        );
    }

    #[test]
    fn replay_of_unknown_frame_is_reported() {
        let t = demo_nodes(
            TransportKind::InMemory,
            &[ScriptStep::Replay { frame: 9 }],
            &codec(),
        )
        .unwrap();
        assert!(matches!(t.entries[0].verdict, Verdict::Failed { .. }));
    }

    #[test]
    fn udp_loopback() {
        let script = parse_script("send one\nsend two\nreplay 1\nsend four").unwrap();
        let t = demo_nodes(TransportKind::UdpDatagram, &script, &codec()).unwrap();
        assert_eq!(t.delivered(), 3);
        assert_eq!(t.rejected(), 1);
    }
}

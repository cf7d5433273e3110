//! Authenticated datagram frame.
//!
//! Wire layout, all integers big-endian:
//!
//! ```text
//! offset  size  field
//!      0     1  version (high nibble, = 1) | flags (low nibble)
//!      1     1  reserved, zero
//!      2     2  src_id
//!      4     2  dst_id
//!      6     4  seq_nonce
//!     10     2  payload_len (plaintext bytes)
//!     12     n  ciphertext (CTR, nonce = seq_nonce)
//!   12+n     8  tag = CBC-MAC(header || ciphertext) under the MAC key
//! ```
//!
//! The encoded size is always `12 + payload_len + 8`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagram::mode::{cbc_mac_tag, ctr_encrypt, LinkKeys};
use crate::profile::ConventionProfile;

pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 12;
pub const TAG_LEN: usize = 8;
pub const DEFAULT_MAX_PAYLOAD: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum FrameError {
    #[error("authentication tag mismatch")]
    TagMismatch,
    #[error("frame truncated: need {needed} bytes, got {got}")]
    Truncated { needed: usize, got: usize },
    #[error("unsupported frame version {found}")]
    BadVersion { found: u8 },
    #[error("payload of {len} bytes exceeds the {max}-byte cap")]
    OversizePayload { len: usize, max: usize },
    #[error("{extra} unexpected bytes after the tag")]
    TrailingBytes { extra: usize },
    #[error("sequence number {seq} already used on this link (last {last})")]
    NonceReuse { seq: u32, last: u32 },
    #[error("replayed sequence number {seq} (last accepted {last})")]
    ReplayDetected { seq: u32, last: u32 },
}

impl FrameError {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            FrameError::TagMismatch => "tag_mismatch",
            FrameError::Truncated { .. } => "truncated",
            FrameError::BadVersion { .. } => "bad_version",
            FrameError::OversizePayload { .. } => "oversize_payload",
            FrameError::TrailingBytes { .. } => "trailing_bytes",
            FrameError::NonceReuse { .. } => "nonce_reuse",
            FrameError::ReplayDetected { .. } => "replay_detected",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameHeader {
    pub version: u8,
    pub flags: u8,
    pub src_id: u16,
    pub dst_id: u16,
    pub seq_nonce: u32,
    pub payload_len: u16,
}

impl FrameHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0] = (self.version << 4) | (self.flags & 0xf);
        b[2..4].copy_from_slice(&self.src_id.to_be_bytes());
        b[4..6].copy_from_slice(&self.dst_id.to_be_bytes());
        b[6..10].copy_from_slice(&self.seq_nonce.to_be_bytes());
        b[10..12].copy_from_slice(&self.payload_len.to_be_bytes());
        b
    }

    fn parse(b: &[u8; HEADER_LEN]) -> Self {
        FrameHeader {
            version: b[0] >> 4,
            flags: b[0] & 0xf,
            src_id: u16::from_be_bytes([b[2], b[3]]),
            dst_id: u16::from_be_bytes([b[4], b[5]]),
            seq_nonce: u32::from_be_bytes([b[6], b[7], b[8], b[9]]),
            payload_len: u16::from_be_bytes([b[10], b[11]]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedFrame {
    pub header: FrameHeader,
    pub plaintext: Vec<u8>,
}

pub fn encoded_len(payload_len: usize) -> usize {
    HEADER_LEN + payload_len + TAG_LEN
}

/// Frame codec bound to one key pair and profile.
#[derive(Clone, Debug)]
pub struct FrameCodec {
    pub keys: LinkKeys,
    pub profile: ConventionProfile,
    pub max_payload: usize,
}

impl FrameCodec {
    pub fn new(keys: LinkKeys, profile: ConventionProfile) -> Self {
        FrameCodec {
            keys,
            profile,
            max_payload: DEFAULT_MAX_PAYLOAD,
        }
    }

    pub fn encode(
        &self,
        plaintext: &[u8],
        src: u16,
        dst: u16,
        seq: u32,
    ) -> Result<Vec<u8>, FrameError> {
        if plaintext.len() > self.max_payload || plaintext.len() > u16::MAX as usize {
            return Err(FrameError::OversizePayload {
                len: plaintext.len(),
                max: self.max_payload,
            });
        }
        let header = FrameHeader {
            version: VERSION,
            flags: 0,
            src_id: src,
            dst_id: dst,
            seq_nonce: seq,
            payload_len: plaintext.len() as u16,
        };
        let mut out = Vec::with_capacity(encoded_len(plaintext.len()));
        out.extend_from_slice(&header.to_bytes());
        out.extend(ctr_encrypt(
            plaintext,
            self.keys.enc_key,
            seq,
            &self.profile,
        ));
        let tag = cbc_mac_tag(&out, self.keys.mac_key, &self.profile);
        out.extend_from_slice(&tag.to_be_bytes());
        Ok(out)
    }

    /// Parses and authenticates a frame. The tag is checked before any
    /// decryption happens.
    pub fn decode(&self, bytes: &[u8]) -> Result<DecodedFrame, FrameError> {
        let header_bytes: &[u8; HEADER_LEN] = bytes
            .get(..HEADER_LEN)
            .and_then(|h| h.try_into().ok())
            .ok_or(FrameError::Truncated {
                needed: HEADER_LEN,
                got: bytes.len(),
            })?;
        let header = FrameHeader::parse(header_bytes);
        if header.version != VERSION {
            return Err(FrameError::BadVersion {
                found: header.version,
            });
        }
        let len = header.payload_len as usize;
        if len > self.max_payload {
            return Err(FrameError::OversizePayload {
                len,
                max: self.max_payload,
            });
        }
        let needed = encoded_len(len);
        if bytes.len() < needed {
            return Err(FrameError::Truncated {
                needed,
                got: bytes.len(),
            });
        }
        let body_end = HEADER_LEN + len;
        let tag = u64::from_be_bytes(bytes[body_end..needed].try_into().expect("8-byte tag"));
        if cbc_mac_tag(&bytes[..body_end], self.keys.mac_key, &self.profile) != tag {
            return Err(FrameError::TagMismatch);
        }
        if bytes.len() > needed {
            return Err(FrameError::TrailingBytes {
                extra: bytes.len() - needed,
            });
        }
        let plaintext = ctr_encrypt(
            &bytes[HEADER_LEN..body_end],
            self.keys.enc_key,
            header.seq_nonce,
            &self.profile,
        );
        Ok(DecodedFrame { header, plaintext })
    }
}

pub fn frame_encode(
    plaintext: &[u8],
    src: u16,
    dst: u16,
    seq: u32,
    keys: &LinkKeys,
    profile: &ConventionProfile,
) -> Result<Vec<u8>, FrameError> {
    FrameCodec::new(*keys, *profile).encode(plaintext, src, dst, seq)
}

pub fn frame_decode(
    bytes: &[u8],
    keys: &LinkKeys,
    profile: &ConventionProfile,
) -> Result<DecodedFrame, FrameError> {
    FrameCodec::new(*keys, *profile).decode(bytes)
}

/// Sending side of a link. Sequence numbers double as CTR nonces, so they
/// must strictly increase.
#[derive(Clone, Debug)]
pub struct SendSession {
    codec: FrameCodec,
    src: u16,
    dst: u16,
    last_seq: Option<u32>,
}

impl SendSession {
    pub fn new(codec: FrameCodec, src: u16, dst: u16) -> Self {
        SendSession {
            codec,
            src,
            dst,
            last_seq: None,
        }
    }

    pub fn encode(&mut self, seq: u32, plaintext: &[u8]) -> Result<Vec<u8>, FrameError> {
        if let Some(last) = self.last_seq {
            if seq <= last {
                return Err(FrameError::NonceReuse { seq, last });
            }
        }
        let frame = self.codec.encode(plaintext, self.src, self.dst, seq)?;
        self.last_seq = Some(seq);
        Ok(frame)
    }

    /// Encodes with the next sequence number (starting at 1).
    pub fn send(&mut self, plaintext: &[u8]) -> Result<(u32, Vec<u8>), FrameError> {
        let seq = self.last_seq.map_or(1, |s| s + 1);
        self.encode(seq, plaintext).map(|f| (seq, f))
    }
}

/// Receiving side of a link: authenticates, then rejects any sequence number
/// not above the last accepted one.
#[derive(Clone, Debug)]
pub struct RecvSession {
    codec: FrameCodec,
    last_seq: Option<u32>,
}

impl RecvSession {
    pub fn new(codec: FrameCodec) -> Self {
        RecvSession {
            codec,
            last_seq: None,
        }
    }

    pub fn accept(&mut self, bytes: &[u8]) -> Result<DecodedFrame, FrameError> {
        let frame = self.codec.decode(bytes)?;
        let seq = frame.header.seq_nonce;
        if let Some(last) = self.last_seq {
            if seq <= last {
                return Err(FrameError::ReplayDetected { seq, last });
            }
        }
        self.last_seq = Some(seq);
        Ok(frame)
    }
}

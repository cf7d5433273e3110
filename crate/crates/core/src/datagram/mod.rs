//! Authenticated datagram layer: CTR encryption, CBC-MAC, framing, and a
//! two-node demo.

pub mod demo;
pub mod frame;
pub mod mode;

pub use demo::{
    demo_nodes, parse_script, ScriptStep, Transcript, TranscriptEntry, TransportKind, Verdict,
};
pub use frame::{
    frame_decode, frame_encode, DecodedFrame, FrameCodec, FrameError, FrameHeader, RecvSession,
    SendSession,
};
pub use mode::{cbc_mac_tag, ctr_decrypt, ctr_encrypt, ctr_keystream, LinkKeys};

//! LiCi-2 lightweight block cipher: reference implementation, cryptanalysis
//! tooling, hardware cost model and an authenticated datagram layer.

pub mod analysis;
pub mod block;
pub mod cipher;
pub mod cost;
pub mod datagram;
pub mod error;
pub mod kat;
pub mod profile;
pub mod sbox;

pub use block::{Block64, Key128, RoundKey32};
pub use cipher::{decrypt_block, encrypt_block, Cipher};
pub use error::Error;
pub use profile::ConventionProfile;

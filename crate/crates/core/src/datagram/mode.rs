//! Counter-mode encryption and CBC-MAC built on the block cipher.
//!
//! Demo cryptography: neither construction here is a vetted AEAD, and the
//! MAC-key derivation is illustrative only.

use crate::block::{Block64, Key128};
use crate::cipher::Cipher;
use crate::profile::ConventionProfile;

/// Encryption and MAC keys shared by two link endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkKeys {
    pub enc_key: Key128,
    pub mac_key: Key128,
}

const MAC_KEY_PAD: u128 = 0x5c5c_5c5c_5c5c_5c5c_5c5c_5c5c_5c5c_5c5c;

impl LinkKeys {
    /// The MAC key is the encryption key with every byte XORed with `0x5c`.
    pub fn derive(enc_key: Key128) -> Self {
        LinkKeys {
            enc_key,
            mac_key: Key128(enc_key.0 ^ MAC_KEY_PAD),
        }
    }
}

#[inline]
fn counter_block(nonce32: u32, j: u32) -> Block64 {
    Block64::join(nonce32, j)
}

fn keystream_with(cipher: &Cipher, nonce32: u32, nblocks: usize) -> Vec<u8> {
    assert!(nblocks as u64 <= 1 << 32, "counter space is 32 bits");
    let mut out = Vec::with_capacity(nblocks * 8);
    for j in 0..nblocks {
        out.extend_from_slice(&cipher.encrypt(counter_block(nonce32, j as u32)).to_bytes());
    }
    out
}

/// Block `j` is `E(nonce32 || j)` with the counter big-endian in the low 32
/// bits.
pub fn ctr_keystream(
    key: Key128,
    nonce32: u32,
    nblocks: usize,
    profile: &ConventionProfile,
) -> Vec<u8> {
    keystream_with(&Cipher::new(key, *profile), nonce32, nblocks)
}

/// XORs `data` with the keystream. Encryption and decryption are the same
/// operation; the output is exactly as long as the input.
pub fn ctr_encrypt(data: &[u8], key: Key128, nonce32: u32, profile: &ConventionProfile) -> Vec<u8> {
    let ks = ctr_keystream(key, nonce32, data.len().div_ceil(8), profile);
    data.iter().zip(ks).map(|(d, k)| d ^ k).collect()
}

pub fn ctr_decrypt(data: &[u8], key: Key128, nonce32: u32, profile: &ConventionProfile) -> Vec<u8> {
    ctr_encrypt(data, key, nonce32, profile)
}

/// CBC-MAC with a zero IV over `data || 0x80 || 0x00*`, padded to a whole
/// number of 8-byte blocks. At least one padding byte is always added.
pub fn cbc_mac_tag(data: &[u8], mac_key: Key128, profile: &ConventionProfile) -> u64 {
    let cipher = Cipher::new(mac_key, *profile);
    let mut padded = Vec::with_capacity(data.len() + 8);
    padded.extend_from_slice(data);
    padded.push(0x80);
    while padded.len() % 8 != 0 {
        padded.push(0);
    }
    let mut state = 0u64;
    for chunk in padded.chunks_exact(8) {
        let block = u64::from_be_bytes(chunk.try_into().expect("8-byte chunk"));
        state = cipher.encrypt(Block64(state ^ block)).0;
    }
    state
}

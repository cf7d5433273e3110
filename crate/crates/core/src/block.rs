//! Fixed-width values handled by the cipher: the 64-bit block, the 128-bit
//! master key and the 32-bit round key.
//!
//! Hex forms are big-endian (most significant nibble first). Parsing is
//! case-insensitive and accepts optional whitespace between digit groups, so
//! the grouped form `12345678 90abcdef` reads the same as `1234567890abcdef`.
//! Output is always lowercase without separators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A 64-bit cipher block. Bit 63 is the most significant plaintext bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block64(pub u64);

/// A 128-bit master key. Bit 127 is `k127`, bit 0 is `k0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key128(pub u128);

/// A 32-bit subkey together with the (1-based) round that consumes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundKey32 {
    pub bits: u32,
    pub round_index: u8,
}

impl Block64 {
    /// Splits into `(bits 63..32, bits 31..0)`.
    #[inline]
    pub fn split(self) -> (u32, u32) {
        ((self.0 >> 32) as u32, self.0 as u32)
    }

    #[inline]
    pub fn join(hi: u32, lo: u32) -> Self {
        Block64(((hi as u64) << 32) | lo as u64)
    }

    pub fn to_bytes(self) -> [u8; 8] {
        self.0.to_be_bytes()
    }

    pub fn from_bytes(bytes: [u8; 8]) -> Self {
        Block64(u64::from_be_bytes(bytes))
    }
}

impl Key128 {
    pub fn to_bytes(self) -> [u8; 16] {
        self.0.to_be_bytes()
    }

    pub fn from_bytes(bytes: [u8; 16]) -> Self {
        Key128(u128::from_be_bytes(bytes))
    }
}

fn parse_hex(s: &str, digits: usize) -> Result<u128, Error> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let cleaned = cleaned
        .strip_prefix("0x")
        .or_else(|| cleaned.strip_prefix("0X"))
        .unwrap_or(&cleaned);
    if cleaned.len() != digits {
        return Err(Error::HexLength {
            expected: digits,
            found: cleaned.len(),
        });
    }
    let mut value = 0u128;
    for c in cleaned.chars() {
        let d = c.to_digit(16).ok_or(Error::HexDigit(c))?;
        value = (value << 4) | d as u128;
    }
    Ok(value)
}

impl FromStr for Block64 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        parse_hex(s, 16).map(|v| Block64(v as u64))
    }
}

impl FromStr for Key128 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        parse_hex(s, 32).map(Key128)
    }
}

impl fmt::Display for Block64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl fmt::Display for Key128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl fmt::Display for RoundKey32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08x}", self.bits)
    }
}

macro_rules! hex_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

hex_serde!(Block64);
hex_serde!(Key128);

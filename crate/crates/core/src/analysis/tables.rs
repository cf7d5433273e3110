//! Difference-distribution and linear-approximation tables of a 4-bit S-box.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::sbox::SBox4;

#[inline]
pub(crate) fn parity4(x: u8) -> u8 {
    (x & 0xf).count_ones() as u8 & 1
}

/// `counts[din][dout] = #{x : S(x) ^ S(x ^ din) = dout}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ddt {
    pub counts: [[u8; 16]; 16],
}

/// `entries[a][b] = #{x : a·x = b·S(x)} - 8`.
///
/// With this offset `|entry| / 16` is the bias `|p - 1/2|` of the
/// approximation `a·x = b·S(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lat {
    pub entries: [[i8; 16]; 16],
}

pub fn build_ddt(s: &SBox4) -> Ddt {
    let t = s.table();
    let mut counts = [[0u8; 16]; 16];
    for din in 0..16usize {
        for x in 0..16usize {
            let dout = t[x] ^ t[x ^ din];
            counts[din][dout as usize] += 1;
        }
    }
    Ddt { counts }
}

pub fn build_lat(s: &SBox4) -> Lat {
    let t = s.table();
    let mut entries = [[0i8; 16]; 16];
    for a in 0..16u8 {
        for b in 0..16u8 {
            let agree = (0..16u8)
                .filter(|&x| parity4(a & x) == parity4(b & t[x as usize]))
                .count() as i8;
            entries[a as usize][b as usize] = agree - 8;
        }
    }
    Lat { entries }
}

impl Ddt {
    /// Largest entry outside the trivial `(0, 0)` cell.
    pub fn max_nontrivial(&self) -> u8 {
        (1..16)
            .flat_map(|i| self.counts[i].iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Output differences reachable from `din`, ascending.
    pub fn outputs(&self, din: u8) -> Vec<u8> {
        (0..16u8)
            .filter(|&o| self.counts[din as usize][o as usize] > 0)
            .collect()
    }
}

impl Lat {
    pub fn max_nontrivial_abs(&self) -> u8 {
        (1..16)
            .flat_map(|a| (1..16).map(move |b| (a, b)))
            .map(|(a, b)| self.entries[a][b].unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Output masks `b` with a nonzero entry for input mask `a`, ascending.
    pub fn outputs(&self, a: u8) -> Vec<u8> {
        (0..16u8)
            .filter(|&b| self.entries[a as usize][b as usize] != 0)
            .collect()
    }
}

fn render<T: fmt::Display>(title: &str, rows: &[[T; 16]; 16], width: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:>4}", "");
    for col in 0..16 {
        let _ = write!(out, "{:>w$x}", col, w = width);
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let _ = write!(out, "{i:>3x}:");
        for v in row {
            let _ = write!(out, "{:>w$}", v, w = width);
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for Ddt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(
            "DDT (rows: input difference, cols: output difference)",
            &self.counts,
            3,
        ))
    }
}

impl fmt::Display for Lat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(
            "LAT (rows: input mask, cols: output mask, entry = #agree - 8, bias = |entry|/16)",
            &self.entries,
            4,
        ))
    }
}

//! The 4-bit substitution box and its nibble-parallel application to a
//! 32-bit half.

use crate::error::Error;

/// The cipher's S-box, indexed by input nibble.
pub const LICI2_SBOX: [u8; 16] = [
    0x3, 0xF, 0xE, 0x1, 0x0, 0xA, 0x5, 0x8, 0xC, 0x4, 0xB, 0x2, 0x9, 0x7, 0x6, 0xD,
];

/// A 4-bit value. Construction masks to the low nibble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nibble(u8);

impl Nibble {
    pub fn new(x: u8) -> Option<Self> {
        (x < 16).then_some(Nibble(x))
    }

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Nibble> {
        (0..16).map(Nibble)
    }
}

/// A bijective 4-bit S-box together with its inverse table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SBox4 {
    table: [u8; 16],
    inverse: [u8; 16],
}

impl SBox4 {
    /// Builds an S-box, rejecting tables that are not permutations of `0..16`.
    pub fn new(table: [u8; 16]) -> Result<Self, Error> {
        let mut inverse = [0xffu8; 16];
        for (x, &y) in table.iter().enumerate() {
            if y > 15 || inverse[y as usize] != 0xff {
                return Err(Error::NotPermutation);
            }
            inverse[y as usize] = x as u8;
        }
        Ok(SBox4 { table, inverse })
    }

    pub fn lici2() -> Self {
        SBox4::new(LICI2_SBOX).expect("canonical table is a permutation")
    }

    pub fn table(&self) -> &[u8; 16] {
        &self.table
    }

    pub fn inverse_table(&self) -> &[u8; 16] {
        &self.inverse
    }

    #[inline]
    pub fn lookup(&self, x: Nibble) -> Nibble {
        Nibble(self.table[x.0 as usize])
    }

    #[inline]
    pub fn inv_lookup(&self, y: Nibble) -> Nibble {
        Nibble(self.inverse[y.0 as usize])
    }

    /// Applies the table to each of the 8 nibbles of `w` in place.
    #[inline]
    pub fn sub_nibbles(&self, w: u32) -> u32 {
        apply_nibbles(&self.table, w)
    }

    #[inline]
    pub fn inv_sub_nibbles(&self, w: u32) -> u32 {
        apply_nibbles(&self.inverse, w)
    }
}

#[inline]
fn apply_nibbles(table: &[u8; 16], w: u32) -> u32 {
    let mut out = 0u32;
    for i in 0..8 {
        let shift = 4 * i;
        let x = (w >> shift) & 0xf;
        out |= (table[x as usize] as u32) << shift;
    }
    out
}

pub fn sbox_lookup(s: &SBox4, x: Nibble) -> Nibble {
    s.lookup(x)
}

pub fn inv_sbox_lookup(s: &SBox4, y: Nibble) -> Nibble {
    s.inv_lookup(y)
}

/// Nibble-wise substitution with the canonical table.
pub fn sub_nibbles(w: u32) -> u32 {
    apply_nibbles(&LICI2_SBOX, w)
}

pub fn inv_sub_nibbles(w: u32) -> u32 {
    apply_nibbles(SBox4::lici2().inverse_table(), w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u8) -> Nibble {
        Nibble::new(x).unwrap()
    }

    #[test]
    fn table_lookups() {
        let s = SBox4::lici2();
        assert_eq!(sbox_lookup(&s, n(0x0)), n(0x3));
        assert_eq!(sbox_lookup(&s, n(0x4)), n(0x0));
        assert_eq!(sbox_lookup(&s, n(0xF)), n(0xD));
    }

    #[test]
    fn inverse_lookups() {
        let s = SBox4::lici2();
        assert_eq!(inv_sbox_lookup(&s, n(0x3)), n(0x0));
        assert_eq!(inv_sbox_lookup(&s, n(0x0)), n(0x4));
        for y in Nibble::all() {
            assert_eq!(s.lookup(s.inv_lookup(y)), y);
            assert_eq!(s.inv_lookup(s.lookup(y)), y);
        }
    }

    #[test]
    fn rejects_non_permutation() {
        let mut t = LICI2_SBOX;
        t[1] = t[0];
        assert_eq!(SBox4::new(t), Err(Error::NotPermutation));
        t = LICI2_SBOX;
        t[5] = 16;
        assert_eq!(SBox4::new(t), Err(Error::NotPermutation));
    }

    #[test]
    fn nibble_domain() {
        assert!(Nibble::new(15).is_some());
        assert!(Nibble::new(16).is_none());
    }

    #[test]
    fn sub_nibbles_examples() {
        assert_eq!(sub_nibbles(0x0000_0000), 0x3333_3333);
        assert_eq!(sub_nibbles(0xFFFF_FFFF), 0xDDDD_DDDD);
        // 0,1,2,3,4,5,6,7 -> 3,F,E,1,0,A,5,8
        assert_eq!(sub_nibbles(0x0123_4567), 0x3FE1_0A58);
        for w in [0u32, 0xdead_beef, 0x0123_4567, u32::MAX] {
            assert_eq!(inv_sub_nibbles(sub_nibbles(w)), w);
        }
    }
}

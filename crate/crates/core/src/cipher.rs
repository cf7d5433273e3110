//! Round function, key schedule and block encryption.
//!
//! One round, with `l` the half that passes through the S-box layer and `r`
//! the XOR branch:
//!
//! ```text
//! t  = rotl32(sub_nibbles(l), 11)
//! l' = t ^ r ^ k
//! r' = l' ^ t
//! ```
//!
//! The round is implemented exactly as written above. Note that `r'` reduces
//! algebraically to `r ^ k`: the S-box output cancels on the XOR branch, so
//! that half only ever accumulates round keys. This has large consequences
//! for diffusion and for linear trails (see the `analysis` module); it is
//! asserted by a test so any change to the wiring has to be deliberate.

use crate::block::{Block64, Key128, RoundKey32};
use crate::profile::{ConventionProfile, FHalf, OutputOrder, RkTiming};
use crate::sbox::{inv_sub_nibbles, sub_nibbles, LICI2_SBOX};

pub const ROUNDS: usize = 25;
pub const ROTATION: u32 = 11;
pub const KEY_ROTATION: u32 = 13;

#[inline]
pub fn rotl32(w: u32, n: u32) -> u32 {
    w.rotate_left(n)
}

#[inline]
pub fn rotr32(w: u32, n: u32) -> u32 {
    w.rotate_right(n)
}

/// S-box layer followed by a left rotation by 11.
#[inline]
pub fn f1(l: u32) -> u32 {
    rotl32(sub_nibbles(l), ROTATION)
}

#[inline]
pub fn f1_inverse(t: u32) -> u32 {
    inv_sub_nibbles(rotr32(t, ROTATION))
}

#[inline]
pub fn round_forward(l: u32, r: u32, k: u32) -> (u32, u32) {
    let t = f1(l);
    let l_next = t ^ r ^ k;
    let r_next = l_next ^ t;
    (l_next, r_next)
}

#[inline]
pub fn round_inverse(l2: u32, r2: u32, k: u32) -> (u32, u32) {
    let t = l2 ^ r2;
    (f1_inverse(t), l2 ^ t ^ k)
}

/// One update of the 128-bit key register for round counter `rc`:
/// rotate left by 13, substitute nibbles `k3..k0` and `k7..k4`, then XOR the
/// 5-bit counter into `k63..k59` (counter LSB at `k59`).
#[inline]
pub fn key_register_update(reg: u128, rc: u8) -> u128 {
    let mut reg = reg.rotate_left(KEY_ROTATION);
    let low = reg as u8;
    let sub = (LICI2_SBOX[(low >> 4) as usize] << 4) | LICI2_SBOX[(low & 0xf) as usize];
    reg = (reg & !0xff) | sub as u128;
    reg ^ (((rc & 0x1f) as u128) << 59)
}

pub fn key_schedule(k: Key128, profile: &ConventionProfile) -> Vec<RoundKey32> {
    let shift = profile.rk_window.shift();
    let mut reg = k.0;
    let mut keys = Vec::with_capacity(ROUNDS);
    for i in 1..=ROUNDS {
        let rc = profile.rc_start + (i as u8 - 1);
        let bits = match profile.rk_timing {
            RkTiming::UpdateThenExtract => {
                reg = key_register_update(reg, rc);
                (reg >> shift) as u32
            }
            RkTiming::ExtractThenUpdate => {
                let bits = (reg >> shift) as u32;
                reg = key_register_update(reg, rc);
                bits
            }
        };
        keys.push(RoundKey32 {
            bits,
            round_index: i as u8,
        });
    }
    keys
}

/// A key schedule expanded once for repeated block operations.
#[derive(Clone, Debug)]
pub struct Cipher {
    round_keys: [u32; ROUNDS],
    profile: ConventionProfile,
}

impl Cipher {
    pub fn new(key: Key128, profile: ConventionProfile) -> Self {
        let mut round_keys = [0u32; ROUNDS];
        for (slot, rk) in round_keys.iter_mut().zip(key_schedule(key, &profile)) {
            *slot = rk.bits;
        }
        Cipher {
            round_keys,
            profile,
        }
    }

    pub fn profile(&self) -> &ConventionProfile {
        &self.profile
    }

    pub fn round_keys(&self) -> &[u32; ROUNDS] {
        &self.round_keys
    }

    pub fn encrypt(&self, p: Block64) -> Block64 {
        self.encrypt_rounds(p, ROUNDS)
    }

    pub fn decrypt(&self, c: Block64) -> Block64 {
        self.decrypt_rounds(c, ROUNDS)
    }

    /// Encrypts with only the first `rounds` rounds (diagnostics).
    pub fn encrypt_rounds(&self, p: Block64, rounds: usize) -> Block64 {
        assert!(rounds <= ROUNDS);
        let (mut l, mut r) = self.split_input(p);
        for &k in &self.round_keys[..rounds] {
            (l, r) = round_forward(l, r, k);
        }
        self.join_output(l, r)
    }

    pub fn decrypt_rounds(&self, c: Block64, rounds: usize) -> Block64 {
        assert!(rounds <= ROUNDS);
        let (mut l, mut r) = match self.profile.output_order {
            OutputOrder::LeftThenRight => c.split(),
            OutputOrder::RightThenLeft => {
                let (hi, lo) = c.split();
                (lo, hi)
            }
        };
        for &k in self.round_keys[..rounds].iter().rev() {
            (l, r) = round_inverse(l, r, k);
        }
        match self.profile.f_half {
            FHalf::MsbHalf => Block64::join(l, r),
            FHalf::LsbHalf => Block64::join(r, l),
        }
    }

    /// Returns `(F-branch half, XOR-branch half)`.
    fn split_input(&self, p: Block64) -> (u32, u32) {
        let (hi, lo) = p.split();
        match self.profile.f_half {
            FHalf::MsbHalf => (hi, lo),
            FHalf::LsbHalf => (lo, hi),
        }
    }

    fn join_output(&self, l: u32, r: u32) -> Block64 {
        match self.profile.output_order {
            OutputOrder::LeftThenRight => Block64::join(l, r),
            OutputOrder::RightThenLeft => Block64::join(r, l),
        }
    }
}

pub fn encrypt_block(p: Block64, k: Key128, profile: &ConventionProfile) -> Block64 {
    Cipher::new(k, *profile).encrypt(p)
}

pub fn decrypt_block(c: Block64, k: Key128, profile: &ConventionProfile) -> Block64 {
    Cipher::new(k, *profile).decrypt(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rotation_examples() {
        assert_eq!(rotl32(0x0000_0001, 11), 0x0000_0800);
        assert_eq!(rotl32(0xdead_beef, 0), 0xdead_beef);
        assert_eq!(rotl32(0x3333_3333, 11), 0x9999_9999);
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1(0), 0x9999_9999);
        assert_eq!(f1(0xFFFF_FFFF), 0xEEEE_EEEE);
    }

    #[test]
    fn round_examples() {
        assert_eq!(round_forward(0, 0, 0), (0x9999_9999, 0));
        assert_eq!(round_forward(0, 0xAAAA_AAAA, 0), (0x3333_3333, 0xAAAA_AAAA));
        assert_eq!(round_inverse(0x9999_9999, 0, 0), (0, 0));
        assert_eq!(round_inverse(5, 5, 0), (0x4444_4444, 5));
    }

    #[test]
    fn zero_key_schedule_head() {
        // Register after one update holds only bits {0,1,4,5,59}; after two,
        // {0,1,4,5,13,14,17,18,60,72}. Neither touches bits 127..96.
        let reg1 = key_register_update(0, 1);
        assert_eq!(
            reg1,
            (1 << 0) | (1 << 1) | (1 << 4) | (1 << 5) | (1u128 << 59)
        );
        let reg2 = key_register_update(reg1, 2);
        let expected: u128 = [0, 1, 4, 5, 13, 14, 17, 18, 60, 72]
            .iter()
            .map(|&b| 1u128 << b)
            .sum();
        assert_eq!(reg2, expected);

        let ks = key_schedule(Key128(0), &ConventionProfile::default());
        assert_eq!(ks.len(), ROUNDS);
        assert_eq!(ks[0].bits, 0);
        assert_eq!(ks[1].bits, 0);
        assert_eq!(ks[0].round_index, 1);
        assert_eq!(ks[24].round_index, 25);
    }

    #[test]
    fn extract_then_update_starts_with_master_window() {
        let profile: ConventionProfile = "msb/LR/w127/ext/rc1".parse().unwrap();
        let ks = key_schedule(Key128(0xdeadbeef << 96), &profile);
        assert_eq!(ks[0].bits, 0xdeadbeef);
    }

    #[test]
    fn zero_block_round_trip() {
        let p = ConventionProfile::default();
        let c = encrypt_block(Block64(0), Key128(0), &p);
        assert_eq!(decrypt_block(c, Key128(0), &p), Block64(0));
    }

    proptest! {
        #[test]
        fn round_inverse_undoes_forward(l in any::<u32>(), r in any::<u32>(), k in any::<u32>()) {
            let (l2, r2) = round_forward(l, r, k);
            prop_assert_eq!(round_inverse(l2, r2, k), (l, r));
        }

        #[test]
        fn xor_branch_only_absorbs_the_key(l in any::<u32>(), r in any::<u32>(), k in any::<u32>()) {
            prop_assert_eq!(round_forward(l, r, k).1, r ^ k);
        }

        #[test]
        fn f1_is_invertible(w in any::<u32>()) {
            prop_assert_eq!(f1_inverse(f1(w)), w);
        }

        #[test]
        fn schedule_separates_single_bit_key_changes(k in any::<u128>(), bit in 0u32..128) {
            let p = ConventionProfile::default();
            let a = key_schedule(Key128(k), &p);
            let b = key_schedule(Key128(k ^ (1u128 << bit)), &p);
            prop_assert_eq!(a.len(), 25);
            prop_assert!(a != b);
        }
    }
}

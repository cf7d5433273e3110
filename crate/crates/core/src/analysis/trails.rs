//! Minimum number of active S-boxes over multi-round trails.
//!
//! ## Propagation rules
//!
//! Writing `(a, b)` for the (F-branch, XOR-branch) halves entering a round
//! and `y` for the S-box layer output difference or mask:
//!
//! * differential: `a' = rotl11(y) ^ b`, `b' = b` (round-key differences
//!   vanish, and the XOR branch only ever absorbs the key, so its difference
//!   is constant along the whole trail);
//! * linear (masks): `a' = rotl11(y)`, `b' = b ^ a'`. This is the transpose
//!   of the round's linear layer `(t, r) -> (t ^ r, r)`.
//!
//! A round is active on every nibble where `a` is nonzero.
//!
//! ## Exact search
//!
//! Matsui-style branch-and-bound with iterative deepening. Bounds for fewer
//! rounds are computed first; for `n` rounds a target `T` starts at the
//! `(n-1)`-round minimum and a depth-first search looks for a trail of weight
//! at most `T`, pruning any prefix whose weight plus the best bound for the
//! remaining rounds exceeds `T`. The first target that succeeds is the
//! minimum. Every suffix of a nonzero trail is itself nonzero, so the bounds
//! for shorter trails apply to the remaining rounds.
//!
//! Trails are equivariant under rotating every value by a whole nibble, so
//! the first nonzero F-branch value is required to have nibble 0 active.
//!
//! For differential trails the free XOR-branch difference is enumerated
//! indirectly: after round 1 the second F-branch difference is chosen and the
//! XOR-branch difference is solved from it.
//!
//! The witness is the first minimal trail met in the enumeration order
//! (nibble positions from 0 upward, values ascending), so it is fully
//! deterministic.
//!
//! ## Truncated search
//!
//! Each nibble collapses to active/inactive. An active nibble at position `j`
//! reaches nibble `j+2` (its bit 0) and/or `j+3` (bits 1..3) after the
//! rotation; any nonempty subset is allowed. XOR of two active nibbles may be
//! either. Every real trail maps to a truncated one, so the result is a lower
//! bound on the exact minimum.

use serde::{Deserialize, Serialize};

use crate::analysis::tables::{build_ddt, build_lat};
use crate::cipher::ROTATION;
use crate::error::Error;
use crate::sbox::SBox4;

pub const MAX_EXACT_ROUNDS: usize = 8;
pub const MAX_TRUNCATED_ROUNDS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrailType {
    Linear,
    Differential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    ExactBitlevel,
    TruncatedNibble,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// `min_active` is the true minimum.
    Complete,
    /// The node budget ran out; `min_active` is only a proven lower bound.
    BoundOnly,
}

/// One round of a witness trail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailRound {
    /// F-branch difference or mask entering the round.
    pub left: u32,
    /// XOR-branch difference or mask entering the round.
    pub right: u32,
    /// S-box layer output difference or mask.
    pub sbox_out: u32,
    pub active: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailResult {
    pub rounds: usize,
    pub trail_type: TrailType,
    pub mode: SearchMode,
    pub min_active: u32,
    pub status: SearchStatus,
    /// Minimum for 1..=rounds rounds (the last entry equals `min_active`).
    pub per_round: Vec<u32>,
    /// Number of leading `per_round` entries the search settled; any later
    /// entries are lower bounds left by an exhausted budget.
    pub exact_rounds: usize,
    /// Bit-level witness (exact mode only).
    pub witness: Option<Vec<TrailRound>>,
    /// Published value for this round count, when one exists.
    pub published: Option<u32>,
    /// `min_active - published`; negative means a lighter trail was found.
    pub discrepancy: Option<i64>,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Upper limit on search nodes across all iterations.
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 1 << 36 }
    }
}

/// Published minimum active S-box counts for 1..=5 rounds.
pub fn published_min_active(trail_type: TrailType, rounds: usize) -> Option<u32> {
    let table: [u32; 5] = match trail_type {
        TrailType::Linear => [0, 1, 3, 7, 13],
        TrailType::Differential => [0, 1, 3, 6, 10],
    };
    rounds.checked_sub(1).and_then(|i| table.get(i).copied())
}

/// Number of nonzero nibbles.
#[inline]
pub fn active_nibbles(x: u32) -> u32 {
    ((x | (x >> 1) | (x >> 2) | (x >> 3)) & 0x1111_1111).count_ones()
}

/// Transition lists for each input nibble, derived from the DDT or LAT.
fn transitions(trail_type: TrailType, s: &SBox4) -> [Vec<u8>; 16] {
    match trail_type {
        TrailType::Differential => {
            let ddt = build_ddt(s);
            std::array::from_fn(|i| ddt.outputs(i as u8))
        }
        TrailType::Linear => {
            let lat = build_lat(s);
            std::array::from_fn(|i| lat.outputs(i as u8))
        }
    }
}

#[inline]
fn step(trail_type: TrailType, right: u32, sbox_out: u32) -> (u32, u32) {
    let t = sbox_out.rotate_left(ROTATION);
    match trail_type {
        TrailType::Differential => (t ^ right, right),
        TrailType::Linear => (t, right ^ t),
    }
}

pub fn min_active_sboxes(
    rounds: usize,
    trail_type: TrailType,
    mode: SearchMode,
    budget: SearchBudget,
) -> Result<TrailResult, Error> {
    let max = match mode {
        SearchMode::ExactBitlevel => MAX_EXACT_ROUNDS,
        SearchMode::TruncatedNibble => MAX_TRUNCATED_ROUNDS,
    };
    if rounds == 0 || rounds > max {
        return Err(Error::RoundsOutOfRange { rounds, max });
    }
    let mut result = match mode {
        SearchMode::ExactBitlevel => exact_search(rounds, trail_type, &SBox4::lici2(), budget),
        SearchMode::TruncatedNibble => truncated_search(rounds, trail_type),
    };
    result.published = published_min_active(trail_type, rounds);
    if result.status == SearchStatus::Complete {
        result.discrepancy = result
            .published
            .map(|p| result.min_active as i64 - p as i64);
    }
    Ok(result)
}

struct ExactSearch {
    trail_type: TrailType,
    rounds: usize,
    /// `bounds[r]` is the proven minimum for `r` rounds; `bounds[0] = 0`.
    bounds: Vec<u32>,
    target: u32,
    opts: [Vec<u8>; 16],
    nodes: u64,
    max_nodes: u64,
    exhausted: bool,
    path: Vec<TrailRound>,
}

impl ExactSearch {
    fn run(&mut self) -> bool {
        self.path.clear();
        self.first_round(0, 0, 0, 0)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.exhausted = true;
        }
        !self.exhausted
    }

    /// Enumerates the round-1 F-branch value and its S-box output together.
    fn first_round(&mut self, j: u32, left: u32, out: u32, w: u32) -> bool {
        if !self.tick() {
            return false;
        }
        if j == 8 {
            return self.after_first(left, out, w);
        }
        for v in 0..16u8 {
            if j == 0 && v == 0 {
                // Canonical form: either the whole value is zero or nibble 0
                // is active.
                if self.after_first(0, 0, 0) {
                    return true;
                }
                if self.exhausted {
                    return false;
                }
                continue;
            }
            let nw = w + (v != 0) as u32;
            if nw + self.bounds[self.rounds - 1] > self.target {
                continue;
            }
            let shift = 4 * j;
            if v == 0 {
                if self.first_round(j + 1, left, out, nw) {
                    return true;
                }
            } else {
                for oi in 0..self.opts[v as usize].len() {
                    let o = self.opts[v as usize][oi];
                    if self.first_round(
                        j + 1,
                        left | (v as u32) << shift,
                        out | (o as u32) << shift,
                        nw,
                    ) {
                        return true;
                    }
                }
            }
            if self.exhausted {
                return false;
            }
        }
        false
    }

    fn after_first(&mut self, left: u32, out: u32, w: u32) -> bool {
        match self.trail_type {
            TrailType::Differential if self.rounds > 1 => self.second_left(0, left, out, w, 0, 0),
            _ => {
                // The XOR-branch value does not affect the count here; the
                // smallest admissible one is used.
                let right = if left == 0 { 1 } else { 0 };
                if self.rounds == 1 {
                    self.path.push(TrailRound {
                        left,
                        right,
                        sbox_out: out,
                        active: w,
                    });
                    return true;
                }
                let (nl, nr) = step(self.trail_type, right, out);
                let nw = active_nibbles(nl);
                if w + nw + self.bounds[self.rounds - 2] > self.target {
                    return false;
                }
                self.path.push(TrailRound {
                    left,
                    right,
                    sbox_out: out,
                    active: w,
                });
                if self.extend(nl, nr, w + nw) {
                    return true;
                }
                self.path.pop();
                false
            }
        }
    }

    /// Differential only: enumerates the round-2 F-branch difference and
    /// solves the (constant) XOR-branch difference from it.
    fn second_left(&mut self, j: u32, l1: u32, out1: u32, w1: u32, l2: u32, w2: u32) -> bool {
        if !self.tick() {
            return false;
        }
        if j == 8 {
            let right = l2 ^ out1.rotate_left(ROTATION);
            if l1 == 0 && right == 0 {
                return false;
            }
            self.path.push(TrailRound {
                left: l1,
                right,
                sbox_out: out1,
                active: w1,
            });
            if self.extend(l2, right, w1 + w2) {
                return true;
            }
            self.path.pop();
            return false;
        }
        let remaining = self.bounds[self.rounds - 2];
        for v in 0..16u32 {
            if j == 0 && l1 == 0 && v == 0 {
                continue;
            }
            let nw = w2 + (v != 0) as u32;
            if w1 + nw + remaining > self.target {
                continue;
            }
            if self.second_left(j + 1, l1, out1, w1, l2 | v << (4 * j), nw) {
                return true;
            }
            if self.exhausted {
                return false;
            }
        }
        false
    }

    /// `path` holds the completed rounds; `(left, right)` enters the next one
    /// and `count` already includes its active nibbles.
    fn extend(&mut self, left: u32, right: u32, count: u32) -> bool {
        if !self.tick() {
            return false;
        }
        let round = self.path.len() + 1;
        if round == self.rounds {
            let out = self.first_output(left);
            self.path.push(TrailRound {
                left,
                right,
                sbox_out: out,
                active: active_nibbles(left),
            });
            return true;
        }
        let remaining = self.bounds[self.rounds - round - 1];
        self.outputs(0, left, right, 0, count, remaining)
    }

    fn outputs(
        &mut self,
        j: u32,
        left: u32,
        right: u32,
        out: u32,
        count: u32,
        remaining: u32,
    ) -> bool {
        if j == 8 {
            let (nl, nr) = step(self.trail_type, right, out);
            let nw = active_nibbles(nl);
            if count + nw + remaining > self.target {
                return false;
            }
            self.path.push(TrailRound {
                left,
                right,
                sbox_out: out,
                active: active_nibbles(left),
            });
            if self.extend(nl, nr, count + nw) {
                return true;
            }
            self.path.pop();
            return false;
        }
        let v = (left >> (4 * j)) & 0xf;
        if v == 0 {
            return self.outputs(j + 1, left, right, out, count, remaining);
        }
        for oi in 0..self.opts[v as usize].len() {
            let o = self.opts[v as usize][oi] as u32;
            if self.outputs(j + 1, left, right, out | o << (4 * j), count, remaining) {
                return true;
            }
            if self.exhausted {
                return false;
            }
        }
        false
    }

    fn first_output(&self, left: u32) -> u32 {
        (0..8).fold(0, |acc, j| {
            let v = (left >> (4 * j)) & 0xf;
            acc | (self.opts[v as usize][0] as u32) << (4 * j)
        })
    }
}

fn exact_search(
    rounds: usize,
    trail_type: TrailType,
    s: &SBox4,
    budget: SearchBudget,
) -> TrailResult {
    let mut search = ExactSearch {
        trail_type,
        rounds: 0,
        bounds: vec![0],
        target: 0,
        opts: transitions(trail_type, s),
        nodes: 0,
        max_nodes: budget.max_nodes,
        exhausted: false,
        path: Vec::new(),
    };
    let mut witness = None;
    for n in 1..=rounds {
        search.rounds = n;
        search.target = search.bounds[n - 1];
        loop {
            if search.run() {
                break;
            }
            if search.exhausted {
                break;
            }
            search.target += 1;
        }
        search.bounds.push(search.target);
        if search.exhausted {
            // Everything below `target` has been refuted for `n` rounds, and
            // longer trails can only be heavier.
            let mut per_round = search.bounds[1..].to_vec();
            per_round.resize(rounds, search.target);
            return TrailResult {
                rounds,
                trail_type,
                mode: SearchMode::ExactBitlevel,
                min_active: search.target,
                status: SearchStatus::BoundOnly,
                per_round,
                exact_rounds: n - 1,
                witness: None,
                published: None,
                discrepancy: None,
                nodes: search.nodes,
            };
        }
        if n == rounds {
            witness = Some(search.path.clone());
        }
    }
    TrailResult {
        rounds,
        trail_type,
        mode: SearchMode::ExactBitlevel,
        min_active: search.bounds[rounds],
        status: SearchStatus::Complete,
        per_round: search.bounds[1..].to_vec(),
        exact_rounds: rounds,
        witness,
        published: None,
        discrepancy: None,
        nodes: search.nodes,
    }
}

/// Checks a witness against the propagation rules and the S-box tables and
/// returns its total number of active S-boxes.
pub fn verify_witness(trail_type: TrailType, trail: &[TrailRound]) -> Result<u32, String> {
    let s = SBox4::lici2();
    let ddt = build_ddt(&s);
    let lat = build_lat(&s);
    let first = trail.first().ok_or("empty trail")?;
    if first.left == 0 && first.right == 0 {
        return Err("trail starts from the zero state".into());
    }
    let mut total = 0;
    for (i, r) in trail.iter().enumerate() {
        for j in 0..8 {
            let a = ((r.left >> (4 * j)) & 0xf) as usize;
            let b = ((r.sbox_out >> (4 * j)) & 0xf) as usize;
            let ok = match trail_type {
                TrailType::Differential => ddt.counts[a][b] > 0,
                TrailType::Linear => lat.entries[a][b] != 0,
            };
            if !ok {
                return Err(format!(
                    "round {}: nibble {j} transition {a:x}->{b:x} impossible",
                    i + 1
                ));
            }
        }
        let active = active_nibbles(r.left);
        if active != r.active {
            return Err(format!(
                "round {}: active count {} recorded as {}",
                i + 1,
                active,
                r.active
            ));
        }
        total += active;
        if let Some(next) = trail.get(i + 1) {
            if step(trail_type, r.right, r.sbox_out) != (next.left, next.right) {
                return Err(format!(
                    "round {}: propagation to round {} broken",
                    i + 1,
                    i + 2
                ));
            }
        }
    }
    Ok(total)
}

/// Nibble-pattern image of one active-nibble set under the S-box layer and
/// rotation: every `T` that is a union of one nonempty subset of
/// `{j+2, j+3}` per active nibble `j`.
fn truncated_images(pattern: u8) -> Vec<u8> {
    let reach = |j: u32| (1u8 << ((j + 2) % 8)) | (1u8 << ((j + 3) % 8));
    let span = (0..8)
        .filter(|j| pattern >> j & 1 == 1)
        .fold(0u8, |acc, j| acc | reach(j));
    let mut out = Vec::new();
    // Enumerate subsets of `span` in ascending order.
    let mut t: u16 = 0;
    loop {
        let tt = t as u8;
        if tt & !span == 0 && (0..8).all(|j| pattern >> j & 1 == 0 || tt & reach(j) != 0) {
            out.push(tt);
        }
        if t == 255 {
            break;
        }
        t += 1;
    }
    out
}

fn truncated_search(rounds: usize, trail_type: TrailType) -> TrailResult {
    let images: Vec<Vec<u8>> = (0..=255u8).map(truncated_images).collect();
    let weight = |x: u8| x.count_ones();
    const INF: u32 = u32::MAX / 2;
    let mut best = vec![INF; rounds];

    // The XOR branch pattern is constant in the differential model and does
    // not enter the count in the linear one. One representative per nibble
    // rotation class suffices.
    let right_patterns: Vec<u8> = match trail_type {
        TrailType::Differential => (0..=255u8)
            .filter(|&r| (1..8).all(|k| r.rotate_left(k) >= r))
            .collect(),
        TrailType::Linear => vec![1],
    };

    for &r in &right_patterns {
        // next[a] = reachable F-branch patterns from `a` given `r`.
        let next: Vec<[u64; 4]> = (0..256usize)
            .map(|a| {
                let mut set = [0u64; 4];
                for &t in &images[a] {
                    match trail_type {
                        TrailType::Differential => {
                            let base = t ^ r;
                            let free = t & r;
                            let mut sub = free;
                            loop {
                                let x = (base | sub) as usize;
                                set[x >> 6] |= 1 << (x & 63);
                                if sub == 0 {
                                    break;
                                }
                                sub = (sub - 1) & free;
                            }
                        }
                        TrailType::Linear => {
                            set[t as usize >> 6] |= 1 << (t & 63);
                        }
                    }
                }
                set
            })
            .collect();

        let mut dist = [INF; 256];
        for (a, d) in dist.iter_mut().enumerate() {
            if a == 0 && r == 0 {
                continue;
            }
            *d = weight(a as u8);
        }
        for (n, slot) in best.iter_mut().enumerate() {
            *slot = (*slot).min(*dist.iter().min().unwrap());
            if n + 1 == rounds {
                break;
            }
            let mut nd = [INF; 256];
            for a in 0..256usize {
                if dist[a] >= INF {
                    continue;
                }
                for (word, bits) in next[a].iter().enumerate() {
                    let mut bits = *bits;
                    while bits != 0 {
                        let x = word * 64 + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let c = dist[a] + weight(x as u8);
                        if c < nd[x] {
                            nd[x] = c;
                        }
                    }
                }
            }
            dist = nd;
        }
    }

    TrailResult {
        rounds,
        trail_type,
        mode: SearchMode::TruncatedNibble,
        min_active: best[rounds - 1],
        status: SearchStatus::Complete,
        per_round: best,
        exact_rounds: rounds,
        witness: None,
        published: None,
        discrepancy: None,
        nodes: 0,
    }
}

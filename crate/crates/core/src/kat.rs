//! Known-answer vectors and the convention-profile grid search.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::block::{Block64, Key128};
use crate::cipher::Cipher;
use crate::profile::ConventionProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownAnswer {
    pub plaintext: Block64,
    pub key: Key128,
    pub ciphertext: Block64,
}

/// The two published test vectors.
pub const PUBLISHED_VECTORS: [KnownAnswer; 2] = [
    KnownAnswer {
        plaintext: Block64(0x1234_5678_90ab_cdef),
        key: Key128(0x1234_5678_90ab_cdef_1234_5678_90ab_cdef),
        ciphertext: Block64(0x1339_607b_88df_737a),
    },
    KnownAnswer {
        plaintext: Block64(0xffff_ffff_ffff_ffff),
        key: Key128(0),
        ciphertext: Block64(0xc7ac_349c_ecb5_7df3),
    },
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub profile: ConventionProfile,
    /// Ciphertext this profile produces for each vector, in input order.
    pub produced: Vec<Block64>,
    pub matches: Vec<bool>,
}

impl ProfileRow {
    pub fn all_match(&self) -> bool {
        self.matches.iter().all(|&m| m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub vectors: Vec<KnownAnswer>,
    /// One row per profile, in [`ConventionProfile::all`] order.
    pub rows: Vec<ProfileRow>,
    /// First fully matching profile in grid order, if any.
    pub matched: Option<ConventionProfile>,
    /// Number of fully matching profiles.
    pub match_count: usize,
}

pub const UNVERIFIED_BANNER: &str =
    "UNVERIFIED PUBLISHED VECTORS: no convention profile reproduces every known-answer vector";

impl GridReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match self.matched {
            Some(p) => {
                let _ = writeln!(
                    out,
                    "MATCH: profile {p} reproduces all {} vectors ({} matching profile(s))",
                    self.vectors.len(),
                    self.match_count
                );
            }
            None => {
                let _ = writeln!(out, "{UNVERIFIED_BANNER}");
            }
        }
        let _ = writeln!(out, "expected:");
        for (i, v) in self.vectors.iter().enumerate() {
            let _ = writeln!(
                out,
                "  [{i}] p={} k={} c={}",
                v.plaintext, v.key, v.ciphertext
            );
        }
        let _ = writeln!(out, "{:>3}  {:<22} produced", "#", "profile");
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row
                .produced
                .iter()
                .zip(&row.matches)
                .map(|(c, &m)| format!("{c}{}", if m { "*" } else { " " }))
                .collect();
            let _ = writeln!(
                out,
                "{i:>3}  {:<22} {}",
                row.profile.to_string(),
                cells.join(" ")
            );
        }
        out
    }
}

/// Evaluates every profile against `vectors`.
///
/// Returns the full per-profile report; `matched` is the first profile in
/// grid order that reproduces every vector, or `None`.
pub fn kat_grid_search(vectors: &[KnownAnswer]) -> GridReport {
    assert!(!vectors.is_empty(), "grid search needs at least one vector");
    let mut rows = Vec::with_capacity(ConventionProfile::COUNT);
    for profile in ConventionProfile::all() {
        let produced: Vec<Block64> = vectors
            .iter()
            .map(|v| Cipher::new(v.key, profile).encrypt(v.plaintext))
            .collect();
        let matches = produced
            .iter()
            .zip(vectors)
            .map(|(c, v)| *c == v.ciphertext)
            .collect();
        rows.push(ProfileRow {
            profile,
            produced,
            matches,
        });
    }
    let matching: Vec<&ProfileRow> = rows.iter().filter(|r| r.all_match()).collect();
    GridReport {
        vectors: vectors.to_vec(),
        matched: matching.first().map(|r| r.profile),
        match_count: matching.len(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::encrypt_block;

    #[test]
    fn self_generated_vector_selects_its_profile() {
        let p = Block64(0x0011_2233_4455_6677);
        let k = Key128(0x0f1e_2d3c_4b5a_6978_8796_a5b4_c3d2_e1f0);
        for profile in ConventionProfile::all() {
            let v = KnownAnswer {
                plaintext: p,
                key: k,
                ciphertext: encrypt_block(p, k, &profile),
            };
            let report = kat_grid_search(&[v]);
            assert!(report.match_count >= 1);
            let row = report.rows.iter().find(|r| r.profile == profile).unwrap();
            assert!(row.all_match());
            if profile == ConventionProfile::default() {
                assert_eq!(report.matched, Some(profile));
            }
        }
    }

    #[test]
    fn published_vectors_pin_a_single_profile() {
        let report = kat_grid_search(&PUBLISHED_VECTORS);
        assert_eq!(report.match_count, 1);
        assert_eq!(report.matched, Some(ConventionProfile::verified()));
        assert!(report
            .render_text()
            .starts_with("MATCH: profile msb/LR/w31/ext/rc0"));
    }

    #[test]
    fn report_lists_every_profile() {
        let report = kat_grid_search(&PUBLISHED_VECTORS);
        assert_eq!(report.rows.len(), 64);
        let text = report.render_text();
        assert_eq!(
            text.lines().skip(1).filter(|l| l.contains("/rc")).count(),
            64
        );
    }
}

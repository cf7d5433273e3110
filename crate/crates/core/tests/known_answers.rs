use lici2::kat::{kat_grid_search, PUBLISHED_VECTORS};
use lici2::profile::{FHalf, OutputOrder, RkTiming, RkWindow};
use lici2::{decrypt_block, encrypt_block, Block64, Cipher, ConventionProfile, Key128};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn published_vectors_under_verified_profile() {
    let p = ConventionProfile::verified();
    for v in PUBLISHED_VECTORS {
        assert_eq!(encrypt_block(v.plaintext, v.key, &p), v.ciphertext);
        assert_eq!(decrypt_block(v.ciphertext, v.key, &p), v.plaintext);
    }
}

#[test]
fn all_ones_plaintext_zero_key() {
    let c = encrypt_block(
        "ffffffffffffffff".parse().unwrap(),
        "00000000000000000000000000000000".parse().unwrap(),
        &ConventionProfile::verified(),
    );
    assert_eq!(c.to_string(), "c7ac349cecb57df3");
}

#[test]
fn other_profiles_do_not_decrypt_the_vectors() {
    for profile in ConventionProfile::all() {
        if profile == ConventionProfile::verified() {
            continue;
        }
        let v = PUBLISHED_VECTORS[0];
        assert_ne!(
            decrypt_block(v.ciphertext, v.key, &profile),
            v.plaintext,
            "{profile}"
        );
    }
}

#[test]
fn grid_selects_verified_profile() {
    let report = kat_grid_search(&PUBLISHED_VECTORS);
    assert_eq!(report.matched, Some(ConventionProfile::verified()));
    assert_eq!(report.match_count, 1);
}

fn variants(p: ConventionProfile) -> Vec<(&'static str, ConventionProfile)> {
    let mut out = Vec::new();
    let flip_half = match p.f_half {
        FHalf::MsbHalf => FHalf::LsbHalf,
        FHalf::LsbHalf => FHalf::MsbHalf,
    };
    out.push((
        "f_half",
        ConventionProfile {
            f_half: flip_half,
            ..p
        },
    ));
    let flip_order = match p.output_order {
        OutputOrder::LeftThenRight => OutputOrder::RightThenLeft,
        OutputOrder::RightThenLeft => OutputOrder::LeftThenRight,
    };
    out.push((
        "output_order",
        ConventionProfile {
            output_order: flip_order,
            ..p
        },
    ));
    for w in [
        RkWindow::K127_96,
        RkWindow::K95_64,
        RkWindow::K63_32,
        RkWindow::K31_0,
    ] {
        if w != p.rk_window {
            out.push(("rk_window", ConventionProfile { rk_window: w, ..p }));
        }
    }
    let flip_timing = match p.rk_timing {
        RkTiming::UpdateThenExtract => RkTiming::ExtractThenUpdate,
        RkTiming::ExtractThenUpdate => RkTiming::UpdateThenExtract,
    };
    out.push((
        "rk_timing",
        ConventionProfile {
            rk_timing: flip_timing,
            ..p
        },
    ));
    out.push((
        "rc_start",
        ConventionProfile {
            rc_start: 1 - p.rc_start,
            ..p
        },
    ));
    out
}

#[test]
fn every_profile_field_changes_the_cipher() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9f11);
    for base in ConventionProfile::all() {
        for (field, other) in variants(base) {
            let differs = (0..100).any(|_| {
                let p = Block64(rng.gen());
                let k = Key128(rng.gen());
                encrypt_block(p, k, &base) != encrypt_block(p, k, &other)
            });
            assert!(differs, "changing {field} of {base} had no effect");
        }
    }
}

#[test]
fn round_trip_every_profile() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for profile in ConventionProfile::all() {
        for _ in 0..200 {
            let cipher = Cipher::new(Key128(rng.gen()), profile);
            let p = Block64(rng.gen());
            assert_eq!(cipher.decrypt(cipher.encrypt(p)), p);
            let r = rng.gen_range(0..=25);
            assert_eq!(cipher.decrypt_rounds(cipher.encrypt_rounds(p, r), r), p);
        }
    }
}

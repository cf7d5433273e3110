mod args;
mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use lici2::analysis::avalanche::{avalanche_test, FlipTarget};
use lici2::analysis::complexity::{extrapolate_differential, extrapolate_linear};
use lici2::analysis::tables::{build_ddt, build_lat};
use lici2::analysis::trails::{
    min_active_sboxes, published_min_active, SearchBudget, SearchMode, SearchStatus, TrailType,
};
use lici2::cost::{ge_report_for, BillOfComponents, GateWeightTable};
use lici2::datagram::{demo_nodes, parse_script, FrameCodec, LinkKeys, ScriptStep, TransportKind};
use lici2::kat::{kat_grid_search, PUBLISHED_VECTORS, UNVERIFIED_BANNER};
use lici2::sbox::SBox4;
use lici2::{Block64, Cipher, ConventionProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use args::{Analyze, Cli, Command, Format, Frame, Kind, Mode, Target, Transport};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

const DEMO_SCRIPT: &str = "send hello 6lowpan\nsend second message\nreplay 2\ncorrupt 100 tampered in transit\nsend still delivered\n";

/// Result of one command: the same content as JSON and as text.
struct Output {
    json: Value,
    text: String,
    exit: u8,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output {
            json,
            text,
            exit: 0,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    /// Command ran but the input was rejected, with a stable code.
    Rejected {
        code: String,
        message: String,
    },
}

impl From<lici2::Error> for Failure {
    fn from(e: lici2::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() && json_requested() => {
            let message = e.kind().to_string();
            let detail = e.to_string();
            let detail = detail
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprintln!(
                "{}",
                json!({ "error": { "kind": "usage", "code": "usage", "message": format!("{message}: {detail}") } })
            );
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&out.json).expect("json output") + "\n"
                }
                Format::Text => out.text,
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            ExitCode::from(out.exit)
        }
        Err(f) => {
            let (kind, code, message, exit) = match f {
                Failure::Usage(m) => ("usage", "usage".to_string(), m, EXIT_USAGE),
                Failure::Rejected { code, message } => ("rejected", code, message, EXIT_FAILURE),
            };
            match cli.format {
                Format::Json => eprintln!(
                    "{}",
                    json!({ "error": { "kind": kind, "code": code, "message": message } })
                ),
                Format::Text => eprintln!("error: {message}"),
            }
            ExitCode::from(exit)
        }
    }
}

/// Whether argv asks for JSON output, for reporting argument errors.
fn json_requested() -> bool {
    let argv: Vec<String> = std::env::args().collect();
    argv.iter().any(|a| a == "--format=json")
        || argv
            .windows(2)
            .any(|w| w[0] == "--format" && w[1] == "json")
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let profile_path = config::profile_path(cli.profile_path.as_deref());
    let profile = || -> Result<ConventionProfile, Failure> {
        let base = match cli.profile {
            Some(p) => p,
            None => config::load(&profile_path).map_err(Failure::Usage)?,
        };
        Ok(cli.fields.apply(base))
    };
    match &cli.command {
        Command::Encrypt(a) | Command::Decrypt(a) => {
            let p = profile()?;
            let cipher = Cipher::new(a.key, p);
            let (op, out) = match cli.command {
                Command::Encrypt(_) => ("encrypt", cipher.encrypt(a.input)),
                _ => ("decrypt", cipher.decrypt(a.input)),
            };
            Ok(Output::ok(
                json!({ "operation": op, "profile": p, "key": a.key, "input": a.input, "output": out }),
                format!("{out}\n"),
            ))
        }
        Command::Keys { key } => {
            let p = profile()?;
            let cipher = Cipher::new(*key, p);
            let keys: Vec<String> = cipher
                .round_keys()
                .iter()
                .map(|k| format!("{k:08x}"))
                .collect();
            let text = keys
                .iter()
                .enumerate()
                .map(|(i, k)| format!("{:>2} {k}\n", i + 1))
                .collect();
            Ok(Output::ok(
                json!({ "profile": p, "key": key, "round_keys": keys }),
                text,
            ))
        }
        Command::Kat { no_save } => kat(&profile_path, *no_save),
        Command::Analyze { what } => analyze(what),
        Command::Avalanche {
            trials,
            seed,
            target,
            rounds,
        } => {
            let target = match target {
                Target::Plaintext => FlipTarget::PlaintextBit,
                Target::Key => FlipTarget::KeyBit,
            };
            let p = profile()?;
            let r = avalanche_test(*trials, target, *seed, &p, *rounds)?;
            let text = format!(
                "profile {p}\ntrials {} rounds {} seed {:#x}\nmean ciphertext bits flipped: {:.4} of 64\n",
                r.trials, r.rounds, r.seed, r.mean_flips
            );
            Ok(Output::ok(serde_json::to_value(&r).expect("report"), text))
        }
        Command::Ge {
            data_bill,
            key_bill,
        } => {
            let load =
                |path: &Option<std::path::PathBuf>, canonical: fn() -> BillOfComponents| match path
                {
                    None => Ok(canonical()),
                    Some(p) => {
                        let text = std::fs::read_to_string(p)
                            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                        BillOfComponents::from_json(&text)
                            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
                    }
                };
            let data = load(data_bill, BillOfComponents::canonical_data_path)?;
            let key = load(key_bill, BillOfComponents::canonical_key_path)?;
            let r = ge_report_for(&data, &key, &GateWeightTable::canonical())?;
            Ok(Output::ok(
                serde_json::to_value(&r).expect("report"),
                r.render_text(),
            ))
        }
        Command::Bench { blocks, seed } => {
            let p = profile()?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let cipher = Cipher::new(lici2::Key128(rng.gen()), p);
            let data: Vec<u64> = (0..(*blocks).min(1 << 16)).map(|_| rng.gen()).collect();
            let start = Instant::now();
            let mut acc = 0u64;
            for i in 0..*blocks {
                acc ^= cipher
                    .encrypt(Block64(data[(i % data.len().max(1) as u64) as usize] ^ acc))
                    .0;
            }
            let secs = start.elapsed().as_secs_f64();
            let rate = if secs > 0.0 {
                *blocks as f64 / secs
            } else {
                0.0
            };
            Ok(Output::ok(
                json!({ "profile": p, "blocks": blocks, "seconds": secs, "blocks_per_sec": rate, "checksum": format!("{acc:016x}") }),
                format!(
                    "{blocks} blocks in {secs:.3} s: {rate:.0} blocks/s ({:.2} MB/s)\n",
                    rate * 8.0 / 1e6
                ),
            ))
        }
        Command::Frame { what } => frame(what, profile()?),
    }
}

fn kat(path: &std::path::Path, no_save: bool) -> Result<Output, Failure> {
    let grid = kat_grid_search(&PUBLISHED_VECTORS);
    let mut text = grid.render_text();
    let mut saved = None;
    if let (Some(p), false) = (grid.matched, no_save) {
        config::save(path, p).map_err(Failure::Usage)?;
        let _ = writeln!(text, "saved profile {p} to {}", path.display());
        saved = Some(path.display().to_string());
    }
    let rows: Vec<Value> = grid
        .rows
        .iter()
        .map(|r| json!({ "profile": r.profile, "produced": r.produced, "matches": r.matches }))
        .collect();
    let json = json!({
        "matched": grid.matched,
        "match_count": grid.match_count,
        "banner": grid.matched.is_none().then_some(UNVERIFIED_BANNER),
        "vectors": grid.vectors,
        "rows": rows,
        "saved_to": saved,
    });
    Ok(Output::ok(json, text))
}

fn trail_type(k: Kind) -> TrailType {
    match k {
        Kind::Linear => TrailType::Linear,
        Kind::Differential => TrailType::Differential,
    }
}

fn analyze(what: &Analyze) -> Result<Output, Failure> {
    let s = SBox4::lici2();
    match what {
        Analyze::Ddt => {
            let t = build_ddt(&s);
            Ok(Output::ok(
                json!({ "table": "ddt", "max_nontrivial": t.max_nontrivial(), "entries": t.counts }),
                format!("{t}max nontrivial entry: {}\n", t.max_nontrivial()),
            ))
        }
        Analyze::Lat => {
            let t = build_lat(&s);
            Ok(Output::ok(
                json!({ "table": "lat", "max_nontrivial": t.max_nontrivial_abs(), "entries": t.entries }),
                format!("{t}max nontrivial |entry|: {}\n", t.max_nontrivial_abs()),
            ))
        }
        Analyze::Trails {
            kind,
            rounds,
            mode,
            max_nodes,
        } => {
            let mode = match mode {
                Mode::Exact => SearchMode::ExactBitlevel,
                Mode::Truncated => SearchMode::TruncatedNibble,
            };
            let r = min_active_sboxes(
                *rounds,
                trail_type(*kind),
                mode,
                SearchBudget {
                    max_nodes: *max_nodes,
                },
            )?;
            let mut text = String::new();
            let _ = writeln!(
                text,
                "{:?} trails, {:?} search, {} nodes",
                r.trail_type, r.mode, r.nodes
            );
            for (i, m) in r.per_round.iter().enumerate() {
                if i >= r.exact_rounds {
                    let _ = writeln!(text, "rounds {:>2}: >= {m} active (bound only)", i + 1);
                    continue;
                }
                let _ = write!(text, "rounds {:>2}: {m:>3} active", i + 1);
                if let Some(p) = published_min_active(r.trail_type, i + 1) {
                    let _ = write!(text, "  (published {p}, {:+})", *m as i64 - p as i64);
                }
                text.push('\n');
            }
            if r.status == SearchStatus::BoundOnly {
                let _ = writeln!(
                    text,
                    "budget exhausted: {} is a lower bound only",
                    r.min_active
                );
            }
            if let Some(w) = &r.witness {
                let _ = writeln!(text, "witness (left right sbox_out active):");
                for (i, step) in w.iter().enumerate() {
                    let _ = writeln!(
                        text,
                        "  {:>2} {:08x} {:08x} {:08x} {}",
                        i + 1,
                        step.left,
                        step.right,
                        step.sbox_out,
                        step.active
                    );
                }
            }
            let exit = if r.status == SearchStatus::BoundOnly {
                EXIT_TIMEOUT
            } else {
                0
            };
            Ok(Output {
                json: serde_json::to_value(&r).expect("result"),
                text,
                exit,
            })
        }
        Analyze::Complexity {
            kind,
            active,
            segments,
        } => {
            let e = match kind {
                Kind::Linear => extrapolate_linear(*active, *segments)?,
                Kind::Differential => extrapolate_differential(*active, *segments)?,
            };
            let mut text = String::new();
            if let Some(b) = e.segment_bias_log2 {
                let _ = writeln!(text, "bias of one {}-S-box trail: 2^{b}", e.segment_active);
            }
            let what = match kind {
                Kind::Linear => "combined bias",
                Kind::Differential => "trail probability",
            };
            let _ = writeln!(
                text,
                "{what} over {} active S-boxes: 2^{}",
                e.total_active, e.combined_log2
            );
            let n = match kind {
                Kind::Linear => "N_L",
                Kind::Differential => "N_d",
            };
            let _ = writeln!(
                text,
                "{n} = 2^{}{}",
                e.attack.data_log2,
                if e.attack.exceeds_codebook {
                    " (exceeds the 2^64 codebook)"
                } else {
                    ""
                }
            );
            if e.approximation {
                let _ = writeln!(text, "note: {} segments composed by repetition; an approximation, not a searched bound", e.segments);
            }
            Ok(Output::ok(
                serde_json::to_value(&e).expect("estimate"),
                text,
            ))
        }
    }
}

fn frame(what: &Frame, profile: ConventionProfile) -> Result<Output, Failure> {
    match what {
        Frame::Encode {
            key,
            src,
            dst,
            seq,
            text,
            hex,
        } => {
            let payload = match (text, hex) {
                (Some(t), _) => t.as_bytes().to_vec(),
                (None, Some(h)) => hex::decode(h.trim())
                    .map_err(|e| Failure::Usage(format!("payload hex: {e}")))?,
                (None, None) => unreachable!("clap requires a payload"),
            };
            let codec = FrameCodec::new(LinkKeys::derive(*key), profile);
            let f = codec
                .encode(&payload, *src, *dst, *seq)
                .map_err(|e| Failure::Rejected {
                    code: e.code().into(),
                    message: e.to_string(),
                })?;
            let h = hex::encode(&f);
            Ok(Output::ok(
                json!({ "profile": profile, "frame": h, "length": f.len(), "payload_length": payload.len(), "seq": seq }),
                format!("{h}\n"),
            ))
        }
        Frame::Decode { key, frame } => {
            let bytes =
                hex::decode(frame.trim()).map_err(|e| Failure::Usage(format!("frame hex: {e}")))?;
            let codec = FrameCodec::new(LinkKeys::derive(*key), profile);
            let d = codec.decode(&bytes).map_err(|e| Failure::Rejected {
                code: e.code().into(),
                message: e.to_string(),
            })?;
            let text = String::from_utf8_lossy(&d.plaintext).into_owned();
            Ok(Output::ok(
                json!({
                    "profile": profile,
                    "header": d.header,
                    "payload_hex": hex::encode(&d.plaintext),
                    "payload_text": text,
                }),
                format!("{text}\n"),
            ))
        }
        Frame::Demo {
            key,
            script,
            transport,
        } => {
            let source = match script {
                Some(p) => std::fs::read_to_string(p)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
                None => DEMO_SCRIPT.to_string(),
            };
            let steps: Vec<ScriptStep> = if source.trim_start().starts_with('[') {
                serde_json::from_str(&source).map_err(|e| Failure::Usage(format!("script: {e}")))?
            } else {
                parse_script(&source).map_err(Failure::Usage)?
            };
            let transport = match transport {
                Transport::InMemory => TransportKind::InMemory,
                Transport::Udp => TransportKind::UdpDatagram,
            };
            let codec = FrameCodec::new(LinkKeys::derive(*key), profile);
            let t = demo_nodes(transport, &steps, &codec).map_err(|e| Failure::Rejected {
                code: "transport".into(),
                message: e.to_string(),
            })?;
            let mut text = t.to_json_lines();
            let _ = writeln!(
                text,
                "delivered {} rejected {}",
                t.delivered(),
                t.rejected()
            );
            Ok(Output::ok(
                json!({ "profile": profile, "transport": transport, "entries": t.entries, "delivered": t.delivered(), "rejected": t.rejected() }),
                text,
            ))
        }
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lici2::{Block64, ConventionProfile, Key128};

pub const DEFAULT_SEED: &str = "0x11c12";

#[derive(Parser, Debug)]
#[command(name = "lici2", version, about = "LiCi-2 block cipher toolkit")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Convention profile, e.g. `msb/LR/w31/ext/rc0` or `default`. Overrides
    /// the profile saved by `kat`.
    #[arg(long, global = true, env = "LICI2_PROFILE")]
    pub profile: Option<ConventionProfile>,

    /// File holding the profile saved by `kat`.
    #[arg(long, global = true, env = "LICI2_PROFILE_PATH")]
    pub profile_path: Option<PathBuf>,

    #[command(flatten)]
    pub fields: ProfileFields,

    #[command(subcommand)]
    pub command: Command,
}

/// Per-field overrides applied on top of the selected profile.
#[derive(Args, Debug, Default)]
pub struct ProfileFields {
    /// Half that enters the F-function.
    #[arg(long, global = true, value_parser = ["msb", "lsb"])]
    pub f_half: Option<String>,
    /// Ciphertext half order.
    #[arg(long, global = true, value_parser = ["LR", "RL"])]
    pub output_order: Option<String>,
    /// Key-register bits used as the round key.
    #[arg(long, global = true, value_parser = ["w127", "w95", "w63", "w31"])]
    pub rk_window: Option<String>,
    /// Extract the round key after (`upd`) or before (`ext`) the register update.
    #[arg(long, global = true, value_parser = ["upd", "ext"])]
    pub rk_timing: Option<String>,
    /// Round counter of the first update.
    #[arg(long, global = true, value_parser = ["0", "1"])]
    pub rc_start: Option<String>,
}

impl ProfileFields {
    pub fn apply(&self, base: ConventionProfile) -> ConventionProfile {
        let text = base.to_string();
        let mut parts: Vec<String> = text.split('/').map(str::to_string).collect();
        let overrides = [
            &self.f_half,
            &self.output_order,
            &self.rk_window,
            &self.rk_timing,
        ];
        for (slot, value) in parts.iter_mut().zip(overrides) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        if let Some(rc) = &self.rc_start {
            parts[4] = format!("rc{rc}");
        }
        parts
            .join("/")
            .parse()
            .expect("overrides are restricted to valid tokens")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encrypt one 64-bit block.
    Encrypt(BlockArgs),
    /// Decrypt one 64-bit block.
    Decrypt(BlockArgs),
    /// Print the 25 round keys.
    Keys {
        #[arg(long)]
        key: Key128,
    },
    /// Search all convention profiles against the published vectors and save
    /// the matching one.
    Kat {
        /// Do not write the matched profile to the profile file.
        #[arg(long)]
        no_save: bool,
    },
    /// S-box tables, trail search and attack-complexity arithmetic.
    Analyze {
        #[command(subcommand)]
        what: Analyze,
    },
    /// Measure ciphertext bit flips caused by single-bit input flips.
    Avalanche {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value = DEFAULT_SEED, value_parser = parse_u64)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Target::Plaintext)]
        target: Target,
        #[arg(long, default_value_t = 25)]
        rounds: usize,
    },
    /// Gate-equivalent area of the data path and key path.
    Ge {
        /// JSON bill of components replacing the canonical data path.
        #[arg(long)]
        data_bill: Option<PathBuf>,
        /// JSON bill of components replacing the canonical key path.
        #[arg(long)]
        key_bill: Option<PathBuf>,
    },
    /// Local encryption throughput (no pass threshold).
    Bench {
        #[arg(long, default_value_t = 1_000_000)]
        blocks: u64,
        #[arg(long, default_value = DEFAULT_SEED, value_parser = parse_u64)]
        seed: u64,
    },
    /// Authenticated datagram frames.
    Frame {
        #[command(subcommand)]
        what: Frame,
    },
}

#[derive(Args, Debug)]
pub struct BlockArgs {
    /// 128-bit key, 32 hex digits.
    #[arg(long)]
    pub key: Key128,
    /// 64-bit block, 16 hex digits.
    #[arg(long = "in")]
    pub input: Block64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Plaintext,
    Key,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Linear,
    Differential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Truncated,
}

#[derive(Subcommand, Debug)]
pub enum Analyze {
    /// Difference distribution table of the S-box.
    Ddt,
    /// Linear approximation table of the S-box (count - 8).
    Lat,
    /// Minimum number of active S-boxes.
    Trails {
        #[arg(long = "type", value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 5)]
        rounds: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Search node budget; when exhausted the run exits with status 3 and
        /// reports the proven lower bound.
        #[arg(long, default_value_t = 1 << 36)]
        max_nodes: u64,
    },
    /// Bias and data complexity for a number of active S-boxes.
    Complexity {
        #[arg(long = "type", value_enum)]
        kind: Kind,
        /// Active S-boxes in one trail segment.
        #[arg(long)]
        active: u32,
        /// Number of segments composed (extrapolation when above 1).
        #[arg(long, default_value_t = 1)]
        segments: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Transport {
    InMemory,
    Udp,
}

#[derive(Subcommand, Debug)]
pub enum Frame {
    /// Encode one frame.
    Encode {
        /// Link encryption key; the MAC key is derived from it.
        #[arg(long)]
        key: Key128,
        #[arg(long, default_value = "1", value_parser = parse_u16)]
        src: u16,
        #[arg(long, default_value = "2", value_parser = parse_u16)]
        dst: u16,
        #[arg(long, value_parser = parse_u32)]
        seq: u32,
        /// Payload as UTF-8 text.
        #[arg(long, conflicts_with = "hex", required_unless_present = "hex")]
        text: Option<String>,
        /// Payload as hex.
        #[arg(long)]
        hex: Option<String>,
    },
    /// Authenticate and decrypt one frame given as hex.
    Decode {
        #[arg(long)]
        key: Key128,
        #[arg(long)]
        frame: String,
    },
    /// Run a scripted exchange between two nodes.
    Demo {
        #[arg(long)]
        key: Key128,
        /// Script file: one step per line (`send <text>`, `replay <n>`,
        /// `corrupt <bit> <text>`) or a JSON array of steps. A built-in
        /// script runs when omitted.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Transport::InMemory)]
        transport: Transport,
    },
}

fn parse_int<T: TryFrom<u64>>(s: &str) -> Result<T, String> {
    let v = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("{s:?}: {e}"))?;
    T::try_from(v).map_err(|_| format!("{s:?} is out of range"))
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    parse_int(s)
}

fn parse_u32(s: &str) -> Result<u32, String> {
    parse_int(s)
}

fn parse_u16(s: &str) -> Result<u16, String> {
    parse_int(s)
}

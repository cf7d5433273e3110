//! Persisted default profile.
//!
//! `kat` writes the matched profile as `{"profile": "<name>"}`. Without that
//! file every command uses the built-in default profile.

use std::path::{Path, PathBuf};

use lici2::ConventionProfile;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct Saved {
    profile: ConventionProfile,
}

/// `explicit` if given, else `$XDG_CONFIG_HOME/lici2/profile.json`, else
/// `$HOME/.config/lici2/profile.json`, else `lici2-profile.json` in the
/// working directory.
pub fn profile_path(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    let base = std::env::var_os("XDG_CONFIG_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".config")));
    match base {
        Some(b) => b.join("lici2").join("profile.json"),
        None => PathBuf::from("lici2-profile.json"),
    }
}

pub fn load(path: &Path) -> Result<ConventionProfile, String> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str::<Saved>(&text)
            .map(|s| s.profile)
            .map_err(|e| format!("{}: {e}", path.display())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(ConventionProfile::default()),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

pub fn save(path: &Path, profile: ConventionProfile) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let text = serde_json::to_string_pretty(&Saved { profile }).expect("profile serializes") + "\n";
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

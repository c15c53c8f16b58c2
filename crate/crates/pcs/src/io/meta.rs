use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Flags that do not change results and are left out of recorded invocations.
const VOLATILE_FLAGS: [&str; 2] = ["--workers", "--out"];
const VOLATILE_SWITCHES: [&str; 2] = ["-q", "--quiet"];

/// Provenance block written into every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    /// Arguments after the program name, without output paths or worker
    /// counts.
    pub invocation: Vec<String>,
    pub seed: Option<u64>,
    /// SHA-256 of the invocation.
    pub config_hash: String,
}

impl Metadata {
    pub fn new(invocation: Vec<String>, seed: Option<u64>) -> Self {
        let mut hasher = Sha256::new();
        for arg in &invocation {
            hasher.update(arg.as_bytes());
            hasher.update([0u8]);
        }
        Self {
            tool: "pcs".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: hex::encode(hasher.finalize()),
            invocation,
            seed,
        }
    }

    /// One-line form for CSV header comments.
    pub fn comment_line(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).expect("metadata serializes"))
    }
}

/// Drops `--workers`/`--out` with their values and `--quiet` from an argument
/// list.
pub fn canonical_invocation<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip_next = false;
    for arg in args {
        if skip_next {
            skip_next = false;
            continue;
        }
        if VOLATILE_FLAGS.contains(&arg.as_str()) {
            skip_next = true;
            continue;
        }
        if VOLATILE_SWITCHES.contains(&arg.as_str())
            || VOLATILE_FLAGS.iter().any(|f| arg.starts_with(&format!("{f}=")))
        {
            continue;
        }
        out.push(arg);
    }
    out
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to replay a run and check its outputs. Only
/// `wall_time_ms` differs between replays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    /// Hash of the parsed arguments and every input file.
    pub config_hash: String,
    pub master_seed: u64,
    pub versions: BTreeMap<String, String>,
    pub wall_time_ms: u64,
    pub exit_code: i32,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("ctfactor-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("ctfactor-core".to_string(), ctfactor_core::VERSION.to_string()),
    ])
}

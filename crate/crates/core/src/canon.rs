//! Canonical JSON bytes and hashes.
//!
//! Objects serialize with keys in byte order (serde_json's default map is
//! ordered), no whitespace, integers only. Equal values give identical bytes.

use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn to_canonical_string(value: &Value) -> String {
    // Value's Display is compact and its maps are sorted
    value.to_string()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest.iter() {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn hash_value(value: &Value) -> String {
    sha256_hex(to_canonical_string(value).as_bytes())
}

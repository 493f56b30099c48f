//! Content digests over canonical JSON.
//!
//! Every persisted type serializes with a fixed field order and ordered maps,
//! so `serde_json` output is already canonical for our purposes.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of raw bytes.
pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    hex::encode(Sha256::digest(bytes.as_ref()))
}

/// Hex SHA-256 of the JSON encoding of `value`.
pub fn content_digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("domain types always serialize");
    sha256_hex(bytes)
}

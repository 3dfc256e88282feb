//! Canonical serialization and hashing of configurations.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// JSON with object keys in sorted order, independent of field order.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json::Map is a BTreeMap unless `preserve_order` is enabled
    let v = serde_json::to_value(value).expect("configuration types serialize infallibly");
    v.to_string()
}

/// Hex SHA-256 of the canonical serialization.
pub fn fingerprint<T: Serialize>(value: &T) -> String {
    let digest = Sha256::digest(canonical_json(value).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

use sha2::{Digest, Sha256};

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of a serializable artifact through its canonical JSON form
/// (object keys sorted).
pub fn canonical_hash<S: serde::Serialize>(value: &S) -> crate::Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(sha256_hex(serde_json::to_string(&v)?.as_bytes()))
}

//! Deterministic seed derivation.
//!
//! Every random stream in an experiment is keyed by the experiment seed plus
//! a purpose tag (and usually a user id), so per-user work can run in any
//! order or in parallel without changing results. Hashing is FNV-1a with a
//! splitmix64 finalizer; both are fixed here rather than taken from the
//! standard library so the streams are stable across compiler versions.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// splitmix64 finalizer; bijective on u64.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derive a child seed from a base seed and a list of byte-string parts.
///
/// Parts are hashed with a length prefix each, so `["ab", "c"]` and
/// `["a", "bc"]` derive different seeds.
pub fn derive(base: u64, parts: &[&[u8]]) -> u64 {
    let mut h = FNV_OFFSET ^ mix64(base);
    for part in parts {
        for &b in (part.len() as u64).to_le_bytes().iter() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    mix64(h)
}

//! Stable hashing for seed derivation.
//!
//! Every stage derives its own seed from the global seed and a stage label,
//! so stages can be rerun independently. The hash must not change between
//! releases or platforms, which rules out `std::hash`.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// SplitMix64 finalizer; spreads nearby inputs over the whole range.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for a named stage.
pub fn derive(seed: u64, label: &str) -> u64 {
    mix64(seed ^ fnv1a(label.as_bytes()))
}

/// Seed for the `index`-th item of a stage (walk start entity, sweep cell, ...).
pub fn derive_indexed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x8594_4171_f739_67e8);
    }

    #[test]
    fn derived_seeds_differ_by_label_and_index() {
        assert_ne!(derive(7, "walks/source"), derive(7, "walks/target"));
        assert_ne!(derive_indexed(7, 0), derive_indexed(7, 1));
        assert_eq!(derive(7, "x"), derive(7, "x"));
    }
}

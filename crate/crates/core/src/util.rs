//! Small shared helpers: content hashing and seed derivation.

/// 64-bit FNV-1a over raw bytes. Used to content-address configuration and
/// shipped data (stopword list, run configs) in reports.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Hex form of [`fnv1a64`], the digest format reports embed.
pub fn fnv1a64_hex(bytes: &[u8]) -> String {
    format!("{:016x}", fnv1a64(bytes))
}

/// Derives an independent sub-seed from a base seed and a usage tag, so that
/// e.g. fold 3 of a CV run and the synth generator never share an RNG stream.
pub fn derive_seed(base: u64, tag: &str, index: u64) -> u64 {
    let mut h = fnv1a64(tag.as_bytes());
    h ^= base;
    h = h.wrapping_mul(0x0000_0100_0000_01b3);
    h ^= index;
    h = h.wrapping_mul(0x0000_0100_0000_01b3);
    // splitmix64 finalizer to decorrelate low bits
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Population mean of a slice; 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation of a slice; 0 for an empty slice.
pub fn pop_std(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_is_stable() {
        // reference value for "abc" from the FNV-1a specification
        assert_eq!(fnv1a64(b"abc"), 0xe71fa2190541574b);
    }

    #[test]
    fn derived_seeds_differ_by_tag_and_index() {
        let a = derive_seed(42, "fold", 0);
        let b = derive_seed(42, "fold", 1);
        let c = derive_seed(42, "tree", 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, "fold", 0));
    }

    #[test]
    fn mean_and_std() {
        assert_eq!(mean(&[0.2, 0.4]), 0.30000000000000004);
        assert!((pop_std(&[0.2, 0.4]) - 0.1).abs() < 1e-12);
        assert_eq!(pop_std(&[]), 0.0);
    }
}

//! A deterministic byte-pair compressor used as a cheap complexity proxy.
//!
//! Repeatedly replaces the most frequent adjacent symbol pair with a fresh
//! symbol until no pair repeats. The reported size counts the replacement
//! table plus the residual sequence, in bits. Constant or periodic data
//! shrinks to a logarithmic number of rules; incompressible data stays near
//! 8 bits per byte.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

const MAX_SYMBOLS: u32 = 1 << 16;

fn ceil_log2(n: u32) -> u32 {
    if n <= 1 {
        1
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// Compressed size of `data` in bits.
pub fn byte_pair_len_bits(data: &[u8]) -> u64 {
    let mut seq: Vec<u32> = data.iter().map(|&b| b as u32).collect();
    let mut next_sym: u32 = 256;
    let mut rules: u64 = 0;
    loop {
        if next_sym >= MAX_SYMBOLS || seq.len() < 2 {
            break;
        }
        let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for w in seq.windows(2) {
            *counts.entry((w[0], w[1])).or_insert(0) += 1;
        }
        // Most frequent pair, smallest pair on ties; BTreeMap iteration is
        // ascending so strict improvement keeps the smallest.
        let mut best: Option<((u32, u32), u32)> = None;
        for (&pair, &cnt) in &counts {
            if best.map_or(true, |(_, c)| cnt > c) {
                best = Some((pair, cnt));
            }
        }
        let (pair, cnt) = match best {
            Some(b) => b,
            None => break,
        };
        if cnt < 2 {
            break;
        }
        // Replace non-overlapping occurrences left to right.
        let mut out = Vec::with_capacity(seq.len());
        let mut i = 0;
        while i < seq.len() {
            if i + 1 < seq.len() && (seq[i], seq[i + 1]) == pair {
                out.push(next_sym);
                i += 2;
            } else {
                out.push(seq[i]);
                i += 1;
            }
        }
        seq = out;
        next_sym += 1;
        rules += 1;
    }
    let bits_per = ceil_log2(next_sym) as u64;
    // 16-bit length header, two symbols per rule, then the residual sequence.
    16 + rules * 2 * bits_per + seq.len() as u64 * bits_per
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_compresses_to_log_size() {
        let short = byte_pair_len_bits(&[0u8; 32]);
        let long = byte_pair_len_bits(&[0u8; 1024]);
        // 32x more data, only a few extra rules.
        assert!(long <= short + 200, "short={} long={}", short, long);
        assert!(long < 8 * 1024 / 4);
    }

    #[test]
    fn periodic_data_compresses() {
        let data: Vec<u8> = (0..512).map(|i| if i % 2 == 0 { 0xAA } else { 0x55 }).collect();
        assert!(byte_pair_len_bits(&data) < 8 * 512 / 4);
    }

    #[test]
    fn incompressible_data_stays_large() {
        // splitmix stream, effectively random bytes.
        let mut state = 1u64;
        let data: Vec<u8> = (0..256)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) as u8
            })
            .collect();
        assert!(byte_pair_len_bits(&data) > 8 * 256 / 2);
    }

    #[test]
    fn deterministic() {
        let data = b"abcabcabcabc";
        assert_eq!(byte_pair_len_bits(data), byte_pair_len_bits(data));
    }
}

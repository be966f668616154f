//! Designation of communication channels in the square hierarchy.
//!
//! Vertical lines inherit the color of the squares whose sides they carry
//! (colors alternate with rank). A line becomes a k-channel when the
//! smallest same-color square it cuts through has rank k, never counting the
//! squares it borders. Equivalently, in coordinates: strip the `10^(r-1)`
//! trailer, split the remaining bits into 2-bit blocks, and the first block
//! from the right that is neither 00 nor 11 names the rank.

use alloc::vec::Vec;
use core::fmt;

use crate::selfsim::{intersects_rank_k, line_rank, DyadicCoord, Rank};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChannelError {
    /// Separating lines and lines of unrepresented rank have no channel rank.
    NoFiniteRank,
    /// No same-color intersection within the represented bits.
    Unresolved,
    MalformedBrackets { position: usize },
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::NoFiniteRank => write!(f, "line has no finite rank"),
            ChannelError::Unresolved => write!(f, "no same-color intersection within the represented bits"),
            ChannelError::MalformedBrackets { position } => {
                write!(f, "bracket structure breaks at event {}", position)
            }
        }
    }
}

impl core::error::Error for ChannelError {}

/// Geometric rule: scan ranks r+2, r+4, ... for the first square the line
/// cuts through (same color = same rank parity).
pub fn channel_rank_geometric(c: &DyadicCoord, max_rank: u8) -> Result<u8, ChannelError> {
    let r = match line_rank(c) {
        Rank::Finite(r) => r,
        _ => return Err(ChannelError::NoFiniteRank),
    };
    let mut k = r + 2;
    while k <= max_rank && k + 1 <= c.bits {
        if intersects_rank_k(c, k) {
            return Ok(k);
        }
        k += 2;
    }
    Err(ChannelError::Unresolved)
}

/// Bit-block rule: first 2-bit block left of the trailer that mixes 0 and 1.
/// Block t occupies bits (r+2t-1, r+2t) of the coordinate.
pub fn channel_rank_blocks(c: &DyadicCoord) -> Result<u8, ChannelError> {
    let r = match line_rank(c) {
        Rank::Finite(r) => r,
        _ => return Err(ChannelError::NoFiniteRank),
    };
    let mut t = 1u8;
    loop {
        let hi = r as u32 + 2 * t as u32;
        if hi >= c.bits as u32 {
            return Err(ChannelError::Unresolved);
        }
        let b0 = (c.low >> (hi - 1)) & 1;
        let b1 = (c.low >> hi) & 1;
        if b0 != b1 {
            return Ok(r + 2 * t);
        }
        t += 1;
    }
}

/// The zone a rank-k computation is responsible for: one aligned coordinate
/// interval of width 2^(k+1).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ZoneDescriptor {
    pub rank: u8,
    pub lo: i64,
    pub hi: i64,
}

impl ZoneDescriptor {
    pub fn new(rank: u8, index: i64) -> Self {
        let w = 1i64 << (rank + 1);
        ZoneDescriptor { rank, lo: index * w, hi: (index + 1) * w }
    }

    pub fn width(&self) -> i64 {
        self.hi - self.lo
    }

    /// The two half-zones, which are the children's zones.
    pub fn children(&self) -> (ZoneDescriptor, ZoneDescriptor) {
        debug_assert!(self.rank >= 1);
        let mid = self.lo + self.width() / 2;
        (
            ZoneDescriptor { rank: self.rank - 1, lo: self.lo, hi: mid },
            ZoneDescriptor { rank: self.rank - 1, lo: mid, hi: self.hi },
        )
    }
}

/// The vertical lines of one computation subgrid, in coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubgridSpec {
    pub rank: u8,
    pub zone: ZoneDescriptor,
    pub left_border: i64,
    pub center: i64,
    pub right_border: i64,
    pub channels: Vec<i64>,
    /// Horizontal tape lines: residue class (modulus, residue) of the bottom
    /// lines of the rank-k squares.
    pub tape_class: (i64, i64),
}

/// All lines assigned to the rank-k subgrid whose zone has the given index.
pub fn enumerate_subgrid(k: u8, zone_index: i64, max_rank: u8) -> SubgridSpec {
    debug_assert!(k >= 1);
    let zone = ZoneDescriptor::new(k, zone_index);
    let half = 1i64 << (k - 1);
    let bits = (max_rank + 2).max(k + 2);
    let mut channels = Vec::new();
    for coord in zone.lo..zone.hi {
        let c = DyadicCoord::from_position(coord, 0, bits);
        if c.zero {
            continue;
        }
        if channel_rank_blocks(&c) == Ok(k) {
            channels.push(coord);
        }
    }
    SubgridSpec {
        rank: k,
        zone,
        left_border: zone.lo + half,
        center: zone.lo + 2 * half,
        right_border: zone.lo + 3 * half,
        channels,
        tape_class: (1i64 << (k + 1), 3 * half),
    }
}

/// Exact channel count per zone, by enumeration over one zone.
pub fn count_channels(k: u8) -> u64 {
    debug_assert!(k >= 2);
    enumerate_subgrid(k, 0, k + 2).channels.len() as u64
}

/// The closed form the enumeration must match: sum of 2^(t+1) over t >= 1
/// while k - 2t >= 1.
pub fn count_channels_closed_form(k: u8) -> u64 {
    let mut total = 0u64;
    let mut t = 1u8;
    while k as i32 - 2 * t as i32 >= 1 {
        total += 1u64 << (t + 1);
        t += 1;
    }
    total
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Bracket {
    Open,
    Close,
}

/// Innermost pairs by outward signal propagation: every bracket emits a
/// signal away from its own pair; the signal is absorbed by the first
/// bracket it meets. A pair neither of whose ends absorbs an inward-facing
/// signal contains nothing.
pub fn innermost_brackets(events: &[Bracket]) -> Result<Vec<(usize, usize)>, ChannelError> {
    let pairs = match_brackets(events)?;
    let n = events.len();
    // Opens emit leftward, closes rightward; absorption is adjacent since
    // signals stop at the first bracket in their path and events are the
    // only obstacles.
    let mut notified = alloc::vec![false; n];
    for (i, e) in events.iter().enumerate() {
        match e {
            Bracket::Open => {
                if i > 0 {
                    // Leftward signal hits event i-1; only an open cares
                    // about signals arriving from its inside.
                    if events[i - 1] == Bracket::Open {
                        notified[i - 1] = true;
                    }
                }
            }
            Bracket::Close => {
                if i + 1 < n && events[i + 1] == Bracket::Close {
                    notified[i + 1] = true;
                }
            }
        }
    }
    Ok(pairs
        .into_iter()
        .filter(|&(o, c)| !notified[o] && !notified[c])
        .collect())
}

/// Stack oracle: match every pair, keep those with nothing in between.
pub fn innermost_brackets_stack_oracle(events: &[Bracket]) -> Result<Vec<(usize, usize)>, ChannelError> {
    let pairs = match_brackets(events)?;
    Ok(pairs.into_iter().filter(|&(o, c)| c == o + 1).collect())
}

fn match_brackets(events: &[Bracket]) -> Result<Vec<(usize, usize)>, ChannelError> {
    let mut stack = Vec::new();
    let mut pairs = Vec::new();
    for (i, e) in events.iter().enumerate() {
        match e {
            Bracket::Open => stack.push(i),
            Bracket::Close => {
                let o = stack.pop().ok_or(ChannelError::MalformedBrackets { position: i })?;
                pairs.push((o, i));
            }
        }
    }
    if let Some(&o) = stack.last() {
        return Err(ChannelError::MalformedBrackets { position: o });
    }
    pairs.sort_unstable();
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coord(v: u64, bits: u8) -> DyadicCoord {
        DyadicCoord::from_raw(v, bits, false)
    }

    #[test]
    fn geometric_rule_finds_first_same_color_square() {
        // Rank-1 line with coordinate ...00101: cuts a rank-3 square.
        assert_eq!(channel_rank_geometric(&coord(0b00101, 16), 14), Ok(3));
        // Rank-1 line 0b11: all blocks uniform within 16 bits.
        assert_eq!(channel_rank_geometric(&coord(0b11, 16), 14), Err(ChannelError::Unresolved));
        // The zero line has no channel rank.
        let zero = DyadicCoord::from_raw(0, 16, true);
        assert_eq!(channel_rank_geometric(&zero, 14), Err(ChannelError::NoFiniteRank));
    }

    #[test]
    fn border_lines_are_not_channels_of_their_own_square() {
        // A rank-k line's own squares are skipped: the scan starts at k+2.
        for v in [0b10u64, 0b110, 0b1010] {
            let c = coord(v, 16);
            if let Ok(k) = channel_rank_geometric(&c, 14) {
                let r = match line_rank(&c) {
                    Rank::Finite(r) => r,
                    _ => unreachable!(),
                };
                assert!(k >= r + 2);
            }
        }
    }

    #[test]
    fn block_rule_equals_geometric_rule_exhaustively() {
        // Every coordinate with 14 represented bits.
        for v in 1u64..(1 << 14) {
            let c = DyadicCoord::from_raw(v, 16, false);
            let blocks = channel_rank_blocks(&c);
            let geo = channel_rank_geometric(&c, 14);
            match (blocks, geo) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "coordinate {:#b}", v),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("coordinate {:#b}: blocks {:?} vs geometric {:?}", v, a, b),
            }
        }
    }

    #[test]
    fn block_positions_start_left_of_the_trailer() {
        // Trailer 10^(k-1) with the first mixed block at position t gives
        // rank k+2t. Rank-3 trailer at bits 0..2, bit 3 skipped, block 1 at
        // bits (4,5), block 2 at bits (6,7).
        let c = coord(0b1000100, 16); // block 1 = 00, block 2 = 01
        assert_eq!(channel_rank_blocks(&c), Ok(3 + 4));
        let c = coord(0b0100100, 16); // block 1 = 10 already mixed
        assert_eq!(channel_rank_blocks(&c), Ok(3 + 2));
    }

    #[test]
    fn channel_counts_match_the_closed_form() {
        assert_eq!(count_channels(4), 4);
        assert_eq!(count_channels(5), 12);
        for k in 2..=14u8 {
            assert_eq!(count_channels(k), count_channels_closed_form(k), "k = {}", k);
        }
    }

    #[test]
    fn channel_count_ratio_approaches_two() {
        let mut prev_gap = f64::INFINITY;
        for k in (6..=14u8).step_by(2) {
            let ratio = count_channels(k + 2) as f64 / count_channels(k) as f64;
            let gap = (ratio - 2.0).abs();
            assert!(gap < prev_gap, "k = {}: ratio {}", k, ratio);
            assert!((2.0..3.0).contains(&ratio));
            prev_gap = gap;
        }
    }

    #[test]
    fn center_of_k_square_is_border_of_next_subgrid() {
        for k in 2..=6u8 {
            let sg = enumerate_subgrid(k, 0, 10);
            let up = enumerate_subgrid(k + 1, 0, 10);
            // The center line of the k-square at zone 0 is 2^k; the rank-k+1
            // square in the enclosing zone has borders at 2^k and 3*2^k.
            assert_eq!(sg.center, up.left_border);
        }
    }

    #[test]
    fn membership_is_at_most_three_per_line() {
        let r = 8u8;
        let span = 1i64 << (r + 1);
        let mut membership = alloc::collections::BTreeMap::new();
        for k in 1..=(r - 2) {
            let zone_w = 1i64 << (k + 1);
            for j in 0..(span / zone_w) {
                let sg = enumerate_subgrid(k, j, r);
                for line in [sg.left_border, sg.center, sg.right_border]
                    .into_iter()
                    .chain(sg.channels.iter().copied())
                {
                    *membership.entry(line).or_insert(0u32) += 1;
                }
            }
        }
        for (line, count) in membership {
            assert!(count <= 3, "line {} appears in {} subgrids", line, count);
        }
    }

    #[test]
    fn subgrid_channels_match_geometric_enumeration() {
        let k = 6u8;
        let sg = enumerate_subgrid(k, 0, 12);
        let mut expected = Vec::new();
        for coordv in sg.zone.lo..sg.zone.hi {
            let c = DyadicCoord::from_position(coordv, 0, 14);
            if c.zero {
                continue;
            }
            if channel_rank_geometric(&c, 12) == Ok(k) {
                expected.push(coordv);
            }
        }
        assert_eq!(sg.channels, expected);
        assert_eq!(sg.channels.len() as u64, count_channels_closed_form(k));
    }

    fn brackets(s: &str) -> Vec<Bracket> {
        s.chars()
            .map(|c| if c == '(' { Bracket::Open } else { Bracket::Close })
            .collect()
    }

    #[test]
    fn innermost_simple_cases() {
        assert_eq!(innermost_brackets(&brackets("()")).unwrap(), alloc::vec![(0, 1)]);
        assert_eq!(innermost_brackets(&brackets("(()())")).unwrap(), alloc::vec![(1, 2), (3, 4)]);
        assert!(matches!(
            innermost_brackets(&brackets("(()")),
            Err(ChannelError::MalformedBrackets { .. })
        ));
        assert!(matches!(
            innermost_brackets(&brackets(")(")),
            Err(ChannelError::MalformedBrackets { .. })
        ));
    }

    #[test]
    fn signal_rule_matches_stack_oracle_on_random_strings() {
        let mut seed = 0xfeedu64;
        for _ in 0..200 {
            // Random balanced string of length <= 40.
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let pairs = 1 + (seed >> 40) % 20;
            let mut s = Vec::new();
            let mut open = 0i64;
            let mut remaining = pairs as i64;
            let mut rng = seed;
            while remaining > 0 || open > 0 {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if remaining > 0 && (open == 0 || rng & 1 == 0) {
                    s.push(Bracket::Open);
                    open += 1;
                    remaining -= 1;
                } else {
                    s.push(Bracket::Close);
                    open -= 1;
                }
            }
            assert_eq!(
                innermost_brackets(&s).unwrap(),
                innermost_brackets_stack_oracle(&s).unwrap()
            );
        }
    }
}

//! Resource-bounded description complexity.
//!
//! A tiny decompression VM stands in for a universal machine: programs are
//! bit strings, `0 b` appends the literal bit b, `10 nnnn` appends the
//! current output n+1 more times, and a leading `11` is invalid. Enumerating
//! every program up to a length cap in length-then-lexicographic order gives
//! a total, replayable complexity oracle: `k_bound(x)` is the length of the
//! first program that produces x, unbounded if none does within the caps.
//!
//! The enumeration order is canonical: every consumer that walks the output
//! list (in particular every node of the hierarchy simulation) sees the same
//! strings in the same order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitString;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VmOutcome {
    Output(BitString),
    Timeout,
    ParseError,
}

/// Runs a description program. The step budget charges one unit per
/// instruction plus one per emitted bit; exceeding it is a timeout.
pub fn vm_run(program: &BitString, budget: u64) -> VmOutcome {
    let mut out = BitString::new();
    let mut steps: u64 = 0;
    let mut i = 0;
    let n = program.len();
    while i < n {
        steps += 1;
        if steps > budget {
            return VmOutcome::Timeout;
        }
        if program.get(i) == 0 {
            // 0 b : literal bit
            if i + 1 >= n {
                return VmOutcome::ParseError;
            }
            out.push(program.get(i + 1));
            steps += 1;
            i += 2;
        } else {
            if i + 1 >= n || program.get(i + 1) == 1 {
                return VmOutcome::ParseError;
            }
            // 10 nnnn : repeat whole output n+1 more times
            if i + 6 > n {
                return VmOutcome::ParseError;
            }
            let mut reps = 0usize;
            for j in 0..4 {
                reps = reps * 2 + program.get(i + 2 + j) as usize;
            }
            let added = (reps + 1) as u64 * out.len() as u64;
            steps = steps.saturating_add(added);
            if steps > budget {
                return VmOutcome::Timeout;
            }
            out.repeat_extend(reps + 1);
            i += 6;
        }
    }
    VmOutcome::Output(out)
}

/// `k_bound` value: a recorded program length or "nothing found under the
/// caps", which the toolkit treats as maximally complex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Bound {
    Finite(u8),
    Unbounded,
}

impl Bound {
    pub fn finite(self) -> Option<u8> {
        match self {
            Bound::Finite(k) => Some(k),
            Bound::Unbounded => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(k) => write!(f, "{}", k),
            Bound::Unbounded => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KolmoError {
    LengthCapTooLarge { l: u32, cap: u32 },
    LengthNotMultipleOfBlock { len: usize, block: usize },
    InfeasibleBudget { block: usize },
    IndexBeyondPrefix { index: i64, len: usize },
}

impl fmt::Display for KolmoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KolmoError::LengthCapTooLarge { l, cap } => {
                write!(f, "program length cap {} exceeds the supported {}", l, cap)
            }
            KolmoError::LengthNotMultipleOfBlock { len, block } => {
                write!(f, "target length {} is not a multiple of the block length {}", len, block)
            }
            KolmoError::InfeasibleBudget { block } => {
                write!(f, "index holds no output of block length {}; enumeration caps too small", block)
            }
            KolmoError::IndexBeyondPrefix { index, len } => {
                write!(f, "two-way index {} reaches past the materialized prefix of {} bits", index, len)
            }
        }
    }
}

impl core::error::Error for KolmoError {}

pub const MAX_PROGRAM_LEN: u32 = 24;

/// Exhaustive program index: for every string producible within the caps,
/// the minimal program length, plus the canonical first-production order.
#[derive(Clone, Debug)]
pub struct KolmoIndex {
    pub max_len: u32,
    pub budget: u64,
    outputs: Vec<(BitString, u8)>,
    by_output: BTreeMap<BitString, u32>,
}

/// Enumerates all programs of length 0..=max_len in length-then-lex order.
pub fn build_index(max_len: u32, budget: u64) -> Result<KolmoIndex, KolmoError> {
    if max_len > MAX_PROGRAM_LEN {
        return Err(KolmoError::LengthCapTooLarge { l: max_len, cap: MAX_PROGRAM_LEN });
    }
    let mut outputs = Vec::new();
    let mut by_output = BTreeMap::new();
    let mut prog = BitString::new();
    for l in 0..=max_len {
        let total: u64 = 1 << l;
        for v in 0..total {
            prog = BitString::with_capacity(l as usize);
            for j in (0..l).rev() {
                prog.push(((v >> j) & 1) as u8);
            }
            if let VmOutcome::Output(x) = vm_run(&prog, budget) {
                if !by_output.contains_key(&x) {
                    by_output.insert(x.clone(), outputs.len() as u32);
                    outputs.push((x, l as u8));
                }
            }
        }
    }
    let _ = prog;
    Ok(KolmoIndex { max_len, budget, outputs, by_output })
}

impl KolmoIndex {
    /// Minimal recorded program length for x.
    pub fn k_bound(&self, x: &BitString) -> Bound {
        match self.by_output.get(x) {
            Some(&i) => Bound::Finite(self.outputs[i as usize].1),
            None => Bound::Unbounded,
        }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// The canonical enumeration order: outputs by first production.
    pub fn output(&self, i: usize) -> (&BitString, u8) {
        let (x, k) = &self.outputs[i];
        (x, *k)
    }

    pub fn outputs(&self) -> impl Iterator<Item = (&BitString, u8)> {
        self.outputs.iter().map(|(x, k)| (x, *k))
    }
}

/// Threshold and block parameters for forbidden strings and block building.
#[derive(Clone, Copy, Debug)]
pub struct KolmoParams {
    pub c_num: u32,
    pub c_den: u32,
    /// Block length m for the greedy sequence builder.
    pub block_len: usize,
    /// Additive slack b in the substring check k >= c*len - b.
    pub slack: i64,
}

impl KolmoParams {
    pub fn new(c_num: u32, c_den: u32, block_len: usize, slack: i64) -> Self {
        assert!(c_num < c_den && c_num > 0, "threshold must satisfy 0 < c < 1");
        assert!(block_len >= 1);
        assert!(slack >= 0);
        KolmoParams { c_num, c_den, block_len, slack }
    }

    /// A string is forbidden when its recorded complexity reaches down to
    /// c times its length (inclusive). The empty string carries no content
    /// and is never forbidden.
    pub fn is_forbidden(&self, len: usize, k: Bound) -> bool {
        if len == 0 {
            return false;
        }
        match k {
            Bound::Finite(k) => (k as u64) * self.c_den as u64 <= self.c_num as u64 * len as u64,
            Bound::Unbounded => false,
        }
    }

    /// The substring check of the sequence builder: k >= c*len - slack.
    pub fn passes_substring_check(&self, len: usize, k: Bound) -> bool {
        match k {
            Bound::Finite(k) => {
                (k as i64) * self.c_den as i64 >= self.c_num as i64 * len as i64 - self.slack * self.c_den as i64
            }
            Bound::Unbounded => true,
        }
    }
}

/// Replayable stream of forbidden strings in the canonical order.
#[derive(Clone, Debug)]
pub struct ForbiddenStream<'a> {
    idx: &'a KolmoIndex,
    params: KolmoParams,
    cursor: usize,
}

impl<'a> ForbiddenStream<'a> {
    pub fn new(idx: &'a KolmoIndex, params: KolmoParams) -> Self {
        ForbiddenStream { idx, params, cursor: 0 }
    }

    pub fn from_cursor(idx: &'a KolmoIndex, params: KolmoParams, cursor: usize) -> Self {
        ForbiddenStream { idx, params, cursor }
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }
}

impl<'a> Iterator for ForbiddenStream<'a> {
    type Item = (BitString, u8);

    fn next(&mut self) -> Option<Self::Item> {
        while self.cursor < self.idx.len() {
            let (x, k) = self.idx.output(self.cursor);
            self.cursor += 1;
            if self.params.is_forbidden(x.len(), Bound::Finite(k)) {
                return Some((x.clone(), k));
            }
        }
        None
    }
}

/// Margin of a substring above the forbidden line: positive means the
/// recorded complexity stays strictly above c times the length; strings the
/// index cannot produce rank highest.
fn forbidden_margin(params: &KolmoParams, len: usize, k: Bound) -> i64 {
    match k {
        Bound::Finite(k) => k as i64 * params.c_den as i64 - params.c_num as i64 * len as i64,
        Bound::Unbounded => i64::MAX,
    }
}

/// Greedy high-complexity sequence: each appended block maximizes the worst
/// forbidden-line margin over every substring the block completes, so each
/// block keeps the whole prefix as far from compressibility as the index can
/// certify. Ties prefer the block whose own recorded complexity is highest,
/// then the lexicographically smallest block.
pub fn build_block_sequence(
    params: &KolmoParams,
    target_len: usize,
    idx: &KolmoIndex,
) -> Result<BitString, KolmoError> {
    let m = params.block_len;
    if target_len % m != 0 {
        return Err(KolmoError::LengthNotMultipleOfBlock { len: target_len, block: m });
    }
    if m > 24 {
        return Err(KolmoError::InfeasibleBudget { block: m });
    }
    // The index must at least be able to score single blocks.
    if !idx.outputs().any(|(x, _)| x.len() == m) {
        return Err(KolmoError::InfeasibleBudget { block: m });
    }
    let mut cur = BitString::new();
    while cur.len() < target_len {
        let mut best: Option<(i64, Bound, BitString)> = None;
        for v in 0..(1u64 << m) {
            let mut block = BitString::with_capacity(m);
            for j in (0..m).rev() {
                block.push(((v >> j) & 1) as u8);
            }
            let candidate = cur.concat(&block);
            // Worst margin over substrings ending inside the new block.
            let mut margin = i64::MAX;
            for end in cur.len() + 1..=candidate.len() {
                for start in 0..end {
                    let k = idx.k_bound(&candidate.slice(start, end - start));
                    margin = margin.min(forbidden_margin(params, end - start, k));
                }
            }
            let own = idx.k_bound(&block);
            let better = match &best {
                None => true,
                Some((bm, bo, _)) => margin > *bm || (margin == *bm && own > *bo),
            };
            if better {
                best = Some((margin, own, block));
            }
        }
        let (_, _, block) = best.expect("at least one block exists");
        cur.append(&block);
    }
    Ok(cur)
}

/// Indexed view of a one-way sequence folded onto the integers: bit i >= 0 is
/// source bit 2i, bit i < 0 is source bit -2i-1.
#[derive(Clone, Debug)]
pub struct TwoWay {
    source: BitString,
}

impl TwoWay {
    pub fn new(source: BitString) -> Self {
        TwoWay { source }
    }

    pub fn bit(&self, i: i64) -> Result<u8, KolmoError> {
        let src = if i >= 0 { 2 * i } else { -2 * i - 1 };
        if src as usize >= self.source.len() {
            return Err(KolmoError::IndexBeyondPrefix { index: i, len: self.source.len() });
        }
        Ok(self.source.get(src as usize))
    }

    /// The materialized window [lo, hi] as a bit string, left to right.
    pub fn window(&self, lo: i64, hi: i64) -> Result<BitString, KolmoError> {
        let mut s = BitString::with_capacity((hi - lo + 1) as usize);
        for i in lo..=hi {
            s.push(self.bit(i)?);
        }
        Ok(s)
    }
}

/// For each substring length, the minimum recorded complexity over all
/// substrings of that length.
pub fn min_substring_complexity(s: &BitString, idx: &KolmoIndex) -> BTreeMap<usize, Bound> {
    let mut out = BTreeMap::new();
    for len in 1..=s.len() {
        let mut min = Bound::Unbounded;
        for start in 0..=(s.len() - len) {
            let k = idx.k_bound(&s.slice(start, len));
            if k < min {
                min = k;
            }
        }
        out.insert(len, min);
    }
    out
}

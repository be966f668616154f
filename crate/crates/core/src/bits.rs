//! Packed bit strings, used as machine inputs, description-program outputs
//! and map keys throughout the crate.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// An immutable-ish sequence of bits, packed MSB-first.
///
/// Ordering sorts by length first, then lexicographically bit by bit, which
/// is what the enumeration code relies on for deterministic maps.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    len: u32,
    bytes: Vec<u8>,
}

impl BitString {
    pub const fn new() -> Self {
        BitString { len: 0, bytes: Vec::new() }
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString { len: 0, bytes: Vec::with_capacity(bits.div_ceil(8)) }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        (self.bytes[i / 8] >> (7 - (i % 8))) & 1
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        if self.len as usize % 8 == 0 {
            self.bytes.push(0);
        }
        if bit == 1 {
            let i = self.len as usize;
            self.bytes[i / 8] |= 0x80 >> (i % 8);
        }
        self.len += 1;
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut s = BitString::with_capacity(bits.len());
        for &b in bits {
            s.push(b);
        }
        s
    }

    /// Parses a string of `0`/`1` characters; everything else is rejected.
    pub fn parse(text: &str) -> Option<Self> {
        let mut s = BitString::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => s.push(0),
                '1' => s.push(1),
                _ => return None,
            }
        }
        Some(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().collect()
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        debug_assert!(start + len <= self.len());
        let mut s = BitString::with_capacity(len);
        for i in start..start + len {
            s.push(self.get(i));
        }
        s
    }

    pub fn append(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn concat(&self, other: &BitString) -> Self {
        let mut s = self.clone();
        s.append(other);
        s
    }

    /// Appends the current contents `times` more times (so the result is
    /// `times + 1` copies of the original).
    pub fn repeat_extend(&mut self, times: usize) {
        let base = self.to_vec();
        for _ in 0..times {
            for &b in &base {
                self.push(b);
            }
        }
    }

    pub fn to_string01(&self) -> String {
        self.iter().map(|b| if b == 1 { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

impl FromIterator<u8> for BitString {
    fn from_iter<T: IntoIterator<Item = u8>>(iter: T) -> Self {
        let mut s = BitString::new();
        for b in iter {
            s.push(b);
        }
        s
    }
}

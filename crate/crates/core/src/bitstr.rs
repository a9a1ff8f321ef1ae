//! Bit strings, key encoding and the divergence computation used by every
//! trie step.
//!
//! Bits are packed most-significant-bit first. An owned [`BitString`] keeps
//! the unused low bits of its last byte at zero so that derived equality,
//! hashing and ordering agree with bitwise value semantics (the derived
//! order is plain lexicographic order with a proper prefix sorting first).
//! [`Bits`] is a borrowed window into packed storage, which is how the trie
//! reads stored key suffixes straight out of the arena without copying.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// An immutable, owned sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

/// A borrowed view of `len` bits starting at bit `start` of `bytes`.
#[derive(Clone, Copy)]
pub struct Bits<'a> {
    bytes: &'a [u8],
    start: usize,
    len: usize,
}

/// How two bit strings relate at their first point of difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    Equal,
    /// One string is a proper prefix of the other; the index is the shorter
    /// length.
    Prefix(usize),
    /// First index at which both strings have a bit and the bits differ.
    Mismatch(usize),
}

impl Divergence {
    /// The divergence index, absent for [`Divergence::Equal`].
    pub fn index(self) -> Option<usize> {
        match self {
            Divergence::Equal => None,
            Divergence::Prefix(d) | Divergence::Mismatch(d) => Some(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bit literal {0:?}: expected only '0' and '1'")]
pub struct ParseBitsError(pub String);

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = BitString::new();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Wraps already packed MSB-first bytes. Bits past `len` are cleared.
    pub fn from_packed(mut bytes: Vec<u8>, len: usize) -> Self {
        assert!(len <= bytes.len() * 8, "bit length {len} exceeds packed data");
        bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        BitString { bytes, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| bit_at(&self.bytes, i))
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn extend_from_bits(&mut self, bits: Bits<'_>) {
        for b in bits.iter() {
            self.push(b);
        }
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from_bits(other.as_bits());
        out
    }

    pub fn as_bits(&self) -> Bits<'_> {
        Bits { bytes: &self.bytes, start: 0, len: self.len }
    }

    /// Packed MSB-first bytes; the final byte is zero-padded.
    pub fn packed(&self) -> &[u8] {
        &self.bytes
    }

    /// `⟨x[d+j]⟩` for `j < len − d`. Panics if `d > len`.
    pub fn suffix(&self, d: usize) -> BitString {
        self.as_bits().suffix(d).to_bit_string()
    }

    /// The first `n` bits. Panics if `n > len`.
    pub fn prefix(&self, n: usize) -> BitString {
        self.as_bits().prefix(n).to_bit_string()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.as_bits().iter()
    }
}

impl<'a> Bits<'a> {
    /// A view over `len` bits of `bytes` beginning at bit `start`.
    pub fn new(bytes: &'a [u8], start: usize, len: usize) -> Self {
        assert!(start + len <= bytes.len() * 8, "bit view out of range");
        Bits { bytes, start, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| bit_at(self.bytes, self.start + i))
    }

    /// Drops the first `d` bits. Panics if `d > len`.
    pub fn suffix(self, d: usize) -> Bits<'a> {
        assert!(d <= self.len, "suffix index {d} out of range for {} bits", self.len);
        Bits { bytes: self.bytes, start: self.start + d, len: self.len - d }
    }

    /// Keeps the first `n` bits. Panics if `n > len`.
    pub fn prefix(self, n: usize) -> Bits<'a> {
        assert!(n <= self.len, "prefix length {n} out of range for {} bits", self.len);
        Bits { len: n, ..self }
    }

    pub fn iter(self) -> impl Iterator<Item = bool> + 'a {
        (self.start..self.start + self.len).map(move |i| bit_at(self.bytes, i))
    }

    pub fn to_bit_string(self) -> BitString {
        if self.start.is_multiple_of(8) {
            let first = self.start / 8;
            let bytes = self.bytes[first..first + self.len.div_ceil(8)].to_vec();
            return BitString::from_packed(bytes, self.len);
        }
        BitString::from_bits(self.iter())
    }

    /// 64 bits starting at view index `pos`, left aligned. Positions past the
    /// end of the view read as zero.
    fn word(&self, pos: usize) -> u64 {
        let bit = self.start + pos;
        let byte = bit / 8;
        let shift = bit % 8;
        let mut buf = [0u8; 9];
        let avail = self.bytes.len().saturating_sub(byte).min(9);
        if avail > 0 {
            buf[..avail].copy_from_slice(&self.bytes[byte..byte + avail]);
        }
        let hi = u64::from_be_bytes(buf[..8].try_into().unwrap());
        let word = if shift == 0 { hi } else { (hi << shift) | (u64::from(buf[8]) >> (8 - shift)) };
        let remaining = self.len.saturating_sub(pos);
        if remaining >= 64 {
            word
        } else {
            word & top_mask(remaining)
        }
    }
}

fn top_mask(n: usize) -> u64 {
    match n {
        0 => 0,
        64.. => u64::MAX,
        n => u64::MAX << (64 - n),
    }
}

fn bit_at(bytes: &[u8], i: usize) -> bool {
    bytes[i / 8] & (0x80 >> (i % 8)) != 0
}

impl PartialEq for Bits<'_> {
    fn eq(&self, other: &Self) -> bool {
        divergence(*self, *other) == Divergence::Equal
    }
}

impl Eq for Bits<'_> {}

/// Compares `x` and `y` from index 0 and reports where they part.
///
/// Runs in time proportional to the divergence index, 64 bits per step.
pub fn divergence(x: Bits<'_>, y: Bits<'_>) -> Divergence {
    let common = x.len.min(y.len);
    let mut i = 0;
    while i < common {
        let take = (common - i).min(64);
        let diff = (x.word(i) ^ y.word(i)) & top_mask(take);
        if diff != 0 {
            return Divergence::Mismatch(i + diff.leading_zeros() as usize);
        }
        i += take;
    }
    if x.len == y.len {
        Divergence::Equal
    } else {
        Divergence::Prefix(common)
    }
}

/// Expands each byte to eight bits, most significant first.
pub fn encode_key(raw: &[u8]) -> BitString {
    BitString { bytes: raw.to_vec(), len: raw.len() * 8 }
}

/// Inverse of [`encode_key`]; `None` when the length is not a whole number
/// of bytes.
pub fn decode_key(bits: &BitString) -> Option<Vec<u8>> {
    bits.len.is_multiple_of(8).then(|| bits.bytes.clone())
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_bits().fmt(f)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for Bits<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("\"\"");
        }
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    /// Parses a `0`/`1` literal. `""` (two quote characters) and the empty
    /// string both denote ε.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "\"\"" {
            return Ok(BitString::new());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseBitsError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString::from_bits)
    }
}

//! Packed binary sequences and their text forms.
//!
//! Bit order is positional: `e_1` is the first character of the text form and
//! the most significant bit of the first storage word.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite binary sequence `(e_1, ..., e_N)`, 64 digits per word,
/// most significant bit first. Unused low bits of the last word stay zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSequence {
    words: Vec<u64>,
    len: usize,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitSequence {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    /// All-zero sequence of length `len`.
    pub fn zeros(len: usize) -> Self {
        BitSequence {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Takes the first `len` digits of MSB-first words.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        assert!(
            len <= words.len() * 64,
            "{len} bits from {} words",
            words.len()
        );
        words.truncate(len.div_ceil(64));
        if !len.is_multiple_of(64) {
            *words.last_mut().unwrap() &= !(u64::MAX >> (len % 64));
        }
        BitSequence { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let offset = self.len % 64;
        if offset == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1u64 << (63 - offset);
        }
        self.len += 1;
    }

    /// Digit at zero-based position `i`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    /// The digit `e_n` for `1 <= n <= N`; panics outside that range.
    pub fn get(&self, n: usize) -> u8 {
        assert!(
            n >= 1 && n <= self.len,
            "e_{n} undefined for N = {}",
            self.len
        );
        self.bit(n - 1) as u8
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (63 - i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// The `k`-bit block starting at zero-based `start`, read as an integer
    /// with the first digit most significant.
    #[inline]
    pub fn window(&self, start: usize, k: u32) -> u64 {
        assert!((1..=64).contains(&k), "window length {k}");
        let k = k as usize;
        assert!(
            start + k <= self.len,
            "window {start}+{k} past length {}",
            self.len
        );
        let word = start / 64;
        let offset = start % 64;
        let hi = self.words[word] << offset;
        let combined = if offset + k > 64 {
            hi | (self.words[word + 1] >> (64 - offset))
        } else {
            hi
        };
        combined >> (64 - k)
    }

    /// Successive `k`-bit windows starting at positions `0, 1, ..., N-k`.
    pub fn windows(&self, k: u32) -> Windows<'_> {
        Windows {
            seq: self,
            k,
            next: 0,
            current: 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The first `len` digits.
    pub fn prefix(&self, len: usize) -> BitSequence {
        assert!(len <= self.len, "prefix {len} longer than {}", self.len);
        let mut words = self.words[..len.div_ceil(64)].to_vec();
        if !len.is_multiple_of(64) {
            *words.last_mut().unwrap() &= !(u64::MAX >> (len % 64));
        }
        BitSequence { words, len }
    }

    /// Every digit flipped.
    pub fn complement(&self) -> BitSequence {
        let mut out = BitSequence {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        if !self.len.is_multiple_of(64) {
            *out.words.last_mut().unwrap() &= !(u64::MAX >> (self.len % 64));
        }
        out
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// `hex:<digits>/<length>`, four digits per hex character, zero padded.
    pub fn to_hex_string(&self) -> String {
        let mut s = String::from("hex:");
        for i in (0..self.len).step_by(4) {
            let mut nibble = 0u32;
            for j in 0..4 {
                nibble <<= 1;
                if i + j < self.len && self.bit(i + j) {
                    nibble |= 1;
                }
            }
            s.push(char::from_digit(nibble, 16).unwrap());
        }
        s.push('/');
        s.push_str(&self.len.to_string());
        s
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut seq = BitSequence::new();
        for b in iter {
            seq.push(b);
        }
        seq
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 256 {
            write!(f, "BitSequence({})", self.to_bit_string())
        } else {
            write!(f, "BitSequence(len={}, {})", self.len, self.to_hex_string())
        }
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl FromStr for BitSequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_bits(s)
    }
}

pub struct Windows<'a> {
    seq: &'a BitSequence,
    k: u32,
    next: usize,
    current: u64,
}

impl Iterator for Windows<'_> {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        let k = self.k as usize;
        if self.next + k > self.seq.len {
            return None;
        }
        self.current = if self.next == 0 {
            self.seq.window(0, self.k)
        } else {
            let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
            ((self.current << 1) | self.seq.bit(self.next + k - 1) as u64) & mask
        };
        self.next += 1;
        Some(self.current)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.seq.len + 1).saturating_sub(self.next + self.k as usize);
        (left, Some(left))
    }
}

impl ExactSizeIterator for Windows<'_> {}

/// Parses either a plain `{0,1}` string or `hex:<digits>/<length>`.
pub fn parse_bits(text: &str) -> Result<BitSequence> {
    if let Some(rest) = text.strip_prefix("hex:") {
        return parse_hex(rest);
    }
    let mut seq = BitSequence::with_capacity(text.len());
    for (offset, ch) in text.chars().enumerate() {
        match ch {
            '0' => seq.push(false),
            '1' => seq.push(true),
            _ => return Err(Error::InvalidBit { ch, offset }),
        }
    }
    Ok(seq)
}

fn parse_hex(rest: &str) -> Result<BitSequence> {
    let (digits, length) = rest
        .split_once('/')
        .ok_or_else(|| Error::MalformedHex(format!("missing /<length> in {rest:?}")))?;
    let length: usize = length
        .parse()
        .map_err(|_| Error::MalformedHex(format!("bad length {length:?}")))?;
    let available = digits.len() * 4;
    if length > available {
        return Err(Error::HexLengthTooLarge {
            requested: length,
            available,
        });
    }
    let mut seq = BitSequence::with_capacity(length);
    'outer: for ch in digits.chars() {
        let nibble = ch
            .to_digit(16)
            .ok_or_else(|| Error::MalformedHex(format!("non-hex digit {ch:?}")))?;
        for j in (0..4).rev() {
            if seq.len() == length {
                break 'outer;
            }
            seq.push((nibble >> j) & 1 == 1);
        }
    }
    Ok(seq)
}

pub fn format_bits(seq: &BitSequence) -> String {
    seq.to_bit_string()
}

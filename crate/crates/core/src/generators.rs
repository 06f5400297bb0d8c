//! Deterministic digit sources: Champernowne's binary number, rationals,
//! seeded random bits and file-backed streams.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitSequence;
use crate::error::{Error, Result};

/// Identity of the generator behind [`random_bits`], embedded in reports.
pub const PRNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.3, SeedableRng::seed_from_u64), 64 bits per draw, MSB first";

/// First `n` digits of `1 10 11 100 101 ...`.
pub fn champernowne_bits(n: usize) -> BitSequence {
    let mut seq = BitSequence::with_capacity(n);
    let mut i: u64 = 1;
    while seq.len() < n {
        let width = 64 - i.leading_zeros();
        for j in (0..width).rev() {
            if seq.len() == n {
                break;
            }
            seq.push((i >> j) & 1 == 1);
        }
        i += 1;
    }
    seq
}

/// First `n` binary digits of `p/q` by long division.
pub fn rational_bits(p: u64, q: u64, n: usize) -> Result<BitSequence> {
    if q == 0 || p >= q {
        return Err(Error::InvalidRational { p, q });
    }
    let mut seq = BitSequence::with_capacity(n);
    let mut r = p as u128;
    let q = q as u128;
    for _ in 0..n {
        r <<= 1;
        let bit = r >= q;
        if bit {
            r -= q;
        }
        seq.push(bit);
    }
    Ok(seq)
}

/// First `n` digits of the [`PRNG_ALGORITHM`] stream for `seed`.
pub fn random_bits(seed: u64, n: usize) -> BitSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
    BitSequence::from_words(words, n)
}

/// Seed for sample `index` of a run seeded with `seed`: the SplitMix64
/// output function applied to `seed + (index + 1)·0x9E3779B97F4A7C15`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ASCII `0`/`1` digits with whitespace ignored.
pub fn parse_digit_text(text: &str) -> Result<BitSequence> {
    let mut seq = BitSequence::with_capacity(text.len());
    for (offset, ch) in text.chars().enumerate() {
        match ch {
            '0' => seq.push(false),
            '1' => seq.push(true),
            c if c.is_whitespace() => {}
            c => return Err(Error::InvalidBit { ch: c, offset }),
        }
    }
    Ok(seq)
}

/// Textual generator description: `champernowne`, `rational:P/Q`,
/// `random:SEED` or `file:PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Champernowne,
    Rational { p: u64, q: u64 },
    Random { seed: u64 },
    File { path: PathBuf },
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::GeneratorSpec(s.to_string());
        if s == "champernowne" {
            return Ok(GeneratorSpec::Champernowne);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "rational" => {
                let (p, q) = arg.split_once('/').ok_or_else(bad)?;
                let p = p.parse().map_err(|_| bad())?;
                let q = q.parse().map_err(|_| bad())?;
                if q == 0 || p >= q {
                    return Err(Error::InvalidRational { p, q });
                }
                Ok(GeneratorSpec::Rational { p, q })
            }
            "random" => Ok(GeneratorSpec::Random {
                seed: arg.parse().map_err(|_| bad())?,
            }),
            "file" if !arg.is_empty() => Ok(GeneratorSpec::File { path: arg.into() }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Champernowne => f.write_str("champernowne"),
            GeneratorSpec::Rational { p, q } => write!(f, "rational:{p}/{q}"),
            GeneratorSpec::Random { seed } => write!(f, "random:{seed}"),
            GeneratorSpec::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

/// A reproducible producer of the digits `z_1, z_2, ...`. Implement this to
/// plug in other constructions.
pub trait DigitSource: Send + Sync {
    /// The first `len` digits; the same call always yields the same digits.
    fn digits(&self, len: usize) -> Result<BitSequence>;

    fn label(&self) -> String;
}

struct Champernowne;

impl DigitSource for Champernowne {
    fn digits(&self, len: usize) -> Result<BitSequence> {
        Ok(champernowne_bits(len))
    }
    fn label(&self) -> String {
        "champernowne".into()
    }
}

struct RationalDigits {
    p: u64,
    q: u64,
}

impl DigitSource for RationalDigits {
    fn digits(&self, len: usize) -> Result<BitSequence> {
        rational_bits(self.p, self.q, len)
    }
    fn label(&self) -> String {
        format!("rational:{}/{}", self.p, self.q)
    }
}

struct RandomDigits {
    seed: u64,
}

impl DigitSource for RandomDigits {
    fn digits(&self, len: usize) -> Result<BitSequence> {
        Ok(random_bits(self.seed, len))
    }
    fn label(&self) -> String {
        format!("random:{} [{PRNG_ALGORITHM}]", self.seed)
    }
}

/// A finite, fully materialised digit string.
struct FixedDigits {
    bits: BitSequence,
    label: String,
}

impl DigitSource for FixedDigits {
    fn digits(&self, len: usize) -> Result<BitSequence> {
        if len > self.bits.len() {
            return Err(Error::StreamExhausted {
                label: self.label.clone(),
                requested: len,
                available: self.bits.len(),
            });
        }
        Ok(self.bits.prefix(len))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Shared handle to a [`DigitSource`].
#[derive(Clone)]
pub struct DigitStream {
    source: Arc<dyn DigitSource>,
}

impl DigitStream {
    pub fn new(source: impl DigitSource + 'static) -> Self {
        DigitStream {
            source: Arc::new(source),
        }
    }

    /// Opens the stream a spec describes; file streams are read here, once.
    pub fn open(spec: &GeneratorSpec) -> Result<Self> {
        Ok(match *spec {
            GeneratorSpec::Champernowne => Self::new(Champernowne),
            GeneratorSpec::Rational { p, q } => {
                if q == 0 || p >= q {
                    return Err(Error::InvalidRational { p, q });
                }
                Self::new(RationalDigits { p, q })
            }
            GeneratorSpec::Random { seed } => Self::new(RandomDigits { seed }),
            GeneratorSpec::File { ref path } => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                Self::new(FixedDigits {
                    bits: parse_digit_text(&text)?,
                    label: spec.to_string(),
                })
            }
        })
    }

    /// A finite stream over explicit digits.
    pub fn from_bits(bits: BitSequence, label: impl Into<String>) -> Self {
        Self::new(FixedDigits {
            bits,
            label: label.into(),
        })
    }

    pub fn digits(&self, len: usize) -> Result<BitSequence> {
        self.source.digits(len)
    }

    pub fn label(&self) -> String {
        self.source.label()
    }
}

impl fmt::Debug for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitStream({})", self.label())
    }
}

//! Blocks `X ∈ {0,1}^k` and the dyadic intervals they select.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::ExactValue;

/// A block of `k` digits, stored as a `k`-bit integer whose most significant
/// bit is `x_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    k: u32,
    value: u64,
}

impl Pattern {
    pub fn new(k: u32, value: u64) -> Result<Self> {
        if !(1..=64).contains(&k) {
            return Err(Error::PatternLength(k));
        }
        if k < 64 && value >> k != 0 {
            return Err(Error::PatternValue { k, value });
        }
        Ok(Pattern { k, value })
    }

    pub fn len(&self) -> u32 {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// The digit `x_j` for `1 <= j <= k`.
    pub fn digit(&self, j: u32) -> u8 {
        assert!(j >= 1 && j <= self.k, "x_{j} undefined for k = {}", self.k);
        ((self.value >> (self.k - j)) & 1) as u8
    }

    pub fn complement(&self) -> Pattern {
        let mask = if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        };
        Pattern {
            k: self.k,
            value: !self.value & mask,
        }
    }

    /// All `2^k` patterns of length `k` in increasing value order.
    pub fn all(k: u32) -> impl Iterator<Item = Pattern> {
        assert!(
            (1..=20).contains(&k),
            "refusing to enumerate 2^{k} patterns"
        );
        (0..1u64 << k).map(move |value| Pattern { k, value })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 1..=self.k {
            write!(f, "{}", self.digit(j))?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = u32::try_from(s.len()).map_err(|_| Error::PatternLength(u32::MAX))?;
        if !(1..=64).contains(&k) {
            return Err(Error::PatternLength(k));
        }
        let mut value = 0u64;
        for (offset, ch) in s.chars().enumerate() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::InvalidBit { ch, offset }),
            };
            value = (value << 1) | bit;
        }
        Pattern::new(k, value)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The half-open interval `[a/2^k, (a+1)/2^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    level: u32,
    numerator: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, numerator: u64) -> Result<Self> {
        let p = Pattern::new(level, numerator)?;
        Ok(pattern_to_interval(p))
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn left(&self) -> ExactValue {
        ExactValue::new(self.numerator as i128, self.level)
    }

    pub fn right(&self) -> ExactValue {
        ExactValue::new(self.numerator as i128 + 1, self.level)
    }

    pub fn length(&self) -> ExactValue {
        ExactValue::new(1, self.level)
    }

    pub fn pattern(&self) -> Pattern {
        Pattern {
            k: self.level,
            value: self.numerator,
        }
    }

    /// Membership of `num / 2^w` for `w >= level`: the top `level` digits of
    /// the `w`-digit numerator must equal the interval numerator.
    #[inline]
    pub fn contains_scaled(&self, num: u64, w: u32) -> bool {
        debug_assert!(w >= self.level && w <= 64);
        let top = if w == self.level {
            num
        } else {
            num >> (w - self.level)
        };
        top == self.numerator
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left(), self.right())
    }
}

/// `I_X = [Σ x_j 2^-j, Σ x_j 2^-j + 2^-k)`.
pub fn pattern_to_interval(x: Pattern) -> DyadicInterval {
    DyadicInterval {
        level: x.k,
        numerator: x.value,
    }
}

/// Exact half-open membership test; `p` must lie in `[0, 1)`.
pub fn interval_contains(interval: &DyadicInterval, p: ExactValue) -> Result<bool> {
    if p < ExactValue::ZERO || p >= ExactValue::from_int(1) {
        return Err(Error::PointOutOfRange(p.to_string()));
    }
    Ok(interval.left() <= p && p < interval.right())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn intervals_of_small_patterns() {
        let i = pattern_to_interval(pat("101"));
        assert_eq!(
            (i.left(), i.right()),
            (ExactValue::new(5, 3), ExactValue::new(6, 3))
        );
        let i = pattern_to_interval(pat("0"));
        assert_eq!(
            (i.left(), i.right()),
            (ExactValue::ZERO, ExactValue::new(1, 1))
        );
        let i = pattern_to_interval(pat("1111"));
        assert_eq!(
            (i.left(), i.right()),
            (ExactValue::new(15, 4), ExactValue::from_int(1))
        );
        assert_eq!(i.length(), ExactValue::new(1, 4));
    }

    #[test]
    fn containment_respects_half_open_endpoints() {
        let i = pattern_to_interval(pat("101"));
        // 85/128 = 0.1010101 in binary; 5/8 <= 85/128 < 6/8.
        assert!(interval_contains(&i, ExactValue::new(85, 7)).unwrap());
        let lower = pattern_to_interval(pat("0"));
        assert!(!interval_contains(&lower, ExactValue::new(1, 1)).unwrap());
        assert!(interval_contains(&lower, ExactValue::ZERO).unwrap());
        assert!(matches!(
            interval_contains(&lower, ExactValue::from_int(1)),
            Err(Error::PointOutOfRange(_))
        ));
        assert!(interval_contains(&lower, ExactValue::new(-1, 3)).is_err());
    }

    #[test]
    fn pattern_validation() {
        assert_eq!(Pattern::new(0, 0), Err(Error::PatternLength(0)));
        assert_eq!(Pattern::new(65, 0), Err(Error::PatternLength(65)));
        assert_eq!(
            Pattern::new(2, 4),
            Err(Error::PatternValue { k: 2, value: 4 })
        );
        assert!(Pattern::new(64, u64::MAX).is_ok());
        assert_eq!(pat("0110").value(), 6);
        assert_eq!(pat("0110").to_string(), "0110");
        assert_eq!(pat("0110").complement(), pat("1001"));
        assert_eq!(pat("011").digit(1), 0);
        assert!("".parse::<Pattern>().is_err());
        assert!("012".parse::<Pattern>().is_err());
    }

    #[test]
    fn level_k_intervals_partition_unit_interval() {
        for k in 1..=10u32 {
            let intervals: Vec<_> = Pattern::all(k).map(pattern_to_interval).collect();
            assert_eq!(intervals[0].left(), ExactValue::ZERO);
            assert_eq!(intervals.last().unwrap().right(), ExactValue::from_int(1));
            for pair in intervals.windows(2) {
                assert_eq!(pair[0].right(), pair[1].left());
                assert_eq!(pair[0].length(), ExactValue::new(1, k));
            }
            // Bijection: the interval determines its pattern.
            for (v, i) in intervals.iter().enumerate() {
                assert_eq!(i.pattern().value(), v as u64);
            }
        }
    }
}

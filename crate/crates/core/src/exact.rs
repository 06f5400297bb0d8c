//! Exact arithmetic for the two number shapes the toolkit produces.
//!
//! [`ExactValue`] is a dyadic rational `num / 2^w` backed by an `i128`
//! numerator. Every normality deviation `|T - M/2^k|` and every scaled orbit
//! discrepancy lives here. [`Rational`] is a general reduced fraction, needed
//! because a discrepancy `D_N` carries the factor `1/N`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedMul, CheckedSub, Signed, Zero};

use crate::error::{Error, Result};

/// A dyadic rational `numerator / 2^log2_den` in canonical form: the
/// numerator is odd unless the exponent is zero, and zero is `0/2^0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExactValue {
    num: i128,
    log2_den: u32,
}

/// `n * 2^shift`, or `None` if the result leaves the `i128` range.
fn shl_checked(n: i128, shift: u32) -> Option<i128> {
    if n == 0 {
        return Some(0);
    }
    if shift >= 127 {
        return None;
    }
    n.checked_mul(1i128 << shift)
}

impl ExactValue {
    pub const ZERO: ExactValue = ExactValue {
        num: 0,
        log2_den: 0,
    };

    pub fn new(num: i128, log2_den: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let tz = num.trailing_zeros().min(log2_den);
        ExactValue {
            num: num >> tz,
            log2_den: log2_den - tz,
        }
    }

    pub const fn from_int(n: i128) -> Self {
        ExactValue {
            num: n,
            log2_den: 0,
        }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_den
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    /// Numerator after rescaling to the denominator `2^w`, if that is exact
    /// and representable.
    pub fn numerator_at(&self, w: u32) -> Option<i128> {
        if w < self.log2_den {
            return None;
        }
        shl_checked(self.num, w - self.log2_den)
    }

    pub fn abs(self) -> Self {
        ExactValue {
            num: self.num.checked_abs().expect("ExactValue overflow in abs"),
            log2_den: self.log2_den,
        }
    }

    fn aligned(self, other: Self) -> Option<(i128, i128, u32)> {
        let w = self.log2_den.max(other.log2_den);
        Some((
            shl_checked(self.num, w - self.log2_den)?,
            shl_checked(other.num, w - other.log2_den)?,
            w,
        ))
    }

    pub fn checked_add(self, other: Self) -> Option<Self> {
        let (a, b, w) = self.aligned(other)?;
        Some(Self::new(a.checked_add(b)?, w))
    }

    pub fn checked_sub(self, other: Self) -> Option<Self> {
        let (a, b, w) = self.aligned(other)?;
        Some(Self::new(a.checked_sub(b)?, w))
    }

    pub fn checked_mul_int(self, k: i128) -> Option<Self> {
        Some(Self::new(self.num.checked_mul(k)?, self.log2_den))
    }

    /// Nearest `f64`; for display and statistics only, never for decisions.
    pub fn to_f64(&self) -> f64 {
        let mut v = self.num as f64;
        let mut w = self.log2_den;
        while w > 0 {
            let step = w.min(1000);
            v *= 2f64.powi(-(step as i32));
            w -= step;
        }
        v
    }
}

impl Ord for ExactValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let sign = |n: i128| n.signum();
        if sign(self.num) != sign(other.num) {
            return sign(self.num).cmp(&sign(other.num));
        }
        if self.log2_den == other.log2_den {
            return self.num.cmp(&other.num);
        }
        // Same nonzero sign. Scale the side with the smaller exponent; if that
        // overflows its magnitude dominates anything representable.
        if self.log2_den < other.log2_den {
            match shl_checked(self.num, other.log2_den - self.log2_den) {
                Some(a) => a.cmp(&other.num),
                None => sign(self.num).cmp(&0),
            }
        } else {
            match shl_checked(other.num, self.log2_den - other.log2_den) {
                Some(b) => self.num.cmp(&b),
                None => 0.cmp(&sign(other.num)),
            }
        }
    }
}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExactValue {
    type Output = ExactValue;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("ExactValue overflow in add")
    }
}

impl Sub for ExactValue {
    type Output = ExactValue;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("ExactValue overflow in sub")
    }
}

impl Neg for ExactValue {
    type Output = ExactValue;
    fn neg(self) -> Self {
        ExactValue {
            num: self.num.checked_neg().expect("ExactValue overflow in neg"),
            log2_den: self.log2_den,
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.log2_den)
    }
}

/// Parses `num/2^w` or a bare integer.
impl FromStr for ExactValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedPoint(s.to_string());
        let s_trim = s.trim();
        match s_trim.split_once('/') {
            None => s_trim
                .parse::<i128>()
                .map(Self::from_int)
                .map_err(|_| bad()),
            Some((num, den)) => {
                let num = num.trim().parse::<i128>().map_err(|_| bad())?;
                let w = den
                    .trim()
                    .strip_prefix("2^")
                    .ok_or_else(bad)?
                    .parse::<u32>()
                    .map_err(|_| bad())?;
                Ok(Self::new(num, w))
            }
        }
    }
}

/// A reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Ratio::new(num, den))
    }

    pub fn from_int(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numerator(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_mul_int(self, k: i128) -> Option<Self> {
        self.0.checked_mul(&Ratio::from_integer(k)).map(Rational)
    }

    pub fn checked_sub(self, other: Self) -> Option<Self> {
        CheckedSub::checked_sub(&self.0, &other.0).map(Rational)
    }

    /// The dyadic form, when the denominator is a power of two.
    pub fn to_exact(&self) -> Option<ExactValue> {
        let den = self.denominator();
        (den > 0 && den.count_ones() == 1)
            .then(|| ExactValue::new(self.numerator(), den.trailing_zeros()))
    }

    pub fn to_f64(&self) -> f64 {
        // Both parts can exceed 2^53; divide after a shared shift so the
        // quotient keeps full precision.
        let (n, d) = (self.numerator(), self.denominator());
        let shift = (128 - d.leading_zeros()).saturating_sub(100);
        (n >> shift) as f64 / (d >> shift) as f64
    }
}

impl From<ExactValue> for Rational {
    /// Panics if the denominator `2^w` does not fit in `i128` (`w >= 127`).
    fn from(v: ExactValue) -> Self {
        assert!(v.log2_den < 127, "denominator 2^{} too large", v.log2_den);
        Rational::new(v.num, 1i128 << v.log2_den)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_reduces_trailing_zeros() {
        assert_eq!(ExactValue::new(12, 4), ExactValue::new(3, 2));
        assert_eq!(ExactValue::new(0, 9), ExactValue::ZERO);
        assert_eq!(ExactValue::new(8, 2), ExactValue::from_int(2));
        assert_eq!(ExactValue::new(-6, 1), ExactValue::from_int(-3));
    }

    #[test]
    fn comparison_across_exponents() {
        let three_quarters = ExactValue::new(3, 2);
        assert!(ExactValue::new(5, 3) < three_quarters);
        assert!(ExactValue::new(7, 3) > three_quarters);
        assert!(ExactValue::new(-1, 100) < ExactValue::ZERO);
        // Scaling i128::MAX/2 by 2^10 overflows; the comparison still resolves.
        let big = ExactValue::from_int(i128::MAX / 2);
        let tiny = ExactValue::new(1, 120);
        assert!(big > ExactValue::new(i128::MAX, 10));
        assert!(tiny < big);
        assert!(-big < -tiny);
    }

    #[test]
    fn arithmetic_is_exact_and_overflow_is_reported() {
        let a = ExactValue::new(3, 2);
        let b = ExactValue::new(1, 3);
        assert_eq!(a + b, ExactValue::new(7, 3));
        assert_eq!(a - b, ExactValue::new(5, 3));
        assert_eq!(a.checked_mul_int(4), Some(ExactValue::from_int(3)));
        assert_eq!(
            ExactValue::from_int(i128::MAX).checked_add(ExactValue::from_int(1)),
            None
        );
        assert_eq!(
            ExactValue::from_int(1).checked_add(ExactValue::new(1, 127)),
            None
        );
    }

    #[test]
    fn display_and_parse() {
        let v = ExactValue::new(21, 2);
        assert_eq!(v.to_string(), "21/2^2");
        assert_eq!("21/2^2".parse::<ExactValue>().unwrap(), v);
        assert_eq!("84/2^4".parse::<ExactValue>().unwrap(), v);
        assert_eq!("5".parse::<ExactValue>().unwrap(), ExactValue::from_int(5));
        assert!("5/3".parse::<ExactValue>().is_err());
        assert!("x/2^3".parse::<ExactValue>().is_err());
        assert_eq!(v.to_f64(), 5.25);
    }

    #[test]
    fn rational_round_trip() {
        let r = Rational::new(6, 8);
        assert_eq!((r.numerator(), r.denominator()), (3, 4));
        assert_eq!(r.to_exact(), Some(ExactValue::new(3, 2)));
        assert_eq!(Rational::new(2, 3).to_exact(), None);
        assert_eq!(Rational::from(ExactValue::new(5, 3)), Rational::new(5, 8));
        assert_eq!(
            Rational::new(2, 3).checked_mul_int(2),
            Some(Rational::new(4, 3))
        );
        let big = Rational::new((1i128 << 100) + 1, 3i128 << 100);
        assert!((big.to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }
}

//! The binary-shift orbit `<2^(n-1) z>` of a digit stream, truncated to a
//! window of `W` digits, and the check `N(Z_M) <= Φ(M)`.
//!
//! Point `n` is `0.z_n z_(n+1) ... z_(n+W-1)`. For any block length
//! `k <= W` the truncated point lies in `I_X` exactly when the window of `X`
//! starts at `z_n`, so pattern counts equal dyadic-interval hit counts of the
//! truncated points and the bound holds for them without any slack term.

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::bits::BitSequence;
use crate::discrepancy::{prefix_scaled_extremes, PointSet};
use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::generators::DigitStream;
use crate::measure::{max_block_length, normality_fast};
use crate::pattern::{interval_contains, pattern_to_interval, Pattern};

pub const DEFAULT_WINDOW_BITS: u32 = 64;

/// Smallest window the verifier accepts for `n` digits.
pub fn min_window_bits(n: usize) -> u32 {
    max_block_length(n) + 1
}

fn truncated_orbit(digits: &BitSequence, count: usize, w: u32) -> PointSet {
    let numerators = (0..count).map(|start| digits.window(start, w)).collect();
    PointSet::dyadic(numerators, w).expect("window checked against 64")
}

fn window_in_range(w: u32) -> Result<()> {
    if w > 64 {
        return Err(Error::WindowTooLarge(w));
    }
    if w == 0 {
        return Err(Error::WindowTooSmall { w, min: 1 });
    }
    Ok(())
}

/// `N` orbit points, each the `W`-digit truncation of `<2^(n-1) z>`, over the
/// common denominator `2^W`.
pub fn orbit_points(s: &DigitStream, n: usize, w: u32) -> Result<PointSet> {
    window_in_range(w)?;
    let min = min_window_bits(n);
    if w < min {
        return Err(Error::WindowTooSmall { w, min });
    }
    if n == 0 {
        return PointSet::dyadic(Vec::new(), w);
    }
    let digits = s.digits(n + w as usize - 1)?;
    Ok(truncated_orbit(&digits, n, w))
}

/// `Σ_{n=1..M} 1_{I_X}(y_n)` over the truncated orbit, decided by exact
/// interval membership.
pub fn count_via_orbit(s: &DigitStream, m: usize, x: Pattern, w: u32) -> Result<usize> {
    window_in_range(w)?;
    if x.len() > w {
        return Err(Error::PatternExceedsWindow { k: x.len(), w });
    }
    if m == 0 {
        return Err(Error::PrefixCount { m, max: usize::MAX });
    }
    let digits = s.digits(m + w as usize - 1)?;
    let interval = pattern_to_interval(x);
    let points = truncated_orbit(&digits, m, w);
    let mut hits = 0;
    for &num in points.numerators() {
        if interval_contains(&interval, ExactValue::new(num as i128, w))? {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Powers of two up to `n`, then `n` itself.
pub fn default_checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..usize::BITS)
        .map(|e| 1usize << e)
        .take_while(|&p| p <= n)
        .collect();
    if n >= 1 && out.last() != Some(&n) {
        out.push(n);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointResult {
    pub n: usize,
    pub normality: ExactValue,
    pub phi: ExactValue,
    /// `phi - normality`.
    pub margin: ExactValue,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub generator: String,
    pub n: usize,
    pub window_bits: u32,
    pub checkpoints: Vec<CheckpointResult>,
    pub overall_pass: bool,
}

/// Computes `N(Z_m)` and `Φ(m) = max_{j <= m} j·D_j` of the truncated orbit
/// for every checkpoint `m` and checks `N(Z_m) <= Φ(m)`.
pub fn lemma1_verify(
    s: &DigitStream,
    n: usize,
    w: u32,
    checkpoints: &[usize],
) -> Result<VerificationReport> {
    if let Some(&bad) = checkpoints.iter().find(|&&c| c < 1 || c > n) {
        return Err(Error::Checkpoint { checkpoint: bad, n });
    }
    let points = orbit_points(s, n, w)?;
    let digits = s.digits(n)?;
    let mut phi = Vec::with_capacity(n);
    let mut running = 0i128;
    for scaled in prefix_scaled_extremes(&points) {
        running = running.max(scaled);
        phi.push(ExactValue::new(running, w));
    }
    let checkpoints: Vec<CheckpointResult> = checkpoints
        .par_iter()
        .map(|&m| {
            let normality = normality_fast(&digits.prefix(m)).value;
            let phi = phi[m - 1];
            let margin = phi - normality;
            CheckpointResult {
                n: m,
                normality,
                phi,
                margin,
                pass: !margin.is_negative(),
            }
        })
        .collect();
    Ok(VerificationReport {
        generator: s.label(),
        n,
        window_bits: w,
        overall_pass: checkpoints.iter().all(|c| c.pass),
        checkpoints,
    })
}

impl Serialize for CheckpointResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CheckpointResult", 11)?;
        s.serialize_field("n", &self.n)?;
        for (name, v) in [
            ("normality", self.normality),
            ("phi", self.phi),
            ("margin", self.margin),
        ] {
            let (num, den, dec) = match name {
                "normality" => ("normality_num", "normality_log2_den", "normality_decimal"),
                "phi" => ("phi_num", "phi_log2_den", "phi_decimal"),
                _ => ("margin_num", "margin_log2_den", "margin_decimal"),
            };
            s.serialize_field(num, &v.numerator())?;
            s.serialize_field(den, &v.log2_denominator())?;
            s.serialize_field(dec, &v.to_f64())?;
        }
        s.serialize_field("pass", &self.pass)?;
        s.end()
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("VerificationReport", 5)?;
        s.serialize_field("generator", &self.generator)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("window_bits", &self.window_bits)?;
        s.serialize_field("overall_pass", &self.overall_pass)?;
        s.serialize_field("checkpoints", &self.checkpoints)?;
        s.end()
    }
}

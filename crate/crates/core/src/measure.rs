//! Pattern counts `T(E_N, M, X)` and the normality measure
//!
//! ```text
//! N(E_N) = max_{1 <= k <= log2 N} max_{X in {0,1}^k} max_{1 <= M <= N+1-k} |T(E_N, M, X) - M/2^k|
//! ```
//!
//! Deviations are kept as integers `|2^k T - M|` in units of `2^-k` and only
//! turned into [`ExactValue`]s when comparing across block lengths.

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::pattern::Pattern;

/// Largest admissible block length `floor(log2 N)`, or 0 when `N <= 1`.
pub fn max_block_length(n: usize) -> u32 {
    if n < 2 {
        0
    } else {
        n.ilog2()
    }
}

/// The `(k, X, M)` triple at which the maximum is attained, with `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub k: u32,
    pub pattern: Pattern,
    pub m: usize,
    pub t: usize,
}

impl Witness {
    pub fn deviation(&self) -> ExactValue {
        let scaled = ((self.t as i128) << self.k) - self.m as i128;
        ExactValue::new(scaled.abs(), self.k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityReport {
    pub value: ExactValue,
    /// `None` exactly when the block-length range is empty (`N <= 1`).
    pub witness: Option<Witness>,
    /// `(k, max_{X,M} |T - M/2^k|)` for each admissible `k`.
    pub per_k_max: Vec<(u32, ExactValue)>,
}

impl NormalityReport {
    fn empty() -> Self {
        NormalityReport {
            value: ExactValue::ZERO,
            witness: None,
            per_k_max: Vec::new(),
        }
    }
}

/// `#{n : 0 <= n < M, (e_{n+1}, ..., e_{n+k}) = X}`.
pub fn count_occurrences(e: &BitSequence, m: usize, x: Pattern) -> Result<usize> {
    let k = x.len();
    let n = e.len();
    if k as usize > n {
        return Err(Error::PatternTooLong { k, n });
    }
    let max = n + 1 - k as usize;
    if m < 1 || m > max {
        return Err(Error::PrefixCount { m, max });
    }
    Ok((0..m)
        .filter(|&start| e.window(start, k) == x.value())
        .count())
}

/// Straight maximum over every `(k, X, M)`. Quadratic in `N`; the oracle for
/// [`normality_fast`]. Ties resolve to the smallest `k`, then pattern, then `M`.
pub fn normality_naive(e: &BitSequence) -> NormalityReport {
    let n = e.len();
    let k_max = max_block_length(n);
    if k_max == 0 {
        return NormalityReport::empty();
    }
    let mut report = NormalityReport::empty();
    for k in 1..=k_max {
        let windows: Vec<u64> = (0..=n - k as usize).map(|s| e.window(s, k)).collect();
        let mut best: Option<(i64, Witness)> = None;
        for x in Pattern::all(k) {
            let mut t = 0i64;
            for (i, &w) in windows.iter().enumerate() {
                t += (w == x.value()) as i64;
                let m = i as i64 + 1;
                let dev = ((t << k) - m).abs();
                if best.is_none_or(|(b, _)| dev > b) {
                    let witness = Witness {
                        k,
                        pattern: x,
                        m: m as usize,
                        t: t as usize,
                    };
                    best = Some((dev, witness));
                }
            }
        }
        let (dev, witness) = best.expect("nonempty range");
        let value = ExactValue::new(dev as i128, k);
        report.per_k_max.push((k, value));
        if report.witness.is_none() || value > report.value {
            report.value = value;
            report.witness = Some(witness);
        }
    }
    report
}

/// Largest `|2^k T - M|` over all patterns and prefixes for one `k`, in one
/// pass. Counts only ever grow, so the maximum count moves with the pattern
/// just incremented and the minimum count is tracked through a histogram of
/// counts, advancing at most one step per window.
fn scaled_max_for_k(e: &BitSequence, k: u32) -> i64 {
    let windows = e.len() + 1 - k as usize;
    let mut counts = vec![0u32; 1usize << k];
    let mut histogram = vec![0u32; windows + 2];
    histogram[0] = 1u32 << k;
    let (mut max_count, mut min_count) = (0u32, 0u32);
    let mut best = 0i64;
    for (i, w) in e.windows(k).enumerate() {
        let m = i as i64 + 1;
        let c = counts[w as usize];
        counts[w as usize] = c + 1;
        histogram[c as usize] -= 1;
        histogram[c as usize + 1] += 1;
        if c + 1 > max_count {
            max_count = c + 1;
        }
        if c == min_count && histogram[c as usize] == 0 {
            min_count += 1;
        }
        let above = ((max_count as i64) << k) - m;
        let below = m - ((min_count as i64) << k);
        best = best.max(above).max(below);
    }
    best
}

/// Witness with the tie-breaking order for a block length whose maximum is
/// known to be `target` (scaled by `2^k`). Each `|2^k T_X(M) - M|` is
/// piecewise linear in `M`, so only the prefix ending just before an
/// occurrence of `X`, the prefix ending at an occurrence, and the final
/// prefix can attain the maximum.
fn witness_for_k(e: &BitSequence, k: u32, target: i64) -> Witness {
    let windows = e.len() + 1 - k as usize;
    let mut counts = vec![0u32; 1usize << k];
    let mut found: Vec<Option<(usize, u32)>> = vec![None; 1usize << k];
    let hits = |t: u32, m: usize| (((t as i64) << k) - m as i64).abs() == target;
    for (i, w) in e.windows(k).enumerate() {
        let m = i + 1;
        let slot = w as usize;
        let before = counts[slot];
        if found[slot].is_none() && m > 1 && hits(before, m - 1) {
            found[slot] = Some((m - 1, before));
        }
        counts[slot] = before + 1;
        if found[slot].is_none() && hits(before + 1, m) {
            found[slot] = Some((m, before + 1));
        }
    }
    for (slot, f) in found.iter_mut().enumerate() {
        if f.is_none() && hits(counts[slot], windows) {
            *f = Some((windows, counts[slot]));
        }
        // M = 1 when X is not the first window: deviation |0 - 1|.
        if target == 1 && e.window(0, k) != slot as u64 {
            *f = Some((1, 0));
        }
    }
    let (slot, (m, t)) = found
        .iter()
        .enumerate()
        .find_map(|(slot, f)| f.map(|hit| (slot, hit)))
        .expect("per-k maximum is attained by some pattern");
    Witness {
        k,
        pattern: Pattern::new(k, slot as u64).expect("slot < 2^k"),
        m,
        t: t as usize,
    }
}

fn assemble(e: &BitSequence, scaled: Vec<(u32, i64)>) -> NormalityReport {
    let per_k_max: Vec<(u32, ExactValue)> = scaled
        .iter()
        .map(|&(k, d)| (k, ExactValue::new(d as i128, k)))
        .collect();
    let Some(&(best_k, value)) = per_k_max
        .iter()
        .reduce(|best, cand| if cand.1 > best.1 { cand } else { best })
    else {
        return NormalityReport::empty();
    };
    let target = scaled[(best_k - 1) as usize].1;
    NormalityReport {
        value,
        witness: Some(witness_for_k(e, best_k, target)),
        per_k_max,
    }
}

/// Single-pass-per-`k` computation, `O(N log N)` time and `O(N)` memory.
/// Same contract as [`normality_naive`], including the witness order.
pub fn normality_fast(e: &BitSequence) -> NormalityReport {
    let scaled = (1..=max_block_length(e.len()))
        .map(|k| (k, scaled_max_for_k(e, k)))
        .collect();
    assemble(e, scaled)
}

/// [`normality_fast`] with the per-`k` passes spread over the rayon pool.
/// The reduction runs in `k` order, so the result does not depend on the
/// schedule.
pub fn normality_fast_parallel(e: &BitSequence) -> NormalityReport {
    let scaled = (1..=max_block_length(e.len()))
        .into_par_iter()
        .map(|k| (k, scaled_max_for_k(e, k)))
        .collect();
    assemble(e, scaled)
}

impl Serialize for NormalityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct PerK {
            k: u32,
            num: i128,
            log2_den: u32,
            decimal: f64,
        }
        let per_k: Vec<PerK> = self
            .per_k_max
            .iter()
            .map(|&(k, v)| PerK {
                k,
                num: v.numerator(),
                log2_den: v.log2_denominator(),
                decimal: v.to_f64(),
            })
            .collect();
        let mut s = serializer.serialize_struct("NormalityReport", 8)?;
        s.serialize_field("value_num", &self.value.numerator())?;
        s.serialize_field("value_log2_den", &self.value.log2_denominator())?;
        s.serialize_field("value_decimal", &self.value.to_f64())?;
        s.serialize_field("k", &self.witness.map(|w| w.k))?;
        s.serialize_field("pattern", &self.witness.map(|w| w.pattern))?;
        s.serialize_field("M", &self.witness.map(|w| w.m))?;
        s.serialize_field("T", &self.witness.map(|w| w.t))?;
        s.serialize_field("per_k", &per_k)?;
        s.end()
    }
}

//! Exhaustive minimisation of the normality measure over `{0,1}^N` for small
//! `N`, and Monte Carlo scans of its typical size.
//!
//! The branch and bound extends a prefix one digit at a time. Once digit
//! `p` is placed, every term `|T(E, M, X) - M/2^k|` with `M + k - 1 <= p` is
//! final for all extensions, so the running maximum of those terms bounds the
//! measure of every completion from below. Block lengths always range over
//! `1..=floor(log2 N)` for the target `N`, never the prefix length.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::exact::ExactValue;
use crate::generators::{derive_seed, random_bits, PRNG_ALGORITHM};
use crate::measure::{max_block_length, normality_fast};

pub const MAX_SEARCH_LEN: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Witnesses kept, lexicographically smallest first.
    pub cap: usize,
    /// Complement symmetry plus prefix lower bounds. When off, all `2^N`
    /// leaves are visited.
    pub pruning: bool,
    /// Prefix length at which the tree is split into independent tasks.
    pub split_depth: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            cap: 16,
            pruning: true,
            split_depth: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub n: usize,
    pub min_value: ExactValue,
    pub witnesses: Vec<BitSequence>,
    pub nodes_visited: u64,
    pub pruned: u64,
}

/// Incremental deviation bookkeeping for a growing prefix. Deviations are
/// integers in units of `2^-K`, `K = floor(log2 N)`.
struct PrefixState {
    n: usize,
    k_max: u32,
    counts: Vec<Vec<u32>>,
    bits: u64,
    len: usize,
    /// `bounds[p]` is the lower bound after `p` digits.
    bounds: Vec<u64>,
}

impl PrefixState {
    fn new(n: usize) -> Self {
        let k_max = max_block_length(n);
        PrefixState {
            n,
            k_max,
            counts: (1..=k_max).map(|k| vec![0; 1 << k]).collect(),
            bits: 0,
            len: 0,
            bounds: vec![0],
        }
    }

    fn bound(&self) -> u64 {
        self.bounds[self.len]
    }

    fn push(&mut self, bit: bool) {
        self.bits = (self.bits << 1) | bit as u64;
        self.len += 1;
        let mut bound = self.bounds[self.len - 1];
        for k in 1..=self.k_max.min(self.len as u32) {
            let window = (self.bits & ((1 << k) - 1)) as usize;
            let counts = &mut self.counts[k as usize - 1];
            counts[window] += 1;
            let m = (self.len + 1 - k as usize) as i64;
            let (lo, hi) = counts
                .iter()
                .fold((u32::MAX, 0), |(lo, hi), &c| (lo.min(c), hi.max(c)));
            let dev = (((hi as i64) << k) - m).max(m - ((lo as i64) << k));
            bound = bound.max((dev as u64) << (self.k_max - k));
        }
        self.bounds.push(bound);
    }

    fn pop(&mut self) {
        for k in 1..=self.k_max.min(self.len as u32) {
            let window = (self.bits & ((1 << k) - 1)) as usize;
            self.counts[k as usize - 1][window] -= 1;
        }
        self.bits >>= 1;
        self.len -= 1;
        self.bounds.pop();
    }

    fn sequence(&self) -> BitSequence {
        (0..self.len)
            .map(|i| (self.bits >> (self.len - 1 - i)) & 1 == 1)
            .collect()
    }
}

#[derive(Default)]
struct Stats {
    nodes: u64,
    pruned: u64,
}

/// Branch and bound below the current prefix; returns the best leaf value
/// strictly below `incumbent`, if any.
fn descend_min(state: &mut PrefixState, mut incumbent: u64, stats: &mut Stats) -> Option<u64> {
    stats.nodes += 1;
    if state.bound() >= incumbent {
        stats.pruned += 1;
        return None;
    }
    if state.len == state.n {
        return Some(state.bound());
    }
    let mut best = None;
    for bit in [false, true] {
        state.push(bit);
        if let Some(v) = descend_min(state, incumbent, stats) {
            incumbent = v;
            best = Some(v);
        }
        state.pop();
    }
    best
}

/// Leaves with value exactly `target` in lexicographic order, until `out`
/// holds `cap` sequences.
fn collect_witnesses(
    state: &mut PrefixState,
    target: u64,
    cap: usize,
    out: &mut Vec<BitSequence>,
    stats: &mut Stats,
) {
    stats.nodes += 1;
    if out.len() >= cap {
        return;
    }
    if state.bound() > target {
        stats.pruned += 1;
        return;
    }
    if state.len == state.n {
        out.push(state.sequence());
        return;
    }
    for bit in [false, true] {
        state.push(bit);
        collect_witnesses(state, target, cap, out, stats);
        state.pop();
    }
}

/// Plain enumeration of all leaves with running minimum and witness list.
fn enumerate_all(
    state: &mut PrefixState,
    best: &mut u64,
    cap: usize,
    out: &mut Vec<BitSequence>,
    stats: &mut Stats,
) {
    stats.nodes += 1;
    if state.len == state.n {
        let v = state.bound();
        if v < *best {
            *best = v;
            out.clear();
        }
        if v == *best && out.len() < cap {
            out.push(state.sequence());
        }
        return;
    }
    for bit in [false, true] {
        state.push(bit);
        enumerate_all(state, best, cap, out, stats);
        state.pop();
    }
}

fn scaled_measure(e: &BitSequence, k_max: u32) -> u64 {
    let v = normality_fast(e).value;
    v.numerator_at(k_max).expect("denominator divides 2^K") as u64
}

/// Deterministic starting bound: hill-climbing by single bit flips from a
/// few seeded random sequences.
fn initial_bound(n: usize) -> u64 {
    let k_max = max_block_length(n);
    (0..8u64)
        .map(|start| {
            let mut e = random_bits(derive_seed(0x5EA4C4, start), n);
            let mut value = scaled_measure(&e, k_max);
            loop {
                let mut improved = false;
                for i in 0..n {
                    e.set(i, !e.bit(i));
                    let v = scaled_measure(&e, k_max);
                    if v < value {
                        value = v;
                        improved = true;
                    } else {
                        e.set(i, !e.bit(i));
                    }
                }
                if !improved {
                    break value;
                }
            }
        })
        .min()
        .unwrap()
}

fn task_prefixes(n: usize, depth: usize, first_zero: bool) -> Vec<u64> {
    let depth = depth.clamp(1, n);
    let all = 0..1u64 << depth;
    if first_zero {
        all.filter(|p| p >> (depth - 1) == 0).collect()
    } else {
        all.collect()
    }
}

fn replay(n: usize, prefix: u64, depth: usize) -> PrefixState {
    let mut state = PrefixState::new(n);
    for i in (0..depth).rev() {
        state.push((prefix >> i) & 1 == 1);
    }
    state
}

/// `min_{E in {0,1}^N} N(E)` with the default options and witness cap `cap`.
pub fn exhaustive_min(n: usize, cap: usize) -> Result<SearchResult> {
    exhaustive_min_with(
        n,
        SearchOptions {
            cap,
            ..SearchOptions::default()
        },
    )
}

pub fn exhaustive_min_with(n: usize, options: SearchOptions) -> Result<SearchResult> {
    if !(1..=MAX_SEARCH_LEN).contains(&n) {
        return Err(Error::SearchLength(n));
    }
    let k_max = max_block_length(n);
    let depth = options.split_depth.clamp(1, n);
    let mut stats = Stats::default();

    if !options.pruning {
        let mut best = u64::MAX;
        let mut witnesses = Vec::new();
        let mut state = PrefixState::new(n);
        enumerate_all(
            &mut state,
            &mut best,
            options.cap,
            &mut witnesses,
            &mut stats,
        );
        return Ok(SearchResult {
            n,
            min_value: ExactValue::new(best as i128, k_max),
            witnesses,
            nodes_visited: stats.nodes,
            pruned: 0,
        });
    }

    // Complementing every digit preserves all counts, so e_1 = 0 suffices.
    let prefixes = task_prefixes(n, depth, true);
    let start = initial_bound(n);
    let per_task: Vec<(Option<u64>, Stats)> = prefixes
        .par_iter()
        .map(|&prefix| {
            let mut stats = Stats::default();
            let mut state = replay(n, prefix, depth);
            let best = descend_min(&mut state, start, &mut stats);
            (best, stats)
        })
        .collect();
    let mut best = start;
    for (task_best, s) in per_task {
        if let Some(v) = task_best {
            best = best.min(v);
        }
        stats.nodes += s.nodes;
        stats.pruned += s.pruned;
    }

    let mut witnesses = Vec::new();
    for &prefix in &prefixes {
        if witnesses.len() >= options.cap {
            break;
        }
        let mut state = replay(n, prefix, depth);
        collect_witnesses(&mut state, best, options.cap, &mut witnesses, &mut stats);
    }
    if witnesses.len() < options.cap {
        let mut complements: Vec<BitSequence> = witnesses.iter().map(|w| w.complement()).collect();
        complements.reverse();
        complements.truncate(options.cap - witnesses.len());
        witnesses.extend(complements);
    }
    Ok(SearchResult {
        n,
        min_value: ExactValue::new(best as i128, k_max),
        witnesses,
        nodes_visited: stats.nodes,
        pruned: stats.pruned,
    })
}

/// Lower order statistics of `N(E)/sqrt(N)` over seeded random sequences.
/// The `q`-quantile is the sorted sample at position `floor(q·(n-1))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanStats {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub prng: &'static str,
    pub min: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
}

/// Exact measures of `samples` sequences, where sample `i` is
/// `random_bits(derive_seed(seed, i), n)`.
pub fn sample_measures(n: usize, samples: usize, seed: u64) -> Vec<ExactValue> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| normality_fast(&random_bits(derive_seed(seed, i), n)).value)
        .collect()
}

pub fn typical_scan(n: usize, samples: usize, seed: u64) -> Result<ScanStats> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let root = if n == 0 { 1.0 } else { (n as f64).sqrt() };
    let mut ratios: Vec<f64> = sample_measures(n, samples, seed)
        .iter()
        .map(|v| v.to_f64() / root)
        .collect();
    ratios.sort_by(f64::total_cmp);
    let quantile = |q: f64| ratios[(q * (samples - 1) as f64).floor() as usize];
    Ok(ScanStats {
        n,
        samples,
        seed,
        prng: PRNG_ALGORITHM,
        min: ratios[0],
        q05: quantile(0.05),
        q25: quantile(0.25),
        median: quantile(0.5),
        q75: quantile(0.75),
        q95: quantile(0.95),
        max: ratios[samples - 1],
    })
}

impl Serialize for SearchResult {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let witnesses: Vec<String> = self.witnesses.iter().map(|w| w.to_string()).collect();
        let mut s = serializer.serialize_struct("SearchResult", 7)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("min_num", &self.min_value.numerator())?;
        s.serialize_field("min_log2_den", &self.min_value.log2_denominator())?;
        s.serialize_field("min_decimal", &self.min_value.to_f64())?;
        s.serialize_field("witnesses", &witnesses)?;
        s.serialize_field("nodes_visited", &self.nodes_visited)?;
        s.serialize_field("pruned", &self.pruned)?;
        s.end()
    }
}

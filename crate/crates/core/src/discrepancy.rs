//! Exact extreme and star discrepancy of finite point sets in `[0, 1)`.
//!
//! Points share one denominator `q` (a power of two for orbit points). Every
//! internal quantity is scaled by `N·q`, so the deviation function
//!
//! ```text
//! h(t) = q·#{y_n < t} - N·q·t
//! ```
//!
//! takes integer values at the critical endpoints, and `N·q·D_N` is the spread
//! `max h - min h` over those endpoints.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::exact::{ExactValue, Rational};

/// A finite multiset of points `numerator / denominator` in `[0, 1)`, kept
/// in sequence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    numerators: Vec<u64>,
    denominator: u128,
}

impl PointSet {
    /// Points `a_i / q`; requires `1 <= q <= 2^64` and every `a_i < q`.
    pub fn with_denominator(numerators: Vec<u64>, denominator: u128) -> Result<Self> {
        if denominator == 0 || denominator > 1u128 << 64 {
            return Err(Error::DenominatorTooLarge(
                128 - denominator.leading_zeros(),
            ));
        }
        if let Some(&bad) = numerators.iter().find(|&&a| a as u128 >= denominator) {
            return Err(Error::PointOutOfRange(format!("{bad}/{denominator}")));
        }
        Ok(PointSet {
            numerators,
            denominator,
        })
    }

    /// Points `a_i / 2^w` with `w <= 64`.
    pub fn dyadic(numerators: Vec<u64>, w: u32) -> Result<Self> {
        if w > 64 {
            return Err(Error::DenominatorTooLarge(w));
        }
        Self::with_denominator(numerators, 1u128 << w)
    }

    /// Rescales exact dyadic points to their largest common exponent.
    pub fn from_exact(points: &[ExactValue]) -> Result<Self> {
        let w = points
            .iter()
            .map(|p| p.log2_denominator())
            .max()
            .unwrap_or(0);
        if w > 64 {
            return Err(Error::DenominatorTooLarge(w));
        }
        let one = ExactValue::from_int(1);
        let numerators = points
            .iter()
            .map(|p| {
                if *p < ExactValue::ZERO || *p >= one {
                    return Err(Error::PointOutOfRange(p.to_string()));
                }
                Ok(p.numerator_at(w).expect("w is the maximal exponent") as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::dyadic(numerators, w)
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u128 {
        self.denominator
    }

    /// `log2 q` when the denominator is a power of two.
    pub fn log2_denominator(&self) -> Option<u32> {
        (self.denominator.count_ones() == 1).then(|| self.denominator.trailing_zeros())
    }

    pub fn point(&self, i: usize) -> Rational {
        Rational::new(self.numerators[i] as i128, self.denominator as i128)
    }

    /// The first `m` points.
    pub fn prefix(&self, m: usize) -> PointSet {
        PointSet {
            numerators: self.numerators[..m].to_vec(),
            denominator: self.denominator,
        }
    }

    fn scale(&self) -> i128 {
        self.denominator as i128
    }
}

/// Parses one point per line as `num/2^w`; blank lines and `#` comments are
/// skipped.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let points = text
        .lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            if !l.contains("/2^") && l.contains('/') {
                return Err(Error::MalformedPoint(l.to_string()));
            }
            l.parse::<ExactValue>()
        })
        .collect::<Result<Vec<_>>>()?;
    PointSet::from_exact(&points)
}

/// Which one-sided value of the counting function an endpoint carries.
/// At a point value `v`, `LeftLimit` counts the points strictly below `v` and
/// is attained at `t = v` itself; `RightLimit` also counts the points equal
/// to `v` and is approached from above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    LeftLimit,
    RightLimit,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::LeftLimit => "left-limit",
            Side::RightLimit => "right-limit",
        }
    }
}

/// An interval endpoint `value` with its one-sided annotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub value: Rational,
    pub side: Side,
}

impl Endpoint {
    fn at(num: u128, den: u128, side: Side) -> Self {
        Endpoint {
            value: Rational::new(num as i128, den as i128),
            side,
        }
    }
}

impl Ord for Endpoint {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.value, self.side).cmp(&(other.value, other.side))
    }
}

impl PartialOrd for Endpoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({})",
            render_rational(&self.value),
            self.side.as_str()
        )
    }
}

fn render_rational(r: &Rational) -> String {
    match r.to_exact() {
        Some(e) => e.to_string(),
        None => r.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub extreme: Rational,
    pub star: Rational,
    /// Interval `[a, b)` whose deviation equals `extreme`, possibly as a limit.
    pub witness_a: Endpoint,
    pub witness_b: Endpoint,
}

impl DiscrepancyReport {
    /// `N·D_N`, the worst count deviation `|A([a,b)) - N(b-a)|`.
    pub fn scaled_extreme(&self) -> Rational {
        self.extreme
            .checked_mul_int(self.n as i128)
            .expect("N·D_N overflow")
    }
}

/// One-pass evaluation of `h` at every critical endpoint of a sorted
/// multiset. Yields `(endpoint numerator, side, h)` in increasing order.
fn deviation_profile(sorted: &[u64], q: i128) -> Vec<(u128, Side, i128)> {
    let n = sorted.len() as i128;
    let mut out = Vec::with_capacity(2 * sorted.len() + 2);
    out.push((0, Side::LeftLimit, 0));
    let mut below = 0i128;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let mult = (j - i) as i128;
        let shift = n * v as i128;
        if v != 0 {
            out.push((v as u128, Side::LeftLimit, below * q - shift));
        }
        out.push((v as u128, Side::RightLimit, (below + mult) * q - shift));
        below += mult;
        i = j;
    }
    // t = 1: every point lies below, h(1) = N·q - N·q.
    out.push((q as u128, Side::LeftLimit, 0));
    out
}

/// `D_N` and `D_N*` in `O(N log N)`.
pub fn extreme_discrepancy(p: &PointSet) -> Result<DiscrepancyReport> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let q = p.scale();
    let mut sorted = p.numerators.clone();
    sorted.sort_unstable();
    let profile = deviation_profile(&sorted, q);
    let mut hi = profile[0];
    let mut lo = profile[0];
    for &entry in &profile[1..] {
        if entry.2 > hi.2 {
            hi = entry;
        }
        if entry.2 < lo.2 {
            lo = entry;
        }
    }
    let n = p.len() as i128;
    let scale = n * q;
    let endpoint = |e: (u128, Side, i128)| Endpoint::at(e.0, q as u128, e.1);
    let (a, b) = if (hi.0, hi.1) < (lo.0, lo.1) {
        (endpoint(hi), endpoint(lo))
    } else {
        (endpoint(lo), endpoint(hi))
    };
    Ok(DiscrepancyReport {
        n: p.len(),
        extreme: Rational::new(hi.2 - lo.2, scale),
        star: Rational::new(hi.2.max(-lo.2), scale),
        witness_a: a,
        witness_b: b,
    })
}

/// Critical endpoints with directly counted `#{y < t}` (or `<=` for right
/// limits), in increasing order. Shared by both reference routines.
fn reference_endpoints(p: &PointSet) -> Vec<(u128, i128)> {
    let q = p.denominator;
    let mut values: Vec<u64> = p.numerators.clone();
    values.sort_unstable();
    values.dedup();
    let mut endpoints = vec![(0u128, Side::LeftLimit)];
    for &v in &values {
        if v != 0 {
            endpoints.push((v as u128, Side::LeftLimit));
        }
        endpoints.push((v as u128, Side::RightLimit));
    }
    endpoints.push((q, Side::LeftLimit));
    endpoints
        .into_iter()
        .map(|(t, side)| {
            let count = p
                .numerators
                .iter()
                .filter(|&&y| match side {
                    Side::LeftLimit => (y as u128) < t,
                    Side::RightLimit => (y as u128) <= t,
                })
                .count();
            (t, count as i128)
        })
        .collect()
}

/// `O(N^2)` enumeration of every ordered pair of critical endpoints; the
/// ground truth for [`extreme_discrepancy`].
pub fn extreme_discrepancy_reference(p: &PointSet) -> Result<Rational> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let q = p.scale();
    let n = p.len() as i128;
    let endpoints = reference_endpoints(p);
    let mut best = 0i128;
    for (i, &(a, count_a)) in endpoints.iter().enumerate() {
        for &(b, count_b) in &endpoints[i + 1..] {
            let dev = ((count_b - count_a) * q - n * (b - a) as i128).abs();
            best = best.max(dev);
        }
    }
    Ok(Rational::new(best, n * q))
}

/// Anchored (`a = 0`) counterpart of [`extreme_discrepancy_reference`].
pub fn star_discrepancy_reference(p: &PointSet) -> Result<Rational> {
    if p.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let q = p.scale();
    let n = p.len() as i128;
    let best = reference_endpoints(p)
        .iter()
        .map(|&(b, count)| (count * q - n * b as i128).abs())
        .max()
        .unwrap();
    Ok(Rational::new(best, n * q))
}

/// Count deviation of the explicit interval `[a, b)` given as numerators over
/// the point-set denominator: `|A([a,b)) - N(b-a)|`, scaled by `q`.
pub fn interval_deviation(p: &PointSet, a: u128, b: u128) -> Rational {
    let q = p.scale();
    let inside = p
        .numerators
        .iter()
        .filter(|&&y| a <= y as u128 && (y as u128) < b)
        .count() as i128;
    let n = p.len() as i128;
    Rational::new((inside * q - n * (b as i128 - a as i128)).abs(), n * q)
}

/// Convex hulls over one block of distinct values, rebuilt after each
/// insertion into the block.
struct Block {
    start: usize,
    /// Points inserted at indices before this block.
    offset: i128,
    /// Per index: inserted points in this block at or before it.
    at_or_below: Vec<i128>,
    /// Per index: inserted points in this block strictly before it.
    below: Vec<i128>,
    active: Vec<bool>,
    upper: Vec<(i128, i128)>,
    lower: Vec<(i128, i128)>,
}

fn cross(o: (i128, i128), a: (i128, i128), b: (i128, i128)) -> i128 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl Block {
    fn rebuild(&mut self, values: &[u64]) {
        self.upper.clear();
        self.lower.clear();
        for i in 0..self.active.len() {
            if !self.active[i] {
                continue;
            }
            let x = values[self.start + i] as i128;
            let up = (x, self.at_or_below[i]);
            while self.upper.len() >= 2
                && cross(
                    self.upper[self.upper.len() - 2],
                    self.upper[self.upper.len() - 1],
                    up,
                ) >= 0
            {
                self.upper.pop();
            }
            self.upper.push(up);
            let down = (x, self.below[i]);
            while self.lower.len() >= 2
                && cross(
                    self.lower[self.lower.len() - 2],
                    self.lower[self.lower.len() - 1],
                    down,
                ) <= 0
            {
                self.lower.pop();
            }
            self.lower.push(down);
        }
    }

    /// `max (offset + count)·q - m·x` over the upper hull.
    fn max_deviation(&self, q: i128, m: i128) -> Option<i128> {
        let f = |pt: (i128, i128)| pt.1 * q - m * pt.0;
        let hull = &self.upper;
        if hull.is_empty() {
            return None;
        }
        let (mut lo, mut hi) = (0, hull.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if f(hull[mid + 1]) > f(hull[mid]) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Some(f(hull[lo]) + self.offset * q)
    }

    /// `min (offset + count)·q - m·x` over the lower hull.
    fn min_deviation(&self, q: i128, m: i128) -> Option<i128> {
        let f = |pt: (i128, i128)| pt.1 * q - m * pt.0;
        let hull = &self.lower;
        if hull.is_empty() {
            return None;
        }
        let (mut lo, mut hi) = (0, hull.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if f(hull[mid + 1]) < f(hull[mid]) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Some(f(hull[lo]) + self.offset * q)
    }
}

/// `M·q·D_M` for every prefix `M = 1..=N`, as exact integers.
///
/// Points are inserted in sequence order into a square-root decomposition of
/// the sorted distinct values. Each block keeps the upper hull of
/// `(x, #{y <= x})` and the lower hull of `(x, #{y < x})` over its inserted
/// values, so the extremes of `h` for prefix `M` are hull queries with slope
/// `M`. Total cost is `O(N sqrt(N) log N)`.
pub fn prefix_scaled_extremes(p: &PointSet) -> Vec<i128> {
    if p.is_empty() {
        return Vec::new();
    }
    let q = p.scale();
    let mut values = p.numerators.clone();
    values.sort_unstable();
    values.dedup();
    let k = values.len();
    let block_len = ((k as f64).sqrt() as usize).max(16);
    let mut blocks: Vec<Block> = (0..k)
        .step_by(block_len)
        .map(|start| {
            let len = block_len.min(k - start);
            Block {
                start,
                offset: 0,
                at_or_below: vec![0; len],
                below: vec![0; len],
                active: vec![false; len],
                upper: Vec::new(),
                lower: Vec::new(),
            }
        })
        .collect();
    let mut out = Vec::with_capacity(p.len());
    for (step, &y) in p.numerators.iter().enumerate() {
        let idx = values.binary_search(&y).expect("value indexed");
        let b = idx / block_len;
        let local = idx - blocks[b].start;
        {
            let block = &mut blocks[b];
            for i in local..block.active.len() {
                block.at_or_below[i] += 1;
                if i > local {
                    block.below[i] += 1;
                }
            }
            block.active[local] = true;
            block.rebuild(&values);
        }
        for later in &mut blocks[b + 1..] {
            later.offset += 1;
        }
        let m = step as i128 + 1;
        let (mut hi, mut lo) = (0i128, 0i128);
        for block in &blocks {
            if let Some(v) = block.max_deviation(q, m) {
                hi = hi.max(v);
            }
            if let Some(v) = block.min_deviation(q, m) {
                lo = lo.min(v);
            }
        }
        out.push(hi - lo);
    }
    out
}

/// `D_1, ..., D_N` for the prefixes of `p` in sequence order.
pub fn prefix_discrepancies(p: &PointSet) -> Vec<Rational> {
    let q = p.scale();
    prefix_scaled_extremes(p)
        .into_iter()
        .enumerate()
        .map(|(i, s)| Rational::new(s, (i as i128 + 1) * q))
        .collect()
}

/// Prefix discrepancies by a full recomputation per prefix, `O(N^2 log N)`.
pub fn prefix_discrepancies_recompute(p: &PointSet) -> Vec<Rational> {
    (1..=p.len())
        .map(|m| {
            extreme_discrepancy(&p.prefix(m))
                .expect("nonempty prefix")
                .extreme
        })
        .collect()
}

/// `Φ(1), ..., Φ(N)`: the least nondecreasing sequence with `Φ(M) >= M·D_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiEnvelope {
    pub values: Vec<Rational>,
}

impl PhiEnvelope {
    /// `Φ(m)` for `1 <= m <= N`.
    pub fn at(&self, m: usize) -> Rational {
        self.values[m - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Running maximum of `m·D_m`.
pub fn phi_envelope(prefix_ds: &[Rational]) -> PhiEnvelope {
    let mut running: Option<Rational> = None;
    let values = prefix_ds
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let scaled = d
                .checked_mul_int(i as i128 + 1)
                .expect("overflow scaling D_m by m");
            let next = running.map_or(scaled, |r| r.max(scaled));
            running = Some(next);
            next
        })
        .collect();
    PhiEnvelope { values }
}

impl Serialize for DiscrepancyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct WitnessOut {
            a: String,
            b: String,
            a_side: &'static str,
            b_side: &'static str,
        }
        let log2 = |r: &Rational| r.to_exact().map(|e| e.log2_denominator());
        let mut s = serializer.serialize_struct("DiscrepancyReport", 10)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("extreme_num", &self.extreme.numerator())?;
        s.serialize_field("extreme_den", &self.extreme.denominator())?;
        s.serialize_field("extreme_log2_den", &log2(&self.extreme))?;
        s.serialize_field("extreme_decimal", &self.extreme.to_f64())?;
        s.serialize_field("star_num", &self.star.numerator())?;
        s.serialize_field("star_den", &self.star.denominator())?;
        s.serialize_field("star_log2_den", &log2(&self.star))?;
        s.serialize_field("star_decimal", &self.star.to_f64())?;
        s.serialize_field(
            "witness",
            &WitnessOut {
                a: render_rational(&self.witness_a.value),
                b: render_rational(&self.witness_b.value),
                a_side: self.witness_a.side.as_str(),
                b_side: self.witness_b.side.as_str(),
            },
        )?;
        s.end()
    }
}

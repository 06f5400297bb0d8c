//! Exact normality measure of finite binary sequences, exact discrepancy of
//! the binary-shift orbit of a digit expansion, and a verifier for the bound
//! linking the two.
//!
//! All quantities that feed a decision are exact: dyadic values use
//! [`ExactValue`], discrepancies with their `1/N` factor use [`Rational`].

pub mod bits;
pub mod discrepancy;
pub mod error;
pub mod exact;
pub mod generators;
pub mod measure;
pub mod orbit;
pub mod pattern;
pub mod search;

pub use bits::{format_bits, parse_bits, BitSequence};
pub use discrepancy::{
    extreme_discrepancy, extreme_discrepancy_reference, parse_points, phi_envelope,
    prefix_discrepancies, prefix_scaled_extremes, DiscrepancyReport, Endpoint, PhiEnvelope,
    PointSet, Side,
};
pub use error::{Error, Result};
pub use exact::{ExactValue, Rational};
pub use generators::{
    champernowne_bits, derive_seed, random_bits, rational_bits, DigitSource, DigitStream,
    GeneratorSpec, PRNG_ALGORITHM,
};
pub use measure::{
    count_occurrences, max_block_length, normality_fast, normality_fast_parallel, normality_naive,
    NormalityReport, Witness,
};
pub use orbit::{
    count_via_orbit, default_checkpoints, lemma1_verify, orbit_points, CheckpointResult,
    VerificationReport, DEFAULT_WINDOW_BITS,
};
pub use pattern::{interval_contains, pattern_to_interval, DyadicInterval, Pattern};
pub use search::{
    exhaustive_min, exhaustive_min_with, sample_measures, typical_scan, ScanStats, SearchOptions,
    SearchResult,
};

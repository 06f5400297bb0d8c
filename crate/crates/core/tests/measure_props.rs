use normality::{
    count_occurrences, max_block_length, normality_fast, normality_naive, random_bits, BitSequence,
    ExactValue,
};
use proptest::prelude::*;

fn bits_strategy(max_len: usize) -> impl Strategy<Value = BitSequence> {
    prop::collection::vec(any::<bool>(), 0..=max_len).prop_map(|v| v.into_iter().collect())
}

fn zeros_closed_form(n: usize) -> ExactValue {
    (1..=max_block_length(n))
        .map(|k| {
            // (N+1-k)(1-2^-k) = (N+1-k)(2^k-1)/2^k
            let num = (n as i128 + 1 - k as i128) * ((1i128 << k) - 1);
            ExactValue::new(num, k)
        })
        .max()
        .unwrap_or(ExactValue::ZERO)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fast_matches_naive(e in bits_strategy(300)) {
        prop_assert_eq!(normality_fast(&e), normality_naive(&e));
    }

    #[test]
    fn complement_invariance(e in bits_strategy(500)) {
        prop_assert_eq!(normality_fast(&e).value, normality_fast(&e.complement()).value);
    }

    #[test]
    fn value_is_bounded_by_length(e in bits_strategy(500)) {
        let v = normality_fast(&e).value;
        prop_assert!(v >= ExactValue::ZERO);
        prop_assert!(v <= ExactValue::from_int(e.len() as i128));
    }

    #[test]
    fn witness_reproduces_value(e in bits_strategy(500)) {
        let report = normality_fast(&e);
        if let Some(w) = report.witness {
            prop_assert!(w.k >= 1 && w.k <= max_block_length(e.len()));
            prop_assert!(w.m >= 1 && w.m <= e.len() + 1 - w.k as usize);
            prop_assert_eq!(count_occurrences(&e, w.m, w.pattern).unwrap(), w.t);
            prop_assert_eq!(w.deviation(), report.value);
        } else {
            prop_assert!(e.len() <= 1);
        }
    }

    #[test]
    fn per_k_max_attains_value(e in bits_strategy(400)) {
        let report = normality_fast(&e);
        let best = report.per_k_max.iter().map(|&(_, v)| v).max().unwrap_or(ExactValue::ZERO);
        prop_assert_eq!(best, report.value);
    }

    #[test]
    fn nondecreasing_on_power_of_two_prefixes(seed in any::<u64>()) {
        // Within one block-length range the admissible triples only grow.
        let e = random_bits(seed, 512);
        for lo in [2usize, 4, 8, 16, 32, 64, 128, 256] {
            let a = normality_fast(&e.prefix(lo)).value;
            let b = normality_fast(&e.prefix(2 * lo - 1)).value;
            prop_assert!(a <= b);
        }
    }
}

#[test]
fn all_zero_sequences_follow_closed_form() {
    for n in 2..=600usize {
        let e = BitSequence::zeros(n);
        assert_eq!(normality_fast(&e).value, zeros_closed_form(n), "N = {n}");
    }
    assert_eq!(zeros_closed_form(8), ExactValue::new(21, 2));
}

#[test]
fn short_sequences_are_trivial() {
    for text in ["", "0", "1"] {
        let e: BitSequence = text.parse().unwrap();
        let r = normality_fast(&e);
        assert_eq!(r.value, ExactValue::ZERO);
        assert!(r.witness.is_none());
    }
}

use normality::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prefixes_are_coherent(seed in any::<u64>(), a in 0usize..700, b in 0usize..700) {
        let (short, long) = if a <= b { (a, b) } else { (b, a) };
        prop_assert_eq!(random_bits(seed, short), random_bits(seed, long).prefix(short));
        prop_assert_eq!(champernowne_bits(short), champernowne_bits(long).prefix(short));
        prop_assert_eq!(rational_bits(5, 7, short).unwrap(), rational_bits(5, 7, long).unwrap().prefix(short));
    }

    #[test]
    fn rational_digits_are_eventually_periodic(q in 1u64..=64, p in 0u64..64) {
        let p = p % q;
        // The remainder sequence repeats within q steps, so the expansion
        // has pre-period plus period at most q.
        let e = rational_bits(p, q, 4 * 64 + 8).unwrap();
        let found = (0..=64usize).any(|start| {
            (1..=64usize).any(|period| {
                (start..start + 2 * 64).all(|i| e.bit(i) == e.bit(i + period))
            })
        });
        prop_assert!(found);
    }

    #[test]
    fn spec_round_trips(seed in any::<u64>(), p in 0u64..1000, q in 1u64..1000) {
        for spec in [GeneratorSpec::Random { seed }, GeneratorSpec::Rational { p: p % q, q }] {
            let text = spec.to_string();
            prop_assert_eq!(text.parse::<GeneratorSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn derived_seeds_differ(seed in any::<u64>(), i in 0u64..1000) {
        prop_assert_ne!(derive_seed(seed, i), derive_seed(seed, i + 1));
    }
}

#[test]
fn champernowne_prefix_and_balance() {
    assert_eq!(champernowne_bits(12).to_string(), "110111001011");
    let e = champernowne_bits(1 << 16);
    let ratio = e.count_ones() as f64 / e.len() as f64;
    assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn known_rational_expansions() {
    assert_eq!(rational_bits(1, 3, 8).unwrap().to_string(), "01010101");
    assert_eq!(rational_bits(5, 7, 9).unwrap().to_string(), "101101101");
    assert_eq!(rational_bits(1, 2, 4).unwrap().to_string(), "1000");
    assert!(rational_bits(3, 3, 4).is_err());
    assert!(rational_bits(1, 0, 4).is_err());
}

#[test]
fn random_golden_prefix() {
    assert_eq!(random_bits(1, 8).to_string(), "01100111");
    assert_eq!(
        random_bits(1, 64).to_hex_string(),
        "hex:67094cea8ca40db1/64"
    );
}

#[test]
fn bad_specs_are_rejected() {
    for text in [
        "",
        "rational:1",
        "rational:1/0",
        "random:x",
        "lehmer",
        "rational:4/3",
    ] {
        assert!(text.parse::<GeneratorSpec>().is_err(), "{text}");
    }
}

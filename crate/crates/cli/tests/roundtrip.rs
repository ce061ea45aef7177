use hocolim::corpus::{self, random_complex};
use hocolim::{ChainComplex, Int};
use hocolim_cli::workspace::{int_from_json, int_to_json};
use hocolim_cli::Workspace;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn integers_round_trip(v in any::<i128>()) {
        let x = Int::from(v);
        let j = int_to_json(&x);
        prop_assert_eq!(j.is_string(), v.unsigned_abs() >= 1u128 << 53);
        prop_assert_eq!(int_from_json(&j, "x").unwrap(), x);
    }

    #[test]
    fn complexes_round_trip_canonically(seed in any::<u64>(), k in 1i64..1 << 40) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 4, 0, 3);
        let s = Int::from(k).pow(2);
        let groups = x.degrees().map(|n| x.group(n).clone()).collect();
        let big = ChainComplex::from_parts(x.lo(), groups, |n| x.d(n).scale(&s));
        let mut ws = Workspace::default();
        ws.add_complex("x", &x);
        ws.add_complex("big", &big);
        let text = ws.to_canonical_string();
        let back = Workspace::parse(&text).unwrap();
        prop_assert_eq!(back.complexes.get("x"), Some(&x));
        prop_assert_eq!(back.to_canonical_string(), text);
    }

    #[test]
    fn categories_and_diagrams_round_trip(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let shapes = corpus::categories();
        let (name, cat) = &shapes[(seed % shapes.len() as u64) as usize];
        let x = corpus::random_free_diagram(&mut r, cat);
        let mut ws = Workspace::default();
        ws.add_category(name, cat);
        ws.add_diagram("X", name, &x).unwrap();
        prop_assert!(ws.validate().is_empty());
        let text = ws.to_canonical_string();
        let back = Workspace::parse(&text).unwrap();
        prop_assert!(back.validate().is_empty());
        prop_assert!(back.diagrams["X"].diagram.same_as(&x));
        prop_assert_eq!(back.to_canonical_string(), text);
    }
}

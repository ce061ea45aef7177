use hocolim::chainz::{self, homology, pushout, tensor};
use hocolim::corpus::{self, random_chain_map, random_complex};
use hocolim::{ChainComplex, ChainMap};
use proptest::prelude::*;

fn euler(c: &ChainComplex) -> i64 {
    c.degrees().map(|n| if n % 2 == 0 { c.gens(n) as i64 } else { -(c.gens(n) as i64) }).sum()
}

fn homology_euler(c: &ChainComplex) -> i64 {
    homology(c).groups.iter().map(|(n, g)| if n % 2 == 0 { g.rank as i64 } else { -(g.rank as i64) }).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_characteristic_matches_homology(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 4, 0, 3);
        prop_assert!(x.validate().is_ok());
        prop_assert_eq!(euler(&x), homology_euler(&x));
    }

    #[test]
    fn tensor_is_multiplicative_on_euler_characteristic(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 3, 0, 2);
        let y = random_complex(&mut r, 3, 0, 2);
        let t = tensor(&x, &y);
        prop_assert!(t.validate().is_ok());
        prop_assert_eq!(homology_euler(&t), euler(&x) * euler(&y));
    }

    #[test]
    fn random_maps_are_chain_maps(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 4, 0, 3);
        let y = random_complex(&mut r, 4, 0, 3);
        let f = random_chain_map(&mut r, &x, &y);
        prop_assert!(f.validate().is_ok());
        if f.is_weak_equivalence() {
            prop_assert_eq!(homology(&x), homology(&y));
        }
    }

    #[test]
    fn factorization_is_cofibration_then_weak_equivalence(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 4, 0, 3);
        let y = random_complex(&mut r, 4, 0, 3);
        let f = random_chain_map(&mut r, &x, &y);
        let fac = chainz::factorize(&f).unwrap();
        prop_assert!(fac.g.is_cofibration());
        prop_assert!(fac.h.is_weak_equivalence());
        prop_assert!(fac.g.then(&fac.h).equals_mod_relations(&f));
    }

    #[test]
    fn two_out_of_three_on_composites(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 4, 0, 3);
        let (i, p) = corpus::disk_inclusion(&mut r, &x);
        let (j, q) = corpus::disk_inclusion(&mut r, i.tgt());
        prop_assert!(i.is_weak_equivalence() && j.is_weak_equivalence());
        prop_assert!(i.then(&j).is_weak_equivalence());
        prop_assert!(q.then(&p).is_weak_equivalence());
        prop_assert!(i.then(&p).equals_mod_relations(&ChainMap::identity(&x)));
    }

    #[test]
    fn pushouts_preserve_cofibrations_and_acyclicity(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 3, 0, 3);
        let y = random_complex(&mut r, 3, 0, 3);
        let (i, _) = corpus::disk_inclusion(&mut r, &x);
        let f = random_chain_map(&mut r, &x, &y);
        let (p, f2, i2) = pushout(&i, &f);
        prop_assert!(p.validate().is_ok());
        prop_assert!(i2.is_cofibration() && i2.is_weak_equivalence());
        prop_assert!(i.then(&f2).equals_mod_relations(&f.then(&i2)));
    }

    #[test]
    fn sphere_inclusions_are_cofibrations_but_not_equivalences(seed in any::<u64>()) {
        let mut r = corpus::rng(seed);
        let x = random_complex(&mut r, 4, 0, 3);
        let s = corpus::sphere_inclusion(&mut r, &x);
        prop_assert!(s.is_cofibration());
        prop_assert!(!s.is_weak_equivalence());
    }
}

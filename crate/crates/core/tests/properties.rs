mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn returned_witnesses_are_zero_sum_subsequences(s in small_sequence(12)) {
        check_witnesses(&s)?;
    }

    #[test]
    fn sumset_dp_agrees_with_enumeration(s in small_sequence(12)) {
        check_sumset(&s)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_grow_with_r(g in small_group()) {
        check_monotone(&g, 3)?;
    }

    #[test]
    fn davenport_between_structural_bound_and_eta(g in small_group()) {
        check_sandwich(&g)?;
    }
}

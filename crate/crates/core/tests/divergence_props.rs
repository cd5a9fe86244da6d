mod common;

use common::props;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn geometric_renyi_is_monotone_in_alpha(seed in any::<u64>()) {
        let r = props::alpha_monotone(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn data_processing_holds(seed in any::<u64>()) {
        let r = props::data_processing(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn channel_divergence_is_additive(seed in any::<u64>()) {
        let r = props::tensor_additivity(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn bs_splits_over_flags(seed in any::<u64>()) {
        let r = props::direct_sum(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn alpha_near_one_approaches_bs(seed in any::<u64>()) {
        let r = props::alpha_to_one(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn alpha_near_zero_approaches_min_geo(seed in any::<u64>()) {
        let r = props::alpha_to_zero(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn chain_rule_on_classical_channels(seed in any::<u64>()) {
        let r = props::chain_rule_classical(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}

use proptest::prelude::*;

use srti_core::encoding::{emit_program, expected_facts, parse_facts, validate_program};
use srti_core::generator::{attach_random_criteria, generate_srti_with_ties, CriteriaOptions};
use srti_core::personalization::{
    choice_acceptable_set, derived_compare, derived_pref_list, sorted_profile, DerivedComparison,
};
use srti_core::stability::is_blocking_pair;
use srti_core::{
    completeness_degree, oracle, parse_instance, personalize_instance, serialize_instance, solve, Instance,
    ObjectiveConfig, ObjectiveLevel, Outcome, SolveConfig,
};

fn instance(n: usize, p: f64, ties: f64, m: usize, seed: u64) -> Instance {
    let inst = generate_srti_with_ties(n, p, ties, seed).unwrap();
    let opts = CriteriaOptions {
        departments: Some(2),
        ..CriteriaOptions::new(m)
    };
    attach_random_criteria(&inst, &opts, seed).unwrap()
}

/// Pairwise reading of the derived order: walk the sorted profile while
/// both candidates fully match each level; at the first level where that
/// fails, more matched entries wins.
fn literal_prefers(inst: &Instance, x: usize, y: usize, z: usize) -> bool {
    let spec = inst.criteria().unwrap();
    let profiles = inst.profiles().unwrap();
    let levels = sorted_profile(spec, &profiles[x]).levels;
    for level in &levels {
        let hits = |a: usize| {
            level
                .entries
                .iter()
                .filter(|&&(c, i)| profiles[a].choices[i] == c)
                .count()
        };
        let (hy, hz) = (hits(y), hits(z));
        if hy > hz {
            return true;
        }
        let full = level.entries.len();
        if !(hy == full && hz == full) {
            return false;
        }
    }
    false
}

fn strategy() -> impl Strategy<Value = (usize, f64, f64, usize, u64)> {
    (
        4usize..=8,
        prop::sample::select(vec![0.25, 0.5, 1.0]),
        prop::sample::select(vec![0.0, 0.3]),
        0usize..=3,
        any::<u64>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decision_agrees_with_oracle((n, p, ties, m, seed) in strategy()) {
        let mut inst = instance(n, p, ties, m, seed);
        if m > 0 && seed % 2 == 0 {
            inst = personalize_instance(&inst).unwrap();
        }
        let stable = oracle::brute_force_stable(&inst).unwrap();
        let r = solve(&inst, &SolveConfig::decision()).unwrap();
        match r.outcome {
            Outcome::Solution { matching, .. } => {
                prop_assert!(!stable.is_empty());
                prop_assert!(oracle::is_stable(&inst, &matching));
                prop_assert!(srti_core::is_stable(&inst, &matching));
            }
            Outcome::Unsat => prop_assert!(stable.is_empty()),
            Outcome::Timeout { .. } => prop_assert!(false, "no time limit was set"),
        }
    }

    #[test]
    fn optimum_agrees_with_oracle((n, p, ties, m, seed) in strategy()) {
        let inst = instance(n, p, ties, m.max(1), seed);
        let mut levels = vec![ObjectiveLevel::Diversity, ObjectiveLevel::Smoking];
        levels.extend(ObjectiveConfig::from_priority(inst.criteria().unwrap()).levels);
        let cfg = ObjectiveConfig::new(levels);
        let filtered = oracle::brute_force_optimum(&inst, &cfg).unwrap().map(|(_, v)| v);
        prop_assert_eq!(&filtered, &oracle::lexicographic_minimum(&inst, &cfg).unwrap());
        let r = solve(&inst, &SolveConfig::optimize(Some(cfg))).unwrap();
        prop_assert_eq!(r.matching().map(|(_, v)| v.clone()), filtered);
    }

    #[test]
    fn blocking_is_symmetric((n, p, ties, m, seed) in strategy()) {
        let inst = instance(n, p, ties, m, seed);
        for mt in oracle::enumerate_matchings(&inst).unwrap().take(50) {
            for x in 0..n {
                for y in 0..n {
                    prop_assert_eq!(is_blocking_pair(&inst, &mt, x, y), is_blocking_pair(&inst, &mt, y, x));
                    prop_assert_eq!(is_blocking_pair(&inst, &mt, x, y), oracle::blocks(&inst, &mt, x, y));
                }
            }
        }
    }

    #[test]
    fn derived_order_matches_pairwise_definition(n in 3usize..10, m in 1usize..=5, seed in any::<u64>()) {
        let inst = instance(n, 0.3, 0.0, m, seed);
        for x in 0..n {
            let cands = choice_acceptable_set(&inst, x).unwrap();
            let order = derived_pref_list(&inst, x).unwrap();
            prop_assert_eq!(order.len(), cands.len());
            for &y in &cands {
                for &z in &cands {
                    let want = match (literal_prefers(&inst, x, y, z), literal_prefers(&inst, x, z, y)) {
                        (true, false) => DerivedComparison::PrefersFirst,
                        (false, true) => DerivedComparison::PrefersSecond,
                        (false, false) => DerivedComparison::Tie,
                        (true, true) => unreachable!("asymmetric by construction"),
                    };
                    prop_assert_eq!(derived_compare(&inst, x, y, z).unwrap(), want);
                    let tier = |a| order.tier_of(a).unwrap();
                    prop_assert_eq!(tier(y) < tier(z), want == DerivedComparison::PrefersFirst);
                    prop_assert_eq!(tier(y) == tier(z), want == DerivedComparison::Tie);
                }
            }
        }
    }

    #[test]
    fn personalization_grows_lists_and_is_idempotent(n in 2usize..20, p in 0.0f64..=1.0, m in 1usize..=5, seed in any::<u64>()) {
        let inst = instance(n, p, 0.0, m, seed);
        let once = personalize_instance(&inst).unwrap();
        prop_assert!(completeness_degree(&once).unwrap() >= completeness_degree(&inst).unwrap());
        for x in 0..n {
            let before = inst.preferences(x).tiers();
            prop_assert_eq!(&once.preferences(x).tiers()[..before.len()], before);
        }
        prop_assert_eq!(personalize_instance(&once).unwrap(), once);
    }

    #[test]
    fn documents_round_trip((n, p, ties, m, seed) in strategy()) {
        let inst = instance(n, p, ties, m, seed);
        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn encodings_validate_and_round_trip((n, p, ties, m, seed) in strategy()) {
        let inst = instance(n, p, ties, m.max(1), seed);
        let mut cfg = ObjectiveConfig::from_priority(inst.criteria().unwrap());
        cfg.levels.insert(0, ObjectiveLevel::Smoking);
        cfg.levels.push(ObjectiveLevel::Diversity);
        let text = emit_program(&inst, &cfg).unwrap();
        let summary = validate_program(&text).unwrap();
        let want: Vec<i64> = (1..=cfg.len() as i64).rev().collect();
        prop_assert_eq!(summary.weak_levels, want);
        prop_assert_eq!(parse_facts(&text).unwrap(), expected_facts(&inst));
    }
}

use super::*;
use crate::document::parse_instance;
use crate::generator::{attach_random_criteria, generate_srti, generate_srti_with_ties, CriteriaOptions};
use crate::instance::{AgentId, InstanceParts, PreferenceOrder};
use crate::oracle;
use crate::personalization::personalize_instance;

fn fixture() -> Instance {
    parse_instance(include_str!("../../../../data/roommates4.json")).unwrap()
}

fn strict(lists: Vec<Vec<usize>>) -> Instance {
    let agents = (0..lists.len()).map(|i| AgentId::new(format!("a{i}")).unwrap()).collect();
    let mut parts = InstanceParts::new(agents);
    parts.preferences = lists.into_iter().map(PreferenceOrder::strict).collect();
    Instance::new(parts).unwrap()
}

fn solution(r: &SolveResult) -> (&Matching, &ObjectiveVector) {
    match &r.outcome {
        Outcome::Solution { matching, objective, .. } => (matching, objective),
        other => panic!("expected a solution, got {other:?}"),
    }
}

#[test]
fn odd_cycle_is_unsat() {
    let inst = strict(vec![vec![1, 2], vec![2, 0], vec![0, 1]]);
    let r = solve_decision(&inst, &SolveConfig::decision()).unwrap();
    assert_eq!(r.outcome, Outcome::Unsat);
    assert!(r.events.is_empty());
}

#[test]
fn no_edges_means_everyone_single() {
    let inst = strict(vec![vec![], vec![], vec![]]);
    let r = solve_decision(&inst, &SolveConfig::decision()).unwrap();
    assert_eq!(solution(&r).0, &Matching::all_single(3));
    let empty = Instance::new(InstanceParts::new(Vec::new())).unwrap();
    let r = solve_decision(&empty, &SolveConfig::decision()).unwrap();
    assert_eq!(solution(&r).0.len(), 0);
}

#[test]
fn optimize_needs_an_objective() {
    let inst = strict(vec![vec![1], vec![0]]);
    assert_eq!(
        solve_optimize(&inst, &SolveConfig::decision()).unwrap_err(),
        SolveError::MissingObjective
    );
}

#[test]
fn unique_stable_matching_is_found_and_optimal() {
    let inst = strict(vec![vec![1, 2, 3], vec![0, 2, 3], vec![3, 0, 1], vec![2, 0, 1]]);
    let stable = oracle::brute_force_stable(&inst).unwrap();
    assert_eq!(stable.len(), 1);
    let r = solve_decision(&inst, &SolveConfig::decision()).unwrap();
    assert_eq!(solution(&r).0, &stable[0]);
}

#[test]
fn fixture_personalized_optimum_agrees_with_oracle() {
    let base = fixture();
    let r = solve_decision(&base, &SolveConfig::decision()).unwrap();
    assert_eq!(solution(&r).0, &Matching::all_single(4));

    let inst = personalize_instance(&base).unwrap();
    let r = solve_optimize(&inst, &SolveConfig::optimize(None)).unwrap();
    let (m, v) = solution(&r);
    let cfg = inst.objective().unwrap();
    let (_, expected) = oracle::brute_force_optimum(&inst, cfg).unwrap().unwrap();
    assert_eq!(v, &expected);
    assert!(oracle::is_stable(&inst, m));
    assert_eq!(&oracle::vector(&inst, m, cfg).unwrap(), v);
}

#[test]
fn agrees_with_oracle_on_small_random_instances() {
    for seed in 0..60u64 {
        let n = 4 + (seed % 5) as usize;
        let p = [0.25, 0.5, 1.0][(seed % 3) as usize];
        let inst = generate_srti_with_ties(n, p, 0.3, seed).unwrap();
        let inst = attach_random_criteria(&inst, &CriteriaOptions::new(3), seed).unwrap();
        let stable = oracle::brute_force_stable(&inst).unwrap();
        let r = solve_decision(&inst, &SolveConfig::decision()).unwrap();
        match &r.outcome {
            Outcome::Solution { matching, .. } => assert!(oracle::is_stable(&inst, matching)),
            Outcome::Unsat => assert!(stable.is_empty(), "seed {seed}"),
            other => panic!("{other:?}"),
        }
        let cfg = ObjectiveConfig::from_priority(inst.criteria().unwrap());
        let r = solve_optimize(&inst, &SolveConfig::optimize(Some(cfg.clone()))).unwrap();
        let want = oracle::lexicographic_minimum(&inst, &cfg).unwrap();
        assert_eq!(r.matching().map(|(_, v)| v.clone()), want, "seed {seed}");
        if let Some((m, v)) = r.matching() {
            let smallest = oracle::smallest_pair_list_with_vector(&inst, &cfg, v).unwrap();
            assert_eq!(Some(m.id_pairs(&inst)), smallest, "seed {seed}");
        }
    }
}

#[test]
fn events_strictly_improve_and_end_at_the_optimum() {
    let inst = generate_srti(14, 0.5, 7).unwrap();
    let inst = attach_random_criteria(&inst, &CriteriaOptions::new(3), 7).unwrap();
    let cfg = SolveConfig::optimize(Some(ObjectiveConfig::from_priority(inst.criteria().unwrap())));
    let mut streamed = Vec::new();
    let r = solve_with_progress(&inst, &cfg, &mut |e| streamed.push(e.clone())).unwrap();
    assert_eq!(streamed, r.events);
    for w in r.events.windows(2) {
        assert!(w[1].vector < w[0].vector);
        assert!(w[1].elapsed >= w[0].elapsed);
    }
    if let Some((_, v)) = r.matching() {
        assert_eq!(&r.events.last().unwrap().vector, v);
    }
}

#[test]
fn deterministic_runs_repeat() {
    let inst = generate_srti(16, 0.4, 3).unwrap();
    let inst = attach_random_criteria(&inst, &CriteriaOptions::new(2), 3).unwrap();
    let cfg = SolveConfig {
        seed: 11,
        ..SolveConfig::optimize(Some(ObjectiveConfig::from_priority(inst.criteria().unwrap())))
    };
    let first = solve(&inst, &cfg).unwrap();
    for _ in 0..2 {
        let again = solve(&inst, &cfg).unwrap();
        assert_eq!(again.outcome, first.outcome);
        let vectors = |r: &SolveResult| r.events.iter().map(|e| e.vector.clone()).collect::<Vec<_>>();
        assert_eq!(vectors(&again), vectors(&first));
    }
}

#[test]
fn zero_time_limit_times_out() {
    let inst = generate_srti(60, 0.5, 1).unwrap();
    let inst = attach_random_criteria(&inst, &CriteriaOptions::new(3), 1).unwrap();
    let cfg = SolveConfig {
        time_limit: Some(Duration::ZERO),
        ..SolveConfig::optimize(Some(ObjectiveConfig::from_priority(inst.criteria().unwrap())))
    };
    let r = solve(&inst, &cfg).unwrap();
    assert!(matches!(r.outcome, Outcome::Timeout { .. }), "{:?}", r.outcome);
}

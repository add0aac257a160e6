//! Random instances: Erdős–Rényi acceptability graphs with uniformly
//! permuted lists, plus random questionnaire data.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GeneratorError;
use crate::instance::{AgentId, AgentProfile, CriteriaSpec, Criterion, Instance, InstanceParts, PreferenceOrder};

fn agent_ids(n: usize) -> Vec<AgentId> {
    let width = (n.saturating_sub(1)).to_string().len().max(2);
    (0..n)
        .map(|i| AgentId::new(format!("a{i:0width$}")).expect("non-empty"))
        .collect()
}

/// `G(n, p)` with a uniform strict order over each agent's neighbours.
pub fn generate_srti(n: usize, p: f64, seed: u64) -> Result<Instance, GeneratorError> {
    generate_srti_with_ties(n, p, 0.0, seed)
}

/// Like [`generate_srti`], but after shuffling each list an agent joins the
/// previous tie group with probability `tie_prob`. With `tie_prob = 0` the
/// output is identical to [`generate_srti`].
pub fn generate_srti_with_ties(n: usize, p: f64, tie_prob: f64, seed: u64) -> Result<Instance, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::NoAgents);
    }
    for q in [p, tie_prob] {
        if !(0.0..=1.0).contains(&q) {
            return Err(GeneratorError::BadProbability(q));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(p) {
                adj[x].push(y);
                adj[y].push(x);
            }
        }
    }
    let mut parts = InstanceParts::new(agent_ids(n));
    for (x, mut list) in adj.into_iter().enumerate() {
        list.shuffle(&mut rng);
        let mut tiers: Vec<Vec<usize>> = Vec::with_capacity(list.len());
        for y in list {
            match tiers.last_mut() {
                Some(t) if tie_prob > 0.0 && rng.gen_bool(tie_prob) => t.push(y),
                _ => tiers.push(vec![y]),
            }
        }
        parts.preferences[x] = PreferenceOrder::new(tiers);
    }
    Ok(Instance::new(parts)?)
}

/// Settings for [`attach_random_criteria`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriteriaOptions {
    pub m: usize,
    /// Choice count per criterion; `None` takes the first `m` dormitory
    /// criteria.
    pub sizes: Option<Vec<usize>>,
    pub weights: RangeInclusive<u32>,
    /// Number of department labels; `None` leaves departments unset.
    pub departments: Option<usize>,
}

impl CriteriaOptions {
    pub fn new(m: usize) -> Self {
        CriteriaOptions {
            m,
            sizes: None,
            weights: 0..=5,
            departments: None,
        }
    }
}

fn criteria_spec(opts: &CriteriaOptions) -> Result<CriteriaSpec, GeneratorError> {
    match &opts.sizes {
        None => CriteriaSpec::dormitory_prefix(opts.m).map_err(|_| {
            GeneratorError::BadSizes(format!("no default sizes for {} criteria, at most 5", opts.m))
        }),
        Some(sizes) => {
            if sizes.len() != opts.m {
                return Err(GeneratorError::BadSizes(format!(
                    "{} sizes given for {} criteria",
                    sizes.len(),
                    opts.m
                )));
            }
            if let Some(bad) = sizes.iter().find(|&&s| s == 0) {
                return Err(GeneratorError::BadSizes(format!("size {bad} is not positive")));
            }
            let criteria = sizes
                .iter()
                .enumerate()
                .map(|(i, &s)| Criterion {
                    name: format!("criterion{}", i + 1),
                    choices: (1..=s).map(|c| format!("choice{c}")).collect(),
                })
                .collect();
            Ok(CriteriaSpec::in_order(criteria)?)
        }
    }
}

/// Replaces criteria and profiles with uniformly random ones. `m = 0`
/// returns the instance unchanged. When a criterion is named `smoking`,
/// the smoker flag follows its first choice.
pub fn attach_random_criteria(inst: &Instance, opts: &CriteriaOptions, seed: u64) -> Result<Instance, GeneratorError> {
    if opts.m == 0 {
        return Ok(inst.clone());
    }
    if opts.weights.is_empty() {
        return Err(GeneratorError::BadWeights(*opts.weights.start(), *opts.weights.end()));
    }
    if opts.departments == Some(0) {
        return Err(GeneratorError::BadSizes("department count must be positive".into()));
    }
    let spec = criteria_spec(opts)?;
    let smoking = spec.index_of("smoking");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let profiles = (0..inst.len())
        .map(|_| {
            let choices: Vec<u32> = (0..spec.len())
                .map(|i| rng.gen_range(1..=spec.choice_count(i) as u32))
                .collect();
            let weights = (0..spec.len()).map(|_| rng.gen_range(opts.weights.clone())).collect();
            let smoker = match smoking {
                Some(i) => choices[i] == 1,
                None => rng.gen_bool(0.5),
            };
            AgentProfile {
                choices,
                weights,
                smoker,
                comfortable_with_smoker: rng.gen_bool(0.5),
                department: opts.departments.map(|k| format!("d{}", rng.gen_range(1..=k))),
            }
        })
        .collect();
    let mut parts = inst.to_parts();
    parts.criteria = Some(spec);
    parts.profiles = Some(profiles);
    Ok(Instance::new(parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::completeness_degree;

    #[test]
    fn extreme_probabilities() {
        let full = generate_srti(7, 1.0, 3).unwrap();
        assert_eq!(completeness_degree(&full).unwrap(), 100.0);
        assert!((0..7).all(|x| full.preferences(x).tiers().iter().all(|t| t.len() == 1)));
        let empty = generate_srti(7, 0.0, 3).unwrap();
        assert!(empty.all_preferences().iter().all(PreferenceOrder::is_empty));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(generate_srti(0, 0.5, 0), Err(GeneratorError::NoAgents)));
        assert!(matches!(generate_srti(3, 1.5, 0), Err(GeneratorError::BadProbability(_))));
        assert!(matches!(generate_srti(3, f64::NAN, 0), Err(GeneratorError::BadProbability(_))));
        let inst = generate_srti(3, 0.5, 0).unwrap();
        let mut opts = CriteriaOptions::new(2);
        opts.sizes = Some(vec![2]);
        assert!(attach_random_criteria(&inst, &opts, 0).is_err());
        assert!(attach_random_criteria(&inst, &CriteriaOptions::new(6), 0).is_err());
    }

    #[test]
    fn ids_are_padded_and_sortable() {
        let inst = generate_srti(12, 0.3, 1).unwrap();
        assert_eq!(inst.id(0).as_str(), "a00");
        assert_eq!(inst.id(11).as_str(), "a11");
        assert_eq!(inst.indices_by_id(), (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn zero_criteria_is_identity_and_seeds_repeat() {
        let inst = generate_srti(10, 0.4, 9).unwrap();
        assert_eq!(attach_random_criteria(&inst, &CriteriaOptions::new(0), 1).unwrap(), inst);
        let opts = CriteriaOptions::new(3);
        let a = attach_random_criteria(&inst, &opts, 4).unwrap();
        let b = attach_random_criteria(&inst, &opts, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.all_preferences(), inst.all_preferences());
        for p in a.profiles().unwrap() {
            assert_eq!(p.smoker, p.choices[0] == 1);
            assert!(p.weights.iter().all(|&w| w <= 5));
        }
    }

    #[test]
    fn ties_only_when_requested() {
        let strict = generate_srti(9, 1.0, 5).unwrap();
        let tied = generate_srti_with_ties(9, 1.0, 0.0, 5).unwrap();
        assert_eq!(strict, tied);
        let tied = generate_srti_with_ties(9, 1.0, 0.9, 5).unwrap();
        assert!(tied.all_preferences().iter().any(|o| o.tiers().len() < 8));
    }
}

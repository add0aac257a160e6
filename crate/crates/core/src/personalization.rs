//! Criteria-based personal preference lists.
//!
//! For an agent `x` with choices `P_x` and weights `W_x`, criteria with
//! positive weight are grouped into levels of equal weight, heaviest first
//! (the sorted profile). Agents outside `x`'s explicit list that share at
//! least one positively weighted choice with `x` are *choice-acceptable*.
//! They are ranked level by level: as long as two candidates both match
//! every entry of a level they stay equal; at the first level where that
//! fails, the candidate matching more entries there wins.
//!
//! That pairwise rule is equivalent to sorting by a [`MatchSignature`]
//! (first level not fully matched, matched count at that level), which is
//! how [`derived_pref_list`] builds the order.

use std::cmp::Ordering;

use crate::error::ObjectiveError;
use crate::instance::{AgentIndex, AgentProfile, CriteriaSpec, Instance, PreferenceOrder};

/// One level of a sorted profile: criteria sharing weight `weight > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileLevel {
    pub weight: u32,
    /// `(choice, criterion index)`, in criterion order.
    pub entries: Vec<(u32, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortedProfile {
    pub levels: Vec<ProfileLevel>,
}

/// Where a candidate first stops matching the sorted profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchSignature {
    /// 1-based level index; `levels + 1` when every level matches fully.
    pub first_partial_level: usize,
    /// Entries matched at that level; 0 when every level matches.
    pub count_at_level: usize,
}

/// Result of ranking two choice-acceptable candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivedComparison {
    PrefersFirst,
    PrefersSecond,
    Tie,
}

pub fn sorted_profile(spec: &CriteriaSpec, prof: &AgentProfile) -> SortedProfile {
    debug_assert_eq!(prof.weights.len(), spec.len());
    let mut weights: Vec<u32> = prof.weights.iter().copied().filter(|&w| w > 0).collect();
    weights.sort_unstable_by(|a, b| b.cmp(a));
    weights.dedup();
    let levels = weights
        .into_iter()
        .map(|w| ProfileLevel {
            weight: w,
            entries: (0..spec.len())
                .filter(|&i| prof.weights[i] == w)
                .map(|i| (prof.choices[i], i))
                .collect(),
        })
        .collect();
    SortedProfile { levels }
}

fn criteria_data(inst: &Instance) -> Result<(&CriteriaSpec, &[AgentProfile]), ObjectiveError> {
    match (inst.criteria(), inst.profiles()) {
        (Some(c), Some(p)) => Ok((c, p)),
        _ => Err(ObjectiveError::MissingProfiles),
    }
}

/// `A'_x`: agents not already listed by `x` sharing a positively weighted
/// choice with `x`, in index order.
pub fn choice_acceptable_set(inst: &Instance, x: AgentIndex) -> Result<Vec<AgentIndex>, ObjectiveError> {
    let (_, profiles) = criteria_data(inst)?;
    let px = &profiles[x];
    Ok((0..inst.len())
        .filter(|&y| y != x && !inst.accepts(x, y))
        .filter(|&y| {
            px.weights
                .iter()
                .zip(px.choices.iter().zip(&profiles[y].choices))
                .any(|(&w, (cx, cy))| w > 0 && cx == cy)
        })
        .collect())
}

fn matched_at(level: &ProfileLevel, candidate: &AgentProfile) -> usize {
    level
        .entries
        .iter()
        .filter(|&&(choice, i)| candidate.choices[i] == choice)
        .count()
}

pub fn match_signature(profile: &SortedProfile, candidate: &AgentProfile) -> MatchSignature {
    for (j, level) in profile.levels.iter().enumerate() {
        let c = matched_at(level, candidate);
        if c < level.entries.len() {
            return MatchSignature {
                first_partial_level: j + 1,
                count_at_level: c,
            };
        }
    }
    MatchSignature {
        first_partial_level: profile.levels.len() + 1,
        count_at_level: 0,
    }
}

/// Ranks `y` against `z` from `x`'s sorted profile. Both must be
/// choice-acceptable to `x`.
pub fn derived_compare(
    inst: &Instance,
    x: AgentIndex,
    y: AgentIndex,
    z: AgentIndex,
) -> Result<DerivedComparison, ObjectiveError> {
    let (spec, profiles) = criteria_data(inst)?;
    let accepted = choice_acceptable_set(inst, x)?;
    assert!(
        accepted.contains(&y) && accepted.contains(&z),
        "derived_compare: candidates must be choice-acceptable"
    );
    let sig = |a: AgentIndex| match_signature(&sorted_profile(spec, &profiles[x]), &profiles[a]);
    Ok(match sig(y).cmp(&sig(z)) {
        Ordering::Greater => DerivedComparison::PrefersFirst,
        Ordering::Less => DerivedComparison::PrefersSecond,
        Ordering::Equal => DerivedComparison::Tie,
    })
}

/// `≺'_x` over `A'_x`: tiers of equal signature, best first; agents
/// inside a tier keep index order.
pub fn derived_pref_list(inst: &Instance, x: AgentIndex) -> Result<PreferenceOrder, ObjectiveError> {
    let (spec, profiles) = criteria_data(inst)?;
    let profile = sorted_profile(spec, &profiles[x]);
    let mut scored: Vec<(MatchSignature, AgentIndex)> = choice_acceptable_set(inst, x)?
        .into_iter()
        .map(|y| (match_signature(&profile, &profiles[y]), y))
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut tiers: Vec<Vec<AgentIndex>> = Vec::new();
    let mut last = None;
    for (sig, y) in scored {
        if last == Some(sig) {
            tiers.last_mut().expect("tier opened").push(y);
        } else {
            tiers.push(vec![y]);
            last = Some(sig);
        }
    }
    Ok(PreferenceOrder::new(tiers))
}

/// `≺''_x`: the explicit order and the derived order concatenated, explicit
/// first unless the instance says otherwise.
pub fn extended_pref_list(inst: &Instance, x: AgentIndex) -> Result<PreferenceOrder, ObjectiveError> {
    let derived = derived_pref_list(inst, x)?;
    let explicit = inst.preferences(x);
    Ok(if inst.explicit_first() {
        explicit.concat(&derived)
    } else {
        derived.concat(explicit)
    })
}

/// Replaces every preference order by its extended order. Criteria,
/// profiles, forbidden pairs and objective are kept. Applying this twice
/// is the same as applying it once.
pub fn personalize_instance(inst: &Instance) -> Result<Instance, ObjectiveError> {
    let orders = (0..inst.len())
        .map(|x| extended_pref_list(inst, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(inst
        .with_preferences(orders)
        .expect("extended orders keep instance invariants"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{AgentId, InstanceParts};

    fn instance(profiles: Vec<(Vec<u32>, Vec<u32>)>, lists: Vec<Vec<usize>>) -> Instance {
        let n = profiles.len();
        let k = profiles[0].0.len();
        let agents = (0..n).map(|i| AgentId::new(format!("a{i}")).unwrap()).collect();
        let mut parts = InstanceParts::new(agents);
        parts.preferences = lists.into_iter().map(PreferenceOrder::strict).collect();
        parts.criteria = Some(CriteriaSpec::dormitory_prefix(k).unwrap());
        parts.profiles = Some(
            profiles
                .into_iter()
                .map(|(choices, weights)| AgentProfile {
                    choices,
                    weights,
                    smoker: false,
                    comfortable_with_smoker: false,
                    department: None,
                })
                .collect(),
        );
        Instance::new(parts).unwrap()
    }

    #[test]
    fn zero_weights_give_empty_profile_and_no_candidates() {
        let inst = instance(
            vec![(vec![1, 1], vec![0, 0]), (vec![1, 1], vec![2, 2])],
            vec![vec![], vec![]],
        );
        let spec = inst.criteria().unwrap();
        assert!(sorted_profile(spec, inst.profile(0).unwrap()).levels.is_empty());
        assert!(choice_acceptable_set(&inst, 0).unwrap().is_empty());
        assert_eq!(choice_acceptable_set(&inst, 1).unwrap(), vec![0]);
        assert!(extended_pref_list(&inst, 0).unwrap().is_empty());
    }

    #[test]
    fn identical_candidates_tie() {
        let inst = instance(
            vec![(vec![1, 2], vec![3, 1]), (vec![1, 1], vec![1, 1]), (vec![1, 1], vec![1, 1])],
            vec![vec![], vec![], vec![]],
        );
        assert_eq!(derived_compare(&inst, 0, 1, 1).unwrap(), DerivedComparison::Tie);
        assert_eq!(derived_compare(&inst, 0, 1, 2).unwrap(), DerivedComparison::Tie);
        assert_eq!(derived_pref_list(&inst, 0).unwrap().tiers(), &[vec![1, 2]]);
    }

    #[test]
    fn criteria_first_puts_derived_tiers_ahead() {
        let inst = instance(
            vec![(vec![1], vec![1]), (vec![2], vec![1]), (vec![1], vec![1])],
            vec![vec![1], vec![], vec![]],
        );
        assert_eq!(extended_pref_list(&inst, 0).unwrap().tiers(), &[vec![1], vec![2]]);
        let mut parts = inst.to_parts();
        parts.explicit_first = false;
        let flipped = Instance::new(parts).unwrap();
        assert_eq!(extended_pref_list(&flipped, 0).unwrap().tiers(), &[vec![2], vec![1]]);
    }

    #[test]
    fn personalizing_is_idempotent_and_noop_without_overlap() {
        let inst = instance(
            vec![(vec![1, 1], vec![1, 0]), (vec![2, 2], vec![1, 1]), (vec![1, 2], vec![0, 4])],
            vec![vec![1], vec![0], vec![]],
        );
        let once = personalize_instance(&inst).unwrap();
        let twice = personalize_instance(&once).unwrap();
        assert_eq!(once, twice);

        let disjoint = instance(
            vec![(vec![1], vec![1]), (vec![2], vec![1])],
            vec![vec![1], vec![]],
        );
        assert_eq!(personalize_instance(&disjoint).unwrap(), disjoint);
    }
}

//! Penalties for criteria closeness, smoking comfort, department diversity
//! and forbidden pairs, and the lexicographic objective vector built from
//! them.
//!
//! Every penalty is summed over *ordered* matched pairs `(x, M(x))`, so a
//! symmetric per-pair cost is counted twice. Singles contribute nothing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ObjectiveError;
use crate::instance::{AgentIndex, CriteriaSpec, Instance};
use crate::matching::Matching;

/// One priority level of the objective.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ObjectiveLevel {
    /// Sum of choice distances `|f(x) - f(M(x))|` for the named criterion.
    Criterion { criterion: String },
    /// Discomfort with a smoking roommate.
    Smoking,
    /// Roommates sharing a department.
    Diversity,
}

impl fmt::Display for ObjectiveLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveLevel::Criterion { criterion } => write!(f, "criterion:{criterion}"),
            ObjectiveLevel::Smoking => f.write_str("smoking"),
            ObjectiveLevel::Diversity => f.write_str("diversity"),
        }
    }
}

/// Priority levels, highest priority first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveConfig {
    pub levels: Vec<ObjectiveLevel>,
}

impl ObjectiveConfig {
    pub fn new(levels: Vec<ObjectiveLevel>) -> Self {
        ObjectiveConfig { levels }
    }

    pub fn criterion(name: &str) -> ObjectiveLevel {
        ObjectiveLevel::Criterion {
            criterion: name.to_string(),
        }
    }

    /// Smoking comfort, then cleanliness, room environment, sleep habits and
    /// study habits distances.
    pub fn dormitory() -> Self {
        ObjectiveConfig::new(vec![
            ObjectiveLevel::Smoking,
            Self::criterion("cleanliness"),
            Self::criterion("room environment"),
            Self::criterion("sleep habits"),
            Self::criterion("study habits"),
        ])
    }

    /// One distance level per criterion, following the priority order.
    pub fn from_priority(spec: &CriteriaSpec) -> Self {
        ObjectiveConfig::new(
            spec.priority_order()
                .iter()
                .map(|&i| Self::criterion(&spec.criteria()[i].name))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Fails when a level needs data the instance lacks.
    pub fn check_against(&self, inst: &Instance) -> Result<(), ObjectiveError> {
        for level in &self.levels {
            resolve(inst, level)?;
        }
        Ok(())
    }
}

impl FromStr for ObjectiveConfig {
    type Err = ObjectiveError;

    /// Comma separated levels: `smoking`, `diversity`, `criterion:<name>`
    /// or a bare criterion name. The single word `dormitory` selects
    /// [`ObjectiveConfig::dormitory`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "dormitory" {
            return Ok(Self::dormitory());
        }
        let mut levels = Vec::new();
        for tok in s.split(',').map(str::trim) {
            let level = match tok {
                "" => return Err(ObjectiveError::BadLevel(tok.to_string())),
                "smoking" => ObjectiveLevel::Smoking,
                "diversity" => ObjectiveLevel::Diversity,
                _ => Self::criterion(tok.strip_prefix("criterion:").unwrap_or(tok)),
            };
            levels.push(level);
        }
        Ok(ObjectiveConfig::new(levels))
    }
}

impl fmt::Display for ObjectiveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Per-level penalties, compared lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(pub Vec<u64>);

impl ObjectiveVector {
    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// A level with its criterion name resolved against an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ResolvedLevel {
    Criterion(usize),
    Smoking,
    Diversity,
}

pub(crate) fn resolve(inst: &Instance, level: &ObjectiveLevel) -> Result<ResolvedLevel, ObjectiveError> {
    let profiles = inst.profiles().ok_or(ObjectiveError::MissingProfiles)?;
    match level {
        ObjectiveLevel::Criterion { criterion } => inst
            .criteria()
            .and_then(|c| c.index_of(criterion))
            .map(ResolvedLevel::Criterion)
            .ok_or_else(|| ObjectiveError::UnknownCriterion(criterion.clone())),
        ObjectiveLevel::Smoking => Ok(ResolvedLevel::Smoking),
        ObjectiveLevel::Diversity => {
            if let Some(x) = profiles.iter().position(|p| p.department.is_none()) {
                return Err(ObjectiveError::MissingDepartment(inst.id(x).to_string()));
            }
            Ok(ResolvedLevel::Diversity)
        }
    }
}

pub(crate) fn resolve_all(inst: &Instance, cfg: &ObjectiveConfig) -> Result<Vec<ResolvedLevel>, ObjectiveError> {
    cfg.levels.iter().map(|l| resolve(inst, l)).collect()
}

/// Cost of `x` having roommate `y` at one level; `x == y` costs 0.
/// Profiles must be present (guaranteed by `resolve`).
pub(crate) fn directed_cost(inst: &Instance, level: ResolvedLevel, x: AgentIndex, y: AgentIndex) -> u64 {
    if x == y {
        return 0;
    }
    let profiles = inst.profiles().expect("resolved level implies profiles");
    let (px, py) = (&profiles[x], &profiles[y]);
    match level {
        ResolvedLevel::Criterion(i) => u64::from(px.choices[i].abs_diff(py.choices[i])),
        ResolvedLevel::Smoking => {
            let uncomfortable = !px.comfortable_with_smoker && py.smoker;
            u64::from(uncomfortable && !px.smoker) + u64::from(uncomfortable && px.smoker)
        }
        ResolvedLevel::Diversity => u64::from(px.department == py.department),
    }
}

fn level_total(inst: &Instance, m: &Matching, level: ResolvedLevel) -> u64 {
    (0..m.len())
        .map(|x| directed_cost(inst, level, x, m.partner(x)))
        .sum()
}

/// `Σ_x |f(x, b_i) - f(M(x), b_i)|` for criterion index `i`.
pub fn criterion_distance(inst: &Instance, m: &Matching, i: usize) -> Result<u64, ObjectiveError> {
    let spec = inst.criteria().ok_or(ObjectiveError::MissingProfiles)?;
    if i >= spec.len() {
        return Err(ObjectiveError::CriterionOutOfRange(i));
    }
    Ok(level_total(inst, m, ResolvedLevel::Criterion(i)))
}

/// Number of ordered matched pairs where `x` is not comfortable with a
/// smoking roommate `M(x)`.
pub fn smoking_penalty(inst: &Instance, m: &Matching) -> Result<u64, ObjectiveError> {
    resolve(inst, &ObjectiveLevel::Smoking)?;
    Ok(level_total(inst, m, ResolvedLevel::Smoking))
}

/// Number of ordered matched pairs sharing a department.
pub fn diversity_penalty(inst: &Instance, m: &Matching) -> Result<u64, ObjectiveError> {
    let level = resolve(inst, &ObjectiveLevel::Diversity)?;
    Ok(level_total(inst, m, level))
}

/// Matched pairs that the instance forbids, canonical by id.
pub fn forbidden_violations(inst: &Instance, m: &Matching) -> Vec<(AgentIndex, AgentIndex)> {
    let mut v: Vec<_> = m
        .pairs()
        .filter(|&(x, y)| inst.is_forbidden(x, y))
        .map(|(x, y)| inst.canonical_pair(x, y))
        .collect();
    v.sort_by(|a, b| (inst.id(a.0), inst.id(a.1)).cmp(&(inst.id(b.0), inst.id(b.1))));
    v
}

pub fn objective_vector(
    inst: &Instance,
    m: &Matching,
    cfg: &ObjectiveConfig,
) -> Result<ObjectiveVector, ObjectiveError> {
    let levels = resolve_all(inst, cfg)?;
    Ok(vector_for_levels(inst, m, &levels))
}

pub(crate) fn vector_for_levels(inst: &Instance, m: &Matching, levels: &[ResolvedLevel]) -> ObjectiveVector {
    ObjectiveVector(levels.iter().map(|&l| level_total(inst, m, l)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{AgentId, AgentProfile, InstanceParts, PreferenceOrder};

    fn profile(smoker: bool, comfortable: bool, dept: &str, choices: Vec<u32>) -> AgentProfile {
        let k = choices.len();
        AgentProfile {
            choices,
            weights: vec![1; k],
            smoker,
            comfortable_with_smoker: comfortable,
            department: Some(dept.to_string()),
        }
    }

    fn complete(profiles: Vec<AgentProfile>) -> Instance {
        let n = profiles.len();
        let agents = (0..n).map(|i| AgentId::new(format!("a{i}")).unwrap()).collect();
        let mut parts = InstanceParts::new(agents);
        parts.preferences = (0..n)
            .map(|x| PreferenceOrder::strict((0..n).filter(|&y| y != x)))
            .collect();
        parts.criteria = Some(CriteriaSpec::dormitory_prefix(2).unwrap());
        parts.profiles = Some(profiles);
        Instance::new(parts).unwrap()
    }

    #[test]
    fn smoking_only_uncomfortable_direction_counts() {
        let inst = complete(vec![
            profile(false, false, "x", vec![1, 1]),
            profile(true, true, "y", vec![1, 1]),
        ]);
        let m = Matching::from_pairs(&inst, &[(0, 1)]).unwrap();
        assert_eq!(smoking_penalty(&inst, &m).unwrap(), 1);

        let both_non = complete(vec![
            profile(false, false, "x", vec![1, 1]),
            profile(false, false, "y", vec![1, 1]),
        ]);
        let m = Matching::from_pairs(&both_non, &[(0, 1)]).unwrap();
        assert_eq!(smoking_penalty(&both_non, &m).unwrap(), 0);
    }

    #[test]
    fn smoking_three_pairs_violating_both_directions() {
        // Each pair: two smokers, neither comfortable -> 2 per pair.
        let inst = complete((0..6).map(|_| profile(true, false, "d", vec![1, 1])).collect());
        let m = Matching::from_pairs(&inst, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        let oracle: u64 = (0..6)
            .map(|x| {
                let y = m.partner(x);
                let p = inst.profiles().unwrap();
                let fires_a = !p[x].smoker && p[y].smoker && !p[x].comfortable_with_smoker;
                let fires_b = p[x].smoker && p[y].smoker && !p[x].comfortable_with_smoker;
                u64::from(fires_a) + u64::from(fires_b)
            })
            .sum();
        assert_eq!(oracle, 6);
        assert_eq!(smoking_penalty(&inst, &m).unwrap(), 6);
    }

    #[test]
    fn diversity_counts_ordered_same_department_pairs() {
        let inst = complete(vec![
            profile(false, false, "cs", vec![1, 1]),
            profile(false, false, "cs", vec![1, 1]),
            profile(false, false, "ee", vec![1, 1]),
            profile(false, false, "me", vec![1, 1]),
        ]);
        let same = Matching::from_pairs(&inst, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(diversity_penalty(&inst, &same).unwrap(), 2);
        let cross = Matching::from_pairs(&inst, &[(0, 2), (1, 3)]).unwrap();
        assert_eq!(diversity_penalty(&inst, &cross).unwrap(), 0);
    }

    #[test]
    fn diversity_requires_labels() {
        let mut p = profile(false, false, "cs", vec![1, 1]);
        p.department = None;
        let inst = complete(vec![p, profile(false, false, "cs", vec![1, 1])]);
        assert!(matches!(
            diversity_penalty(&inst, &Matching::all_single(2)),
            Err(ObjectiveError::MissingDepartment(_))
        ));
    }

    #[test]
    fn singles_and_identical_profiles_cost_nothing() {
        let inst = complete(vec![
            profile(true, false, "cs", vec![2, 1]),
            profile(true, false, "cs", vec![1, 2]),
        ]);
        let cfg = ObjectiveConfig::new(vec![
            ObjectiveLevel::Smoking,
            ObjectiveConfig::criterion("smoking"),
            ObjectiveConfig::criterion("cleanliness"),
            ObjectiveLevel::Diversity,
        ]);
        let v = objective_vector(&inst, &Matching::all_single(2), &cfg).unwrap();
        assert_eq!(v, ObjectiveVector(vec![0, 0, 0, 0]));

        let twins = complete(vec![
            profile(false, true, "a", vec![2, 1]),
            profile(false, true, "b", vec![2, 1]),
        ]);
        let m = Matching::from_pairs(&twins, &[(0, 1)]).unwrap();
        assert_eq!(criterion_distance(&twins, &m, 0).unwrap(), 0);
        assert_eq!(criterion_distance(&twins, &m, 1).unwrap(), 0);
        assert!(criterion_distance(&twins, &m, 7).is_err());
    }

    #[test]
    fn forbidden_violations_report_matched_pairs_only() {
        let inst = complete((0..3).map(|_| profile(false, false, "d", vec![1, 1])).collect());
        let mut parts = inst.to_parts();
        parts.forbidden = vec![(1, 0)];
        let inst = Instance::new(parts).unwrap();
        let m = Matching::from_pairs(&inst, &[(0, 1)]).unwrap();
        assert_eq!(forbidden_violations(&inst, &m), vec![(0, 1)]);
        let m = Matching::from_pairs(&inst, &[(1, 2)]).unwrap();
        assert!(forbidden_violations(&inst, &m).is_empty());
    }

    #[test]
    fn config_parses_from_text() {
        let cfg: ObjectiveConfig = "smoking, criterion:sleep habits,diversity,cleanliness".parse().unwrap();
        assert_eq!(
            cfg.levels,
            vec![
                ObjectiveLevel::Smoking,
                ObjectiveConfig::criterion("sleep habits"),
                ObjectiveLevel::Diversity,
                ObjectiveConfig::criterion("cleanliness"),
            ]
        );
        assert_eq!("dormitory".parse::<ObjectiveConfig>().unwrap(), ObjectiveConfig::dormitory());
        assert!("smoking,,diversity".parse::<ObjectiveConfig>().is_err());
        assert_eq!(cfg.to_string().parse::<ObjectiveConfig>().unwrap(), cfg);
    }
}

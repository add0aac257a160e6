//! Instance data model: agents, weak preference orders, questionnaire
//! criteria and per-agent profiles.
//!
//! An [`Instance`] is immutable once built. All cross references between
//! agents are by [`AgentIndex`], the position of the agent in the
//! instance's agent list; [`AgentId`] is the external, human readable name.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::objectives::ObjectiveConfig;

/// Position of an agent inside [`Instance::agents`].
pub type AgentIndex = usize;

/// Rank value used for agents absent from a preference order.
pub(crate) const UNRANKED: u32 = u32::MAX;

/// External identifier of an agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Result<Self, InstanceError> {
        let id = id.into();
        if id.is_empty() {
            return Err(InstanceError::EmptyAgentId);
        }
        Ok(AgentId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for AgentId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Outcome of asking an agent to compare two candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// The first candidate sits in an earlier tier.
    PrefersFirst,
    /// The second candidate sits in an earlier tier.
    PrefersSecond,
    /// Both candidates share a tier.
    Indifferent,
    /// At least one candidate is not in the order.
    Incomparable,
}

/// A weak order: ranked tie groups, most preferred first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreferenceOrder {
    tiers: Vec<Vec<AgentIndex>>,
}

impl PreferenceOrder {
    pub fn new(tiers: Vec<Vec<AgentIndex>>) -> Self {
        PreferenceOrder { tiers }
    }

    /// An order without ties.
    pub fn strict(agents: impl IntoIterator<Item = AgentIndex>) -> Self {
        PreferenceOrder {
            tiers: agents.into_iter().map(|a| vec![a]).collect(),
        }
    }

    pub fn tiers(&self) -> &[Vec<AgentIndex>] {
        &self.tiers
    }

    pub fn is_empty(&self) -> bool {
        self.tiers.is_empty()
    }

    /// Number of agents listed (the size of the acceptable set).
    pub fn len(&self) -> usize {
        self.tiers.iter().map(Vec::len).sum()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentIndex> + '_ {
        self.tiers.iter().flatten().copied()
    }

    pub fn tier_of(&self, agent: AgentIndex) -> Option<usize> {
        self.tiers.iter().position(|t| t.contains(&agent))
    }

    pub fn contains(&self, agent: AgentIndex) -> bool {
        self.tier_of(agent).is_some()
    }

    /// Compares `y` and `z` from the owner's point of view.
    pub fn compare(&self, y: AgentIndex, z: AgentIndex) -> Comparison {
        match (self.tier_of(y), self.tier_of(z)) {
            (Some(a), Some(b)) if a < b => Comparison::PrefersFirst,
            (Some(a), Some(b)) if a > b => Comparison::PrefersSecond,
            (Some(_), Some(_)) => Comparison::Indifferent,
            _ => Comparison::Incomparable,
        }
    }

    /// Tiers of `self` followed by tiers of `other`.
    pub fn concat(&self, other: &PreferenceOrder) -> PreferenceOrder {
        let mut tiers = self.tiers.clone();
        tiers.extend(other.tiers.iter().cloned());
        PreferenceOrder { tiers }
    }
}

/// One questionnaire criterion with its choices ordered by closeness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub choices: Vec<String>,
}

/// The criteria list together with the global importance order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriteriaSpec {
    criteria: Vec<Criterion>,
    priority_order: Vec<usize>,
}

impl CriteriaSpec {
    pub fn new(criteria: Vec<Criterion>, priority_order: Vec<usize>) -> Result<Self, InstanceError> {
        let mut names = BTreeSet::new();
        for c in &criteria {
            if !names.insert(c.name.as_str()) {
                return Err(InstanceError::DuplicateCriterion(c.name.clone()));
            }
            if c.choices.is_empty() {
                return Err(InstanceError::EmptyChoiceList(c.name.clone()));
            }
        }
        let mut seen = vec![false; criteria.len()];
        if priority_order.len() != criteria.len() {
            return Err(InstanceError::BadPriorityOrder(format!(
                "expected {} entries, found {}",
                criteria.len(),
                priority_order.len()
            )));
        }
        for &i in &priority_order {
            if i >= criteria.len() || seen[i] {
                return Err(InstanceError::BadPriorityOrder(format!(
                    "index {i} repeated or out of range"
                )));
            }
            seen[i] = true;
        }
        Ok(CriteriaSpec {
            criteria,
            priority_order,
        })
    }

    /// Criteria in list order with priority equal to list order.
    pub fn in_order(criteria: Vec<Criterion>) -> Result<Self, InstanceError> {
        let order = (0..criteria.len()).collect();
        Self::new(criteria, order)
    }

    /// The five dormitory criteria: smoking, cleanliness, room environment,
    /// sleep habits and study habits, prioritized in that order.
    pub fn dormitory() -> Self {
        let c = |name: &str, choices: &[&str]| Criterion {
            name: name.to_string(),
            choices: choices.iter().map(|s| s.to_string()).collect(),
        };
        Self::in_order(vec![
            c("smoking", &["Smoker", "Non-smoker"]),
            c("cleanliness", &["Clean", "Messy"]),
            c("room environment", &["Quiet", "Social", "Social and quiet"]),
            c(
                "sleep habits",
                &[
                    "Goes to bed early",
                    "Goes to bed before midnight",
                    "Goes to bed after midnight",
                ],
            ),
            c(
                "study habits",
                &[
                    "Studies in the room",
                    "Studies out of the room",
                    "Studies in and out of the room",
                ],
            ),
        ])
        .expect("dormitory criteria are well formed")
    }

    /// The first `m` dormitory criteria (`m <= 5`).
    pub fn dormitory_prefix(m: usize) -> Result<Self, InstanceError> {
        let full = Self::dormitory();
        if m > full.len() {
            return Err(InstanceError::BadPriorityOrder(format!(
                "only {} dormitory criteria exist, {m} requested",
                full.len()
            )));
        }
        Self::in_order(full.criteria[..m].to_vec())
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn priority_order(&self) -> &[usize] {
        &self.priority_order
    }

    pub fn len(&self) -> usize {
        self.criteria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.criteria.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c.name == name)
    }

    pub fn choice_count(&self, criterion: usize) -> usize {
        self.criteria[criterion].choices.len()
    }
}

/// Questionnaire answers of one agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentProfile {
    /// 1-based choice index per criterion.
    pub choices: Vec<u32>,
    /// Importance per criterion; zero means unimportant.
    pub weights: Vec<u32>,
    pub smoker: bool,
    pub comfortable_with_smoker: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub department: Option<String>,
}

/// Everything needed to build an [`Instance`]; validated by [`Instance::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceParts {
    pub agents: Vec<AgentId>,
    /// One order per agent, aligned with `agents`.
    pub preferences: Vec<PreferenceOrder>,
    pub criteria: Option<CriteriaSpec>,
    /// One profile per agent, aligned with `agents`.
    pub profiles: Option<Vec<AgentProfile>>,
    pub forbidden: Vec<(AgentIndex, AgentIndex)>,
    pub explicit_first: bool,
    pub objective: Option<ObjectiveConfig>,
}

impl InstanceParts {
    pub fn new(agents: Vec<AgentId>) -> Self {
        let n = agents.len();
        InstanceParts {
            agents,
            preferences: vec![PreferenceOrder::default(); n],
            criteria: None,
            profiles: None,
            forbidden: Vec::new(),
            explicit_first: true,
            objective: None,
        }
    }
}

/// A validated SRTI instance, optionally carrying questionnaire data.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    agents: Vec<AgentId>,
    index: HashMap<AgentId, AgentIndex>,
    preferences: Vec<PreferenceOrder>,
    criteria: Option<CriteriaSpec>,
    profiles: Option<Vec<AgentProfile>>,
    forbidden: BTreeSet<(AgentIndex, AgentIndex)>,
    explicit_first: bool,
    objective: Option<ObjectiveConfig>,
    // ranks[x][y] = tier of y in x's order, UNRANKED if absent
    ranks: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(parts: InstanceParts) -> Result<Self, InstanceError> {
        let InstanceParts {
            agents,
            preferences,
            criteria,
            profiles,
            forbidden,
            explicit_first,
            objective,
        } = parts;
        let n = agents.len();

        let mut index = HashMap::with_capacity(n);
        for (i, a) in agents.iter().enumerate() {
            if a.as_str().is_empty() {
                return Err(InstanceError::EmptyAgentId);
            }
            if index.insert(a.clone(), i).is_some() {
                return Err(InstanceError::DuplicateAgent(a.to_string()));
            }
        }
        if preferences.len() != n {
            return Err(InstanceError::VectorLength {
                agent: "<preferences>".into(),
                expected: n,
                found: preferences.len(),
            });
        }

        let mut ranks = vec![vec![UNRANKED; n]; n];
        for (x, order) in preferences.iter().enumerate() {
            for (t, tier) in order.tiers().iter().enumerate() {
                if tier.is_empty() {
                    return Err(InstanceError::EmptyTier {
                        agent: agents[x].to_string(),
                    });
                }
                for &y in tier {
                    if y >= n {
                        return Err(InstanceError::UnknownAgent {
                            context: format!("preferences of {}", agents[x]),
                            agent: format!("#{y}"),
                        });
                    }
                    if y == x {
                        return Err(InstanceError::SelfInPreferences(agents[x].to_string()));
                    }
                    if ranks[x][y] != UNRANKED {
                        return Err(InstanceError::DuplicateTierMember {
                            agent: agents[x].to_string(),
                            member: agents[y].to_string(),
                        });
                    }
                    ranks[x][y] = t as u32;
                }
            }
        }

        match (&criteria, &profiles) {
            (None, None) => {}
            (Some(spec), Some(profiles)) => {
                if profiles.len() != n {
                    return Err(InstanceError::ProfileMismatch(format!(
                        "{} profiles for {n} agents",
                        profiles.len()
                    )));
                }
                let k = spec.len();
                for (x, p) in profiles.iter().enumerate() {
                    for found in [p.choices.len(), p.weights.len()] {
                        if found != k {
                            return Err(InstanceError::VectorLength {
                                agent: agents[x].to_string(),
                                expected: k,
                                found,
                            });
                        }
                    }
                    for (i, &c) in p.choices.iter().enumerate() {
                        let max = spec.choice_count(i);
                        if c < 1 || c as usize > max {
                            return Err(InstanceError::ChoiceOutOfRange {
                                agent: agents[x].to_string(),
                                criterion: spec.criteria()[i].name.clone(),
                                value: c,
                                max,
                            });
                        }
                    }
                }
            }
            (Some(_), None) => {
                return Err(InstanceError::ProfileMismatch(
                    "criteria given without profiles".into(),
                ))
            }
            (None, Some(_)) => {
                return Err(InstanceError::ProfileMismatch(
                    "profiles given without criteria".into(),
                ))
            }
        }

        let mut canon = BTreeSet::new();
        for &(a, b) in &forbidden {
            if a >= n || b >= n || a == b {
                return Err(InstanceError::BadForbiddenPair(format!("({a}, {b})")));
            }
            canon.insert((a.min(b), a.max(b)));
        }

        let inst = Instance {
            agents,
            index,
            preferences,
            criteria,
            profiles,
            forbidden: canon,
            explicit_first,
            objective,
            ranks,
        };
        if let Some(obj) = &inst.objective {
            obj.check_against(&inst)?;
        }
        Ok(inst)
    }

    /// Deconstructs into editable parts.
    pub fn to_parts(&self) -> InstanceParts {
        InstanceParts {
            agents: self.agents.clone(),
            preferences: self.preferences.clone(),
            criteria: self.criteria.clone(),
            profiles: self.profiles.clone(),
            forbidden: self.forbidden.iter().copied().collect(),
            explicit_first: self.explicit_first,
            objective: self.objective.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn id(&self, x: AgentIndex) -> &AgentId {
        &self.agents[x]
    }

    pub fn index_of(&self, id: &str) -> Option<AgentIndex> {
        self.index.get(&AgentId(id.to_string())).copied()
    }

    pub fn preferences(&self, x: AgentIndex) -> &PreferenceOrder {
        &self.preferences[x]
    }

    pub fn all_preferences(&self) -> &[PreferenceOrder] {
        &self.preferences
    }

    /// Tier of `y` in `x`'s order.
    pub fn rank(&self, x: AgentIndex, y: AgentIndex) -> Option<u32> {
        let r = self.ranks[x][y];
        (r != UNRANKED).then_some(r)
    }

    pub(crate) fn raw_rank(&self, x: AgentIndex, y: AgentIndex) -> u32 {
        self.ranks[x][y]
    }

    /// `y` is in `x`'s acceptable set.
    pub fn accepts(&self, x: AgentIndex, y: AgentIndex) -> bool {
        x != y && self.ranks[x][y] != UNRANKED
    }

    pub fn mutually_acceptable(&self, x: AgentIndex, y: AgentIndex) -> bool {
        self.accepts(x, y) && self.accepts(y, x)
    }

    /// Agents mutually acceptable to `x`, in index order.
    pub fn mutual_partners(&self, x: AgentIndex) -> impl Iterator<Item = AgentIndex> + '_ {
        (0..self.len()).filter(move |&y| self.mutually_acceptable(x, y))
    }

    pub fn criteria(&self) -> Option<&CriteriaSpec> {
        self.criteria.as_ref()
    }

    pub fn profiles(&self) -> Option<&[AgentProfile]> {
        self.profiles.as_deref()
    }

    pub fn profile(&self, x: AgentIndex) -> Option<&AgentProfile> {
        self.profiles.as_ref().map(|p| &p[x])
    }

    /// Forbidden pairs as `(low index, high index)`.
    pub fn forbidden(&self) -> &BTreeSet<(AgentIndex, AgentIndex)> {
        &self.forbidden
    }

    pub fn is_forbidden(&self, x: AgentIndex, y: AgentIndex) -> bool {
        self.forbidden.contains(&(x.min(y), x.max(y)))
    }

    pub fn explicit_first(&self) -> bool {
        self.explicit_first
    }

    pub fn objective(&self) -> Option<&ObjectiveConfig> {
        self.objective.as_ref()
    }

    /// Orders the pair by agent id, smaller id first.
    pub fn canonical_pair(&self, x: AgentIndex, y: AgentIndex) -> (AgentIndex, AgentIndex) {
        if self.agents[x] <= self.agents[y] {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// Agent indices sorted by id.
    pub fn indices_by_id(&self) -> Vec<AgentIndex> {
        let mut v: Vec<_> = (0..self.len()).collect();
        v.sort_by(|&a, &b| self.agents[a].cmp(&self.agents[b]));
        v
    }

    /// Same instance with replaced preference orders.
    pub fn with_preferences(&self, preferences: Vec<PreferenceOrder>) -> Result<Self, InstanceError> {
        let mut parts = self.to_parts();
        parts.preferences = preferences;
        Instance::new(parts)
    }

    pub fn with_objective(&self, objective: Option<ObjectiveConfig>) -> Result<Self, InstanceError> {
        let mut parts = self.to_parts();
        parts.objective = objective;
        Instance::new(parts)
    }
}

/// Average acceptable-set size as a percentage of `n - 1`.
pub fn completeness_degree(inst: &Instance) -> Result<f64, InstanceError> {
    let n = inst.len();
    if n < 2 {
        return Err(InstanceError::TooFewAgents(n));
    }
    let listed: usize = inst.all_preferences().iter().map(PreferenceOrder::len).sum();
    Ok(100.0 * listed as f64 / (n as f64 * (n - 1) as f64))
}

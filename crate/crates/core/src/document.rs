//! JSON instance documents.
//!
//! ```json
//! {
//!   "agents": ["a", "b"],
//!   "preferences": { "a": [["b"]], "b": [["a"]] },
//!   "criteria": [{ "name": "cleanliness", "choices": ["Clean", "Messy"] }],
//!   "priority_order": ["cleanliness"],
//!   "profiles": { "a": { "choices": [1], "weights": [3], "smoker": false,
//!                        "comfortable_with_smoker": true, "department": "cs" } },
//!   "forbidden": [["a", "b"]],
//!   "explicit_first": true,
//!   "objective": [{ "kind": "criterion", "criterion": "cleanliness" }]
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::instance::{AgentId, AgentProfile, CriteriaSpec, Criterion, Instance, InstanceParts, PreferenceOrder};
use crate::objectives::ObjectiveConfig;

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub agents: Vec<String>,
    #[serde(default)]
    pub preferences: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<Criterion>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority_order: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<BTreeMap<String, AgentProfile>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forbidden: Vec<(String, String)>,
    #[serde(default = "default_true")]
    pub explicit_first: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveConfig>,
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    instance_from_doc(doc)
}

pub fn serialize_instance(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_doc(inst)).expect("instance documents always serialize")
}

pub fn instance_from_doc(doc: InstanceDoc) -> Result<Instance, InstanceError> {
    let agents = doc
        .agents
        .iter()
        .map(|s| AgentId::new(s.as_str()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut index = BTreeMap::new();
    for (i, a) in doc.agents.iter().enumerate() {
        if index.insert(a.as_str(), i).is_some() {
            return Err(InstanceError::DuplicateAgent(a.clone()));
        }
    }
    let lookup = |id: &str, context: &dyn Fn() -> String| {
        index.get(id).copied().ok_or_else(|| InstanceError::UnknownAgent {
            context: context(),
            agent: id.to_string(),
        })
    };

    let mut parts = InstanceParts::new(agents);
    for (owner, tiers) in &doc.preferences {
        let x = lookup(owner, &|| "preferences".to_string())?;
        let ctx = || format!("preferences of {owner}");
        let tiers = tiers
            .iter()
            .map(|tier| tier.iter().map(|id| lookup(id, &ctx)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        parts.preferences[x] = PreferenceOrder::new(tiers);
    }

    if let Some(criteria) = doc.criteria {
        let order = match doc.priority_order {
            None => (0..criteria.len()).collect(),
            Some(names) => names
                .iter()
                .map(|n| {
                    criteria.iter().position(|c| &c.name == n).ok_or_else(|| {
                        InstanceError::BadPriorityOrder(format!("unknown criterion `{n}`"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        parts.criteria = Some(CriteriaSpec::new(criteria, order)?);
    } else if doc.priority_order.is_some() {
        return Err(InstanceError::BadPriorityOrder("priority_order without criteria".into()));
    }

    if let Some(mut profiles) = doc.profiles {
        for owner in profiles.keys() {
            lookup(owner, &|| "profiles".to_string())?;
        }
        let aligned = doc
            .agents
            .iter()
            .map(|a| {
                profiles
                    .remove(a)
                    .ok_or_else(|| InstanceError::ProfileMismatch(format!("no profile for `{a}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        parts.profiles = Some(aligned);
    }

    for (a, b) in &doc.forbidden {
        let ctx = || "forbidden".to_string();
        parts.forbidden.push((lookup(a, &ctx)?, lookup(b, &ctx)?));
    }
    parts.explicit_first = doc.explicit_first;
    parts.objective = doc.objective;
    Instance::new(parts)
}

pub fn instance_to_doc(inst: &Instance) -> InstanceDoc {
    let name = |x: usize| inst.id(x).to_string();
    let preferences = (0..inst.len())
        .map(|x| {
            let tiers = inst
                .preferences(x)
                .tiers()
                .iter()
                .map(|t| t.iter().map(|&y| name(y)).collect())
                .collect();
            (name(x), tiers)
        })
        .collect();
    let (criteria, priority_order) = match inst.criteria() {
        None => (None, None),
        Some(spec) => (
            Some(spec.criteria().to_vec()),
            Some(
                spec.priority_order()
                    .iter()
                    .map(|&i| spec.criteria()[i].name.clone())
                    .collect(),
            ),
        ),
    };
    let profiles = inst.profiles().map(|ps| {
        ps.iter()
            .enumerate()
            .map(|(x, p)| (name(x), p.clone()))
            .collect()
    });
    let forbidden = inst
        .forbidden()
        .iter()
        .map(|&(a, b)| {
            let (a, b) = inst.canonical_pair(a, b);
            (name(a), name(b))
        })
        .collect();
    InstanceDoc {
        agents: inst.agents().iter().map(|a| a.to_string()).collect(),
        preferences,
        criteria,
        priority_order,
        profiles,
        forbidden,
        explicit_first: inst.explicit_first(),
        objective: inst.objective().cloned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance() {
        let inst = parse_instance(r#"{"agents": ["a"], "preferences": {"a": []}}"#).unwrap();
        assert_eq!(inst.len(), 1);
        assert!(inst.preferences(0).is_empty());
        assert!(inst.explicit_first());
    }

    #[test]
    fn unknown_agent_is_named() {
        let err = parse_instance(r#"{"agents": ["a", "b"], "preferences": {"a": [["z"]]}}"#).unwrap_err();
        match err {
            InstanceError::UnknownAgent { agent, .. } => assert_eq!(agent, "z"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_instance("{\n  \"agents\": [\"a\",\n}").unwrap_err();
        match err {
            InstanceError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let dup = r#"{"agents": ["a","b","c"], "preferences": {"a": [["b"],["b","c"]]}}"#;
        assert!(matches!(
            parse_instance(dup),
            Err(InstanceError::DuplicateTierMember { .. })
        ));
        let range = r#"{"agents": ["a"], "criteria": [{"name":"c","choices":["x","y"]}],
            "profiles": {"a": {"choices":[3],"weights":[1],"smoker":false,"comfortable_with_smoker":false}}}"#;
        assert!(matches!(
            parse_instance(range),
            Err(InstanceError::ChoiceOutOfRange { .. })
        ));
        let bad_obj = r#"{"agents": ["a"], "objective": [{"kind":"smoking"}]}"#;
        assert!(matches!(parse_instance(bad_obj), Err(InstanceError::Objective(_))));
        let bad_forbidden = r#"{"agents": ["a"], "forbidden": [["a","q"]]}"#;
        assert!(matches!(
            parse_instance(bad_forbidden),
            Err(InstanceError::UnknownAgent { .. })
        ));
    }
}

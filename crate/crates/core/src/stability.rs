//! Blocking pairs and weak stability.
//!
//! A pair `{x, y}` blocks `M` when both agents accept each other and each
//! is either single or strictly prefers the other to its current roommate.
//! Indifference never blocks.

use crate::instance::{AgentIndex, Comparison, Instance};
use crate::matching::Matching;

/// Canonical unordered blocking pair (smaller id first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockingPair {
    pub x: AgentIndex,
    pub y: AgentIndex,
}

/// How `x` compares `y` to `z`; see [`crate::instance::PreferenceOrder::compare`].
pub fn compare(inst: &Instance, x: AgentIndex, y: AgentIndex, z: AgentIndex) -> Comparison {
    match (inst.rank(x, y), inst.rank(x, z)) {
        (Some(a), Some(b)) if a < b => Comparison::PrefersFirst,
        (Some(a), Some(b)) if a > b => Comparison::PrefersSecond,
        (Some(_), Some(_)) => Comparison::Indifferent,
        _ => Comparison::Incomparable,
    }
}

/// `x` would rather have `y` than its roommate in `m`.
fn wants(inst: &Instance, m: &Matching, x: AgentIndex, y: AgentIndex) -> bool {
    m.is_single(x) || compare(inst, x, y, m.partner(x)) == Comparison::PrefersFirst
}

pub fn is_blocking_pair(inst: &Instance, m: &Matching, x: AgentIndex, y: AgentIndex) -> bool {
    x != y && inst.mutually_acceptable(x, y) && wants(inst, m, x, y) && wants(inst, m, y, x)
}

pub fn blocking_pairs(inst: &Instance, m: &Matching) -> Vec<BlockingPair> {
    let mut out = Vec::new();
    for x in 0..inst.len() {
        for y in inst.mutual_partners(x).filter(|&y| y > x) {
            if is_blocking_pair(inst, m, x, y) {
                let (a, b) = inst.canonical_pair(x, y);
                out.push(BlockingPair { x: a, y: b });
            }
        }
    }
    out.sort_by(|p, q| (inst.id(p.x), inst.id(p.y)).cmp(&(inst.id(q.x), inst.id(q.y))));
    out
}

pub fn is_stable(inst: &Instance, m: &Matching) -> bool {
    (0..inst.len()).all(|x| {
        inst.mutual_partners(x)
            .filter(|&y| y > x)
            .all(|y| !is_blocking_pair(inst, m, x, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{AgentId, InstanceParts, PreferenceOrder};

    fn build(lists: Vec<Vec<Vec<usize>>>) -> Instance {
        let n = lists.len();
        let agents = (0..n).map(|i| AgentId::new(format!("a{i}")).unwrap()).collect();
        let mut parts = InstanceParts::new(agents);
        parts.preferences = lists.into_iter().map(PreferenceOrder::new).collect();
        Instance::new(parts).unwrap()
    }

    #[test]
    fn singles_with_mutual_top_choices_block() {
        let inst = build(vec![vec![vec![1]], vec![vec![0]]]);
        let m = Matching::all_single(2);
        assert!(is_blocking_pair(&inst, &m, 0, 1));
        assert!(!is_stable(&inst, &m));
    }

    #[test]
    fn one_sided_acceptance_never_blocks() {
        let inst = build(vec![vec![vec![1]], vec![]]);
        let m = Matching::all_single(2);
        assert!(!is_blocking_pair(&inst, &m, 0, 1));
        assert!(blocking_pairs(&inst, &m).is_empty());
    }

    #[test]
    fn indifference_does_not_block() {
        // 0 is tied between 1 and 2; 2 prefers 0 to its roommate 3.
        let inst = build(vec![
            vec![vec![1, 2]],
            vec![vec![0]],
            vec![vec![0], vec![3]],
            vec![vec![2]],
        ]);
        let m = Matching::from_pairs(&inst, &[(0, 1), (2, 3)]).unwrap();
        assert!(!is_blocking_pair(&inst, &m, 0, 2));
        assert!(is_stable(&inst, &m));
    }

    #[test]
    fn mutual_top_choices_are_stable() {
        let inst = build(vec![
            vec![vec![1], vec![2]],
            vec![vec![0], vec![3]],
            vec![vec![3], vec![0]],
            vec![vec![2], vec![1]],
        ]);
        let m = Matching::from_pairs(&inst, &[(0, 1), (2, 3)]).unwrap();
        assert!(blocking_pairs(&inst, &m).is_empty());
    }
}

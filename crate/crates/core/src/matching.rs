use serde::{Deserialize, Serialize};

use crate::error::MatchingError;
use crate::instance::{AgentIndex, Instance};

/// A matching as an involution on agent indices; `partner(x) == x` means
/// `x` is single.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    partner: Vec<AgentIndex>,
}

impl Matching {
    /// Validates the involution and mutual acceptability against `inst`.
    pub fn new(inst: &Instance, partner: Vec<AgentIndex>) -> Result<Self, MatchingError> {
        if partner.len() != inst.len() {
            return Err(MatchingError::WrongSize {
                expected: inst.len(),
                found: partner.len(),
            });
        }
        for (x, &y) in partner.iter().enumerate() {
            if y >= partner.len() || partner[y] != x {
                return Err(MatchingError::NotInvolution(inst.id(x).to_string()));
            }
            if x != y && !inst.mutually_acceptable(x, y) {
                return Err(MatchingError::NotAcceptable(
                    inst.id(x).to_string(),
                    inst.id(y).to_string(),
                ));
            }
        }
        Ok(Matching { partner })
    }

    pub fn all_single(n: usize) -> Self {
        Matching {
            partner: (0..n).collect(),
        }
    }

    pub fn from_pairs(
        inst: &Instance,
        pairs: &[(AgentIndex, AgentIndex)],
    ) -> Result<Self, MatchingError> {
        let n = inst.len();
        let mut partner: Vec<_> = (0..n).collect();
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= n {
                    return Err(MatchingError::UnknownAgent(format!("#{x}")));
                }
                if partner[x] != x {
                    return Err(MatchingError::MatchedTwice(inst.id(x).to_string()));
                }
            }
            if a == b {
                return Err(MatchingError::NotInvolution(inst.id(a).to_string()));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Matching::new(inst, partner)
    }

    /// Parses the `pairs` of a matching document by id.
    pub fn from_id_pairs(inst: &Instance, pairs: &[(String, String)]) -> Result<Self, MatchingError> {
        let lookup = |id: &str| {
            inst.index_of(id)
                .ok_or_else(|| MatchingError::UnknownAgent(id.to_string()))
        };
        let pairs = pairs
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, MatchingError>>()?;
        Matching::from_pairs(inst, &pairs)
    }

    pub(crate) fn from_partner_unchecked(partner: Vec<AgentIndex>) -> Self {
        debug_assert!(partner.iter().enumerate().all(|(x, &y)| partner[y] == x));
        Matching { partner }
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    pub fn partner(&self, x: AgentIndex) -> AgentIndex {
        self.partner[x]
    }

    pub fn is_single(&self, x: AgentIndex) -> bool {
        self.partner[x] == x
    }

    pub fn partners(&self) -> &[AgentIndex] {
        &self.partner
    }

    /// Matched pairs `(x, y)` with `x < y` by index.
    pub fn pairs(&self) -> impl Iterator<Item = (AgentIndex, AgentIndex)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(x, &y)| x < y)
            .map(|(x, &y)| (x, y))
    }

    /// Pairs by id, each as (smaller id, larger id), the list sorted.
    pub fn id_pairs(&self, inst: &Instance) -> Vec<(String, String)> {
        let mut v: Vec<_> = self
            .pairs()
            .map(|(x, y)| {
                let (a, b) = inst.canonical_pair(x, y);
                (inst.id(a).to_string(), inst.id(b).to_string())
            })
            .collect();
        v.sort();
        v
    }

    pub fn singles(&self, inst: &Instance) -> Vec<String> {
        let mut v: Vec<_> = (0..self.len())
            .filter(|&x| self.is_single(x))
            .map(|x| inst.id(x).to_string())
            .collect();
        v.sort();
        v
    }
}

/// Serialized form of a solved or checked matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingDoc {
    pub pairs: Vec<(String, String)>,
    #[serde(default)]
    pub singles: Vec<String>,
    #[serde(default)]
    pub objective: Vec<u64>,
    #[serde(default)]
    pub stable: bool,
}

impl MatchingDoc {
    pub fn new(inst: &Instance, m: &Matching, objective: Vec<u64>, stable: bool) -> Self {
        MatchingDoc {
            pairs: m.id_pairs(inst),
            singles: m.singles(inst),
            objective,
            stable,
        }
    }
}

//! Brute-force ground truth for small instances.
//!
//! Deliberately naive and self-contained: it reads preference tiers and
//! profiles directly and does not share code with the stability,
//! objective or solver modules it is used to check.

use crate::error::{ObjectiveError, OracleError};
use crate::instance::{AgentIndex, Instance};
use crate::matching::Matching;
use crate::objectives::{ObjectiveConfig, ObjectiveLevel, ObjectiveVector};

pub const DEFAULT_CAP: usize = 10;

/// Every matching whose pairs are mutually acceptable and not forbidden.
pub fn enumerate_matchings(inst: &Instance) -> Result<std::vec::IntoIter<Matching>, OracleError> {
    enumerate_matchings_capped(inst, DEFAULT_CAP)
}

pub fn enumerate_matchings_capped(
    inst: &Instance,
    cap: usize,
) -> Result<std::vec::IntoIter<Matching>, OracleError> {
    let n = inst.len();
    if n > cap {
        return Err(OracleError::TooLarge { found: n, cap });
    }
    let listed = |x: usize, y: usize| inst.preferences(x).tiers().iter().any(|t| t.contains(&y));
    let pairable = |x: usize, y: usize| {
        let (a, b) = (x.min(y), x.max(y));
        listed(x, y) && listed(y, x) && !inst.forbidden().contains(&(a, b))
    };
    let mut out = Vec::new();
    let mut partner: Vec<Option<AgentIndex>> = vec![None; n];
    fn rec(
        partner: &mut Vec<Option<AgentIndex>>,
        pairable: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Matching>,
    ) {
        let Some(x) = partner.iter().position(Option::is_none) else {
            out.push(Matching::from_partner_unchecked(
                partner.iter().map(|p| p.expect("complete")).collect(),
            ));
            return;
        };
        partner[x] = Some(x);
        rec(partner, pairable, out);
        for y in x + 1..partner.len() {
            if partner[y].is_none() && pairable(x, y) {
                partner[x] = Some(y);
                partner[y] = Some(x);
                rec(partner, pairable, out);
                partner[y] = None;
            }
        }
        partner[x] = None;
    }
    rec(&mut partner, &pairable, &mut out);
    Ok(out.into_iter())
}

fn position(inst: &Instance, x: usize, y: usize) -> Option<usize> {
    inst.preferences(x).tiers().iter().position(|t| t.contains(&y))
}

/// Blocking test read straight off the tiers: mutual acceptability, then
/// each side single or strictly preferring the other to its partner.
pub fn blocks(inst: &Instance, m: &Matching, x: usize, y: usize) -> bool {
    if x == y {
        return false;
    }
    let (Some(rx), Some(ry)) = (position(inst, x, y), position(inst, y, x)) else {
        return false;
    };
    let x_wants = m.partner(x) == x || position(inst, x, m.partner(x)).is_some_and(|r| rx < r);
    let y_wants = m.partner(y) == y || position(inst, y, m.partner(y)).is_some_and(|r| ry < r);
    x_wants && y_wants
}

pub fn is_stable(inst: &Instance, m: &Matching) -> bool {
    let n = inst.len();
    (0..n).all(|x| (x + 1..n).all(|y| !blocks(inst, m, x, y)))
}

pub fn brute_force_stable(inst: &Instance) -> Result<Vec<Matching>, OracleError> {
    Ok(enumerate_matchings(inst)?.filter(|m| is_stable(inst, m)).collect())
}

fn level_value(inst: &Instance, m: &Matching, level: &ObjectiveLevel) -> Result<u64, ObjectiveError> {
    let profiles = inst.profiles().ok_or(ObjectiveError::MissingProfiles)?;
    let mut total = 0u64;
    for x in 0..m.len() {
        let y = m.partner(x);
        if x == y {
            continue;
        }
        let (px, py) = (&profiles[x], &profiles[y]);
        total += match level {
            ObjectiveLevel::Criterion { criterion } => {
                let i = inst
                    .criteria()
                    .and_then(|c| c.index_of(criterion))
                    .ok_or_else(|| ObjectiveError::UnknownCriterion(criterion.clone()))?;
                (i64::from(px.choices[i]) - i64::from(py.choices[i])).unsigned_abs()
            }
            ObjectiveLevel::Smoking => {
                let mut p = 0;
                if !px.smoker && py.smoker && !px.comfortable_with_smoker {
                    p += 1;
                }
                if px.smoker && py.smoker && !px.comfortable_with_smoker {
                    p += 1;
                }
                p
            }
            ObjectiveLevel::Diversity => {
                let d = |p: &crate::instance::AgentProfile| {
                    p.department
                        .clone()
                        .ok_or_else(|| ObjectiveError::MissingDepartment(inst.id(x).to_string()))
                };
                u64::from(d(px)? == d(py)?)
            }
        };
    }
    Ok(total)
}

pub fn vector(inst: &Instance, m: &Matching, cfg: &ObjectiveConfig) -> Result<ObjectiveVector, ObjectiveError> {
    cfg.levels
        .iter()
        .map(|l| level_value(inst, m, l))
        .collect::<Result<Vec<_>, _>>()
        .map(ObjectiveVector)
}

fn pair_list_key(inst: &Instance, m: &Matching) -> Vec<(String, String)> {
    let mut v: Vec<_> = (0..m.len())
        .filter(|&x| m.partner(x) != x)
        .map(|x| {
            let (a, b) = (inst.id(x).to_string(), inst.id(m.partner(x)).to_string());
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    v.sort();
    v.dedup();
    v
}

/// The level-by-level filter: keep the stable matchings minimizing level
/// 1, among those the ones minimizing level 2, and so on. Returns the
/// survivor with the smallest sorted pair list.
pub fn brute_force_optimum(
    inst: &Instance,
    cfg: &ObjectiveConfig,
) -> Result<Option<(Matching, ObjectiveVector)>, OracleError> {
    let mut pool = brute_force_stable(inst)?;
    for level in &cfg.levels {
        let values = pool
            .iter()
            .map(|m| level_value(inst, m, level))
            .collect::<Result<Vec<_>, _>>()?;
        let Some(&min) = values.iter().min() else {
            return Ok(None);
        };
        pool = pool
            .into_iter()
            .zip(values)
            .filter(|&(_, v)| v == min)
            .map(|(m, _)| m)
            .collect();
    }
    let Some(best) = pool.into_iter().min_by_key(|m| pair_list_key(inst, m)) else {
        return Ok(None);
    };
    let v = vector(inst, &best, cfg)?;
    Ok(Some((best, v)))
}

/// Lexicographic minimum of the objective vector over all stable
/// matchings, computed by direct comparison rather than filtering.
pub fn lexicographic_minimum(
    inst: &Instance,
    cfg: &ObjectiveConfig,
) -> Result<Option<ObjectiveVector>, OracleError> {
    let mut best: Option<ObjectiveVector> = None;
    for m in brute_force_stable(inst)? {
        let v = vector(inst, &m, cfg)?;
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best)
}

/// The smallest sorted pair list among stable matchings with vector `v`.
pub fn smallest_pair_list_with_vector(
    inst: &Instance,
    cfg: &ObjectiveConfig,
    v: &ObjectiveVector,
) -> Result<Option<Vec<(String, String)>>, OracleError> {
    let mut best = None;
    for m in brute_force_stable(inst)? {
        if vector(inst, &m, cfg)? == *v {
            let key = pair_list_key(inst, &m);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    Ok(best)
}

//! Logic-program text for an instance and objective.
//!
//! Orders become `prefer2(x, y, z)` facts between consecutive tiers plus
//! `prefer2(x, y, x)` for every acceptable `y`; tied agents get no fact.
//! Weak constraints follow the objective levels, highest priority first.

mod validator;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

pub use validator::{parse_program, validate_program, Atom, ProgramSummary, Statement, Term, ValidationError};

use crate::document::serialize_instance;
use crate::error::ObjectiveError;
use crate::instance::Instance;
use crate::objectives::{resolve_all, ObjectiveConfig, ResolvedLevel};

fn sanitize_one(raw: &str) -> String {
    let mut s: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    if !s.starts_with(|c: char| c.is_ascii_lowercase()) {
        s.insert(0, 'x');
    }
    s
}

/// Program constants for `names`: lowercase, non-alphanumerics as `_`,
/// an `x` prefix when the first character is not a letter, and `_2`, `_3`,
/// ... on collisions, assigned in sorted order of the raw names.
pub fn sanitize_ids<S: AsRef<str>>(names: &[S]) -> Vec<String> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].as_ref().cmp(names[b].as_ref()));
    let mut used: HashSet<String> = ["not".to_string()].into();
    let mut out = vec![String::new(); names.len()];
    for i in order {
        let base = sanitize_one(names[i].as_ref());
        let mut cand = base.clone();
        let mut k = 2;
        while used.contains(&cand) {
            cand = format!("{base}_{k}");
            k += 1;
        }
        used.insert(cand.clone());
        out[i] = cand;
    }
    out
}

pub fn agent_constants(inst: &Instance) -> Vec<String> {
    sanitize_ids(inst.agents())
}

pub fn instance_hash(inst: &Instance) -> String {
    let digest = Sha256::digest(serialize_instance(inst).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

const RULES: &str = "\
prefer(X,Y,Z) :- prefer2(X,Y,Z).
prefer(X,Y,Z) :- prefer(X,Y,W), prefer2(X,W,Z).
accept(X,Y) :- prefer2(X,Y,X), X != Y.
accept2(X,Y) :- accept(X,Y), accept(Y,X).
accept2(X,X) :- agent(X).
1 <= { room(X,Y) : agent(Y), accept2(X,Y) } <= 1 :- agent(X).
:- room(X,Y), not room(Y,X).
better(X,Y) :- room(X,Z), prefer(X,Y,Z), X != Y.
block(X,Y) :- accept(X,Y), accept(Y,X), better(X,Y), better(Y,X).
:- block(X,Y).
:- forbidden(X,Y), room(X,Y).
";

/// The whole program for `inst`'s current preference orders under `cfg`.
pub fn emit_program(inst: &Instance, cfg: &ObjectiveConfig) -> Result<String, ObjectiveError> {
    let levels = resolve_all(inst, cfg)?;
    let ids = agent_constants(inst);
    let crit_names: Vec<String> = inst
        .criteria()
        .map(|c| sanitize_ids(&c.criteria().iter().map(|c| c.name.as_str()).collect::<Vec<_>>()))
        .unwrap_or_default();
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "% stable roommates program");
    let _ = writeln!(w, "% instance sha256: {}", instance_hash(inst));
    let _ = writeln!(w, "% objective: {}", if cfg.is_empty() { "none".to_string() } else { cfg.to_string() });
    let _ = writeln!(w, "% explicit_first: {}", inst.explicit_first());
    let _ = writeln!(w, "% prefer2(X,Y,Z): X strictly prefers Y to Z, given between consecutive tiers;");
    let _ = writeln!(w, "% prefer2(X,Y,X): X accepts Y; prefer/3 is the transitive closure of prefer2/3.");
    let _ = writeln!(w, "% weak constraint priorities run from {} down to 1.", levels.len().max(1));

    for x in inst.indices_by_id() {
        let _ = writeln!(w, "agent({}).", ids[x]);
    }
    for x in inst.indices_by_id() {
        let tiers = inst.preferences(x).tiers();
        for pair in tiers.windows(2) {
            for &y in &pair[0] {
                for &z in &pair[1] {
                    let _ = writeln!(w, "prefer2({},{},{}).", ids[x], ids[y], ids[z]);
                }
            }
        }
        for &y in tiers.iter().flatten() {
            let _ = writeln!(w, "prefer2({},{},{}).", ids[x], ids[y], ids[x]);
        }
    }
    for &(a, b) in inst.forbidden() {
        let (a, b) = inst.canonical_pair(a, b);
        let _ = writeln!(w, "forbidden({},{}).", ids[a], ids[b]);
    }

    let criteria: BTreeSet<usize> = levels
        .iter()
        .filter_map(|l| match l {
            ResolvedLevel::Criterion(i) => Some(*i),
            _ => None,
        })
        .collect();
    let needs_smoking = levels.contains(&ResolvedLevel::Smoking);
    let needs_dept = levels.contains(&ResolvedLevel::Diversity);
    if let Some(profiles) = inst.profiles() {
        let mut depts = BTreeMap::new();
        if needs_dept {
            let raw: BTreeSet<&str> = profiles.iter().filter_map(|p| p.department.as_deref()).collect();
            let raw: Vec<&str> = raw.into_iter().collect();
            depts = raw.iter().copied().zip(sanitize_ids(&raw)).collect();
        }
        for x in inst.indices_by_id() {
            let p = &profiles[x];
            for &i in &criteria {
                let _ = writeln!(w, "choice({},{},{}).", ids[x], crit_names[i], p.choices[i]);
            }
            if needs_smoking {
                if p.smoker {
                    let _ = writeln!(w, "smoker({}).", ids[x]);
                }
                if p.comfortable_with_smoker {
                    let _ = writeln!(w, "comfortable({}).", ids[x]);
                }
            }
            if let (true, Some(d)) = (needs_dept, p.department.as_deref()) {
                let _ = writeln!(w, "dept({},{}).", ids[x], depts[d]);
            }
        }
    }

    out.push_str(RULES);
    let n = levels.len();
    for (k, level) in levels.iter().enumerate() {
        let p = n - k;
        let w = &mut out;
        match *level {
            ResolvedLevel::Criterion(i) => {
                let c = &crit_names[i];
                let _ = writeln!(
                    w,
                    ":~ room(X,Y), X != Y, choice(X,{c},R1), choice(Y,{c},R2), R1 > R2. [R1-R2@{p}, X, Y, {c}]"
                );
                let _ = writeln!(
                    w,
                    ":~ room(X,Y), X != Y, choice(X,{c},R1), choice(Y,{c},R2), R2 > R1. [R2-R1@{p}, X, Y, {c}]"
                );
            }
            ResolvedLevel::Smoking => {
                let _ = writeln!(
                    w,
                    ":~ room(X,Y), X != Y, not smoker(X), smoker(Y), not comfortable(X). [1@{p}, X, Y, smoking]"
                );
                let _ = writeln!(
                    w,
                    ":~ room(X,Y), X != Y, smoker(X), smoker(Y), not comfortable(X). [1@{p}, X, Y, smoking]"
                );
            }
            ResolvedLevel::Diversity => {
                let _ = writeln!(
                    w,
                    ":~ room(X,Y), X != Y, dept(X,D), dept(Y,D). [1@{p}, X, Y, diversity]"
                );
            }
        }
    }
    Ok(out)
}

/// Agents and orders recovered from the `agent/1` and `prefer2/3` facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedFacts {
    pub agents: Vec<String>,
    /// Tiers per agent, best first; agents inside a tier sorted.
    pub orders: BTreeMap<String, Vec<Vec<String>>>,
}

/// Rebuilds weak orders: `y` is acceptable to `x` iff `prefer2(x,y,x)`,
/// and its tier is the length of the longest `prefer2` chain above it.
pub fn parse_facts(text: &str) -> Result<ParsedFacts, ValidationError> {
    let mut agents = Vec::new();
    let mut accepts: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut above: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    let constant = |t: &Term| match t {
        Term::Const(c) => Some(c.clone()),
        _ => None,
    };
    for st in parse_program(text)? {
        let Some(atom) = st.as_fact() else { continue };
        let args: Option<Vec<String>> = atom.args.iter().map(constant).collect();
        let Some(args) = args else { continue };
        match (atom.predicate.as_str(), args.as_slice()) {
            ("agent", [a]) => agents.push(a.clone()),
            ("prefer2", [x, y, z]) if x == z => {
                accepts.entry(x.clone()).or_default().insert(y.clone());
            }
            ("prefer2", [x, y, z]) => {
                above.entry((x.clone(), z.clone())).or_default().insert(y.clone());
            }
            _ => {}
        }
    }
    let mut orders = BTreeMap::new();
    for a in &agents {
        let acc = accepts.remove(a).unwrap_or_default();
        let mut depth: BTreeMap<&String, usize> = BTreeMap::new();
        fn tier<'a>(
            x: &str,
            y: &'a String,
            above: &'a BTreeMap<(String, String), BTreeSet<String>>,
            depth: &mut BTreeMap<&'a String, usize>,
        ) -> usize {
            if let Some(&d) = depth.get(y) {
                return d;
            }
            let d = above
                .get(&(x.to_string(), y.clone()))
                .map_or(0, |ups| ups.iter().map(|u| tier(x, u, above, depth) + 1).max().unwrap_or(0));
            depth.insert(y, d);
            d
        }
        let mut tiers: Vec<Vec<String>> = Vec::new();
        for y in &acc {
            let d = tier(a, y, &above, &mut depth);
            if tiers.len() <= d {
                tiers.resize(d + 1, Vec::new());
            }
            tiers[d].push(y.clone());
        }
        tiers.retain(|t| !t.is_empty());
        orders.insert(a.clone(), tiers);
    }
    Ok(ParsedFacts { agents, orders })
}

/// The orders of `inst` in the shape [`parse_facts`] returns.
pub fn expected_facts(inst: &Instance) -> ParsedFacts {
    let ids = agent_constants(inst);
    let agents = inst.indices_by_id().into_iter().map(|x| ids[x].clone()).collect();
    let orders = (0..inst.len())
        .map(|x| {
            let tiers = inst
                .preferences(x)
                .tiers()
                .iter()
                .map(|t| {
                    let mut v: Vec<String> = t.iter().map(|&y| ids[y].clone()).collect();
                    v.sort();
                    v
                })
                .collect();
            (ids[x].clone(), tiers)
        })
        .collect();
    ParsedFacts { agents, orders }
}

//! Stable matchings and lexicographically optimal stable matchings.
//!
//! [`solve_decision`] looks for any weakly stable matching that avoids
//! forbidden pairs. [`solve_optimize`] minimizes the objective levels one
//! at a time: level 1 is minimized, its optimum becomes a hard bound,
//! level 2 is minimized under it, and so on. Every improving incumbent is
//! reported as a [`ProgressEvent`].
//!
//! With `deterministic` set, the returned matching is the one with the
//! lexicographically smallest sorted pair list among all matchings that
//! share the final objective vector.

mod engine;

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SolveError;
use crate::instance::{AgentIndex, Instance};
use crate::matching::Matching;
use crate::objectives::{resolve_all, vector_for_levels, ObjectiveConfig, ObjectiveVector, ResolvedLevel};

use engine::{Control, Engine, RootOp, RunStatus, ValueOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Decision,
    Optimize,
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub mode: Mode,
    /// Falls back to the instance's objective when `None`.
    pub objective: Option<ObjectiveConfig>,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    pub deterministic: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            mode: Mode::Decision,
            objective: None,
            time_limit: None,
            seed: 0,
            deterministic: true,
        }
    }
}

impl SolveConfig {
    pub fn decision() -> Self {
        Self::default()
    }

    pub fn optimize(objective: Option<ObjectiveConfig>) -> Self {
        SolveConfig {
            mode: Mode::Optimize,
            objective,
            ..Self::default()
        }
    }
}

/// An improving solution found `elapsed` seconds into the solve.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgressEvent {
    pub elapsed: f64,
    pub vector: ObjectiveVector,
}

impl fmt::Display for ProgressEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={:.6} vector={}", self.elapsed, self.vector)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Solution {
        matching: Matching,
        objective: ObjectiveVector,
        proven_optimal: bool,
    },
    Unsat,
    Timeout {
        best: Option<(Matching, ObjectiveVector)>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub restarts: u64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub events: Vec<ProgressEvent>,
    pub stats: SolveStats,
}

impl SolveResult {
    /// The solution or the best incumbent at timeout.
    pub fn matching(&self) -> Option<(&Matching, &ObjectiveVector)> {
        match &self.outcome {
            Outcome::Solution {
                matching, objective, ..
            } => Some((matching, objective)),
            Outcome::Timeout { best: Some((m, v)) } => Some((m, v)),
            _ => None,
        }
    }
}

pub fn solve(inst: &Instance, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    solve_with_progress(inst, cfg, &mut |_| {})
}

pub fn solve_decision(inst: &Instance, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    let cfg = SolveConfig {
        mode: Mode::Decision,
        ..cfg.clone()
    };
    solve_with_progress(inst, &cfg, &mut |_| {})
}

pub fn solve_optimize(inst: &Instance, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    let cfg = SolveConfig {
        mode: Mode::Optimize,
        ..cfg.clone()
    };
    solve_with_progress(inst, &cfg, &mut |_| {})
}

/// Solves, handing each improving incumbent to `on_event` as it is found.
pub fn solve_with_progress(
    inst: &Instance,
    cfg: &SolveConfig,
    on_event: &mut dyn FnMut(&ProgressEvent),
) -> Result<SolveResult, SolveError> {
    let objective = cfg.objective.as_ref().or(inst.objective());
    let levels = match (cfg.mode, objective) {
        (Mode::Optimize, None) => return Err(SolveError::MissingObjective),
        (_, Some(obj)) => resolve_all(inst, obj)?,
        (Mode::Decision, None) => Vec::new(),
    };
    let mut search = Search {
        inst,
        cfg,
        levels,
        start: Instant::now(),
        ctl: Control {
            deadline: cfg.time_limit.map(|t| Instant::now() + t),
            node_limit: None,
            nodes: 0,
        },
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        events: Vec::new(),
        restarts: 0,
        on_event,
    };
    let outcome = match cfg.mode {
        Mode::Decision => search.decide(),
        Mode::Optimize => search.optimize(),
    };
    let outcome = match outcome {
        Outcome::Solution {
            matching,
            objective,
            proven_optimal: true,
        } if cfg.deterministic => {
            let matching = search.smallest_pair_list(matching, &objective);
            Outcome::Solution {
                matching,
                objective,
                proven_optimal: true,
            }
        }
        other => other,
    };
    Ok(SolveResult {
        outcome,
        events: search.events,
        stats: SolveStats {
            nodes: search.ctl.nodes,
            restarts: search.restarts,
        },
    })
}

struct Search<'a, 'b> {
    inst: &'a Instance,
    cfg: &'a SolveConfig,
    levels: Vec<ResolvedLevel>,
    start: Instant,
    ctl: Control,
    rng: ChaCha8Rng,
    events: Vec<ProgressEvent>,
    restarts: u64,
    on_event: &'b mut dyn FnMut(&ProgressEvent),
}

enum Query {
    Found(Vec<AgentIndex>),
    Infeasible,
    Timeout,
}

impl<'a> Search<'a, '_> {
    /// Most constrained first: fewest mutually acceptable partners, ties
    /// broken by a seeded random key.
    fn order_key(&mut self) -> Vec<u64> {
        (0..self.inst.len())
            .map(|x| {
                let degree = self.inst.mutual_partners(x).count() as u64;
                (degree << 32) | u64::from(self.rng.gen::<u32>())
            })
            .collect()
    }

    fn engine(&mut self, order: ValueOrder) -> Engine<'a> {
        let key = self.order_key();
        Engine::new(self.inst, &self.levels, key, order)
    }

    fn vector(&self, partner: &[AgentIndex]) -> ObjectiveVector {
        vector_for_levels(
            self.inst,
            &Matching::from_partner_unchecked(partner.to_vec()),
            &self.levels,
        )
    }

    fn emit(&mut self, vector: ObjectiveVector) {
        let ev = ProgressEvent {
            elapsed: self.start.elapsed().as_secs_f64(),
            vector,
        };
        (self.on_event)(&ev);
        self.events.push(ev);
    }

    fn first_leaf(&mut self, ops: &[RootOp], upper: Option<&[u64]>, node_limit: Option<u64>) -> (RunStatus, Option<Vec<AgentIndex>>) {
        let key = self.order_key();
        let mut eng = Engine::new(self.inst, &self.levels, key, ValueOrder::Rank);
        if let Some(u) = upper {
            eng.upper.copy_from_slice(u);
        }
        if !eng.apply(ops) {
            return (RunStatus::Exhausted, None);
        }
        self.ctl.node_limit = node_limit;
        let mut found = None;
        let status = eng.run(&mut self.ctl, &mut |p, _| {
            found = Some(p.to_vec());
            false
        });
        self.ctl.node_limit = None;
        (status, found)
    }

    fn decide(&mut self) -> Outcome {
        // Geometric restarts with fresh random tie-breaking unless a single
        // reproducible tree walk is requested.
        let mut limit = (!self.cfg.deterministic).then_some(2_000u64);
        loop {
            let (status, found) = self.first_leaf(&[], None, limit);
            match status {
                RunStatus::Stopped => {
                    let partner = found.expect("stopped on a leaf");
                    let v = self.vector(&partner);
                    self.emit(v.clone());
                    return Outcome::Solution {
                        matching: Matching::from_partner_unchecked(partner),
                        objective: v,
                        proven_optimal: true,
                    };
                }
                RunStatus::Exhausted => return Outcome::Unsat,
                RunStatus::Timeout => return Outcome::Timeout { best: None },
                RunStatus::NodeLimit => {
                    self.restarts += 1;
                    limit = limit.map(|l| l * 2);
                }
            }
        }
    }

    fn optimize(&mut self) -> Outcome {
        let n_levels = self.levels.len();
        let mut incumbent: Option<(Vec<AgentIndex>, Vec<u64>)> = None;
        for stage in 0..n_levels.max(1) {
            let mut upper = vec![u64::MAX; n_levels];
            if let Some((_, v)) = &incumbent {
                upper[..stage].copy_from_slice(&v[..stage]);
                if n_levels > 0 {
                    if v[stage] == 0 {
                        continue;
                    }
                    upper[stage] = v[stage] - 1;
                }
            }
            let mut eng = self.engine(ValueOrder::Cost);
            eng.upper.copy_from_slice(&upper);
            let inst = self.inst;
            let levels = &self.levels;
            let start = self.start;
            let events = &mut self.events;
            let on_event = &mut self.on_event;
            let status = eng.run(&mut self.ctl, &mut |p, up| {
                let v = vector_for_levels(inst, &Matching::from_partner_unchecked(p.to_vec()), levels).0;
                let ev = ProgressEvent {
                    elapsed: start.elapsed().as_secs_f64(),
                    vector: ObjectiveVector(v.clone()),
                };
                on_event(&ev);
                events.push(ev);
                let done = n_levels == 0 || v[stage] == 0;
                if !done {
                    up[stage] = v[stage] - 1;
                }
                incumbent = Some((p.to_vec(), v));
                !done
            });
            if status == RunStatus::Timeout {
                return Outcome::Timeout {
                    best: incumbent.map(|(p, v)| (Matching::from_partner_unchecked(p), ObjectiveVector(v))),
                };
            }
            if incumbent.is_none() {
                return Outcome::Unsat;
            }
        }
        let (p, v) = incumbent.expect("at least one stage ran");
        Outcome::Solution {
            matching: Matching::from_partner_unchecked(p),
            objective: ObjectiveVector(v),
            proven_optimal: true,
        }
    }

    /// Greedy walk over agents in id order, keeping the smallest feasible
    /// next pair at each step. Falls back to `witness` on timeout.
    fn smallest_pair_list(&mut self, witness: Matching, objective: &ObjectiveVector) -> Matching {
        let inst = self.inst;
        let n = inst.len();
        let upper = objective.0.clone();
        let by_id = inst.indices_by_id();
        let mut witness = witness.partners().to_vec();
        let mut ops: Vec<RootOp> = Vec::new();
        let mut decided = vec![false; n];

        let query = |this: &mut Self, ops: &[RootOp]| -> Query {
            match this.first_leaf(ops, Some(&upper), None) {
                (RunStatus::Stopped, Some(p)) => Query::Found(p),
                (RunStatus::Exhausted, _) => Query::Infeasible,
                _ => Query::Timeout,
            }
        };

        for (i, &a) in by_id.iter().enumerate() {
            if decided[a] {
                continue;
            }
            let rest: Vec<AgentIndex> = by_id[i..].iter().copied().filter(|&x| !decided[x]).collect();
            if rest.iter().all(|&x| witness[x] == x) {
                ops.extend(rest.iter().map(|&x| RootOp::Single(x)));
                break;
            }
            let mut trial = ops.clone();
            trial.extend(rest.iter().map(|&x| RootOp::Single(x)));
            match query(self, &trial) {
                Query::Found(p) => {
                    witness = p;
                    break;
                }
                Query::Infeasible => {}
                Query::Timeout => return Matching::from_partner_unchecked(witness),
            }

            let current = witness[a];
            let mut options: Vec<AgentIndex> = inst
                .mutual_partners(a)
                .filter(|&p| !decided[p] && !inst.is_forbidden(a, p))
                .filter(|&p| current == a || inst.id(p) < inst.id(current))
                .collect();
            options.sort_by(|&p, &q| inst.id(p).cmp(inst.id(q)));
            let mut chosen = None;
            for p in options {
                let mut trial = ops.clone();
                trial.push(RootOp::Pair(a, p));
                match query(self, &trial) {
                    Query::Found(w) => {
                        witness = w;
                        chosen = Some(p);
                        break;
                    }
                    Query::Infeasible => {}
                    Query::Timeout => return Matching::from_partner_unchecked(witness),
                }
            }
            let partner = chosen.unwrap_or(current);
            decided[a] = true;
            if partner == a {
                ops.push(RootOp::Single(a));
            } else {
                decided[partner] = true;
                ops.push(RootOp::Pair(a, partner));
            }
        }
        Matching::from_partner_unchecked(witness)
    }
}

#[cfg(test)]
mod tests;

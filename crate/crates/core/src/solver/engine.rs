//! Backtracking search over partner domains with stability propagation.
//!
//! Every agent `x` has a domain: the candidates it may still be matched
//! with (mutually acceptable, not forbidden), plus "single". Candidates are
//! kept sorted by `x`'s rank so the best alive candidate is a pointer.
//!
//! Stability is a binary clause per mutually acceptable pair `{x, y}`
//! (forbidden pairs included): *x ends up with someone at least as good
//! as y*, or *y ends up with someone at least as good as x*. Once the best
//! alive candidate of `x` is strictly worse than `y`, the first half is
//! dead and `y`'s domain is capped at `rank_y(x)`, single removed.
//! Domains only shrink along a branch, so each clause fires at most once
//! per branch; `processed[x]` tracks how far down `x`'s list that has
//! happened.
//!
//! All changes go on a trail and are undone on backtrack.

use std::time::Instant;

use crate::instance::{AgentIndex, Instance};
use crate::objectives::{directed_cost, ResolvedLevel};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Clause {
    rank_self: u32,
    other: u32,
    rank_other: u32,
}

#[derive(Clone, Copy)]
enum Undo {
    Kill(u32, u32),
    Single(u32),
    Best(u32, u32),
    Last(u32, u32),
    Processed(u32, u32),
    Cap(u32, u32),
}

struct Frame {
    mark: usize,
    x: u32,
    k: u32,
    right: bool,
}

/// Constraint applied before the search starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RootOp {
    Pair(AgentIndex, AgentIndex),
    Single(AgentIndex),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RunStatus {
    Exhausted,
    Stopped,
    NodeLimit,
    Timeout,
}

/// Budget shared by consecutive runs.
pub(crate) struct Control {
    pub deadline: Option<Instant>,
    pub node_limit: Option<u64>,
    pub nodes: u64,
}

impl Control {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Value ordering at branch points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ValueOrder {
    /// Best ranked candidate first.
    Rank,
    /// Cheapest candidate by the objective levels, then rank.
    Cost,
}

pub(crate) struct Engine<'a> {
    inst: &'a Instance,
    n_levels: usize,
    value_order: ValueOrder,
    cand: Vec<Vec<u32>>,
    cand_rank: Vec<Vec<u32>>,
    pos: Vec<Vec<u32>>,
    clauses: Vec<Vec<Clause>>,
    // cost[level][x][k]
    cost: Vec<Vec<Vec<u64>>>,
    order_key: Vec<u64>,

    alive: Vec<Vec<bool>>,
    single_ok: Vec<bool>,
    count: Vec<u32>,
    best: Vec<u32>,
    last: Vec<u32>,
    processed: Vec<u32>,
    cap: Vec<u32>,
    trail: Vec<Undo>,
    queue: Vec<u32>,
    queued: Vec<bool>,
    /// Inclusive upper bound per objective level, `u64::MAX` for none.
    pub upper: Vec<u64>,
}

impl<'a> Engine<'a> {
    pub fn new(
        inst: &'a Instance,
        levels: &[ResolvedLevel],
        order_key: Vec<u64>,
        value_order: ValueOrder,
    ) -> Self {
        let n = inst.len();
        let mut cand = Vec::with_capacity(n);
        let mut cand_rank = Vec::with_capacity(n);
        let mut clauses = Vec::with_capacity(n);
        let mut pos = vec![vec![NONE; n]; n];
        for x in 0..n {
            let mut mutual: Vec<AgentIndex> = inst.mutual_partners(x).collect();
            mutual.sort_by_key(|&y| (inst.raw_rank(x, y), y));
            clauses.push(
                mutual
                    .iter()
                    .map(|&y| Clause {
                        rank_self: inst.raw_rank(x, y),
                        other: y as u32,
                        rank_other: inst.raw_rank(y, x),
                    })
                    .collect::<Vec<_>>(),
            );
            let allowed: Vec<u32> = mutual
                .iter()
                .filter(|&&y| !inst.is_forbidden(x, y))
                .map(|&y| y as u32)
                .collect();
            for (k, &y) in allowed.iter().enumerate() {
                pos[x][y as usize] = k as u32;
            }
            cand_rank.push(allowed.iter().map(|&y| inst.raw_rank(x, y as usize)).collect());
            cand.push(allowed);
        }
        let cost = levels
            .iter()
            .map(|&l| {
                (0..n)
                    .map(|x| cand[x].iter().map(|&y| directed_cost(inst, l, x, y as usize)).collect())
                    .collect()
            })
            .collect();
        let alive = cand.iter().map(|c| vec![true; c.len()]).collect();
        let count = cand.iter().map(|c| c.len() as u32 + 1).collect();
        let last = cand.iter().map(|c| c.len() as u32).collect();
        Engine {
            inst,
            n_levels: levels.len(),
            value_order,
            cand,
            cand_rank,
            pos,
            clauses,
            cost,
            order_key,
            alive,
            single_ok: vec![true; n],
            count,
            best: vec![0; n],
            last,
            processed: vec![0; n],
            cap: vec![NONE; n],
            trail: Vec::new(),
            queue: (0..n as u32).rev().collect(),
            queued: vec![true; n],
            upper: vec![u64::MAX; levels.len()],
        }
    }

    fn enqueue(&mut self, x: u32) {
        if !self.queued[x as usize] {
            self.queued[x as usize] = true;
            self.queue.push(x);
        }
    }

    fn clear_queue(&mut self) {
        for &x in &self.queue {
            self.queued[x as usize] = false;
        }
        self.queue.clear();
    }

    fn kill(&mut self, x: u32, k: u32) {
        let (xi, ki) = (x as usize, k as usize);
        if !self.alive[xi][ki] {
            return;
        }
        self.alive[xi][ki] = false;
        self.count[xi] -= 1;
        self.trail.push(Undo::Kill(x, k));
        if k == self.best[xi] {
            let old = self.best[xi];
            let len = self.cand[xi].len() as u32;
            let mut b = old;
            while b < len && !self.alive[xi][b as usize] {
                b += 1;
            }
            self.best[xi] = b;
            self.trail.push(Undo::Best(x, old));
        }
        if k + 1 == self.last[xi] {
            let old = self.last[xi];
            let mut l = old;
            while l > self.best[xi] && !self.alive[xi][l as usize - 1] {
                l -= 1;
            }
            self.last[xi] = l;
            self.trail.push(Undo::Last(x, old));
        }
        self.enqueue(x);
    }

    fn remove_pair(&mut self, x: u32, k: u32) {
        let y = self.cand[x as usize][k as usize];
        let k2 = self.pos[y as usize][x as usize];
        self.kill(x, k);
        self.kill(y, k2);
    }

    fn forbid_single(&mut self, x: u32) {
        let xi = x as usize;
        if self.single_ok[xi] {
            self.single_ok[xi] = false;
            self.count[xi] -= 1;
            self.trail.push(Undo::Single(x));
            self.enqueue(x);
        }
    }

    fn make_single(&mut self, x: u32) {
        let xi = x as usize;
        let (b, l) = (self.best[xi], self.last[xi]);
        for k in b..l {
            if self.alive[xi][k as usize] {
                self.remove_pair(x, k);
            }
        }
    }

    fn assign(&mut self, x: u32, keep: u32) {
        let xi = x as usize;
        let (b, l) = (self.best[xi], self.last[xi]);
        for k in b..l {
            if k != keep && self.alive[xi][k as usize] {
                self.remove_pair(x, k);
            }
        }
        self.forbid_single(x);
    }

    /// Caps `y`'s domain at rank `t`: single and anything ranked worse go.
    fn cap(&mut self, y: u32, t: u32) {
        let yi = y as usize;
        if t >= self.cap[yi] {
            return;
        }
        self.trail.push(Undo::Cap(y, self.cap[yi]));
        self.cap[yi] = t;
        self.forbid_single(y);
        while self.last[yi] > self.best[yi] && self.cand_rank[yi][self.last[yi] as usize - 1] > t {
            let k = self.last[yi] - 1;
            if self.alive[yi][k as usize] {
                self.remove_pair(y, k);
            } else {
                self.trail.push(Undo::Last(y, self.last[yi]));
                self.last[yi] = k;
            }
        }
    }

    fn best_rank(&self, x: usize) -> u32 {
        let b = self.best[x] as usize;
        if b < self.cand[x].len() {
            self.cand_rank[x][b]
        } else {
            NONE
        }
    }

    fn propagate(&mut self) -> bool {
        while let Some(x) = self.queue.pop() {
            let xi = x as usize;
            self.queued[xi] = false;
            if self.count[xi] == 0 {
                self.clear_queue();
                return false;
            }
            let br = self.best_rank(xi);
            while (self.processed[xi] as usize) < self.clauses[xi].len() {
                let c = self.clauses[xi][self.processed[xi] as usize];
                if c.rank_self >= br {
                    break;
                }
                self.trail.push(Undo::Processed(x, self.processed[xi]));
                self.processed[xi] += 1;
                self.cap(c.other, c.rank_other);
            }
            if self.count[xi] == 1 && !self.single_ok[xi] {
                let y = self.cand[xi][self.best[xi] as usize];
                let k = self.pos[y as usize][xi];
                if self.count[y as usize] > 1 {
                    self.assign(y, k);
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail above mark") {
                Undo::Kill(x, k) => {
                    self.alive[x as usize][k as usize] = true;
                    self.count[x as usize] += 1;
                }
                Undo::Single(x) => {
                    self.single_ok[x as usize] = true;
                    self.count[x as usize] += 1;
                }
                Undo::Best(x, o) => self.best[x as usize] = o,
                Undo::Last(x, o) => self.last[x as usize] = o,
                Undo::Processed(x, o) => self.processed[x as usize] = o,
                Undo::Cap(x, o) => self.cap[x as usize] = o,
            }
        }
    }

    /// Applies root constraints; call before [`Engine::run`].
    pub fn apply(&mut self, ops: &[RootOp]) -> bool {
        for &op in ops {
            match op {
                RootOp::Pair(x, y) => {
                    let k = self.pos[x][y];
                    if k == NONE || !self.alive[x][k as usize] {
                        return false;
                    }
                    self.assign(x as u32, k);
                }
                RootOp::Single(x) => self.make_single(x as u32),
            }
        }
        true
    }

    fn lower_bound(&self, level: usize) -> u64 {
        let mut total = 0;
        for x in 0..self.cand.len() {
            if self.single_ok[x] {
                continue;
            }
            let (b, l) = (self.best[x] as usize, self.last[x] as usize);
            let row = &self.cost[level][x];
            total += (b..l)
                .filter(|&k| self.alive[x][k])
                .map(|k| row[k])
                .min()
                .unwrap_or(0);
        }
        total
    }

    fn within_bounds(&self) -> bool {
        (0..self.n_levels).all(|l| self.upper[l] == u64::MAX || self.lower_bound(l) <= self.upper[l])
    }

    fn choose(&self) -> Option<(u32, u32)> {
        let mut pick: Option<(u32, u64, usize)> = None;
        for x in 0..self.cand.len() {
            let c = self.count[x];
            if c < 2 {
                continue;
            }
            let key = self.order_key[x];
            if pick.is_none_or(|(pc, pk, _)| (c, key) < (pc, pk)) {
                pick = Some((c, key, x));
            }
        }
        let (_, _, x) = pick?;
        let (b, l) = (self.best[x] as usize, self.last[x] as usize);
        let k = match self.value_order {
            ValueOrder::Rank => b,
            ValueOrder::Cost => (b..l)
                .filter(|&k| self.alive[x][k])
                .min_by(|&p, &q| {
                    let cp = self.cost.iter().map(|lv| lv[x][p]);
                    let cq = self.cost.iter().map(|lv| lv[x][q]);
                    cp.cmp(cq).then(self.cand_rank[x][p].cmp(&self.cand_rank[x][q]))
                })
                .expect("count >= 2 implies an alive candidate"),
        };
        Some((x as u32, k as u32))
    }

    fn extract(&self) -> Vec<AgentIndex> {
        (0..self.cand.len())
            .map(|x| {
                if self.single_ok[x] {
                    x
                } else {
                    self.cand[x][self.best[x] as usize] as usize
                }
            })
            .collect()
    }

    /// Depth-first search. `on_leaf` receives every complete stable
    /// assignment within bounds and may tighten `upper`; returning `false`
    /// stops the search.
    pub fn run(
        &mut self,
        ctl: &mut Control,
        on_leaf: &mut dyn FnMut(&[AgentIndex], &mut [u64]) -> bool,
    ) -> RunStatus {
        let started = ctl.nodes;
        let mut stack: Vec<Frame> = Vec::new();
        let mut ok = self.propagate();
        loop {
            if ok {
                ok = self.within_bounds();
            }
            if ok {
                ctl.nodes += 1;
                if ctl.nodes & 255 == 0 && ctl.expired() {
                    self.clear_queue();
                    return RunStatus::Timeout;
                }
                if ctl.node_limit.is_some_and(|lim| ctl.nodes - started >= lim) {
                    self.clear_queue();
                    return RunStatus::NodeLimit;
                }
                if let Some((x, k)) = self.choose() {
                    stack.push(Frame {
                        mark: self.trail.len(),
                        x,
                        k,
                        right: false,
                    });
                    self.assign(x, k);
                    ok = self.propagate();
                    continue;
                }
                let partner = self.extract();
                debug_assert!(crate::stability::is_stable(
                    self.inst,
                    &crate::matching::Matching::from_partner_unchecked(partner.clone())
                ));
                if !on_leaf(&partner, &mut self.upper) {
                    return RunStatus::Stopped;
                }
            }
            self.clear_queue();
            loop {
                let Some(mut frame) = stack.pop() else {
                    return RunStatus::Exhausted;
                };
                self.undo_to(frame.mark);
                if !frame.right {
                    frame.right = true;
                    let (x, k) = (frame.x, frame.k);
                    stack.push(frame);
                    self.remove_pair(x, k);
                    ok = self.propagate();
                    break;
                }
            }
        }
    }
}

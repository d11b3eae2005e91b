// SPDX-License-Identifier: Apache-2.0

//! A compact CDCL solver: two watched literals, first-UIP learning, VSIDS,
//! Luby restarts, and phase saving whose initial phases come from a
//! [`Policy`]. Runs are fully deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aig::Cnf;
use crate::boolenv::{BoolEnv, Policy};

/// Default conflict budget per solver call.
pub const DEFAULT_CONFLICT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// Value of CNF variable `v` is at position `v - 1`.
    Sat(Vec<bool>),
    Unsat,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("SAT conflict budget of {0} exhausted")]
    BudgetExceeded(u64),
}

const TRUE: u8 = 1;
const FALSE: u8 = 0;
const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;
const RESTART_UNIT: u64 = 100;

fn var_of(l: u32) -> usize {
    (l >> 1) as usize
}

fn encode(l: i32) -> u32 {
    let v = l.unsigned_abs() - 1;
    (v << 1) | (l < 0) as u32
}

fn lit_value(assign: &[u8], l: u32) -> u8 {
    let a = assign[var_of(l)];
    if a == UNDEF {
        UNDEF
    } else {
        a ^ (l & 1) as u8
    }
}

fn luby(mut i: u64) -> u64 {
    // i-th element (0-based) of 1 1 2 1 1 2 4 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

struct Clause {
    lits: Vec<u32>,
    learnt: bool,
    lbd: u32,
    deleted: bool,
}

/// Binary max-heap of variables keyed by activity, ties to the lower index.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: (0..n as u32).collect(),
            pos: (0..n).collect(),
        }
    }

    fn better(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != NOT_IN_HEAP
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) {
                r
            } else {
                l
            };
            if !Self::better(act, self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i;
        self.up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

pub struct Solver {
    nvars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<u32>>,
    assign: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    num_learnts: usize,
    max_learnts: f64,
    conflicts: u64,
}

impl Solver {
    pub fn new(cnf: &Cnf, policy: Policy) -> Self {
        let n = cnf.num_vars as usize;
        let mut chooser = policy.chooser();
        let mut s = Solver {
            nvars: n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assign: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: VarHeap::new(n),
            phase: (0..n).map(|_| chooser.next_pref()).collect(),
            seen: vec![false; n],
            ok: true,
            num_learnts: 0,
            max_learnts: (cnf.clauses.len() as f64 / 3.0).max(2000.0),
            conflicts: 0,
        };
        for c in &cnf.clauses {
            s.add_clause(c.iter().map(|&l| encode(l)).collect());
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    fn add_clause(&mut self, mut lits: Vec<u32>) {
        if !self.ok {
            return;
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return;
        }
        lits.retain(|&l| lit_value(&self.assign, l) != FALSE);
        if lits.iter().any(|&l| lit_value(&self.assign, l) == TRUE) {
            return;
        }
        match lits.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(lits, false, 0);
            }
        }
    }

    fn attach(&mut self, lits: Vec<u32>, learnt: bool, lbd: u32) -> u32 {
        let cr = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(cr);
        self.watches[lits[1] as usize].push(cr);
        self.clauses.push(Clause {
            lits,
            learnt,
            lbd,
            deleted: false,
        });
        if learnt {
            self.num_learnts += 1;
        }
        cr
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: u32, reason: u32) {
        let v = var_of(l);
        self.assign[v] = if l & 1 == 0 { TRUE } else { FALSE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cr = ws[i];
                i += 1;
                let clause = &mut self.clauses[cr as usize];
                if clause.deleted {
                    continue;
                }
                let lits = &mut clause.lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                if lit_value(&self.assign, lits[0]) == TRUE {
                    ws[j] = cr;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if lit_value(&self.assign, lits[k]) != FALSE {
                        lits.swap(1, k);
                        self.watches[lits[1] as usize].push(cr);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = cr;
                j += 1;
                let first = lits[0];
                if lit_value(&self.assign, first) == FALSE {
                    conflict = Some(cr);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, cr);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if self.heap.contains(v as u32) {
            let i = self.heap.pos[v];
            self.heap.up(i, &self.activity);
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, usize) {
        let mut learnt = vec![0u32];
        let mut pending = 0;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            let start = if p.is_some() { 1 } else { 0 };
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = var_of(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var_of(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            confl = self.reason[var_of(lit)];
            self.seen[var_of(lit)] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
        }
        learnt[0] = p.unwrap() ^ 1;

        // drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                if i == 0 {
                    return true;
                }
                let r = self.reason[var_of(q)];
                r == NO_REASON
                    || self.clauses[r as usize].lits[1..].iter().any(|&x| {
                        let v = var_of(x);
                        !self.seen[v] && self.level[v] > 0
                    })
            })
            .collect();
        for &q in &learnt {
            self.seen[var_of(q)] = false;
        }
        let mut learnt: Vec<u32> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(q, k)| k.then_some(q))
            .collect();

        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[var_of(learnt[i])] > self.level[var_of(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[var_of(learnt[1])] as usize;
        }
        (learnt, back)
    }

    fn backtrack(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let stop = self.trail_lim[lvl];
        for k in (stop..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var_of(l);
            self.phase[v] = l & 1 == 0;
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(stop);
        self.trail_lim.truncate(lvl);
        self.qhead = stop;
    }

    fn lbd(&mut self, lits: &[u32]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|&l| self.level[var_of(l)]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn locked(&self, cr: u32) -> bool {
        let l = self.clauses[cr as usize].lits[0];
        self.reason[var_of(l)] == cr && lit_value(&self.assign, l) == TRUE
    }

    fn reduce_learnts(&mut self) {
        let mut cands: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&cr| {
                let c = &self.clauses[cr as usize];
                c.learnt && !c.deleted && c.lbd > 2 && !self.locked(cr)
            })
            .collect();
        cands.sort_by_key(|&cr| {
            let c = &self.clauses[cr as usize];
            (
                std::cmp::Reverse(c.lbd),
                std::cmp::Reverse(c.lits.len()),
                cr,
            )
        });
        for &cr in &cands[..cands.len() / 2] {
            let c = &mut self.clauses[cr as usize];
            c.deleted = true;
            c.lits = Vec::new();
            self.num_learnts -= 1;
        }
        let clauses = &self.clauses;
        for w in &mut self.watches {
            w.retain(|&cr| !clauses[cr as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v as usize] == UNDEF {
                return Some((v << 1) | (!self.phase[v as usize]) as u32);
            }
        }
        None
    }

    /// Decides satisfiability under `assumptions` (DIMACS literals).
    /// Learnt clauses persist across calls.
    pub fn solve(
        &mut self,
        assumptions: &[i32],
        conflict_budget: u64,
    ) -> Result<SatResult, SatError> {
        if !self.ok {
            return Ok(SatResult::Unsat);
        }
        let assumptions: Vec<u32> = assumptions.iter().map(|&l| encode(l)).collect();
        if assumptions.iter().any(|&l| var_of(l) >= self.nvars) {
            return Ok(SatResult::Unsat);
        }
        let mut conflicts_here = 0u64;
        let mut restart_no = 0u64;
        let mut restart_limit = luby(0) * RESTART_UNIT;
        let mut since_restart = 0u64;
        let result = loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                conflicts_here += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    break SatResult::Unsat;
                }
                if conflicts_here > conflict_budget {
                    self.backtrack(0);
                    return Err(SatError::BudgetExceeded(conflict_budget));
                }
                let (learnt, back) = self.analyze(confl);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let cr = self.attach(learnt, true, lbd);
                    self.enqueue(first, cr);
                }
                self.var_inc /= 0.95;
                continue;
            }
            if since_restart >= restart_limit {
                restart_no += 1;
                restart_limit = luby(restart_no) * RESTART_UNIT;
                since_restart = 0;
                self.backtrack(0);
                continue;
            }
            if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_learnts();
                self.max_learnts *= 1.1;
            }
            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let a = assumptions[self.decision_level()];
                match lit_value(&self.assign, a) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => {
                        self.backtrack(0);
                        return Ok(SatResult::Unsat);
                    }
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => l,
                    None => {
                        let model = self.assign.iter().map(|&a| a == TRUE).collect();
                        break SatResult::Sat(model);
                    }
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, NO_REASON);
        };
        self.backtrack(0);
        Ok(result)
    }
}

/// One-shot solve with the default (zeros) initial phases.
pub fn solve(cnf: &Cnf, assumptions: &[i32], conflict_budget: u64) -> Result<SatResult, SatError> {
    Solver::new(cnf, Policy::Zeros).solve(assumptions, conflict_budget)
}

/// Finds a model of `cnf ∧ output` with decision phases biased by `policy`,
/// mapped back to the AIG indices in `indices`. Indices outside the CNF take
/// the policy's preferred value.
pub fn witness_with_policy(
    cnf: &Cnf,
    output: i32,
    policy: Policy,
    indices: &[u32],
    conflict_budget: u64,
) -> Result<Option<BoolEnv>, SatError> {
    let model = match Solver::new(cnf, policy).solve(&[output], conflict_budget)? {
        SatResult::Sat(m) => m,
        SatResult::Unsat => return Ok(None),
    };
    let mut rng = match policy {
        Policy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed ^ 0x5eed)),
        _ => None,
    };
    let mut env = BoolEnv::new();
    for &i in indices {
        let b = match cnf.var_map.get(&i) {
            Some(&v) => model[v as usize - 1],
            None => match (&mut rng, policy) {
                (Some(r), _) => r.gen(),
                (None, p) => p == Policy::Ones,
            },
        };
        env.set(i, b);
    }
    Ok(Some(env))
}

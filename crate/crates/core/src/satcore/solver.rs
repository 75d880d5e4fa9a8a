//! Conflict-driven clause-learning solver.
//!
//! Two-watched-literal propagation with blocking literals, first-UIP learning with
//! recursive minimisation, VSIDS with phase saving, Luby restarts and LBD-based
//! reduction of the learnt clause database.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Budget, SolveStats, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lit(u32);

impl Lit {
    fn new(var: usize, negative: bool) -> Self {
        Lit((var as u32) << 1 | negative as u32)
    }

    fn from_dimacs(x: i32) -> Self {
        Lit::new(x.unsigned_abs() as usize - 1, x < 0)
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;

// Clause header layout in the arena: [len, flags, activity bits], then literals.
const HEADER: usize = 3;
const LEARNT: u32 = 1;
const DELETED: u32 = 2;

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

#[derive(Debug, Default)]
struct ClauseArena {
    data: Vec<u32>,
    wasted: usize,
}

impl ClauseArena {
    fn alloc(&mut self, lits: &[Lit], learnt: bool, lbd: u32) -> u32 {
        let cref = self.data.len() as u32;
        self.data.push(lits.len() as u32);
        self.data.push(if learnt { LEARNT } else { 0 } | lbd << 2);
        self.data.push(0f32.to_bits());
        self.data.extend(lits.iter().map(|l| l.0));
        cref
    }

    fn len(&self, c: u32) -> usize {
        self.data[c as usize] as usize
    }

    fn lit(&self, c: u32, i: usize) -> Lit {
        Lit(self.data[c as usize + HEADER + i])
    }

    fn swap(&mut self, c: u32, i: usize, j: usize) {
        let base = c as usize + HEADER;
        self.data.swap(base + i, base + j);
    }

    #[cfg(test)]
    fn lits(&self, c: u32) -> &[u32] {
        let base = c as usize + HEADER;
        &self.data[base..base + self.len(c)]
    }

    fn is_deleted(&self, c: u32) -> bool {
        self.data[c as usize + 1] & DELETED != 0
    }

    fn is_learnt(&self, c: u32) -> bool {
        self.data[c as usize + 1] & LEARNT != 0
    }

    fn lbd(&self, c: u32) -> u32 {
        self.data[c as usize + 1] >> 2
    }

    fn delete(&mut self, c: u32) {
        self.data[c as usize + 1] |= DELETED;
        self.wasted += HEADER + self.len(c);
    }

    fn activity(&self, c: u32) -> f32 {
        f32::from_bits(self.data[c as usize + 2])
    }

    fn set_activity(&mut self, c: u32, a: f32) {
        self.data[c as usize + 2] = a.to_bits();
    }
}

/// Binary max-heap of variables ordered by activity, ties broken by lower index.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn better(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] >= 0
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i as i32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && Self::better(act, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = i as i32;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v as u32);
        let i = self.heap.len() - 1;
        self.pos[v] = i as i32;
        self.up(i, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top as usize)
    }
}

/// Tunables of the embedded solver. The defaults are deterministic.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Seed for the optional randomisation below; irrelevant when both are off.
    pub seed: u64,
    /// Probability of a random decision variable.
    pub random_decision_freq: f64,
    /// Perturb initial activities by a seeded random amount (tie-breaking only).
    pub shuffle_initial_order: bool,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Conflicts per Luby unit.
    pub restart_base: u64,
    /// Conflicts before the first learnt-clause reduction; grows linearly after that.
    pub reduce_base: u64,
    pub reduce_increment: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            random_decision_freq: 0.0,
            shuffle_initial_order: false,
            var_decay: 0.95,
            clause_decay: 0.999,
            restart_base: 100,
            reduce_base: 2000,
            reduce_increment: 300,
        }
    }
}

pub struct Solver {
    config: SolverConfig,
    num_vars: usize,
    arena: ClauseArena,
    originals: Vec<u32>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    vals: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<u8>,
    level_stamp: Vec<u64>,
    stamp: u64,
    rng: ChaCha8Rng,
    inconsistent: bool,
    stats: SolveStats,
}

impl Solver {
    pub fn new(num_vars: usize, config: SolverConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let activity: Vec<f64> = if config.shuffle_initial_order {
            (0..num_vars).map(|_| rng.gen::<f64>() * 1e-5).collect()
        } else {
            vec![0.0; num_vars]
        };
        let mut heap = VarHeap {
            heap: Vec::with_capacity(num_vars),
            pos: vec![-1; num_vars],
        };
        for v in 0..num_vars {
            heap.insert(v, &activity);
        }
        Self {
            config,
            num_vars,
            arena: ClauseArena::default(),
            originals: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            vals: vec![UNDEF; 2 * num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            polarity: vec![true; num_vars],
            activity,
            var_inc: 1.0,
            clause_inc: 1.0,
            heap,
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![0; num_vars],
            level_stamp: vec![0; num_vars + 1],
            stamp: 0,
            rng,
            inconsistent: false,
            stats: SolveStats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn value(&self, l: Lit) -> i8 {
        self.vals[l.idx()]
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn assign(&mut self, l: Lit, reason: u32) {
        self.vals[l.idx()] = TRUE;
        self.vals[(!l).idx()] = FALSE;
        self.level[l.var()] = self.decision_level() as u32;
        self.reason[l.var()] = reason;
        self.trail.push(l);
    }

    /// Adds a clause of DIMACS literals. Must be called before [`Solver::solve`].
    /// Returns false once the clause-set is known to be unsatisfiable.
    ///
    /// Panics if a literal is zero or out of range.
    pub fn add_clause(&mut self, clause: &[i32]) -> bool {
        if self.inconsistent {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut lits: Vec<Lit> = clause
            .iter()
            .map(|&x| {
                assert!(
                    x != 0 && x.unsigned_abs() as usize <= self.num_vars,
                    "literal {x} out of range"
                );
                Lit::from_dimacs(x)
            })
            .collect();
        lits.sort_unstable_by_key(|l| l.0);
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        if lits.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        lits.retain(|&l| self.value(l) != FALSE);
        match lits.len() {
            0 => {
                self.inconsistent = true;
                false
            }
            1 => {
                self.assign(lits[0], NO_REASON);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
                !self.inconsistent
            }
            _ => {
                let cref = self.arena.alloc(&lits, false, 0);
                self.attach(cref);
                self.originals.push(cref);
                true
            }
        }
    }

    fn attach(&mut self, cref: u32) {
        let (a, b) = (self.arena.lit(cref, 0), self.arena.lit(cref, 1));
        self.watches[(!a).idx()].push(Watcher { cref, blocker: b });
        self.watches[(!b).idx()].push(Watcher { cref, blocker: a });
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = w.cref;
                if self.arena.is_deleted(c) {
                    continue;
                }
                if self.arena.lit(c, 0) == false_lit {
                    self.arena.swap(c, 0, 1);
                }
                let first = self.arena.lit(c, 0);
                let nw = Watcher {
                    cref: c,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let len = self.arena.len(c);
                let mut moved = false;
                for k in 2..len {
                    let l = self.arena.lit(c, k);
                    if self.value(l) != FALSE {
                        self.arena.swap(c, 1, k);
                        self.watches[(!l).idx()].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(c);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.assign(first, c);
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, c: u32) {
        let a = self.arena.activity(c) + self.clause_inc as f32;
        self.arena.set_activity(c, a);
        if a > 1e20 {
            for &l in &self.learnts {
                let scaled = self.arena.activity(l) * 1e-20;
                self.arena.set_activity(l, scaled);
            }
            self.clause_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting literal
    /// first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut conflict: u32) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            if self.arena.is_learnt(conflict) {
                self.bump_clause(conflict);
            }
            let start = usize::from(p.is_some());
            for k in start..self.arena.len(conflict) {
                let q = self.arena.lit(conflict, k);
                let v = q.var();
                if self.seen[v] == 0 && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = 1;
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] != 0 {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var()] = 0;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            conflict = self.reason[lit.var()];
        }
        learnt[0] = !p.unwrap();

        // recursive minimisation
        let mut to_clear: Vec<Lit> = learnt.clone();
        let abstract_levels = learnt[1..]
            .iter()
            .fold(0u32, |acc, l| acc | self.abstract_level(l.var()));
        let mut kept = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var()] == NO_REASON
                || !self.redundant(l, abstract_levels, &mut to_clear)
            {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for l in to_clear {
            self.seen[l.var()] = 0;
        }

        let backjump = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()] as usize
        };
        (learnt, backjump)
    }

    fn redundant(&mut self, lit: Lit, abstract_levels: u32, to_clear: &mut Vec<Lit>) -> bool {
        let mut stack = vec![lit];
        let top = to_clear.len();
        while let Some(q) = stack.pop() {
            let c = self.reason[q.var()];
            for k in 1..self.arena.len(c) {
                let l = self.arena.lit(c, k);
                let v = l.var();
                if self.seen[v] == 0 && self.level[v] > 0 {
                    if self.reason[v] != NO_REASON && self.abstract_level(v) & abstract_levels != 0
                    {
                        self.seen[v] = 1;
                        stack.push(l);
                        to_clear.push(l);
                    } else {
                        for l in to_clear.drain(top..) {
                            self.seen[l.var()] = 0;
                        }
                        return false;
                    }
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for l in lits {
            let lev = self.level[l.var()] as usize;
            if self.level_stamp[lev] != self.stamp {
                self.level_stamp[lev] = self.stamp;
                count += 1;
            }
        }
        count
    }

    fn backtrack(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.vals[l.idx()] = UNDEF;
            self.vals[(!l).idx()] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = l.is_negative();
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level);
        self.qhead = start;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.config.random_decision_freq > 0.0
            && !self.heap.heap.is_empty()
            && self.rng.gen::<f64>() < self.config.random_decision_freq
        {
            let v = self.heap.heap[self.rng.gen_range(0..self.heap.heap.len())] as usize;
            if self.vals[Lit::new(v, false).idx()] == UNDEF {
                return Some(Lit::new(v, self.polarity[v]));
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.vals[Lit::new(v, false).idx()] == UNDEF {
                return Some(Lit::new(v, self.polarity[v]));
            }
        }
        None
    }

    fn is_locked(&self, c: u32) -> bool {
        let first = self.arena.lit(c, 0);
        self.value(first) == TRUE && self.reason[first.var()] == c
    }

    fn reduce_db(&mut self) {
        let arena = &self.arena;
        self.learnts.sort_by(|&a, &b| {
            arena
                .lbd(b)
                .cmp(&arena.lbd(a))
                .then(arena.activity(a).total_cmp(&arena.activity(b)))
        });
        let target = self.learnts.len() / 2;
        let mut removed = 0;
        let mut keep = Vec::with_capacity(self.learnts.len());
        for i in 0..self.learnts.len() {
            let c = self.learnts[i];
            if removed < target
                && self.arena.lbd(c) > 2
                && self.arena.len(c) > 2
                && !self.is_locked(c)
            {
                self.arena.delete(c);
                removed += 1;
            } else {
                keep.push(c);
            }
        }
        self.learnts = keep;
        if self.arena.wasted * 2 > self.arena.data.len() {
            self.compact();
        }
    }

    /// Rebuilds the arena without deleted clauses and reattaches all watches.
    fn compact(&mut self) {
        let mut fresh = ClauseArena::default();
        fresh
            .data
            .reserve(self.arena.data.len() - self.arena.wasted);
        let relocate = |old: &ClauseArena, c: u32, fresh: &mut ClauseArena| -> u32 {
            let start = c as usize;
            let end = start + HEADER + old.len(c);
            let nc = fresh.data.len() as u32;
            fresh.data.extend_from_slice(&old.data[start..end]);
            nc
        };
        let mut map = std::collections::HashMap::new();
        for list in [&mut self.originals, &mut self.learnts] {
            for c in list.iter_mut() {
                let nc = relocate(&self.arena, *c, &mut fresh);
                map.insert(*c, nc);
                *c = nc;
            }
        }
        for r in self.reason.iter_mut() {
            if *r != NO_REASON {
                *r = map[r];
            }
        }
        self.arena = fresh;
        for w in self.watches.iter_mut() {
            w.clear();
        }
        let crefs: Vec<u32> = self
            .originals
            .iter()
            .chain(self.learnts.iter())
            .copied()
            .collect();
        for c in crefs {
            self.attach(c);
        }
    }

    fn luby(mut x: u64) -> u64 {
        let (mut size, mut seq) = (1u64, 0u32);
        while size < x + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != x {
            size = (size - 1) >> 1;
            seq -= 1;
            x %= size;
        }
        1 << seq
    }

    /// Runs the search. On `Sat` the model is available from [`Solver::model`].
    pub fn solve(&mut self, budget: &Budget) -> Status {
        let started = Instant::now();
        let status = self.search_loop(budget, started);
        self.stats.elapsed = started.elapsed();
        status
    }

    fn search_loop(&mut self, budget: &Budget, started: Instant) -> Status {
        if self.inconsistent {
            return Status::Unsat;
        }
        if self.propagate().is_some() {
            self.inconsistent = true;
            return Status::Unsat;
        }
        let mut restarts = 0u64;
        let mut next_reduce = self.config.reduce_base;
        let mut reductions = 0u64;
        loop {
            let limit = Self::luby(restarts) * self.config.restart_base;
            let mut conflicts_here = 0u64;
            loop {
                if let Some(conflict) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        self.inconsistent = true;
                        return Status::Unsat;
                    }
                    let (learnt, backjump) = self.analyze(conflict);
                    self.backtrack(backjump);
                    if learnt.len() == 1 {
                        self.assign(learnt[0], NO_REASON);
                    } else {
                        let lbd = self.lbd(&learnt);
                        let cref = self.arena.alloc(&learnt, true, lbd);
                        self.attach(cref);
                        self.learnts.push(cref);
                        self.bump_clause(cref);
                        self.assign(learnt[0], cref);
                    }
                    self.var_inc /= self.config.var_decay;
                    self.clause_inc /= self.config.clause_decay;

                    if budget
                        .conflicts
                        .is_some_and(|max| self.stats.conflicts >= max)
                    {
                        self.backtrack(0);
                        return Status::Unknown;
                    }
                    if self.stats.conflicts.is_multiple_of(256)
                        && budget.time.is_some_and(|max| started.elapsed() >= max)
                    {
                        self.backtrack(0);
                        return Status::Unknown;
                    }
                    if self.stats.conflicts >= next_reduce {
                        reductions += 1;
                        next_reduce = self.stats.conflicts
                            + self.config.reduce_base
                            + reductions * self.config.reduce_increment;
                        self.reduce_db();
                    }
                } else {
                    if conflicts_here >= limit {
                        self.backtrack(0);
                        restarts += 1;
                        break;
                    }
                    match self.pick_branch() {
                        None => return Status::Sat,
                        Some(lit) => {
                            self.stats.decisions += 1;
                            self.trail_lim.push(self.trail.len());
                            self.assign(lit, NO_REASON);
                        }
                    }
                }
            }
        }
    }

    /// Total assignment after a `Sat` answer; index `i` holds variable `i + 1`.
    pub fn model(&self) -> Vec<bool> {
        (0..self.num_vars)
            .map(|v| self.vals[Lit::new(v, false).idx()] == TRUE)
            .collect()
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Number of learnt clauses currently kept.
    pub fn num_learnts(&self) -> usize {
        self.learnts.len()
    }

    #[cfg(test)]
    fn check_watch_invariant(&self) -> bool {
        self.originals.iter().chain(self.learnts.iter()).all(|&c| {
            let lits = self.arena.lits(c);
            let a = Lit(lits[0]);
            let b = Lit(lits[1]);
            self.watches[(!a).idx()].iter().any(|w| w.cref == c)
                && self.watches[(!b).idx()].iter().any(|w| w.cref == c)
        })
    }
}

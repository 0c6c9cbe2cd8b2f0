//! A conflict-driven clause-learning SAT solver.
//!
//! Two watched literals with blockers, 1-UIP learning with local
//! minimization, VSIDS, Luby restarts and an LBD-ranked learned-clause
//! database. Clauses live in an arena and are addressed by [`ClauseRef`];
//! original clauses can be switched off and on again, which the preprocessor
//! uses to ask "is this clause implied by the others?".
//!
//! The counter drives the same engine step by step through the crate-private
//! low-level API (decisions, propagation, analysis, chronological
//! backtracking).

mod heap;
mod learned;

use std::io::Write;

use thiserror::Error;

use crate::formula::{CnfFormula, Lit, Var};
use heap::VarHeap;
pub use learned::{
    adjust_learned_target, compute_lbd, reduce_learned, AssignmentTrail, LearnedClause, Reason,
    TrailEntry, GLUE_LBD, MAX_LEARNED_TARGET, MIN_LEARNED_TARGET,
};

pub type ClauseRef = u32;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("literal {0} is unassigned")]
    Unassigned(i64),
    #[error("assumptions contain both {0} and its negation")]
    ComplementaryAssumptions(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// A satisfying total assignment, indexed by variable.
    Sat(Vec<bool>),
    Unsat,
    /// The conflict budget ran out.
    Unknown,
}

impl SolveResult {
    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Conflict,
    /// Every literal implied by unit propagation, assumptions included.
    Stable(Vec<Lit>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned_deleted: u64,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Initial desired size of the learned-clause store.
    pub learned_target: usize,
    /// Let the target follow the share of glue clauses.
    pub adaptive_target: bool,
    /// Conflicts per Luby unit.
    pub restart_unit: u64,
    pub var_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            learned_target: 10_000,
            adaptive_target: true,
            restart_unit: 64,
            var_decay: 0.95,
        }
    }
}

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;
const CLAUSE_DECAY: f64 = 0.999;
/// Minimum number of conflicts between two database reductions.
const REDUCE_SPACING: u64 = 300;

#[derive(Clone, Debug)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
    activity: f64,
    deleted: bool,
    enabled: bool,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: ClauseRef,
    blocker: Lit,
}

/// A clause produced by conflict analysis. `lits[0]` is the asserting
/// literal; `lits[1]` (if any) has the highest level among the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Learnt {
    pub lits: Vec<Lit>,
    pub backtrack_level: u32,
    pub lbd: u32,
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<ClauseData>,
    free_slots: Vec<ClauseRef>,
    watches: Vec<Vec<Watcher>>,
    /// Clauses with fewer than two literals; they are never watched.
    short: Vec<ClauseRef>,
    learned: Vec<ClauseRef>,
    vals: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    root_conflict: bool,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    /// Decision candidates of a [`Solver::solve_within`] call.
    local_heap: Option<VarHeap>,
    /// Storage for `local_heap` between calls.
    spare_heap: Option<VarHeap>,
    phase: Vec<bool>,
    seen: Vec<bool>,
    stats: SolverStats,
    config: SolverConfig,
    learned_target: usize,
    last_reduce: u64,
    trace: Option<Box<dyn Write + Send>>,
}

impl Solver {
    pub fn new(num_vars: usize, config: SolverConfig) -> Solver {
        let activity = vec![0.0; num_vars];
        let mut heap = VarHeap::new(num_vars);
        for v in 0..num_vars as u32 {
            heap.insert(v, &activity);
        }
        Solver {
            num_vars,
            clauses: Vec::new(),
            free_slots: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            short: Vec::new(),
            learned: Vec::new(),
            vals: vec![UNDEF; 2 * num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            root_conflict: false,
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            local_heap: None,
            spare_heap: None,
            phase: vec![false; num_vars],
            seen: vec![false; num_vars],
            stats: SolverStats::default(),
            learned_target: config.learned_target,
            config,
            last_reduce: 0,
            trace: None,
        }
    }

    /// Solver loaded with every clause of `formula`; the i-th clause gets
    /// `ClauseRef` i.
    pub fn from_formula(formula: &CnfFormula, config: SolverConfig) -> Solver {
        let mut solver = Solver::new(formula.num_vars(), config);
        for clause in formula.clauses() {
            solver.add_clause(clause.lits());
        }
        solver
    }

    /// Writes learned clauses (and `d `-prefixed deletions) to `out`, one
    /// DIMACS clause per line.
    pub fn set_trace(&mut self, out: Box<dyn Write + Send>) {
        self.trace = Some(out);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    pub fn learned_target(&self) -> usize {
        self.learned_target
    }

    pub fn num_learned(&self) -> usize {
        self.learned.len()
    }

    /// LBD of every live learned clause.
    pub fn learned_lbds(&self) -> Vec<u32> {
        self.learned.iter().map(|&c| self.clauses[c as usize].lbd).collect()
    }

    /// True once the enabled clauses are known unsatisfiable at the root.
    pub fn is_root_unsat(&self) -> bool {
        self.root_conflict
    }

    pub fn clause_lits(&self, cref: ClauseRef) -> &[Lit] {
        &self.clauses[cref as usize].lits
    }

    pub fn is_deleted(&self, cref: ClauseRef) -> bool {
        self.clauses[cref as usize].deleted
    }

    /// Adds an original clause at the root and returns its handle.
    pub fn add_clause(&mut self, lits: &[Lit]) -> ClauseRef {
        assert_eq!(self.decision_level(), 0, "clauses are added at the root");
        let cref = self.store(lits.to_vec(), false, 0);
        self.attach_at_root(cref);
        cref
    }

    fn store(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> ClauseRef {
        for l in &lits {
            assert!(l.var().index() < self.num_vars, "literal {l} out of range");
        }
        let data = ClauseData {
            lits,
            learnt,
            lbd,
            activity: 0.0,
            deleted: false,
            enabled: true,
        };
        match self.free_slots.pop() {
            Some(cref) => {
                self.clauses[cref as usize] = data;
                cref
            }
            None => {
                self.clauses.push(data);
                (self.clauses.len() - 1) as ClauseRef
            }
        }
    }

    /// Watches a root-level clause and applies what it implies at the root.
    fn attach_at_root(&mut self, cref: ClauseRef) {
        let c = cref as usize;
        if self.clauses[c].lits.len() < 2 {
            self.short.push(cref);
            match self.clauses[c].lits.first().copied() {
                None => self.root_conflict = true,
                Some(l) => match self.lit_val(l) {
                    FALSE => self.root_conflict = true,
                    UNDEF => {
                        self.assign(l, cref);
                        self.root_propagate();
                    }
                    _ => {}
                },
            }
            return;
        }
        // Non-false literals first so the watches are as good as possible.
        let vals = &self.vals;
        self.clauses[c].lits.sort_by_key(|l| vals[l.code()] == FALSE);
        let (l0, l1) = (self.clauses[c].lits[0], self.clauses[c].lits[1]);
        self.watches[l0.code()].push(Watcher { cref, blocker: l1 });
        self.watches[l1.code()].push(Watcher { cref, blocker: l0 });
        match (self.lit_val(l0), self.lit_val(l1)) {
            (FALSE, _) => self.root_conflict = true,
            (UNDEF, FALSE) => {
                self.assign(l0, cref);
                self.root_propagate();
            }
            _ => {}
        }
    }

    fn root_propagate(&mut self) {
        if self.propagate().is_some() {
            self.root_conflict = true;
        }
    }

    /// Switches an original clause off (it no longer constrains anything) or
    /// back on. Only valid at the root. Learned clauses derived while a
    /// clause was active may depend on it; see [`Solver::clear_learned`].
    pub fn set_enabled(&mut self, cref: ClauseRef, enabled: bool) {
        assert_eq!(self.decision_level(), 0);
        let c = cref as usize;
        if self.clauses[c].enabled == enabled {
            return;
        }
        self.clauses[c].enabled = enabled;
        if !enabled {
            let is_reason = self.trail.iter().any(|l| self.reason[l.var().index()] == cref);
            if is_reason || self.root_conflict {
                self.root_reset();
            }
        } else {
            let lits = &self.clauses[c].lits;
            let fine = lits.len() >= 2
                && self.lit_val(lits[0]) != FALSE
                && self.lit_val(lits[1]) != FALSE;
            if !fine {
                self.root_reset();
            }
        }
    }

    /// Forgets every root assignment and recomputes them from the enabled
    /// clauses.
    pub fn root_reset(&mut self) {
        self.backtrack(0);
        for i in (0..self.trail.len()).rev() {
            let l = self.trail[i];
            self.unassign(l);
        }
        self.trail.clear();
        self.qhead = 0;
        self.root_conflict = false;
        for i in 0..self.short.len() {
            let cref = self.short[i];
            let data = &self.clauses[cref as usize];
            if data.deleted || !data.enabled {
                continue;
            }
            match data.lits.first().copied() {
                None => self.root_conflict = true,
                Some(l) => match self.lit_val(l) {
                    FALSE => self.root_conflict = true,
                    UNDEF => self.assign(l, cref),
                    _ => {}
                },
            }
        }
        if !self.root_conflict {
            self.root_propagate();
        }
    }

    /// Deletes every learned clause.
    pub fn clear_learned(&mut self) {
        if self.learned.is_empty() {
            return;
        }
        self.backtrack(0);
        let learned = std::mem::take(&mut self.learned);
        // Watches sit on the first two literals of a clause.
        let mut watched: Vec<usize> = Vec::new();
        for &cref in &learned {
            let lits = &self.clauses[cref as usize].lits;
            if lits.len() >= 2 {
                watched.extend([lits[0].code(), lits[1].code()]);
            }
        }
        for cref in learned {
            self.delete_clause(cref);
        }
        self.short.retain(|&c| !self.clauses[c as usize].deleted);
        watched.sort_unstable();
        watched.dedup();
        let clauses = &self.clauses;
        for code in watched {
            self.watches[code].retain(|w| !clauses[w.cref as usize].deleted);
        }
        self.root_reset();
    }

    fn delete_clause(&mut self, cref: ClauseRef) {
        let data = &mut self.clauses[cref as usize];
        data.deleted = true;
        let lits = std::mem::take(&mut data.lits);
        self.stats.learned_deleted += 1;
        self.free_slots.push(cref);
        if let Some(out) = self.trace.as_mut() {
            let mut line = String::from("d");
            for l in &lits {
                line.push_str(&format!(" {l}"));
            }
            let _ = writeln!(out, "{line} 0");
        }
    }

    fn purge_watches(&mut self) {
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    // ---- assignment primitives -------------------------------------------

    #[inline]
    fn lit_val(&self, l: Lit) -> i8 {
        self.vals[l.code()]
    }

    /// `Some(true)` if `lit` is true, `Some(false)` if false, `None` if
    /// unassigned.
    #[inline]
    pub fn value(&self, lit: Lit) -> Option<bool> {
        match self.vals[lit.code()] {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }

    #[inline]
    fn assign(&mut self, l: Lit, reason: u32) {
        let v = l.var().index();
        debug_assert_eq!(self.vals[l.code()], UNDEF);
        self.vals[l.code()] = TRUE;
        self.vals[(!l).code()] = FALSE;
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn unassign(&mut self, l: Lit) {
        let v = l.var();
        self.vals[l.code()] = UNDEF;
        self.vals[(!l).code()] = UNDEF;
        self.reason[v.index()] = NO_REASON;
        self.phase[v.index()] = l.is_positive();
        self.heap.insert(v.index() as u32, &self.activity);
        if let Some(local) = self.local_heap.as_mut() {
            local.insert(v.index() as u32, &self.activity);
        }
    }

    pub(crate) fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub(crate) fn new_decision_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    /// Assigns `lit` at the current level (reason `None` for decisions).
    pub(crate) fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        self.assign(lit, reason.unwrap_or(NO_REASON));
    }

    pub(crate) fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            self.unassign(l);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(start);
    }

    pub(crate) fn trail(&self) -> &[Lit] {
        &self.trail
    }

    pub(crate) fn var_level(&self, v: Var) -> u32 {
        self.level[v.index()]
    }

    pub(crate) fn activity(&self, v: Var) -> f64 {
        self.activity[v.index()]
    }

    pub(crate) fn max_activity(&self) -> f64 {
        self.activity.iter().copied().fold(0.0, f64::max)
    }

    /// Snapshot of the current trail.
    pub fn trail_snapshot(&self) -> AssignmentTrail {
        let mut out = AssignmentTrail::new(self.num_vars);
        for &l in &self.trail {
            let v = l.var().index();
            let reason = match self.reason[v] {
                NO_REASON => Reason::Decision,
                c => Reason::Clause(c),
            };
            out.push(l, self.level[v], reason);
        }
        out
    }

    // ---- propagation ------------------------------------------------------

    /// Unit propagation over enabled clauses; returns a falsified clause on
    /// conflict.
    pub(crate) fn propagate(&mut self) -> Option<ClauseRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.vals[w.blocker.code()] == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = w.cref as usize;
                if self.clauses[c].deleted {
                    continue;
                }
                if !self.clauses[c].enabled {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let lits = &mut self.clauses[c].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let kept = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && self.vals[first.code()] == TRUE {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if self.vals[lits[k].code()] != FALSE {
                        lits.swap(1, k);
                        let new_watch = lits[1];
                        self.watches[new_watch.code()].push(kept);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = kept;
                j += 1;
                if self.vals[first.code()] == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.assign(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                break;
            }
        }
        conflict
    }

    /// Unit propagation from `assumptions` over the enabled original and
    /// learned clauses. The solver is left at the root afterwards.
    pub fn propagate_assumptions(&mut self, assumptions: &[Lit]) -> Result<Propagation, SatError> {
        check_assumptions(assumptions)?;
        self.backtrack(0);
        if self.root_conflict {
            return Ok(Propagation::Conflict);
        }
        self.root_propagate();
        if self.root_conflict {
            return Ok(Propagation::Conflict);
        }
        for &a in assumptions {
            match self.lit_val(a) {
                TRUE => continue,
                FALSE => {
                    self.backtrack(0);
                    return Ok(Propagation::Conflict);
                }
                _ => {
                    self.new_decision_level();
                    self.assign(a, NO_REASON);
                    if self.propagate().is_some() {
                        self.backtrack(0);
                        return Ok(Propagation::Conflict);
                    }
                }
            }
        }
        let implied = self.trail.clone();
        self.backtrack(0);
        Ok(Propagation::Stable(implied))
    }

    // ---- conflict analysis -------------------------------------------------

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v as u32, &self.activity);
        if let Some(local) = self.local_heap.as_mut() {
            local.increased(v as u32, &self.activity);
        }
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let data = &mut self.clauses[cref as usize];
        if !data.learnt {
            return;
        }
        data.activity += self.cla_inc;
        if data.activity > 1e20 {
            for &c in &self.learned {
                self.clauses[c as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// Counts a conflict found outside [`Solver::solve`]; reductions are
    /// spaced by the conflict count.
    pub(crate) fn note_conflict(&mut self) {
        self.stats.conflicts += 1;
    }

    /// Decays variable and clause activities (once per conflict).
    pub(crate) fn decay_activities(&mut self) {
        self.var_inc /= self.config.var_decay;
        self.cla_inc /= CLAUSE_DECAY;
    }

    /// First-UIP analysis of a conflict at a level above the root.
    pub(crate) fn analyze(&mut self, conflict: ClauseRef) -> Learnt {
        let current = self.decision_level();
        debug_assert!(current > 0);
        let mut learnt: Vec<Lit> = vec![Lit::from_code(0)];
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut cref = conflict;
        let mut resolved: Option<Var> = None;
        let mut to_clear: Vec<usize> = Vec::new();
        let uip = loop {
            self.bump_clause(cref);
            let lits = std::mem::take(&mut self.clauses[cref as usize].lits);
            for &q in &lits {
                let v = q.var();
                if Some(v) == resolved {
                    continue;
                }
                let vi = v.index();
                if self.seen[vi] || self.level[vi] == 0 {
                    continue;
                }
                self.seen[vi] = true;
                to_clear.push(vi);
                self.bump_var(vi);
                if self.level[vi] >= current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            self.clauses[cref as usize].lits = lits;
            // Next literal of the current level on the trail.
            let p = loop {
                index -= 1;
                let p = self.trail[index];
                if self.seen[p.var().index()] && self.level[p.var().index()] >= current {
                    break p;
                }
            };
            pending -= 1;
            if pending == 0 {
                break p;
            }
            resolved = Some(p.var());
            cref = self.reason[p.var().index()];
            debug_assert_ne!(cref, NO_REASON, "implied literal without a reason");
        };
        learnt[0] = !uip;

        // Local minimization: drop literals whose reason is covered by the
        // clause.
        let mut minimized = vec![learnt[0]];
        for &q in &learnt[1..] {
            let vi = q.var().index();
            let r = self.reason[vi];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits.iter().all(|&x| {
                    x.var().index() == vi || self.seen[x.var().index()] || self.level[x.var().index()] == 0
                });
            if !redundant {
                minimized.push(q);
            }
        }
        for vi in to_clear {
            self.seen[vi] = false;
        }

        let mut backtrack_level = 0;
        if minimized.len() > 1 {
            let mut best = 1;
            for k in 2..minimized.len() {
                if self.level[minimized[k].var().index()] > self.level[minimized[best].var().index()] {
                    best = k;
                }
            }
            minimized.swap(1, best);
            backtrack_level = self.level[minimized[1].var().index()];
        }
        let mut levels: Vec<u32> = minimized.iter().map(|l| self.level[l.var().index()]).collect();
        levels.sort_unstable();
        levels.dedup();
        Learnt {
            lits: minimized,
            backtrack_level,
            lbd: levels.len() as u32,
        }
    }

    /// Stores a learned clause (watching `lits[0]` and `lits[1]`) without
    /// assigning anything.
    pub(crate) fn add_learned(&mut self, learnt: &Learnt) -> ClauseRef {
        if let Some(out) = self.trace.as_mut() {
            let mut line = String::new();
            for l in &learnt.lits {
                line.push_str(&format!("{l} "));
            }
            let _ = writeln!(out, "{line}0");
        }
        let cref = self.store(learnt.lits.clone(), true, learnt.lbd);
        self.learned.push(cref);
        if learnt.lits.len() < 2 {
            self.short.push(cref);
        } else {
            let (l0, l1) = (learnt.lits[0], learnt.lits[1]);
            self.watches[l0.code()].push(Watcher { cref, blocker: l1 });
            self.watches[l1.code()].push(Watcher { cref, blocker: l0 });
        }
        cref
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        self.clauses[cref as usize]
            .lits
            .iter()
            .any(|l| self.vals[l.code()] == TRUE && self.reason[l.var().index()] == cref)
    }

    /// Reduces the learned-clause store when it has outgrown its target.
    /// Returns true if a reduction ran.
    pub(crate) fn maybe_reduce(&mut self) -> bool {
        let trigger = self.learned_target + self.learned_target / 2;
        if self.learned.len() <= trigger
            || self.stats.conflicts < self.last_reduce + REDUCE_SPACING.min(self.learned_target as u64)
        {
            return false;
        }
        self.reduce();
        true
    }

    fn reduce(&mut self) {
        self.last_reduce = self.stats.conflicts;
        if self.config.adaptive_target {
            let lbds = self.learned_lbds();
            self.learned_target = adjust_learned_target(&lbds, self.learned_target);
        }
        let keys: Vec<(u32, f64, bool)> = self
            .learned
            .iter()
            .map(|&c| {
                let d = &self.clauses[c as usize];
                (d.lbd, d.activity, self.locked(c))
            })
            .collect();
        let keep = learned::plan_reduction(&keys, self.learned_target);
        let learned = std::mem::take(&mut self.learned);
        for (cref, k) in learned.into_iter().zip(keep) {
            if k {
                self.learned.push(cref);
            } else {
                self.delete_clause(cref);
            }
        }
        self.short.retain(|&c| !self.clauses[c as usize].deleted);
        self.purge_watches();
    }

    // ---- search -------------------------------------------------------------

    fn pick_branch(&mut self) -> Option<Lit> {
        let heap = self.local_heap.as_mut().unwrap_or(&mut self.heap);
        while let Some(v) = heap.pop(&self.activity) {
            let var = Var::new(v);
            if self.vals[var.pos().code()] == UNDEF {
                return Some(var.lit(self.phase[v as usize]));
            }
        }
        None
    }

    /// Decides satisfiability of the enabled clauses under `assumptions`,
    /// giving up after `budget` conflicts. The solver is left at the root.
    pub fn solve(&mut self, assumptions: &[Lit], budget: Option<u64>) -> Result<SolveResult, SatError> {
        self.search(assumptions, budget)
    }

    /// Like [`Solver::solve`], but only variables in `scope` are decided.
    /// The answer is exact when `scope` is a union of connected components
    /// of the enabled clauses (containing the assumptions) and the clauses
    /// outside it are satisfiable. A model covers only `scope` and root-level
    /// assignments; other entries are `false`.
    pub fn solve_within(
        &mut self,
        assumptions: &[Lit],
        budget: Option<u64>,
        scope: &[Var],
    ) -> Result<SolveResult, SatError> {
        check_assumptions(assumptions)?;
        self.backtrack(0);
        let mut local = self.spare_heap.take().unwrap_or_else(|| VarHeap::new(self.num_vars));
        for v in scope {
            if self.vals[v.pos().code()] == UNDEF {
                local.insert(v.index() as u32, &self.activity);
            }
        }
        self.local_heap = Some(local);
        let result = self.search(assumptions, budget);
        let mut local = self.local_heap.take().expect("set above");
        local.clear();
        self.spare_heap = Some(local);
        result
    }

    fn search(&mut self, assumptions: &[Lit], budget: Option<u64>) -> Result<SolveResult, SatError> {
        check_assumptions(assumptions)?;
        self.backtrack(0);
        if self.root_conflict {
            return Ok(SolveResult::Unsat);
        }
        self.root_propagate();
        if self.root_conflict {
            return Ok(SolveResult::Unsat);
        }
        let start_conflicts = self.stats.conflicts;
        let mut luby_index = 0u32;
        let mut restart_conflicts = 0u64;
        let mut restart_limit = luby(luby_index) * self.config.restart_unit;
        let result = loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                restart_conflicts += 1;
                if self.decision_level() == 0 {
                    self.root_conflict = true;
                    break SolveResult::Unsat;
                }
                let learnt = self.analyze(conflict);
                self.backtrack(learnt.backtrack_level);
                let cref = self.add_learned(&learnt);
                if self.value(learnt.lits[0]).is_none() {
                    self.assign(learnt.lits[0], cref);
                }
                self.decay_activities();
                if budget.is_some_and(|b| self.stats.conflicts - start_conflicts >= b) {
                    break SolveResult::Unknown;
                }
                self.maybe_reduce();
                continue;
            }
            if restart_conflicts >= restart_limit {
                self.backtrack(0);
                self.stats.restarts += 1;
                luby_index += 1;
                restart_conflicts = 0;
                restart_limit = luby(luby_index) * self.config.restart_unit;
                continue;
            }
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.lit_val(a) {
                    TRUE => self.new_decision_level(),
                    FALSE => {
                        self.backtrack(0);
                        return Ok(SolveResult::Unsat);
                    }
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let next = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => {
                        self.stats.decisions += 1;
                        l
                    }
                    None => {
                        let model = (0..self.num_vars)
                            .map(|v| self.vals[Var::new(v as u32).pos().code()] == TRUE)
                            .collect();
                        break SolveResult::Sat(model);
                    }
                },
            };
            self.new_decision_level();
            self.assign(next, NO_REASON);
        };
        self.backtrack(0);
        Ok(result)
    }
}

fn check_assumptions(assumptions: &[Lit]) -> Result<(), SatError> {
    let mut sorted: Vec<Lit> = assumptions.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0].var() == w[1].var() && w[0] != w[1] {
            return Err(SatError::ComplementaryAssumptions(w[0].var().dimacs() as i64));
        }
    }
    Ok(())
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, ... (0-based index).
pub fn luby(index: u32) -> u64 {
    let mut x = index as u64;
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

//! The recursive component-caching search.
//!
//! Each branch opens a decision level, propagates (including learned
//! clauses that became unit at an earlier level, see `pending`), multiplies
//! the weights of the component's newly implied literals, splits the
//! remaining component and recurses. Backtracking is chronological: after a
//! branch the solver returns to the level it started from.
//!
//! Learned clauses are global, so propagation may assign variables outside
//! the component being counted. Those assignments are implied by the
//! formula under the current assignment, which makes the counts exact
//! unless some other component at the same node is unsatisfiable. In that
//! case the node's product is zero anyway, and every cache entry stored
//! since the branch began is withdrawn.

use std::time::Instant;

use crate::formula::{CnfFormula, Lit, Var};
use crate::sat::{ClauseRef, Solver};
use crate::semiring::Semiring;

use super::branching::{branch_score, normalize_activity, BranchConfig};
use super::cache::ComponentCache;
use super::component::{component_signature, Component, SignatureKey, Splitter};
use super::{BranchRecord, CountError, CountStats};

const DEADLINE_CHECK_INTERVAL: u64 = 256;

pub(crate) struct Search<'a, S: Semiring> {
    pub formula: &'a CnfFormula,
    pub semiring: &'a S,
    pub solver: Solver,
    /// Indexed by literal code.
    pub weights: Vec<S::Value>,
    /// `w(v) + w(!v)` per variable.
    pub free_factor: Vec<S::Value>,
    pub splitter: Splitter,
    pub cache: Option<ComponentCache<S::Value>>,
    pub key: SignatureKey,
    pub depths: Vec<f64>,
    pub branch: BranchConfig,
    /// Learned clauses that may be unit: `(clause, level it asserts at)`.
    pub pending: Vec<(ClauseRef, u32)>,
    pub in_scope: Vec<u32>,
    pub scope_epoch: u32,
    pub freq: Vec<u32>,
    pub stats: CountStats,
    pub deadline: Option<Instant>,
    pub records: Option<Vec<BranchRecord<S::Value>>>,
}

enum Outcome {
    Stable,
    Conflict(ClauseRef),
    /// A pending clause is falsified entirely below the current level.
    StaleConflict,
}

impl<S: Semiring> Search<'_, S> {
    pub(crate) fn run(&mut self) -> Result<S::Value, CountError> {
        let s = self.semiring;
        if self.solver.is_root_unsat() {
            return Ok(s.zero());
        }
        let mut value = s.one();
        if !s.ignores_weights() {
            for i in 0..self.solver.trail().len() {
                let l = self.solver.trail()[i];
                s.mul_assign(&mut value, &self.weights[l.code()]);
            }
        }
        let all: Vec<Var> = (0..self.formula.num_vars() as u32).map(Var::new).collect();
        self.multiply_split(&mut value, &all)?;
        Ok(value)
    }

    /// Multiplies `value` by the free factors and component counts of the
    /// unassigned part of `scope`.
    fn multiply_split(&mut self, value: &mut S::Value, scope: &[Var]) -> Result<(), CountError> {
        let s = self.semiring;
        let solver = &self.solver;
        let split = self.splitter.split(self.formula, |l| solver.value(l), scope);
        for v in split.free {
            s.mul_assign(value, &self.free_factor[v.index()]);
        }
        for comp in split.components {
            if s.is_zero(value) {
                break;
            }
            let c = self.count_component(&comp)?;
            s.mul_assign(value, &c);
        }
        Ok(())
    }

    fn count_component(&mut self, comp: &Component) -> Result<S::Value, CountError> {
        let s = self.semiring;
        self.stats.components += 1;
        let sig = self.cache.as_ref().map(|_| component_signature(comp, &self.key));
        if let (Some(cache), Some(sig)) = (self.cache.as_mut(), sig.as_ref()) {
            if let Some(v) = cache.get(sig) {
                self.stats.cache_hits += 1;
                return Ok(v);
            }
        }
        let x = self.pick_variable(comp);
        let pos = self.branch(x.pos(), comp)?;
        let neg = self.branch(x.neg(), comp)?;
        let value = s.add(
            &s.mul(&self.weights[x.pos().code()], &pos),
            &s.mul(&self.weights[x.neg().code()], &neg),
        );
        if let Some(records) = self.records.as_mut() {
            records.push(BranchRecord {
                var: x,
                positive: pos,
                negative: neg,
                value: value.clone(),
            });
        }
        if let (Some(cache), Some(sig)) = (self.cache.as_mut(), sig) {
            cache.put(sig, value.clone(), s.byte_size(&value));
            self.stats.cache_stores += 1;
        }
        Ok(value)
    }

    fn pick_variable(&mut self, comp: &Component) -> Var {
        for c in &comp.clauses {
            let lits = self.formula.clauses()[c.index as usize].lits();
            for &p in &c.unassigned {
                self.freq[lits[p as usize].var().index()] += 1;
            }
        }
        let max_act = self.solver.max_activity();
        let mut best = comp.vars[0];
        let mut best_score = f64::NEG_INFINITY;
        for &v in &comp.vars {
            let act = normalize_activity(self.solver.activity(v), max_act);
            let score = branch_score(self.freq[v.index()] as f64, act, self.depths[v.index()], &self.branch);
            if score > best_score {
                best_score = score;
                best = v;
            }
        }
        for &v in &comp.vars {
            self.freq[v.index()] = 0;
        }
        best
    }

    /// Count of `comp` with `decision` set, excluding the decision's weight.
    fn branch(&mut self, decision: Lit, comp: &Component) -> Result<S::Value, CountError> {
        let s = self.semiring;
        self.stats.decisions += 1;
        if self.stats.decisions.is_multiple_of(DEADLINE_CHECK_INTERVAL) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(CountError::Timeout);
        }
        let mark = self.cache.as_ref().map(|c| c.mark());
        let level = self.solver.decision_level();
        self.solver.new_decision_level();
        self.stats.max_depth = self.stats.max_depth.max(level as usize + 1);
        let trail_start = self.solver.trail().len();
        self.solver.enqueue(decision, None);

        match self.propagate() {
            Outcome::Stable => {}
            Outcome::Conflict(conflict) => {
                self.learn(conflict, level);
                return Ok(s.zero());
            }
            Outcome::StaleConflict => {
                self.backtrack(level);
                return Ok(s.zero());
            }
        }

        let mut value = s.one();
        if !s.ignores_weights() {
            let epoch = self.next_scope_epoch();
            for v in &comp.vars {
                self.in_scope[v.index()] = epoch;
            }
            for i in trail_start + 1..self.solver.trail().len() {
                let l = self.solver.trail()[i];
                if self.in_scope[l.var().index()] == epoch {
                    s.mul_assign(&mut value, &self.weights[l.code()]);
                }
            }
        }
        self.multiply_split(&mut value, &comp.vars)?;
        self.backtrack(level);
        if s.is_zero(&value) {
            if let (Some(cache), Some(mark)) = (self.cache.as_mut(), mark) {
                cache.purge_since(mark);
            }
        }
        Ok(value)
    }

    fn next_scope_epoch(&mut self) -> u32 {
        if self.scope_epoch == u32::MAX {
            self.in_scope.iter_mut().for_each(|m| *m = 0);
            self.scope_epoch = 0;
        }
        self.scope_epoch += 1;
        self.scope_epoch
    }

    /// Unit propagation to a fixpoint, asserting pending learned clauses
    /// along the way.
    fn propagate(&mut self) -> Outcome {
        let current = self.solver.decision_level();
        loop {
            if let Some(conflict) = self.solver.propagate() {
                return Outcome::Conflict(conflict);
            }
            let mut progressed = false;
            for i in 0..self.pending.len() {
                let cref = self.pending[i].0;
                let mut unit = None;
                let mut open = 0;
                let mut satisfied = false;
                let mut top_level = 0;
                for &l in self.solver.clause_lits(cref) {
                    match self.solver.value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => top_level = top_level.max(self.solver.var_level(l.var())),
                        None => {
                            open += 1;
                            unit = Some(l);
                        }
                    }
                }
                if satisfied || open > 1 {
                    continue;
                }
                match unit {
                    Some(l) => {
                        self.solver.enqueue(l, Some(cref));
                        progressed = true;
                    }
                    None if top_level == current => return Outcome::Conflict(cref),
                    None => return Outcome::StaleConflict,
                }
            }
            if !progressed {
                return Outcome::Stable;
            }
        }
    }

    fn learn(&mut self, conflict: ClauseRef, level: u32) {
        self.stats.conflicts += 1;
        self.solver.note_conflict();
        let learnt = self.solver.analyze(conflict);
        let cref = self.solver.add_learned(&learnt);
        self.pending.push((cref, learnt.backtrack_level));
        self.solver.decay_activities();
        self.backtrack(level);
        if self.solver.maybe_reduce() {
            let solver = &self.solver;
            self.pending.retain(|&(c, _)| !solver.is_deleted(c));
        }
    }

    fn backtrack(&mut self, level: u32) {
        self.solver.backtrack(level);
        self.pending.retain(|&(_, assert_level)| assert_level <= level);
    }
}

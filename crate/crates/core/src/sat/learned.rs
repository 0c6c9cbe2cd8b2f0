//! Learned-clause bookkeeping: literal block distance, database reduction
//! and the adaptive size target.

use std::cmp::Ordering;

use crate::formula::{Lit, Var};

use super::SatError;

/// Clauses with an LBD at or below this are kept unconditionally.
pub const GLUE_LBD: u32 = 3;
pub const MIN_LEARNED_TARGET: usize = 2_000;
pub const MAX_LEARNED_TARGET: usize = 150_000;

/// Why a trail literal is assigned.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reason {
    Decision,
    Clause(u32),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TrailEntry {
    pub lit: Lit,
    pub level: u32,
    pub reason: Reason,
}

/// A read-only snapshot of a solver's assignment trail.
#[derive(Clone, Debug, Default)]
pub struct AssignmentTrail {
    entries: Vec<TrailEntry>,
    levels: Vec<Option<u32>>,
}

impl AssignmentTrail {
    pub fn new(num_vars: usize) -> AssignmentTrail {
        AssignmentTrail {
            entries: Vec::new(),
            levels: vec![None; num_vars],
        }
    }

    /// Appends an assignment. Panics if the variable is already assigned or
    /// the level would decrease.
    pub fn push(&mut self, lit: Lit, level: u32, reason: Reason) {
        let v = lit.var().index();
        if v >= self.levels.len() {
            self.levels.resize(v + 1, None);
        }
        assert!(self.levels[v].is_none(), "{:?} assigned twice", lit.var());
        assert!(
            self.entries.last().is_none_or(|e| e.level <= level),
            "trail levels must be non-decreasing"
        );
        self.levels[v] = Some(level);
        self.entries.push(TrailEntry { lit, level, reason });
    }

    pub fn entries(&self) -> &[TrailEntry] {
        &self.entries
    }

    pub fn level_of(&self, var: Var) -> Option<u32> {
        self.levels.get(var.index()).copied().flatten()
    }

    pub fn decision_level(&self) -> u32 {
        self.entries.last().map_or(0, |e| e.level)
    }
}

/// Number of distinct decision levels among the clause's literals.
pub fn compute_lbd(clause: &[Lit], trail: &AssignmentTrail) -> Result<u32, SatError> {
    let mut levels = Vec::with_capacity(clause.len());
    for &lit in clause {
        let level = trail.level_of(lit.var()).ok_or(SatError::Unassigned(lit.to_dimacs()))?;
        levels.push(level);
    }
    levels.sort_unstable();
    levels.dedup();
    Ok(levels.len().max(1) as u32)
}

/// A learned clause as seen by the reduction policy.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnedClause {
    pub lits: Vec<Lit>,
    pub lbd: u32,
    pub activity: f64,
    /// Currently the reason of an assignment.
    pub locked: bool,
}

/// Shrinks the store towards `target` clauses and returns the survivors in
/// their original order.
///
/// Glue clauses (LBD <= 3) and locked clauses always survive. The rest are
/// ranked by LBD, then higher activity, then position, and the best are kept
/// until the store holds `max(target, #glue)` clauses.
pub fn reduce_learned(db: Vec<LearnedClause>, target: usize) -> Vec<LearnedClause> {
    let keys: Vec<(u32, f64, bool)> = db.iter().map(|c| (c.lbd, c.activity, c.locked)).collect();
    let keep = plan_reduction(&keys, target);
    db.into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// Which clauses of `(lbd, activity, locked)` survive a reduction.
pub(crate) fn plan_reduction(keys: &[(u32, f64, bool)], target: usize) -> Vec<bool> {
    let mut keep = vec![false; keys.len()];
    let mut glue = 0usize;
    let mut kept = 0usize;
    let mut candidates = Vec::new();
    for (i, &(lbd, _, locked)) in keys.iter().enumerate() {
        if lbd <= GLUE_LBD {
            glue += 1;
        }
        if lbd <= GLUE_LBD || locked {
            keep[i] = true;
            kept += 1;
        } else {
            candidates.push(i);
        }
    }
    candidates.sort_by(|&a, &b| {
        keys[a]
            .0
            .cmp(&keys[b].0)
            .then_with(|| keys[b].1.partial_cmp(&keys[a].1).unwrap_or(Ordering::Equal))
            .then_with(|| a.cmp(&b))
    });
    let budget = target.max(glue);
    for i in candidates {
        if kept >= budget {
            break;
        }
        keep[i] = true;
        kept += 1;
    }
    keep
}

/// Grows the target by 10% when more than half the store is glue, shrinks
/// it by 10% when less than a tenth is, and clamps to
/// `[MIN_LEARNED_TARGET, MAX_LEARNED_TARGET]`. An empty store leaves the
/// target unchanged.
pub fn adjust_learned_target(lbds: &[u32], current: usize) -> usize {
    if lbds.is_empty() {
        return current;
    }
    let glue = lbds.iter().filter(|&&l| l <= GLUE_LBD).count();
    let fraction = glue as f64 / lbds.len() as f64;
    let next = if fraction > 0.5 {
        current + current / 10
    } else if fraction < 0.1 {
        current - current / 10
    } else {
        current
    };
    next.clamp(MIN_LEARNED_TARGET, MAX_LEARNED_TARGET)
}

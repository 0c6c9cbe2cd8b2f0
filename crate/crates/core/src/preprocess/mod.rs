//! Count-preserving simplification run before the decomposition is built.
//!
//! Stages, in order: propagation-based vivification, complete vivification
//! (which also finds backbone literals), sparsification, merging of
//! equivalent adjacent variables, and elimination of variables defined by
//! their primal-graph neighbourhood (unweighted formulas only). Variables
//! fixed by unit propagation are removed after every stage and their weight
//! moves into the multiplier. Merging and elimination never add primal
//! edges, so the treewidth cannot grow.

mod eliminate;
mod merge;
mod queries;
mod sparsify;
mod vivify;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};

pub use eliminate::{eliminate_defined, RESOLVENT_LIMIT};
pub use merge::{merge_equivalences, merge_equivalences_traced};
pub use sparsify::sparsify;
pub use vivify::{vivify_complete, vivify_propagation};

use crate::formula::{format_rational, write_cnf, CnfFormula, Lit, Var, WeightMap};
use crate::oracle::Accounting;
use crate::sat::{Propagation, Solver, SolverConfig};

/// Conflict budget of each SAT query made by a stage.
pub const DEFAULT_QUERY_CONFLICTS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageKind {
    VivifyPropagation,
    VivifyComplete,
    Sparsify,
    MergeEquivalences,
    EliminateDefined,
}

impl StageKind {
    pub const ALL: [StageKind; 5] = [
        StageKind::VivifyPropagation,
        StageKind::VivifyComplete,
        StageKind::Sparsify,
        StageKind::MergeEquivalences,
        StageKind::EliminateDefined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StageKind::VivifyPropagation => "vivify-propagation",
            StageKind::VivifyComplete => "vivify-complete",
            StageKind::Sparsify => "sparsify",
            StageKind::MergeEquivalences => "merge-equivalences",
            StageKind::EliminateDefined => "eliminate-defined",
        }
    }
}

/// Budgets shared by the SAT-based stages.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub query_conflicts: u64,
    /// Checked between queries; a stage stops early once it passes.
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            query_conflicts: DEFAULT_QUERY_CONFLICTS,
            deadline: None,
        }
    }
}

impl Limits {
    pub(crate) fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageStats {
    pub literals_removed: usize,
    pub clauses_removed: usize,
    pub merges: usize,
    pub eliminations: usize,
    pub backbone: usize,
    /// Variables fixed by unit propagation after the stage.
    pub fixed: usize,
}

/// A stage's output; `count(input) = accounting.multiplier * count(formula)`
/// with the `accounting.removed` variables left out of the latter.
#[derive(Clone, Debug)]
pub struct StageOutput {
    pub formula: CnfFormula,
    pub accounting: Accounting,
    pub stats: StageStats,
}

impl StageOutput {
    pub(crate) fn unchanged(formula: &CnfFormula) -> StageOutput {
        StageOutput::same_vars(formula.clone(), StageStats::default())
    }

    pub(crate) fn same_vars(formula: CnfFormula, stats: StageStats) -> StageOutput {
        StageOutput {
            formula,
            accounting: Accounting::identity(),
            stats,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PreprocessConfig {
    pub vivify_propagation: bool,
    pub vivify_complete: bool,
    pub sparsify: bool,
    pub merge_equivalences: bool,
    /// Ignored for weighted formulas.
    pub eliminate_defined: bool,
    pub query_conflicts: u64,
    pub time_budget: Duration,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            vivify_propagation: true,
            vivify_complete: true,
            sparsify: true,
            merge_equivalences: true,
            eliminate_defined: true,
            query_conflicts: DEFAULT_QUERY_CONFLICTS,
            time_budget: Duration::from_secs(60),
        }
    }
}

impl PreprocessConfig {
    /// Every stage switched off; only unit propagation and renumbering run.
    pub fn disabled() -> PreprocessConfig {
        PreprocessConfig {
            vivify_propagation: false,
            vivify_complete: false,
            sparsify: false,
            merge_equivalences: false,
            eliminate_defined: false,
            ..PreprocessConfig::default()
        }
    }

    pub fn enabled(&self, stage: StageKind) -> bool {
        match stage {
            StageKind::VivifyPropagation => self.vivify_propagation,
            StageKind::VivifyComplete => self.vivify_complete,
            StageKind::Sparsify => self.sparsify,
            StageKind::MergeEquivalences => self.merge_equivalences,
            StageKind::EliminateDefined => self.eliminate_defined,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PreprocessResult {
    /// Surviving variables renumbered densely, in their original order.
    pub formula: CnfFormula,
    /// `count(original) = multiplier * count(formula)`.
    pub multiplier: BigRational,
    /// Original variables that no longer exist (fixed, merged or
    /// eliminated).
    pub eliminated_vars: Vec<Var>,
    /// Original variable to its new index, if it survived.
    pub var_map: Vec<Option<Var>>,
    pub stats: Vec<(StageKind, StageStats)>,
    /// Variables fixed before the first stage.
    pub initially_fixed: usize,
    pub timed_out: bool,
}

impl PreprocessResult {
    pub fn is_unsat(&self) -> bool {
        self.multiplier.is_zero() || self.formula.has_empty_clause()
    }
}

pub fn run_stage(stage: StageKind, formula: &CnfFormula, limits: &Limits) -> StageOutput {
    match stage {
        StageKind::VivifyPropagation => vivify_propagation(formula),
        StageKind::VivifyComplete => vivify_complete(formula, limits),
        StageKind::Sparsify => sparsify(formula, limits),
        StageKind::MergeEquivalences => merge_equivalences(formula, limits),
        StageKind::EliminateDefined => eliminate_defined(formula, limits),
    }
}

/// Runs the enabled stages in order, fixing unit-implied variables after
/// each, then renumbers the surviving variables.
pub fn run_pipeline(formula: &CnfFormula, cfg: &PreprocessConfig) -> PreprocessResult {
    let start = Instant::now();
    let limits = Limits {
        query_conflicts: cfg.query_conflicts,
        deadline: Some(start + cfg.time_budget),
    };
    let n = formula.num_vars();
    let mut removed = vec![false; n];
    let mut multiplier = BigRational::one();

    let fixed = fix_units(formula);
    let initially_fixed = fixed.accounting.removed.len();
    absorb(&mut multiplier, &mut removed, &fixed.accounting);
    let mut current = fixed.formula;
    let mut stats = Vec::new();
    let mut timed_out = false;
    for stage in StageKind::ALL {
        if !cfg.enabled(stage) || (stage == StageKind::EliminateDefined && current.is_weighted()) {
            continue;
        }
        if current.has_empty_clause() || multiplier.is_zero() {
            break;
        }
        if limits.expired() {
            timed_out = true;
            break;
        }
        let out = run_stage(stage, &current, &limits);
        absorb(&mut multiplier, &mut removed, &out.accounting);
        let mut stage_stats = out.stats;
        let fixed = fix_units(&out.formula);
        stage_stats.fixed = fixed.accounting.removed.len();
        absorb(&mut multiplier, &mut removed, &fixed.accounting);
        current = fixed.formula;
        stats.push((stage, stage_stats));
    }
    timed_out |= limits.expired();

    let (formula, var_map) = compact(&current, &removed);
    PreprocessResult {
        formula,
        multiplier,
        eliminated_vars: (0..n as u32).map(Var::new).filter(|v| removed[v.index()]).collect(),
        var_map,
        stats,
        initially_fixed,
        timed_out,
    }
}

fn absorb(multiplier: &mut BigRational, removed: &mut [bool], accounting: &Accounting) {
    *multiplier *= &accounting.multiplier;
    for v in &accounting.removed {
        removed[v.index()] = true;
    }
}

/// Assigns everything unit propagation implies and drops those variables;
/// the multiplier collects the weights of the fixed literals.
pub fn fix_units(formula: &CnfFormula) -> StageOutput {
    if formula.has_empty_clause() {
        return StageOutput::unchanged(formula);
    }
    let mut solver = Solver::from_formula(formula, SolverConfig::default());
    let implied = match solver.propagate_assumptions(&[]).expect("no assumptions") {
        Propagation::Conflict => {
            let unsat = CnfFormula::unsat(formula.num_vars(), formula.weights().cloned());
            return StageOutput::same_vars(unsat, StageStats::default());
        }
        Propagation::Stable(lits) => lits,
    };
    if implied.is_empty() {
        return StageOutput::unchanged(formula);
    }
    let mut value: Vec<Option<bool>> = vec![None; formula.num_vars()];
    let mut multiplier = BigRational::one();
    for &l in &implied {
        value[l.var().index()] = Some(l.is_positive());
        multiplier *= formula.weight(l);
    }
    let truth = |l: Lit| value[l.var().index()].map(|b| b == l.is_positive());
    let clauses: Vec<Vec<Lit>> = formula
        .clauses()
        .iter()
        .filter(|c| !c.iter().any(|&l| truth(l) == Some(true)))
        .map(|c| c.iter().copied().filter(|&l| truth(l).is_none()).collect())
        .collect();
    let out = CnfFormula::new(formula.num_vars(), clauses, formula.weights().cloned()).expect("same variables");
    StageOutput {
        formula: out,
        accounting: Accounting {
            multiplier,
            removed: implied.iter().map(|l| l.var()).collect(),
        },
        stats: StageStats::default(),
    }
}

/// Renumbers the variables not in `removed`, keeping their order.
fn compact(formula: &CnfFormula, removed: &[bool]) -> (CnfFormula, Vec<Option<Var>>) {
    let mut var_map = vec![None; formula.num_vars()];
    let mut next = 0u32;
    for (v, gone) in removed.iter().enumerate() {
        if !gone {
            var_map[v] = Some(Var::new(next));
            next += 1;
        }
    }
    let map_lit = |l: Lit| -> Lit {
        let v = var_map[l.var().index()].expect("removed variables do not occur");
        v.lit(l.is_positive())
    };
    let clauses: Vec<Vec<Lit>> = formula.clauses().iter().map(|c| c.iter().map(|&l| map_lit(l)).collect()).collect();
    let weights = formula.weights().map(|w| {
        let mut out = WeightMap::new();
        for (lit, value) in w.iter() {
            if var_map[lit.var().index()].is_some() {
                out.set(map_lit(lit), value.clone()).expect("weights stay non-negative");
            }
        }
        out
    });
    let compacted = CnfFormula::new(next as usize, clauses, weights).expect("remapped literals are in range");
    (compacted, var_map)
}

/// The preprocessed formula preceded by comment lines recording the
/// multiplier and the variable map (1-based, old then new).
pub fn write_preprocessed(result: &PreprocessResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "c t pp-multiplier {}", format_rational(&result.multiplier));
    for (old, new) in result.var_map.iter().enumerate() {
        if let Some(new) = new {
            let _ = writeln!(out, "c t pp-map {} {}", old + 1, new.dimacs());
        }
    }
    out.push_str(&write_cnf(&result.formula));
    out
}

/// Current clauses with per-variable occurrence lists, for stages that
/// rewrite clauses in place.
pub(crate) struct ClauseDb {
    pub clauses: Vec<Option<Vec<Lit>>>,
    pub occurs: Vec<Vec<usize>>,
}

impl ClauseDb {
    pub(crate) fn new(formula: &CnfFormula) -> ClauseDb {
        let mut db = ClauseDb {
            clauses: Vec::new(),
            occurs: vec![Vec::new(); formula.num_vars()],
        };
        for c in formula.clauses() {
            db.push(c.lits().to_vec());
        }
        db
    }

    pub(crate) fn push(&mut self, lits: Vec<Lit>) -> usize {
        let i = self.clauses.len();
        for l in &lits {
            self.occurs[l.var().index()].push(i);
        }
        self.clauses.push(Some(lits));
        i
    }

    pub(crate) fn remove(&mut self, i: usize) {
        if let Some(lits) = self.clauses[i].take() {
            for l in lits {
                self.occurs[l.var().index()].retain(|&c| c != i);
            }
        }
    }

    /// Sorted primal-graph neighbours of `v`.
    pub(crate) fn neighbors(&self, v: Var) -> Vec<Var> {
        let mut out: Vec<Var> = self.occurs[v.index()]
            .iter()
            .flat_map(|&c| self.clauses[c].as_ref().expect("live clause").iter().map(|l| l.var()))
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub(crate) fn into_formula(self, num_vars: usize, weights: Option<WeightMap>) -> CnfFormula {
        CnfFormula::new(num_vars, self.clauses.into_iter().flatten(), weights).expect("same variables")
    }
}

/// Literal and clause reductions between two formulas over the same
/// variables.
pub(crate) fn shrink_stats(before: &CnfFormula, after: &CnfFormula) -> StageStats {
    let lits = |f: &CnfFormula| f.clauses().iter().map(|c| c.lits().len()).sum::<usize>();
    StageStats {
        literals_removed: lits(before).saturating_sub(lits(after)),
        clauses_removed: before.num_clauses().saturating_sub(after.num_clauses()),
        ..StageStats::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_input, ParseMode};
    use crate::oracle::{brute_force_count, check_equivalent_counts};

    fn parse(s: &str) -> CnfFormula {
        parse_input(s.as_bytes(), ParseMode::Auto).unwrap()
    }

    fn sound(f: &CnfFormula, r: &PreprocessResult) -> bool {
        let acc = Accounting {
            multiplier: r.multiplier.clone(),
            removed: Vec::new(),
        };
        check_equivalent_counts(f, &r.formula, &acc).unwrap()
    }

    #[test]
    fn units_are_fixed_and_counted() {
        let f = parse("p cnf 3 2\n1 0\n-1 2 3 0");
        let out = fix_units(&f);
        assert_eq!(out.accounting.removed, vec![Var::new(0)]);
        assert!(check_equivalent_counts(&f, &out.formula, &out.accounting).unwrap());
    }

    #[test]
    fn pipeline_example() {
        let f = parse("p cnf 2 3\n1 0\n1 2 0\n2 -2 0");
        let r = run_pipeline(&f, &PreprocessConfig::default());
        assert!(sound(&f, &r));
        assert_eq!(r.formula.num_vars(), 1);
        assert_eq!(r.formula.num_clauses(), 0);
        assert_eq!(brute_force_count(&f).unwrap().exact_count, 2u32.into());
    }

    #[test]
    fn minimal_formula_is_left_alone() {
        let f = parse("p cnf 3 3\n1 2 0\n2 3 0\n3 1 0");
        let r = run_pipeline(&f, &PreprocessConfig::default());
        assert!(sound(&f, &r));
        assert_eq!(r.formula, f);
        assert!(r.stats.iter().all(|(_, s)| *s == StageStats::default()));
    }

    #[test]
    fn unsat_short_circuits() {
        let f = parse("p cnf 2 2\n1 0\n-1 0");
        let r = run_pipeline(&f, &PreprocessConfig::default());
        assert!(r.is_unsat());
        assert!(r.stats.is_empty());
    }

    #[test]
    fn weighted_pipeline_skips_elimination() {
        let f = parse("p cnf 3 3\nc p weight 1 0.5 0\n-3 1 0\n-3 2 0\n3 -1 -2 0");
        let r = run_pipeline(&f, &PreprocessConfig::default());
        assert!(r.stats.iter().all(|(k, _)| *k != StageKind::EliminateDefined));
        assert!(sound(&f, &r));
    }

    #[test]
    fn preprocessed_output_lists_map() {
        let f = parse("p cnf 3 2\n2 0\n1 3 0");
        let r = run_pipeline(&f, &PreprocessConfig::disabled());
        assert_eq!(
            write_preprocessed(&r),
            "c t pp-multiplier 1\nc t pp-map 1 1\nc t pp-map 3 2\np cnf 2 1\n1 2 0\n"
        );
    }
}

//! Clause strengthening: drop a literal `l` from clause `c` when the rest of
//! `c` is already implied.

use crate::formula::{CnfFormula, Lit, Var};
use crate::sat::{ClauseRef, Propagation, SolveResult, Solver, SolverConfig};

use super::queries::{Queries, Start};
use super::{shrink_stats, Limits, StageOutput, StageStats};

const MAX_PROPAGATION_PASSES: usize = 3;
/// Recent models kept to refute strengthening candidates without a query.
const MODEL_MEMORY: usize = 32;

fn unsat_output(formula: &CnfFormula) -> StageOutput {
    let unsat = CnfFormula::unsat(formula.num_vars(), formula.weights().cloned());
    let stats = StageStats {
        clauses_removed: formula.num_clauses(),
        ..StageStats::default()
    };
    StageOutput::same_vars(unsat, stats)
}

fn negated_without(clause: &[Lit], skip: usize) -> Vec<Lit> {
    clause
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, &l)| !l)
        .collect()
}

/// Strengthens `c` to `c - l` when asserting the negation of `c - l`
/// propagates to a conflict without using `c`. Clauses are visited in
/// order, literals in clause order; a clause is rescanned after each
/// success. At most three passes.
pub fn vivify_propagation(formula: &CnfFormula) -> StageOutput {
    if formula.has_empty_clause() {
        return StageOutput::unchanged(formula);
    }
    let mut clauses: Vec<Vec<Lit>> = formula.clauses().iter().map(|c| c.lits().to_vec()).collect();
    let mut solver = Solver::from_formula(formula, SolverConfig::default());
    let mut crefs: Vec<ClauseRef> = (0..clauses.len() as ClauseRef).collect();
    for _ in 0..MAX_PROPAGATION_PASSES {
        let mut changed = false;
        for i in 0..clauses.len() {
            loop {
                solver.set_enabled(crefs[i], false);
                let hit = (0..clauses[i].len()).find(|&k| {
                    let assumptions = negated_without(&clauses[i], k);
                    solver.propagate_assumptions(&assumptions).expect("clause has no complementary literals")
                        == Propagation::Conflict
                });
                let Some(k) = hit else {
                    solver.set_enabled(crefs[i], true);
                    break;
                };
                clauses[i].remove(k);
                changed = true;
                if clauses[i].is_empty() {
                    return unsat_output(formula);
                }
                crefs[i] = solver.add_clause(&clauses[i]);
            }
        }
        if !changed {
            break;
        }
    }
    let out = CnfFormula::new(formula.num_vars(), clauses, formula.weights().cloned()).expect("same variables");
    let stats = shrink_stats(formula, &out);
    StageOutput::same_vars(out, stats)
}

/// Fixes every backbone literal (kept as a unit clause), then strengthens `c` to `c - l`
/// whenever the formula entails `c - l` (decided by the SAT solver under
/// the conflict budget; an unknown answer leaves the clause alone).
pub fn vivify_complete(formula: &CnfFormula, limits: &Limits) -> StageOutput {
    if formula.has_empty_clause() {
        return StageOutput::unchanged(formula);
    }
    let n = formula.num_vars();
    let budget = Some(limits.query_conflicts);
    let mut queries = match Queries::start(formula, budget) {
        Start::Unsat => return unsat_output(formula),
        Start::Ready(q) => q,
    };
    let mut models: Vec<Vec<bool>> = Vec::new();
    let remember = |models: &mut Vec<Vec<bool>>, m: Vec<bool>| {
        if models.len() == MODEL_MEMORY {
            models.remove(0);
        }
        models.push(m);
    };

    // Backbone: every literal true in a first model is tested by asking for
    // a model where it is false; further models rule out more candidates.
    let mut units: Vec<Lit> = Vec::new();
    if let Some(first) = queries.model().map(<[bool]>::to_vec) {
        let occurs = formula.occurring_vars();
        let mut candidate: Vec<Option<bool>> =
            (0..n).map(|v| occurs[v].then_some(first[v])).collect();
        remember(&mut models, first);
        for v in 0..n {
            if limits.expired() {
                break;
            }
            let Some(val) = candidate[v] else { continue };
            let lit = Var::new(v as u32).lit(val);
            match queries.solve(&[!lit], budget) {
                SolveResult::Unsat => {
                    units.push(lit);
                    queries.solver.add_clause(&[lit]);
                }
                SolveResult::Sat(m) => {
                    for u in v + 1..n {
                        if candidate[u].is_some_and(|c| c != m[u]) {
                            candidate[u] = None;
                        }
                    }
                    remember(&mut models, m);
                }
                SolveResult::Unknown => {}
            }
        }
    }

    // Each backbone literal is the only true literal of some clause in any
    // model, so simplifying by the units removes at least as many clauses
    // as it adds.
    let mut fixed: Vec<Option<bool>> = vec![None; n];
    for l in &units {
        fixed[l.var().index()] = Some(l.is_positive());
    }
    let truth = |l: &Lit| fixed[l.var().index()].map(|b| b == l.is_positive());
    let mut clauses: Vec<Vec<Lit>> = formula
        .clauses()
        .iter()
        .filter(|c| !c.iter().any(|l| truth(l) == Some(true)))
        .map(|c| c.iter().copied().filter(|l| truth(l).is_none()).collect())
        .collect();
    for clause in clauses.iter_mut() {
        if clause.len() < 2 {
            continue;
        }
        'rescan: loop {
            for k in 0..clause.len() {
                if clause.len() < 2 || limits.expired() {
                    break 'rescan;
                }
                // A model falsifying all of `c - l` shows it is not entailed.
                let refuted = models.iter().any(|m| {
                    clause
                        .iter()
                        .enumerate()
                        .all(|(j, l)| j == k || m[l.var().index()] != l.is_positive())
                });
                if refuted {
                    continue;
                }
                let assumptions = negated_without(clause, k);
                match queries.solve(&assumptions, budget) {
                    SolveResult::Unsat => {
                        clause.remove(k);
                        queries.solver.add_clause(clause);
                        continue 'rescan;
                    }
                    SolveResult::Sat(m) => remember(&mut models, m),
                    SolveResult::Unknown => {}
                }
            }
            break;
        }
    }
    let backbone = units.len();
    clauses.extend(units.into_iter().map(|l| vec![l]));
    let out = CnfFormula::new(n, clauses, formula.weights().cloned()).expect("same variables");
    let mut stats = shrink_stats(formula, &out);
    stats.backbone = backbone;
    StageOutput::same_vars(out, stats)
}

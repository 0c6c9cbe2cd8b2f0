//! Elimination of variables defined by their primal-graph neighbourhood.
//!
//! Definability is decided with Padoa's method on a single solver holding
//! the formula `F(V)`, a renamed copy `F(V')` and, for every variable `v`, a
//! selector `s_v` that forces `v = v'` when assumed. Variable `x` is defined
//! by `N(x)` iff `F(V) & F(V') & (v = v' for v in N(x)) & x & !x'` is
//! unsatisfiable. Eliminated variables stay in the solver: they are
//! existentially quantified in both copies, which is exactly what resolution
//! leaves behind, so later queries remain correct.

use crate::formula::{normalize_clause, CnfFormula, Lit, Normalized, Var};
use crate::oracle::Accounting;
use super::queries::{Queries, Start};
use super::{ClauseDb, Limits, StageOutput, StageStats};

/// A variable whose elimination would produce more resolvents than this is
/// left in place.
pub const RESOLVENT_LIMIT: usize = 1000;

/// For each variable in increasing index order: if `N(x)` is a clique in the
/// current primal graph and `x` is defined by `N(x)`, replaces the clauses
/// on `x` by their non-tautological, non-subsumed resolvents. The count is
/// unchanged and `x` is recorded as removed. Weighted formulas are returned
/// unchanged.
pub fn eliminate_defined(formula: &CnfFormula, limits: &Limits) -> StageOutput {
    if formula.is_weighted() || formula.has_empty_clause() {
        return StageOutput::unchanged(formula);
    }
    let n = formula.num_vars();
    let mut queries = match Queries::start(&padoa_formula(formula), Some(limits.query_conflicts)) {
        Start::Unsat => return StageOutput::unchanged(formula),
        Start::Ready(q) => q,
    };
    let mut db = ClauseDb::new(formula);
    let mut removed: Vec<Var> = Vec::new();
    for x in (0..n as u32).map(Var::new) {
        if limits.expired() {
            break;
        }
        if db.occurs[x.index()].is_empty() {
            continue;
        }
        let (pos, neg): (Vec<usize>, Vec<usize>) = db.occurs[x.index()]
            .iter()
            .partition(|&&c| db.clauses[c].as_ref().expect("live clause").contains(&x.pos()));
        if pos.len() * neg.len() > RESOLVENT_LIMIT {
            continue;
        }
        let neighbours = db.neighbors(x);
        if !is_clique(&db, &neighbours) {
            continue;
        }
        let mut assumptions: Vec<Lit> = neighbours.iter().map(|u| selector(*u, n).pos()).collect();
        assumptions.push(x.pos());
        assumptions.push(copy(x, n).neg());
        if queries.check(&assumptions, Some(limits.query_conflicts)) != Some(false) {
            continue;
        }
        resolve_away(&mut db, x, &pos, &neg);
        removed.push(x);
    }
    let eliminations = removed.len();
    StageOutput {
        formula: db.into_formula(n, None),
        accounting: Accounting {
            removed,
            ..Accounting::identity()
        },
        stats: StageStats {
            eliminations,
            ..StageStats::default()
        },
    }
}

fn copy(v: Var, n: usize) -> Var {
    Var::new(v.index() as u32 + n as u32)
}

fn selector(v: Var, n: usize) -> Var {
    Var::new(v.index() as u32 + 2 * n as u32)
}

fn padoa_formula(formula: &CnfFormula) -> CnfFormula {
    let n = formula.num_vars();
    let rename = |l: Lit| copy(l.var(), n).lit(l.is_positive());
    let mut clauses: Vec<Vec<Lit>> = Vec::with_capacity(2 * formula.num_clauses() + 2 * n);
    for c in formula.clauses() {
        clauses.push(c.lits().to_vec());
        clauses.push(c.iter().map(|&l| rename(l)).collect());
    }
    for v in (0..n as u32).map(Var::new) {
        let (s, v2) = (selector(v, n), copy(v, n));
        clauses.push(vec![s.neg(), v.neg(), v2.pos()]);
        clauses.push(vec![s.neg(), v.pos(), v2.neg()]);
    }
    CnfFormula::new(3 * n, clauses, None).expect("renamed literals are in range")
}

fn is_clique(db: &ClauseDb, vars: &[Var]) -> bool {
    vars.iter().enumerate().all(|(i, &u)| {
        let adjacent = db.neighbors(u);
        vars[i + 1..].iter().all(|w| adjacent.binary_search(w).is_ok())
    })
}

fn resolve_away(db: &mut ClauseDb, x: Var, pos: &[usize], neg: &[usize]) {
    let lits_of = |db: &ClauseDb, c: usize| db.clauses[c].clone().expect("live clause");
    let pos_lits: Vec<Vec<Lit>> = pos.iter().map(|&c| lits_of(db, c)).collect();
    let neg_lits: Vec<Vec<Lit>> = neg.iter().map(|&c| lits_of(db, c)).collect();
    for &c in pos.iter().chain(neg) {
        db.remove(c);
    }
    let mut resolvents: Vec<Vec<Lit>> = Vec::new();
    for p in &pos_lits {
        for q in &neg_lits {
            let joined: Vec<Lit> = p.iter().chain(q).copied().filter(|l| l.var() != x).collect();
            if let Normalized::Clause(c) = normalize_clause(&joined) {
                resolvents.push(c.into_lits());
            }
        }
    }
    // Shorter first, so a resolvent is only checked against ones that could
    // subsume it.
    resolvents.sort_by_key(|r| r.len());
    let mut kept: Vec<Vec<Lit>> = Vec::new();
    for r in resolvents {
        if kept.iter().any(|k| subsumes(k, &r)) || subsumed_in_db(db, &r) {
            continue;
        }
        kept.push(r);
    }
    for r in kept {
        db.push(r);
    }
}

fn subsumes(small: &[Lit], big: &[Lit]) -> bool {
    small.len() <= big.len() && small.iter().all(|l| big.contains(l))
}

fn subsumed_in_db(db: &ClauseDb, r: &[Lit]) -> bool {
    r.iter().any(|l| {
        db.occurs[l.var().index()]
            .iter()
            .any(|&c| subsumes(db.clauses[c].as_ref().expect("live clause"), r))
    })
}

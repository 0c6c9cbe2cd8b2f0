//! Merging of equivalent variables that share a clause. Contracting a
//! primal-graph edge cannot increase treewidth.

use std::collections::{BTreeSet, HashSet};

use num_rational::BigRational;

use crate::formula::{normalize_clause, CnfFormula, Lit, Normalized, Var};
use crate::oracle::Accounting;
use crate::sat::SolveResult;

use super::queries::{Queries, Start};
use super::{ClauseDb, Limits, StageOutput, StageStats};

/// Recent models kept to refute equivalences without a query.
const MODEL_MEMORY: usize = 64;

/// Repeatedly takes the lowest variable `x` with untested edges and tests
/// `x <-> y` for each neighbour `y` in increasing order; on success the
/// higher of the two is replaced by the lower everywhere and the survivor's
/// edges are examined again. Weighted pairs merge only when their weight
/// pairs are equal; the survivor then carries the products
/// `w(x) * w(y)` and `w(!x) * w(!y)`.
pub fn merge_equivalences(formula: &CnfFormula, limits: &Limits) -> StageOutput {
    merge_equivalences_traced(formula, limits).0
}

/// [`merge_equivalences`] that also returns each merge as `(kept, removed)`
/// in the order performed.
pub fn merge_equivalences_traced(formula: &CnfFormula, limits: &Limits) -> (StageOutput, Vec<(Var, Var)>) {
    if formula.has_empty_clause() {
        return (StageOutput::unchanged(formula), Vec::new());
    }
    let n = formula.num_vars();
    let budget = Some(limits.query_conflicts);
    let mut queries = match Queries::start(formula, budget) {
        Start::Unsat => {
            let unsat = CnfFormula::unsat(n, formula.weights().cloned());
            return (StageOutput::same_vars(unsat, StageStats::default()), Vec::new());
        }
        Start::Ready(q) => q,
    };
    let mut models: Vec<Vec<bool>> = queries.model().map(<[bool]>::to_vec).into_iter().collect();

    let mut weights = formula.weights().cloned();
    let mut db = ClauseDb::new(formula);
    let mut trace: Vec<(Var, Var)> = Vec::new();
    let mut tried: HashSet<(Var, Var)> = HashSet::new();
    let mut queue: BTreeSet<Var> = (0..n as u32).map(Var::new).collect();
    while let Some(x) = queue.pop_first() {
        if limits.expired() {
            break;
        }
        for y in db.neighbors(x) {
            let pair = (x.min(y), x.max(y));
            if !tried.insert(pair) {
                continue;
            }
            if let Some(w) = &weights {
                if w.get(x.pos()) != w.get(y.pos()) || w.get(x.neg()) != w.get(y.neg()) {
                    continue;
                }
            }
            if !equivalent(&mut queries, &mut models, x, y, budget) {
                continue;
            }
            let (keep, gone) = pair;
            substitute(&mut db, gone, keep);
            if let Some(w) = weights.as_mut() {
                for positive in [true, false] {
                    let product: BigRational = w.get(keep.lit(positive)) * w.get(gone.lit(positive));
                    w.set(keep.lit(positive), product).expect("products stay non-negative");
                }
            }
            trace.push((keep, gone));
            queue.remove(&gone);
            queue.insert(keep);
            break;
        }
    }
    let merges = trace.len();
    let removed = trace.iter().map(|&(_, gone)| gone).collect();
    let out = db.into_formula(n, weights);
    let output = StageOutput {
        formula: out,
        accounting: Accounting {
            multiplier: BigRational::from_integer(1.into()),
            removed,
        },
        stats: StageStats {
            merges,
            ..StageStats::default()
        },
    };
    (output, trace)
}

fn equivalent(queries: &mut Queries, models: &mut Vec<Vec<bool>>, x: Var, y: Var, budget: Option<u64>) -> bool {
    if models.iter().any(|m| m[x.index()] != m[y.index()]) {
        return false;
    }
    for assumptions in [[x.pos(), y.neg()], [x.neg(), y.pos()]] {
        match queries.solve(&assumptions, budget) {
            SolveResult::Unsat => {}
            SolveResult::Sat(m) => {
                if models.len() == MODEL_MEMORY {
                    models.remove(0);
                }
                models.push(m);
                return false;
            }
            SolveResult::Unknown => return false,
        }
    }
    true
}

/// Replaces `gone` by `keep` in every clause, dropping tautologies.
fn substitute(db: &mut ClauseDb, gone: Var, keep: Var) {
    let affected = db.occurs[gone.index()].clone();
    for ci in affected {
        let lits = db.clauses[ci].clone().expect("live clause");
        db.remove(ci);
        let renamed: Vec<Lit> = lits
            .into_iter()
            .map(|l| if l.var() == gone { keep.lit(l.is_positive()) } else { l })
            .collect();
        if let Normalized::Clause(c) = normalize_clause(&renamed) {
            db.push(c.into_lits());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_input, ParseMode};
    use crate::oracle::check_equivalent_counts;

    fn parse(s: &str) -> CnfFormula {
        parse_input(s.as_bytes(), ParseMode::Auto).unwrap()
    }

    #[test]
    fn equivalent_neighbours_merge() {
        let f = parse("p cnf 3 3\n1 -2 0\n-1 2 0\n1 3 0");
        let out = merge_equivalences(&f, &Limits::default());
        assert_eq!(out.accounting.removed, vec![Var::new(1)]);
        assert_eq!(out.formula, parse("p cnf 3 1\n1 3 0"));
        assert!(check_equivalent_counts(&f, &out.formula, &out.accounting).unwrap());
    }

    #[test]
    fn non_equivalent_pair_stays() {
        let f = parse("p cnf 2 1\n1 2 0");
        let out = merge_equivalences(&f, &Limits::default());
        assert!(out.accounting.removed.is_empty());
        assert_eq!(out.formula, f);
    }

    #[test]
    fn non_adjacent_equivalence_is_ignored() {
        // x1 = x2 & x4 and x3 = x2 & x4, so x1 <-> x3, but they share no
        // clause and no adjacent pair is equivalent.
        let f = parse("p cnf 4 6\n-1 2 0\n-1 4 0\n1 -2 -4 0\n-3 2 0\n-3 4 0\n3 -2 -4 0");
        let out = merge_equivalences(&f, &Limits::default());
        assert_eq!(out.stats.merges, 0);
        assert_eq!(out.formula, f);
    }

    #[test]
    fn weighted_merge_multiplies_weights() {
        let f = parse("p cnf 2 2\nc p weight 1 1/3 0\nc p weight -1 2/3 0\nc p weight 2 1/3 0\nc p weight -2 2/3 0\n1 -2 0\n-1 2 0");
        let out = merge_equivalences(&f, &Limits::default());
        assert_eq!(out.stats.merges, 1);
        assert!(check_equivalent_counts(&f, &out.formula, &out.accounting).unwrap());

        let unequal = parse("p cnf 2 2\nc p weight 1 1/3 0\nc p weight 2 1/2 0\n1 -2 0\n-1 2 0");
        assert_eq!(merge_equivalences(&unequal, &Limits::default()).stats.merges, 0);
    }
}

//! Removal of clauses implied by the remaining ones.

use crate::formula::{CnfFormula, Lit};
use crate::sat::ClauseRef;

use super::queries::{Queries, Start};
use super::{shrink_stats, Limits, StageOutput};

/// Visits clauses from longest to shortest (higher index first among equal
/// lengths) and removes `c` when the other current clauses entail it.
pub fn sparsify(formula: &CnfFormula, limits: &Limits) -> StageOutput {
    if formula.has_empty_clause() {
        return StageOutput::unchanged(formula);
    }
    let m = formula.num_clauses();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(formula.clauses()[i].lits().len()), std::cmp::Reverse(i)));
    let mut queries = match Queries::start(formula, Some(limits.query_conflicts)) {
        Start::Unsat => return StageOutput::unchanged(formula),
        Start::Ready(q) => q,
    };
    let mut keep = vec![true; m];
    for i in order {
        if limits.expired() {
            break;
        }
        // Learned clauses may depend on the clause being tested.
        queries.solver.clear_learned();
        queries.solver.set_enabled(i as ClauseRef, false);
        let negated: Vec<Lit> = formula.clauses()[i].iter().map(|&l| !l).collect();
        match queries.check(&negated, Some(limits.query_conflicts)) {
            Some(false) => keep[i] = false,
            _ => queries.solver.set_enabled(i as ClauseRef, true),
        }
    }
    let clauses = formula
        .clauses()
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(c, _)| c.lits().to_vec());
    let out = CnfFormula::new(formula.num_vars(), clauses, formula.weights().cloned()).expect("same variables");
    let stats = shrink_stats(formula, &out);
    StageOutput::same_vars(out, stats)
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
    fn implied_clause_is_removed() {
        let f = parse("p cnf 2 2\n1 0\n1 2 0");
        let out = sparsify(&f, &Limits::default());
        assert_eq!(out.formula, parse("p cnf 2 1\n1 0"));
        assert!(check_equivalent_counts(&f, &out.formula, &out.accounting).unwrap());
    }

    #[test]
    fn independent_clauses_stay() {
        let f = parse("p cnf 4 2\n1 2 0\n3 4 0");
        assert_eq!(sparsify(&f, &Limits::default()).formula, f);
    }

    #[test]
    fn second_pass_removes_nothing() {
        let f = parse("p cnf 3 4\n1 2 0\n-2 3 0\n1 3 0\n1 2 3 0");
        let once = sparsify(&f, &Limits::default()).formula;
        assert_eq!(sparsify(&once, &Limits::default()).formula, once);
        assert!(check_equivalent_counts(&f, &once, &crate::oracle::Accounting::identity()).unwrap());
    }
}

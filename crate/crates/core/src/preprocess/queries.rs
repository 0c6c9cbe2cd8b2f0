//! SAT queries confined to the connected components they touch.
//!
//! Components of the clause graph are computed once. A query decides only
//! the variables in the components of its assumptions; the rest of the
//! formula is satisfiable on its own (a full model is known), so the answer
//! is exact, and a model of the whole formula is obtained by taking the
//! other components from the known model.

use crate::formula::{CnfFormula, Lit, Var};
use crate::sat::{SolveResult, Solver, SolverConfig};

pub(crate) enum Start {
    Ready(Box<Queries>),
    Unsat,
}

pub(crate) struct Queries {
    pub solver: Solver,
    component: Vec<usize>,
    members: Vec<Vec<Var>>,
    /// A model of the enabled clauses, once one is known.
    base: Option<Vec<bool>>,
    stamp: Vec<u64>,
    epoch: u64,
}

impl Queries {
    /// Loads `formula` and looks for a first model under `budget`.
    pub fn start(formula: &CnfFormula, budget: Option<u64>) -> Start {
        let mut solver = Solver::from_formula(formula, SolverConfig::default());
        let base = match solver.solve(&[], budget).expect("no assumptions") {
            SolveResult::Unsat => return Start::Unsat,
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unknown => None,
        };
        let (component, members) = components(formula);
        Start::Ready(Box::new(Queries {
            solver,
            stamp: vec![0; members.len()],
            component,
            members,
            base,
            epoch: 0,
        }))
    }

    pub fn model(&self) -> Option<&[bool]> {
        self.base.as_deref()
    }

    fn scope(&mut self, assumptions: &[Lit]) -> Vec<Var> {
        self.epoch += 1;
        let mut scope = Vec::new();
        for l in assumptions {
            let c = self.component[l.var().index()];
            if self.stamp[c] != self.epoch {
                self.stamp[c] = self.epoch;
                scope.extend_from_slice(&self.members[c]);
            }
        }
        scope
    }

    fn run(&mut self, assumptions: &[Lit], budget: Option<u64>) -> (SolveResult, Vec<Var>) {
        if self.base.is_none() {
            let r = self.solver.solve(assumptions, budget).expect("consistent assumptions");
            return (r, Vec::new());
        }
        let scope = self.scope(assumptions);
        let r = self
            .solver
            .solve_within(assumptions, budget, &scope)
            .expect("consistent assumptions");
        (r, scope)
    }

    /// Solves under `assumptions`. The enabled clauses must be satisfied by
    /// the known model outside the touched components, which holds while
    /// every clause added is implied by the formula. A model returned is a
    /// model of the whole formula and becomes the known one.
    pub fn solve(&mut self, assumptions: &[Lit], budget: Option<u64>) -> SolveResult {
        match self.run(assumptions, budget) {
            (SolveResult::Sat(partial), scope) => match self.base.as_mut() {
                Some(base) => {
                    for v in scope {
                        base[v.index()] = partial[v.index()];
                    }
                    SolveResult::Sat(base.clone())
                }
                None => {
                    self.base = Some(partial.clone());
                    SolveResult::Sat(partial)
                }
            },
            (other, _) => other,
        }
    }

    /// Satisfiability only (`None` when the budget runs out); the known
    /// model is left alone, so clauses may have been switched off.
    pub fn check(&mut self, assumptions: &[Lit], budget: Option<u64>) -> Option<bool> {
        match self.run(assumptions, budget).0 {
            SolveResult::Sat(_) => Some(true),
            SolveResult::Unsat => Some(false),
            SolveResult::Unknown => None,
        }
    }
}

/// Connected components of the variables, linked by shared clauses.
fn components(formula: &CnfFormula) -> (Vec<usize>, Vec<Vec<Var>>) {
    let n = formula.num_vars();
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in formula.clauses().iter().enumerate() {
        for l in c.iter() {
            occurs[l.var().index()].push(i);
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut clause_seen = vec![false; formula.num_clauses()];
    let mut members: Vec<Vec<Var>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        component[start] = id;
        let mut vars = vec![Var::new(start as u32)];
        let mut next = 0;
        while next < vars.len() {
            let v = vars[next].index();
            next += 1;
            for &ci in &occurs[v] {
                if std::mem::replace(&mut clause_seen[ci], true) {
                    continue;
                }
                for l in formula.clauses()[ci].iter() {
                    let u = l.var().index();
                    if component[u] == usize::MAX {
                        component[u] = id;
                        vars.push(l.var());
                    }
                }
            }
        }
        members.push(vars);
    }
    (component, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_input, ParseMode};

    fn parse(s: &str) -> CnfFormula {
        parse_input(s.as_bytes(), ParseMode::Auto).unwrap()
    }

    fn lit(d: i64) -> Lit {
        Lit::from_dimacs(d)
    }

    #[test]
    fn scoped_answers_match_full_solving() {
        let f = parse("p cnf 6 5\n1 2 0\n-1 2 0\n3 4 0\n-3 -4 0\n5 6 0");
        let Start::Ready(mut q) = Queries::start(&f, None) else { panic!("satisfiable") };
        let mut full = Solver::from_formula(&f, SolverConfig::default());
        for assumptions in [vec![lit(-2)], vec![lit(3), lit(4)], vec![lit(1), lit(5)], vec![lit(-5), lit(-6)], vec![]] {
            let expected = matches!(full.solve(&assumptions, None).unwrap(), SolveResult::Sat(_));
            match q.solve(&assumptions, None) {
                SolveResult::Sat(m) => {
                    assert!(expected);
                    assert!(assumptions.iter().all(|l| m[l.var().index()] == l.is_positive()));
                    assert!(f.clauses().iter().all(|c| c.iter().any(|l| m[l.var().index()] == l.is_positive())));
                }
                SolveResult::Unsat => assert!(!expected),
                SolveResult::Unknown => unreachable!("no budget"),
            }
        }
    }

    #[test]
    fn unsatisfiable_formula_is_reported() {
        let f = parse("p cnf 1 2\n1 0\n-1 0");
        assert!(matches!(Queries::start(&f, None), Start::Unsat));
    }
}

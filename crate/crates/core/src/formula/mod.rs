//! CNF data model.
//!
//! Variables are 0-based internally and 1-based in DIMACS text. A literal is
//! a single `u32` code `2 * var + negated`, so `lit.code()` indexes per-literal
//! arrays (watch lists, weights) directly and negation is `code ^ 1`.

mod dimacs;
mod weight;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::{Deref, Not};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use dimacs::{parse_input, write_cnf, ParseError, ParseMode};
pub use weight::{format_rational, parse_rational};

/// A propositional variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Var(u32);

impl Var {
    /// Variable with 0-based index `idx`.
    pub const fn new(idx: u32) -> Var {
        Var(idx)
    }

    /// Variable from a 1-based DIMACS index. Panics on 0.
    pub fn from_dimacs(idx: u32) -> Var {
        assert!(idx > 0, "DIMACS variables are 1-based");
        Var(idx - 1)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn dimacs(self) -> u32 {
        self.0 + 1
    }

    pub const fn pos(self) -> Lit {
        Lit(self.0 << 1)
    }

    pub const fn neg(self) -> Lit {
        Lit((self.0 << 1) | 1)
    }

    pub const fn lit(self, positive: bool) -> Lit {
        if positive {
            self.pos()
        } else {
            self.neg()
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.dimacs())
    }
}

/// A literal: a variable with a polarity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Lit(u32);

impl Lit {
    pub const fn from_code(code: u32) -> Lit {
        Lit(code)
    }

    /// Literal from a signed, non-zero DIMACS integer.
    pub fn from_dimacs(value: i64) -> Lit {
        assert!(value != 0, "0 is not a literal");
        let var = Var::from_dimacs(value.unsigned_abs() as u32);
        var.lit(value > 0)
    }

    pub const fn code(self) -> usize {
        self.0 as usize
    }

    pub const fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub const fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub const fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().dimacs() as i64;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals. Normalized clauses hold no duplicate literal
/// and no complementary pair.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn into_lits(self) -> Vec<Lit> {
        self.lits
    }

    /// Literal set in sorted order, used as a duplicate-detection key.
    pub fn sorted_key(&self) -> Vec<Lit> {
        let mut key = self.lits.clone();
        key.sort_unstable();
        key
    }
}

impl Deref for Clause {
    type Target = [Lit];

    fn deref(&self) -> &[Lit] {
        &self.lits
    }
}

/// Outcome of [`normalize_clause`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Normalized {
    Clause(Clause),
    Tautology,
}

/// Collapses duplicate literals (first occurrence wins) and detects
/// tautologies.
pub fn normalize_clause(lits: &[Lit]) -> Normalized {
    let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
    for &lit in lits {
        if out.contains(&!lit) {
            return Normalized::Tautology;
        }
        if !out.contains(&lit) {
            out.push(lit);
        }
    }
    Normalized::Clause(Clause { lits: out })
}

/// Literal weights. Literals without an entry weigh exactly 1.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WeightMap {
    entries: BTreeMap<Lit, BigRational>,
}

impl WeightMap {
    pub fn new() -> WeightMap {
        WeightMap::default()
    }

    pub fn set(&mut self, lit: Lit, weight: BigRational) -> Result<(), FormulaError> {
        if weight.is_negative() {
            return Err(FormulaError::NegativeWeight(lit.to_dimacs()));
        }
        self.entries.insert(lit, weight);
        Ok(())
    }

    pub fn get(&self, lit: Lit) -> BigRational {
        self.entries
            .get(&lit)
            .cloned()
            .unwrap_or_else(BigRational::one)
    }

    pub fn explicit(&self, lit: Lit) -> Option<&BigRational> {
        self.entries.get(&lit)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Lit, &BigRational)> {
        self.entries.iter().map(|(l, w)| (*l, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("literal {lit} exceeds the declared variable count {num_vars}")]
    VariableOutOfRange { lit: i64, num_vars: usize },
    #[error("negative weight for literal {0}")]
    NegativeWeight(i64),
}

/// A normalized CNF formula over variables `0..num_vars`.
///
/// Construction drops tautologies, collapses duplicate literals and removes
/// duplicate clauses (first occurrence kept). An empty clause marks the
/// formula unsatisfiable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    weights: Option<WeightMap>,
    free_var_count: usize,
}

impl CnfFormula {
    pub fn new<I, C>(
        num_vars: usize,
        clauses: I,
        weights: Option<WeightMap>,
    ) -> Result<CnfFormula, FormulaError>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[Lit]>,
    {
        let mut seen: HashSet<Vec<Lit>> = HashSet::new();
        let mut out = Vec::new();
        for raw in clauses {
            let raw = raw.as_ref();
            if let Some(bad) = raw.iter().find(|l| l.var().index() >= num_vars) {
                return Err(FormulaError::VariableOutOfRange {
                    lit: bad.to_dimacs(),
                    num_vars,
                });
            }
            if let Normalized::Clause(clause) = normalize_clause(raw) {
                if seen.insert(clause.sorted_key()) {
                    out.push(clause);
                }
            }
        }
        if let Some(w) = &weights {
            if let Some((lit, _)) = w.iter().find(|(l, _)| l.var().index() >= num_vars) {
                return Err(FormulaError::VariableOutOfRange {
                    lit: lit.to_dimacs(),
                    num_vars,
                });
            }
        }
        let mut formula = CnfFormula {
            num_vars,
            clauses: out,
            weights,
            free_var_count: 0,
        };
        formula.free_var_count = formula.occurring_vars().iter().filter(|o| !**o).count();
        Ok(formula)
    }

    /// Formula consisting of the empty clause only.
    pub fn unsat(num_vars: usize, weights: Option<WeightMap>) -> CnfFormula {
        CnfFormula::new(num_vars, [Vec::<Lit>::new()], weights).expect("no literals")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn weights(&self) -> Option<&WeightMap> {
        self.weights.as_ref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weight of `lit`; 1 for unweighted formulas and absent entries.
    pub fn weight(&self, lit: Lit) -> BigRational {
        match &self.weights {
            Some(w) => w.get(lit),
            None => BigRational::one(),
        }
    }

    /// `w(v) + w(¬v)`, the factor a variable unconstrained by any clause
    /// contributes.
    pub fn free_factor(&self, var: Var) -> BigRational {
        self.weight(var.pos()) + self.weight(var.neg())
    }

    pub fn free_var_count(&self) -> usize {
        self.free_var_count
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(|c| c.is_empty())
    }

    pub fn occurring_vars(&self) -> Vec<bool> {
        let mut occ = vec![false; self.num_vars];
        for c in &self.clauses {
            for l in c.iter() {
                occ[l.var().index()] = true;
            }
        }
        occ
    }

    /// Same clauses with the weights dropped.
    pub fn unweighted(&self) -> CnfFormula {
        CnfFormula {
            weights: None,
            ..self.clone()
        }
    }

    /// Same clauses carrying `weights`.
    pub fn with_weights(&self, weights: Option<WeightMap>) -> CnfFormula {
        CnfFormula {
            weights,
            ..self.clone()
        }
    }

    /// True when every weight is 1, i.e. the weighted count equals the
    /// plain model count.
    pub fn has_trivial_weights(&self) -> bool {
        match &self.weights {
            None => true,
            Some(w) => w.iter().all(|(_, v)| v.is_one()),
        }
    }

    /// True when some literal has weight 0.
    pub fn has_zero_weight(&self) -> bool {
        self.weights
            .as_ref()
            .is_some_and(|w| w.iter().any(|(_, v)| v.is_zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    #[test]
    fn literal_encoding() {
        let l = Lit::from_dimacs(3);
        assert_eq!(l.code(), 4);
        assert_eq!((!l).code(), 5);
        assert_eq!(Lit::from_dimacs(-1).code(), 1);
        assert_eq!((!l).to_dimacs(), -3);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_clause(&lits(&[1, 2, 1])),
            Normalized::Clause(Clause { lits: lits(&[1, 2]) })
        );
        assert_eq!(normalize_clause(&lits(&[1, -1])), Normalized::Tautology);
        assert_eq!(
            normalize_clause(&lits(&[-3])),
            Normalized::Clause(Clause { lits: lits(&[-3]) })
        );
    }

    #[test]
    fn duplicate_clauses_removed_in_first_occurrence_order() {
        let f = CnfFormula::new(
            3,
            [lits(&[2, 1]), lits(&[3]), lits(&[1, 2]), lits(&[1, -1])],
            None,
        )
        .unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.clauses()[0].lits(), &lits(&[2, 1])[..]);
        assert_eq!(f.free_var_count(), 0);
    }

    #[test]
    fn out_of_range_literal_rejected() {
        let err = CnfFormula::new(2, [lits(&[3])], None).unwrap_err();
        assert!(matches!(err, FormulaError::VariableOutOfRange { lit: 3, .. }));
    }

    #[test]
    fn absent_weight_is_one() {
        let mut w = WeightMap::new();
        w.set(Lit::from_dimacs(1), BigRational::new(3.into(), 10.into()))
            .unwrap();
        assert!(w.get(Lit::from_dimacs(-1)).is_one());
        assert!(w.get(Lit::from_dimacs(7)).is_one());
        assert!(w
            .set(Lit::from_dimacs(2), BigRational::from_integer((-1).into()))
            .is_err());
    }

    proptest! {
        #[test]
        fn negation_is_involution(code in 0u32..1_000_000) {
            let l = Lit::from_code(code);
            prop_assert_eq!(!!l, l);
            prop_assert_ne!(!l, l);
            prop_assert_eq!((!l).var(), l.var());
        }

        #[test]
        fn normalization_idempotent(raw in proptest::collection::vec((1i64..8, any::<bool>()), 0..12)) {
            let ls: Vec<Lit> = raw.iter().map(|&(v, p)| Lit::from_dimacs(if p { v } else { -v })).collect();
            if let Normalized::Clause(c) = normalize_clause(&ls) {
                prop_assert_eq!(normalize_clause(c.lits()), Normalized::Clause(c.clone()));
            }
        }

        #[test]
        fn weight_lookup_defaults_to_one(code in 0u32..64) {
            let w = WeightMap::new();
            prop_assert!(w.get(Lit::from_code(code)).is_one());
        }
    }
}

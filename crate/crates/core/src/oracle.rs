//! Brute-force reference implementations for testing. Nothing here shares
//! code with the solver, the preprocessor or the counter.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::formula::{CnfFormula, Var};
use crate::td::PrimalGraph;

/// Largest variable count [`brute_force_count`] will enumerate.
pub const MAX_ORACLE_VARS: usize = 24;
/// Largest vertex count [`treewidth_exact`] accepts.
pub const MAX_TREEWIDTH_VERTICES: usize = 20;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{found} variables exceed the enumeration limit of {limit}")]
    TooLarge { found: usize, limit: usize },
    #[error("removed variable {0:?} still occurs in a clause")]
    RemovedVariableOccurs(Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub exact_count: BigUint,
    /// Weighted count; equals `exact_count` for unweighted formulas.
    pub weighted_value: BigRational,
}

/// How a transformed formula's count relates to the original's:
/// `count(original) = multiplier * count(transformed)`, where the
/// transformed formula is enumerated without the `removed` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accounting {
    pub multiplier: BigRational,
    pub removed: Vec<Var>,
}

impl Accounting {
    pub fn identity() -> Accounting {
        Accounting {
            multiplier: BigRational::one(),
            removed: Vec::new(),
        }
    }
}

/// Counts models by enumerating every assignment.
pub fn brute_force_count(formula: &CnfFormula) -> Result<OracleResult, OracleError> {
    let vars: Vec<Var> = (0..formula.num_vars() as u32).map(Var::new).collect();
    count_over(formula, &vars)
}

/// Enumerates assignments of `vars` only; every clause variable must be
/// among them.
fn count_over(formula: &CnfFormula, vars: &[Var]) -> Result<OracleResult, OracleError> {
    if vars.len() > MAX_ORACLE_VARS {
        return Err(OracleError::TooLarge {
            found: vars.len(),
            limit: MAX_ORACLE_VARS,
        });
    }
    let mut bit = vec![usize::MAX; formula.num_vars()];
    for (i, v) in vars.iter().enumerate() {
        bit[v.index()] = i;
    }
    // A clause is satisfied by `a` iff a & pos != 0 or !a & neg != 0.
    let mut masks = Vec::with_capacity(formula.num_clauses());
    for clause in formula.clauses() {
        let (mut pos, mut neg) = (0u32, 0u32);
        for lit in clause.lits() {
            let b = bit[lit.var().index()];
            if b == usize::MAX {
                return Err(OracleError::RemovedVariableOccurs(lit.var()));
            }
            if lit.is_positive() {
                pos |= 1 << b;
            } else {
                neg |= 1 << b;
            }
        }
        masks.push((pos, neg));
    }

    // Weights as integer numerators over a per-variable common denominator.
    let weighted = formula.is_weighted();
    let mut numerators: Vec<(BigUint, BigUint)> = Vec::new();
    let mut denominator = BigUint::one();
    if weighted {
        for v in vars {
            let (wp, wn) = (formula.weight(v.pos()), formula.weight(v.neg()));
            let den = wp.denom().lcm(wn.denom());
            let scale = |w: &BigRational| -> BigUint {
                (w.numer() * (&den / w.denom())).to_biguint().expect("weights are non-negative")
            };
            numerators.push((scale(&wp), scale(&wn)));
            denominator *= den.to_biguint().expect("positive");
        }
    }

    let mut count = BigUint::zero();
    let mut total = BigUint::zero();
    let full: u64 = 1u64 << vars.len();
    for a in 0..full {
        let a = a as u32;
        if masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0) {
            count += 1u32;
            if weighted {
                let mut product = BigUint::one();
                for (i, (wp, wn)) in numerators.iter().enumerate() {
                    product *= if a >> i & 1 == 1 { wp } else { wn };
                }
                total += product;
            }
        }
    }
    let weighted_value = if weighted {
        BigRational::new(BigInt::from(total), BigInt::from(denominator))
    } else {
        BigRational::from_integer(BigInt::from(count.clone()))
    };
    Ok(OracleResult {
        exact_count: count,
        weighted_value,
    })
}

/// Whether `f1` has exactly `accounting.multiplier` times the (weighted)
/// count of `f2` enumerated without the removed variables.
pub fn check_equivalent_counts(
    f1: &CnfFormula,
    f2: &CnfFormula,
    accounting: &Accounting,
) -> Result<bool, OracleError> {
    let original = brute_force_count(f1)?;
    let kept: Vec<Var> = (0..f2.num_vars() as u32)
        .map(Var::new)
        .filter(|v| !accounting.removed.contains(v))
        .collect();
    let reduced = count_over(f2, &kept)?;
    Ok(original.weighted_value == &accounting.multiplier * &reduced.weighted_value)
}

/// Exact treewidth by dynamic programming over vertex subsets: the best
/// elimination of a set `S` costs `max(TW(S - v), |Q(S - v, v)|)` minimized
/// over `v`, where `Q(S, v)` is the set of vertices outside `S + v` reachable
/// from `v` through `S`.
pub fn treewidth_exact(graph: &PrimalGraph) -> Result<usize, OracleError> {
    let n = graph.vertex_count();
    if n > MAX_TREEWIDTH_VERTICES {
        return Err(OracleError::TooLarge {
            found: n,
            limit: MAX_TREEWIDTH_VERTICES,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let nbr: Vec<u32> = (0..n as u32)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let q_size = |s: u32, v: usize| -> usize {
        // Flood from v through S; count the non-S vertices touched.
        let mut visited = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut reached = 0u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= nbr[u];
            }
            next &= !visited;
            visited |= next;
            reached |= next & !s;
            frontier = next & s;
        }
        reached.count_ones() as usize
    };
    let size = 1usize << n;
    let mut tw = vec![usize::MAX; size];
    tw[0] = 0;
    for s in 1..size as u32 {
        let mut best = usize::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let cost = tw[without as usize].max(q_size(without, v));
            best = best.min(cost);
        }
        tw[s as usize] = best;
    }
    Ok(tw[size - 1])
}

//! Random instances and helpers shared by the integration tests.
#![allow(dead_code)]

use std::time::Duration;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tdcount_core::formula::{CnfFormula, Lit, Var, WeightMap};
use tdcount_core::td::{compute_td, PrimalGraph, TdConfig, TreeDecomposition};

/// `round(density * n)` clauses over three distinct variables each.
pub fn random_3cnf(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CnfFormula {
    let m = (density * n as f64).round() as usize;
    let clauses: Vec<Vec<Lit>> = (0..m)
        .map(|_| {
            let mut vars: Vec<u32> = Vec::with_capacity(3);
            while vars.len() < 3.min(n) {
                let v = rng.gen_range(0..n as u32);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter().map(|v| Var::new(v).lit(rng.gen())).collect()
        })
        .collect();
    CnfFormula::new(n, clauses, None).unwrap()
}

/// Instance sizes of the standard random suite.
pub fn random_suite_instance(rng: &mut ChaCha8Rng) -> CnfFormula {
    let n = rng.gen_range(5..=18);
    let density = rng.gen_range(1.0..=5.0);
    random_3cnf(rng, n, density)
}

/// A rational strictly between 0 and 1.
pub fn random_unit_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let den: i64 = rng.gen_range(2..=1000);
    let num: i64 = rng.gen_range(1..den);
    BigRational::new(num.into(), den.into())
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightMap {
    let mut w = WeightMap::new();
    for v in 0..n as u32 {
        w.set(Var::new(v).pos(), random_unit_rational(rng)).unwrap();
        w.set(Var::new(v).neg(), random_unit_rational(rng)).unwrap();
    }
    w
}

pub fn random_weighted_instance(rng: &mut ChaCha8Rng, max_n: usize) -> CnfFormula {
    let n = rng.gen_range(3..=max_n);
    let density = rng.gen_range(1.0..=5.0);
    let f = random_3cnf(rng, n, density);
    let w = random_weights(rng, n);
    f.with_weights(Some(w))
}

/// `|got - expected| <= tol * |expected|` (exact zero must match exactly).
pub fn within_relative(got: &BigRational, expected: &BigRational, tol: &BigRational) -> bool {
    if expected.is_zero() {
        return got.is_zero();
    }
    (got - expected).abs() <= tol * expected.abs()
}

/// `10^-k` as a rational.
pub fn ten_to_minus(k: u32) -> BigRational {
    BigRational::new(1.into(), num_traits::pow(BigInt::from(10), k as usize))
}

pub fn quick_td_config(seed: u64) -> TdConfig {
    TdConfig {
        time_budget: Duration::from_secs(1),
        seed,
        max_stall: 50,
    }
}

pub fn decomposition(f: &CnfFormula) -> TreeDecomposition {
    compute_td(&PrimalGraph::from_formula(f), &quick_td_config(0)).decomposition
}

/// Random graph with edge probability `p`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> PrimalGraph {
    let mut edges = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    PrimalGraph::from_edges(n, &edges)
}

/// A random 3-CNF with planted AND gates over fresh output variables and
/// planted equivalences, so that merging and elimination have work to do.
pub fn planted_instance(rng: &mut ChaCha8Rng, max_n: usize) -> CnfFormula {
    let base = rng.gen_range(4..=max_n - 3);
    let gates = rng.gen_range(1..=(max_n - base).min(3));
    let n = base + gates;
    let density = rng.gen_range(1.0..=3.0);
    let mut clauses: Vec<Vec<Lit>> = random_3cnf(rng, base, density)
        .clauses()
        .iter()
        .map(|c| c.lits().to_vec())
        .collect();
    for g in base..n {
        let g = Var::new(g as u32);
        let a = Var::new(rng.gen_range(0..g.index() as u32));
        let mut b = a;
        while b == a {
            b = Var::new(rng.gen_range(0..g.index() as u32));
        }
        let (a, b) = (a.lit(rng.gen()), b.lit(rng.gen()));
        clauses.push(vec![g.neg(), a]);
        clauses.push(vec![g.neg(), b]);
        clauses.push(vec![g.pos(), !a, !b]);
    }
    for _ in 0..rng.gen_range(1..=2) {
        let x = Var::new(rng.gen_range(0..n as u32));
        let mut y = x;
        while y == x {
            y = Var::new(rng.gen_range(0..n as u32));
        }
        let y = y.lit(rng.gen());
        clauses.push(vec![x.pos(), !y]);
        clauses.push(vec![x.neg(), y]);
    }
    CnfFormula::new(n, clauses, None).unwrap()
}

/// Half planted instances, half plain random 3-CNFs with `n <= 14`.
pub fn preprocess_instance(rng: &mut ChaCha8Rng) -> CnfFormula {
    if rng.gen_bool(0.5) {
        planted_instance(rng, 14)
    } else {
        let n = rng.gen_range(3..=14);
        let density = rng.gen_range(1.0..=5.0);
        random_3cnf(rng, n, density)
    }
}

pub fn weighted_preprocess_instance(rng: &mut ChaCha8Rng) -> CnfFormula {
    let f = preprocess_instance(rng);
    // Some variables share a weight pair so that weighted merging can fire.
    let mut w = random_weights(rng, f.num_vars());
    if rng.gen_bool(0.5) {
        let shared = (w.get(Var::new(0).pos()), w.get(Var::new(0).neg()));
        for v in 1..f.num_vars() as u32 {
            if rng.gen_bool(0.5) {
                w.set(Var::new(v).pos(), shared.0.clone()).unwrap();
                w.set(Var::new(v).neg(), shared.1.clone()).unwrap();
            }
        }
    }
    f.with_weights(Some(w))
}

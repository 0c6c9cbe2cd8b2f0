//! Exact model counting by DPLL-style search with clause learning,
//! component decomposition and component caching.
//!
//! The count of a node is `w(x) * count(F|x) + w(!x) * count(F|!x)` for the
//! branching variable `x`, and the product of the counts of its connected
//! components otherwise. Free variables contribute `w(v) + w(!v)`. Any
//! [`Semiring`] can host the arithmetic; [`count_formula`] picks exact
//! integers or [`BigFloat`](crate::bigfloat::BigFloat) values.

mod branching;
mod cache;
mod component;
mod search;

use std::time::Instant;

use thiserror::Error;

pub use branching::{branch_constant, branch_score, normalize_activity, BranchConfig};
pub use cache::{CacheStats, ComponentCache, DECAY_INTERVAL, ENTRY_OVERHEAD};
pub use component::{
    component_signature, split_components, Component, ComponentClause, Signature, SignatureKey, Split,
};

use crate::formula::{CnfFormula, Var};
use crate::sat::{Solver, SolverConfig};
use crate::semiring::{CountValue, Counting, Semiring, Weighted};
use crate::td::{variable_depths, PrimalGraph, TdError, TreeDecomposition};

/// Stack reserved for the search thread; recursion depth grows with the
/// number of decisions on a path.
const SEARCH_STACK_BYTES: usize = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branching {
    /// Frequency and activity, penalized by decomposition depth.
    Td,
    /// Frequency and activity only.
    Base,
}

/// Propagation strategy. Only standard unit propagation is available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcpMode {
    Standard,
    Implicit,
}

#[derive(Clone, Debug)]
pub struct CounterConfig {
    pub branching: Branching,
    pub use_cache: bool,
    pub cache_bytes: usize,
    pub seed: u64,
    pub deadline: Option<Instant>,
    pub bcp: BcpMode,
    /// Keep a [`BranchRecord`] for every branching node.
    pub record_branches: bool,
    pub freq_weight: f64,
    pub act_weight: f64,
}

impl Default for CounterConfig {
    fn default() -> Self {
        CounterConfig {
            branching: Branching::Td,
            use_cache: true,
            cache_bytes: 2000 << 20,
            seed: 0,
            deadline: None,
            bcp: BcpMode::Standard,
            record_branches: false,
            freq_weight: 1.0,
            act_weight: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CountStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub cache_hits: u64,
    pub cache_stores: u64,
    pub components: u64,
    pub max_depth: usize,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CountError {
    #[error("search timed out")]
    Timeout,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("tree decomposition does not fit the formula: {0}")]
    Decomposition(#[from] TdError),
}

/// One branching node: `value = w(x) * positive + w(!x) * negative`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRecord<V> {
    pub var: Var,
    pub positive: V,
    pub negative: V,
    pub value: V,
}

#[derive(Clone, Debug)]
pub struct CountOutcome<V> {
    pub value: V,
    pub stats: CountStats,
    pub branches: Vec<BranchRecord<V>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountResult {
    pub value: CountValue,
    /// `Unsat` exactly when `value` is zero.
    pub status: Status,
    pub stats: CountStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Exact,
    Weighted { precision: u32 },
}

/// Counts `formula` in `semiring`. With [`Branching::Td`] a decomposition
/// of the formula's primal graph is required.
pub fn count<S>(
    formula: &CnfFormula,
    td: Option<&TreeDecomposition>,
    semiring: &S,
    cfg: &CounterConfig,
) -> Result<CountOutcome<S::Value>, CountError>
where
    S: Semiring + Sync,
    S::Value: Send,
{
    if cfg.bcp == BcpMode::Implicit {
        return Err(CountError::Unsupported("implicit BCP"));
    }
    let n = formula.num_vars();
    let mut branch = BranchConfig {
        use_td: false,
        c: 1.0,
        freq_weight: cfg.freq_weight,
        act_weight: cfg.act_weight,
    };
    let mut depths = vec![0.0; n];
    if cfg.branching == Branching::Td {
        let td = td.ok_or(CountError::Unsupported("decomposition branching without a decomposition"))?;
        td.validate(&PrimalGraph::from_formula(formula))?;
        depths = variable_depths(td, n)?;
        if n > 0 {
            branch.use_td = true;
            branch.c = branch_constant(n, td.width().max(1));
        }
    }

    let weights: Vec<S::Value> = (0..2 * n as u32)
        .map(|code| semiring.literal_weight(formula, crate::formula::Lit::from_code(code)))
        .collect();
    let free_factor = (0..n).map(|v| semiring.add(&weights[2 * v], &weights[2 * v + 1])).collect();
    let mut search = search::Search {
        formula,
        semiring,
        solver: Solver::from_formula(formula, SolverConfig::default()),
        weights,
        free_factor,
        splitter: component::Splitter::new(formula),
        cache: cfg.use_cache.then(|| ComponentCache::new(cfg.cache_bytes)),
        key: SignatureKey::from_seed(cfg.seed),
        depths,
        branch,
        pending: Vec::new(),
        in_scope: vec![0; n],
        scope_epoch: 0,
        freq: vec![0; n],
        stats: CountStats::default(),
        deadline: cfg.deadline,
        records: cfg.record_branches.then(Vec::new),
    };
    let value = std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name("count".into())
            .stack_size(SEARCH_STACK_BYTES)
            .spawn_scoped(scope, || search.run())
            .expect("failed to spawn the search thread")
            .join()
            .unwrap_or_else(|panic| std::panic::resume_unwind(panic))
    })?;
    Ok(CountOutcome {
        value,
        stats: search.stats,
        branches: search.records.unwrap_or_default(),
    })
}

/// Counts with exact integers or with weights at the given precision.
pub fn count_formula(
    formula: &CnfFormula,
    td: Option<&TreeDecomposition>,
    mode: CountMode,
    cfg: &CounterConfig,
) -> Result<CountResult, CountError> {
    let (value, stats) = match mode {
        CountMode::Exact => {
            let out = count(formula, td, &Counting, cfg)?;
            (CountValue::Exact(out.value), out.stats)
        }
        CountMode::Weighted { precision } => {
            let out = count(formula, td, &Weighted::new(precision), cfg)?;
            (CountValue::Weighted(out.value), out.stats)
        }
    };
    let status = if value.is_zero() { Status::Unsat } else { Status::Sat };
    Ok(CountResult { value, status, stats })
}

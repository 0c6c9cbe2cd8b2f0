//! End-to-end run: parse, preprocess, decompose, count, and render the
//! competition result block.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::bigfloat::BigFloat;
use crate::counter::{count_formula, Branching, CountError, CountMode, CountStats, CounterConfig, Status};
use crate::formula::{parse_input, CnfFormula, ParseError, ParseMode, Var};
use crate::preprocess::{run_pipeline, write_preprocessed, PreprocessConfig, PreprocessResult};
use crate::semiring::CountValue;
use crate::td::{compute_td, parse_pace, select_root, PrimalGraph, TdConfig, TdError, TreeDecomposition};

pub const DEFAULT_TD_TIME: Duration = Duration::from_secs(120);
/// Share of the remaining time the decomposition may use when a global
/// timeout is set.
const TD_SHARE_OF_REMAINING: f64 = 0.2;
const TD_MIN_BUDGET: Duration = Duration::from_secs(1);
const PREPROCESS_BUDGET: Duration = Duration::from_secs(60);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSelect {
    Mc,
    Wmc,
    /// Weighted iff the input carries weights.
    Auto,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: ModeSelect,
    /// Decomposition budget; defaults to [`DEFAULT_TD_TIME`], capped by a
    /// share of the remaining time under a global timeout.
    pub td_time: Option<Duration>,
    pub cache_mb: usize,
    pub precision: u32,
    pub seed: u64,
    /// `None` skips preprocessing entirely.
    pub preprocess: Option<PreprocessConfig>,
    pub branching: Branching,
    pub timeout: Option<Duration>,
    /// Keep the preprocessed formula as text in [`Report::preprocessed`].
    pub keep_preprocessed: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: ModeSelect::Auto,
            td_time: None,
            cache_mb: 2000,
            precision: 256,
            seed: 0,
            preprocess: Some(PreprocessConfig::default()),
            branching: Branching::Td,
            timeout: None,
            keep_preprocessed: false,
        }
    }
}

#[derive(Error, Debug)]
pub enum DriverError {
    #[error("cannot parse the formula: {0}")]
    Parse(#[from] ParseError),
    #[error("imported tree decomposition rejected: {0}")]
    TdImport(#[source] TdError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("counting failed: {0}")]
    Count(CountError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Counted { value: CountValue, status: Status },
    Timeout,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub weighted: bool,
    pub precision: u32,
    pub outcome: Outcome,
    pub stats: CountStats,
    /// Width of the decomposition the search used, if any.
    pub width: Option<usize>,
    /// Log lines, each starting with `c o `.
    pub log: Vec<String>,
    /// See [`write_preprocessed`].
    pub preprocessed: Option<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Counted { .. } => 0,
            Outcome::Timeout => 2,
        }
    }
}

/// Runs the whole pipeline on a DIMACS input. `td_import` is a PACE `.td`
/// decomposition of the input's primal graph.
pub fn run(input: &[u8], td_import: Option<&[u8]>, cfg: &RunConfig) -> Result<Report, DriverError> {
    let start = Instant::now();
    let deadline = cfg.timeout.map(|t| start + t);
    if let (Some(t), Some(td)) = (cfg.timeout, cfg.td_time) {
        if td > t {
            return Err(DriverError::Config("--td-time exceeds --timeout".into()));
        }
    }
    let parse_mode = match cfg.mode {
        ModeSelect::Mc => ParseMode::Mc,
        ModeSelect::Wmc => ParseMode::Wmc,
        ModeSelect::Auto => ParseMode::Auto,
    };
    let formula = parse_input(input, parse_mode)?;
    let weighted = formula.is_weighted();
    let mut log = vec![format!(
        "c o parsed {} variables, {} clauses, {}",
        formula.num_vars(),
        formula.num_clauses(),
        if weighted { "weighted" } else { "unweighted" }
    )];
    let imported = match td_import {
        Some(text) => Some(parse_pace(text, &PrimalGraph::from_formula(&formula)).map_err(DriverError::TdImport)?),
        None => None,
    };

    let pre = match &cfg.preprocess {
        Some(pc) => {
            let mut pc = pc.clone();
            pc.time_budget = pc.time_budget.min(PREPROCESS_BUDGET);
            if let Some(d) = deadline {
                pc.time_budget = pc.time_budget.min(d.saturating_duration_since(Instant::now()));
            }
            let r = run_pipeline(&formula, &pc);
            for (stage, s) in &r.stats {
                log.push(format!(
                    "c o pp {}: literals -{} clauses -{} merges {} eliminations {} backbone {} fixed {}",
                    stage.name(),
                    s.literals_removed,
                    s.clauses_removed,
                    s.merges,
                    s.eliminations,
                    s.backbone,
                    s.fixed
                ));
            }
            log.push(format!(
                "c o pp result: {} variables, {} clauses{}",
                r.formula.num_vars(),
                r.formula.num_clauses(),
                if r.timed_out { " (time budget reached)" } else { "" }
            ));
            r
        }
        None => identity_preprocess(&formula),
    };
    let preprocessed = cfg.keep_preprocessed.then(|| write_preprocessed(&pre));

    let mode = if weighted {
        CountMode::Weighted { precision: cfg.precision }
    } else {
        CountMode::Exact
    };
    let finish = |value: CountValue, stats: CountStats, width: Option<usize>, log: Vec<String>| {
        let status = if value.is_zero() { Status::Unsat } else { Status::Sat };
        Report {
            weighted,
            precision: cfg.precision,
            outcome: Outcome::Counted { value, status },
            stats,
            width,
            log,
            preprocessed: preprocessed.clone(),
        }
    };
    if pre.is_unsat() {
        let zero = match mode {
            CountMode::Exact => CountValue::Exact(BigUint::zero()),
            CountMode::Weighted { .. } => CountValue::Weighted(BigFloat::zero()),
        };
        log.push("c o unsatisfiable after preprocessing".into());
        return Ok(finish(zero, CountStats::default(), None, log));
    }

    let reduced = &pre.formula;
    let graph = PrimalGraph::from_formula(reduced);
    let td = if cfg.branching == Branching::Td {
        let td = match imported.and_then(|td| project_decomposition(&td, &pre, &graph)) {
            Some(td) => {
                log.push("c o using the imported decomposition".into());
                td
            }
            None => {
                let mut budget = cfg.td_time.unwrap_or(DEFAULT_TD_TIME);
                if let Some(d) = deadline {
                    let remaining = d.saturating_duration_since(Instant::now());
                    budget = budget.min(remaining.mul_f64(TD_SHARE_OF_REMAINING).max(TD_MIN_BUDGET));
                }
                let td_cfg = TdConfig {
                    time_budget: budget,
                    seed: cfg.seed,
                    ..TdConfig::default()
                };
                compute_td(&graph, &td_cfg).decomposition
            }
        };
        let root = select_root(&td, &graph);
        let td = td.with_root(root);
        log.push(format!("c o decomposition width {}, {} nodes", td.width(), td.num_nodes()));
        Some(td)
    } else {
        None
    };

    let counter_cfg = CounterConfig {
        branching: cfg.branching,
        cache_bytes: cfg.cache_mb.saturating_mul(1 << 20),
        seed: cfg.seed,
        deadline,
        ..CounterConfig::default()
    };
    let width = td.as_ref().map(|t| t.width());
    let result = match count_formula(reduced, td.as_ref(), mode, &counter_cfg) {
        Ok(r) => r,
        Err(CountError::Timeout) => {
            log.push("c o search timed out".into());
            return Ok(Report {
                weighted,
                precision: cfg.precision,
                outcome: Outcome::Timeout,
                stats: CountStats::default(),
                width,
                log,
                preprocessed,
            });
        }
        Err(e) => return Err(DriverError::Count(e)),
    };
    let stats = result.stats;
    log.push(format!(
        "c o search: decisions {} conflicts {} cache hits {} stores {} components {}",
        stats.decisions, stats.conflicts, stats.cache_hits, stats.cache_stores, stats.components
    ));
    let value = match result.value {
        CountValue::Exact(v) => {
            let (num, den) = (pre.multiplier.numer(), pre.multiplier.denom());
            let scaled = BigUint::try_from(num.clone()).expect("multiplier is non-negative") * v;
            let den = BigUint::try_from(den.clone()).expect("denominator is positive");
            let (q, r) = scaled.div_rem(&den);
            assert!(r.is_zero(), "unweighted multiplier must keep the count integral");
            CountValue::Exact(q)
        }
        CountValue::Weighted(v) => {
            let m = BigFloat::from_rational(&pre.multiplier, cfg.precision);
            CountValue::Weighted(m.mul(&v, cfg.precision))
        }
    };
    Ok(finish(value, stats, width, log))
}

fn identity_preprocess(formula: &CnfFormula) -> PreprocessResult {
    PreprocessResult {
        formula: formula.clone(),
        multiplier: num_rational::BigRational::from_integer(1.into()),
        eliminated_vars: Vec::new(),
        var_map: (0..formula.num_vars() as u32).map(|v| Some(Var::new(v))).collect(),
        stats: Vec::new(),
        initially_fixed: 0,
        timed_out: false,
    }
}

/// Restricts an input decomposition to the surviving variables, renamed.
/// `None` when the result does not decompose the preprocessed graph (merges
/// can add edges between bags).
fn project_decomposition(
    td: &TreeDecomposition,
    pre: &PreprocessResult,
    graph: &PrimalGraph,
) -> Option<TreeDecomposition> {
    let bags: Vec<Vec<u32>> = td
        .bags()
        .iter()
        .map(|bag| {
            let mut b: Vec<u32> = bag
                .iter()
                .filter_map(|&v| pre.var_map[v as usize].map(|n| n.index() as u32))
                .collect();
            b.sort_unstable();
            b
        })
        .collect();
    let projected = TreeDecomposition::new(bags, td.edges().to_vec(), td.root());
    projected.validate(graph).ok().map(|_| projected)
}

/// The result block: type line, status line and, unless timed out, the
/// log10 estimate and the exact value.
pub fn format_result_block(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "c s type {}", if report.weighted { "wmc" } else { "mc" });
    match &report.outcome {
        Outcome::Timeout => {
            let _ = writeln!(out, "s UNKNOWN");
        }
        Outcome::Counted { value, status } => {
            let _ = writeln!(
                out,
                "s {}",
                match status {
                    Status::Sat => "SATISFIABLE",
                    Status::Unsat => "UNSATISFIABLE",
                }
            );
            let _ = writeln!(out, "c s log10-estimate {}", format_log10(value.log10()));
            match value {
                CountValue::Exact(v) => {
                    let _ = writeln!(out, "c s exact arb int {v}");
                }
                CountValue::Weighted(v) => {
                    let digits = crate::bigfloat::decimal_digits_for(report.precision);
                    let _ = writeln!(out, "c s exact arb float {}", v.to_decimal(digits));
                }
            }
        }
    }
    out
}

fn format_log10(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

/// Decimal count of models for plain counting; handy for bindings.
pub fn exact_value(report: &Report) -> Option<&BigUint> {
    match &report.outcome {
        Outcome::Counted { value, .. } => value.as_exact(),
        Outcome::Timeout => None,
    }
}

/// The weighted (or plain) result as an `f64`, when finished.
pub fn approximate_value(report: &Report) -> Option<f64> {
    match &report.outcome {
        Outcome::Counted { value, .. } => match value {
            CountValue::Exact(v) => v.to_f64(),
            CountValue::Weighted(v) => {
                let r = v.to_rational();
                Some(r.numer().to_f64()? / r.denom().to_f64()?)
            }
        },
        Outcome::Timeout => None,
    }
}

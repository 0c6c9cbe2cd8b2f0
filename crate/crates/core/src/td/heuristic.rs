//! Anytime tree decomposition by greedy elimination orderings.
//!
//! A min-degree ordering is always computed first, so a decomposition exists
//! right away. Min-fill follows, then randomized restarts of both heuristics
//! (ties broken by a per-restart random priority) until the time budget runs
//! out, the width reaches the degeneracy lower bound, or `max_stall`
//! consecutive restarts fail to improve. Restarts abandon an ordering as
//! soon as it cannot beat the best width found so far.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PrimalGraph, TreeDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heuristic {
    MinDegree,
    MinFill,
}

#[derive(Clone, Debug)]
pub struct TdConfig {
    pub time_budget: Duration,
    pub seed: u64,
    /// Consecutive non-improving restarts before giving up early.
    pub max_stall: usize,
}

impl Default for TdConfig {
    fn default() -> Self {
        TdConfig {
            time_budget: Duration::from_secs(120),
            seed: 0,
            max_stall: 500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TdOutcome {
    pub decomposition: TreeDecomposition,
    /// Best width after each improvement, in discovery order.
    pub width_history: Vec<usize>,
    pub restarts: usize,
    pub lower_bound: usize,
}

struct Elimination {
    order: Vec<u32>,
    width: usize,
}

/// Greedy elimination ordering and its width. `priority` breaks ties (lower
/// first, then lower vertex id).
pub fn elimination_order(
    graph: &PrimalGraph,
    heuristic: Heuristic,
    priority: Option<&[u32]>,
) -> (Vec<u32>, usize) {
    let e = eliminate(graph, heuristic, priority, usize::MAX, None).expect("no cutoff");
    (e.order, e.width)
}

/// Returns `None` once the width would reach `cutoff` or the deadline
/// passes.
fn eliminate(
    graph: &PrimalGraph,
    heuristic: Heuristic,
    priority: Option<&[u32]>,
    cutoff: usize,
    deadline: Option<Instant>,
) -> Option<Elimination> {
    let n = graph.vertex_count();
    let tag = |v: u32| priority.map_or(0, |p| p[v as usize]);
    let mut adj: Vec<BTreeSet<u32>> = (0..n as u32).map(|v| graph.neighbors(v).iter().copied().collect()).collect();
    let score = |adj: &[BTreeSet<u32>], v: u32| -> usize {
        match heuristic {
            Heuristic::MinDegree => adj[v as usize].len(),
            Heuristic::MinFill => fill_in(adj, v),
        }
    };
    let mut current: Vec<usize> = (0..n as u32).map(|v| score(&adj, v)).collect();
    let mut queue: BTreeSet<(usize, u32, u32)> = (0..n as u32).map(|v| (current[v as usize], tag(v), v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut width = 0;
    let mut steps = 0usize;
    while let Some((_, _, v)) = queue.pop_first() {
        steps += 1;
        if steps.is_multiple_of(64) && deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
        let nbrs: Vec<u32> = std::mem::take(&mut adj[v as usize]).into_iter().collect();
        width = width.max(nbrs.len());
        if width >= cutoff {
            return None;
        }
        order.push(v);
        for (i, &a) in nbrs.iter().enumerate() {
            adj[a as usize].remove(&v);
            for &b in &nbrs[i + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        // Scores change for the neighbours, and for min-fill also for their
        // neighbours.
        let mut touched: HashSet<u32> = nbrs.iter().copied().collect();
        if heuristic == Heuristic::MinFill {
            for &a in &nbrs {
                touched.extend(adj[a as usize].iter().copied());
            }
        }
        let mut touched: Vec<u32> = touched.into_iter().collect();
        touched.sort_unstable();
        for u in touched {
            let new = score(&adj, u);
            let old = current[u as usize];
            if new != old {
                queue.remove(&(old, tag(u), u));
                queue.insert((new, tag(u), u));
                current[u as usize] = new;
            }
        }
    }
    Some(Elimination { order, width })
}

/// Number of missing edges among the neighbours of `v`.
fn fill_in(adj: &[BTreeSet<u32>], v: u32) -> usize {
    let nbrs = &adj[v as usize];
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in nbrs.iter().skip(i + 1) {
            if !adj[a as usize].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Best decomposition found within the configured budget. Deterministic for
/// a fixed seed, apart from where the deadline cuts the restart sequence.
pub fn compute_td(graph: &PrimalGraph, config: &TdConfig) -> TdOutcome {
    let start = Instant::now();
    let deadline = start + config.time_budget;
    let lower_bound = graph.degeneracy();
    let first = eliminate(graph, Heuristic::MinDegree, None, usize::MAX, None).expect("no cutoff or deadline");
    let mut best = first;
    let mut history = vec![best.width];
    let mut restarts = 0;
    if best.width > lower_bound {
        if let Some(e) = eliminate(graph, Heuristic::MinFill, None, best.width, Some(deadline)) {
            best = e;
            history.push(best.width);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stall = 0;
    let n = graph.vertex_count();
    while best.width > lower_bound && stall < config.max_stall && Instant::now() < deadline {
        let heuristic = if restarts % 2 == 0 {
            Heuristic::MinFill
        } else {
            Heuristic::MinDegree
        };
        restarts += 1;
        let priority: Vec<u32> = (0..n).map(|_| rng.gen()).collect();
        match eliminate(graph, heuristic, Some(&priority), best.width, Some(deadline)) {
            Some(e) => {
                best = e;
                history.push(best.width);
                stall = 0;
            }
            None => stall += 1,
        }
    }
    TdOutcome {
        decomposition: TreeDecomposition::from_elimination_order(graph, &best.order),
        width_history: history,
        restarts,
        lower_bound,
    }
}

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{quick_td_config, random_graph};
use tdcount_core::oracle::treewidth_exact;
use tdcount_core::td::{compute_td, parse_pace, variable_depths, write_pace_td, PrimalGraph};

fn heuristic_width(g: &PrimalGraph) -> usize {
    let out = compute_td(g, &quick_td_config(3));
    out.decomposition.validate(g).unwrap();
    out.decomposition.width()
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> PrimalGraph {
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (rng.gen_range(0..v), v)).collect();
    PrimalGraph::from_edges(n, &edges)
}

fn cycle(n: usize) -> PrimalGraph {
    let edges: Vec<(u32, u32)> = (0..n as u32).map(|v| (v, (v + 1) % n as u32)).collect();
    PrimalGraph::from_edges(n, &edges)
}

fn clique(n: usize) -> PrimalGraph {
    let edges: Vec<(u32, u32)> = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b))).collect();
    PrimalGraph::from_edges(n, &edges)
}

/// The `n x 2` grid: a ladder with `n` rungs.
fn ladder(n: usize) -> PrimalGraph {
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        edges.push((2 * i, 2 * i + 1));
        if i + 1 < n as u32 {
            edges.push((2 * i, 2 * i + 2));
            edges.push((2 * i + 1, 2 * i + 3));
        }
    }
    PrimalGraph::from_edges(2 * n, &edges)
}

#[test]
fn random_graphs_yield_valid_decompositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..500 {
        let n = rng.gen_range(1..=40);
        let p = rng.gen_range(0.02..0.5);
        let g = random_graph(&mut rng, n, p);
        let out = compute_td(&g, &quick_td_config(i));
        let td = out.decomposition;
        td.validate(&g).unwrap_or_else(|e| panic!("graph {i}: {e}"));
        assert!(out.width_history.windows(2).all(|w| w[1] <= w[0]));

        let reread = parse_pace(write_pace_td(&td, n).as_bytes(), &g).unwrap();
        assert_eq!(reread.width(), td.width());

        let depths = variable_depths(&td, n).unwrap();
        assert!(depths.iter().all(|d| (0.0..=1.0).contains(d)));
        for &v in &td.bags()[td.root()] {
            assert_eq!(depths[v as usize], 0.0);
        }
    }
}

#[test]
fn known_families_reach_their_treewidth() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for n in 2..=16 {
        let t = random_tree(&mut rng, n);
        assert_eq!(treewidth_exact(&t).unwrap(), 1);
        assert_eq!(heuristic_width(&t), 1, "tree on {n} vertices");
    }
    for n in 3..=16 {
        assert_eq!(treewidth_exact(&cycle(n)).unwrap(), 2);
        assert_eq!(heuristic_width(&cycle(n)), 2, "cycle on {n} vertices");
    }
    for n in 1..=12 {
        assert_eq!(treewidth_exact(&clique(n)).unwrap(), n - 1);
        assert_eq!(heuristic_width(&clique(n)), n - 1, "clique on {n} vertices");
    }
    for n in 2..=8 {
        assert_eq!(treewidth_exact(&ladder(n)).unwrap(), 2);
        assert_eq!(heuristic_width(&ladder(n)), 2, "{n} x 2 grid");
    }
}

#[test]
fn heuristic_matches_exact_width_on_small_sparse_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut above = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let g = random_graph(&mut rng, n, 0.3);
        let exact = treewidth_exact(&g).unwrap();
        let got = heuristic_width(&g);
        assert!(got >= exact);
        above += usize::from(got > exact);
    }
    // Greedy restarts are not exact, but on graphs this small they rarely
    // miss the optimum.
    assert!(above <= 5, "{above} of 100 above the exact width");
}

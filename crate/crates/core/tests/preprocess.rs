mod common;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{planted_instance, preprocess_instance, weighted_preprocess_instance};
use tdcount_core::formula::CnfFormula;
use tdcount_core::oracle::{check_equivalent_counts, Accounting};
use tdcount_core::preprocess::{
    eliminate_defined, merge_equivalences_traced, run_pipeline, run_stage, sparsify, vivify_complete,
    vivify_propagation, Limits, PreprocessConfig, StageKind,
};
use tdcount_core::td::PrimalGraph;

fn edges(f: &CnfFormula) -> BTreeSet<(u32, u32)> {
    PrimalGraph::from_formula(f).edges().collect()
}

fn pipeline_sound(f: &CnfFormula) -> bool {
    let r = run_pipeline(f, &PreprocessConfig::default());
    let acc = Accounting {
        multiplier: r.multiplier.clone(),
        removed: Vec::new(),
    };
    check_equivalent_counts(f, &r.formula, &acc).unwrap()
}

#[test]
fn each_stage_preserves_unweighted_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let limits = Limits::default();
    for i in 0..300 {
        let f = preprocess_instance(&mut rng);
        for stage in StageKind::ALL {
            let out = run_stage(stage, &f, &limits);
            assert!(
                check_equivalent_counts(&f, &out.formula, &out.accounting).unwrap(),
                "instance {i}, stage {}",
                stage.name()
            );
        }
        assert!(pipeline_sound(&f), "instance {i}, pipeline");
    }
}

#[test]
fn each_stage_preserves_weighted_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let limits = Limits::default();
    for i in 0..200 {
        let f = weighted_preprocess_instance(&mut rng);
        for stage in StageKind::ALL {
            if stage == StageKind::EliminateDefined {
                continue;
            }
            let out = run_stage(stage, &f, &limits);
            assert!(
                check_equivalent_counts(&f, &out.formula, &out.accounting).unwrap(),
                "instance {i}, stage {}",
                stage.name()
            );
        }
        assert!(pipeline_sound(&f), "instance {i}, pipeline");
    }
}

#[test]
fn merging_adds_no_edge_beyond_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut fired = 0;
    while fired < 200 {
        let f = planted_instance(&mut rng, 14);
        let (out, trace) = merge_equivalences_traced(&f, &Limits::default());
        if trace.is_empty() {
            continue;
        }
        fired += 1;
        let mut rep: Vec<u32> = (0..f.num_vars() as u32).collect();
        for (keep, gone) in trace {
            let (from, to) = (gone.index() as u32, rep[keep.index()]);
            for r in rep.iter_mut() {
                if *r == from {
                    *r = to;
                }
            }
        }
        let contracted: BTreeSet<(u32, u32)> = edges(&f)
            .into_iter()
            .map(|(a, b)| (rep[a as usize], rep[b as usize]))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        assert!(edges(&out.formula).is_subset(&contracted));
    }
}

#[test]
fn elimination_adds_no_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut fired = 0;
    while fired < 200 {
        let f = planted_instance(&mut rng, 14);
        let out = eliminate_defined(&f, &Limits::default());
        if out.accounting.removed.is_empty() {
            continue;
        }
        fired += 1;
        assert!(edges(&out.formula).is_subset(&edges(&f)));
        assert!(check_equivalent_counts(&f, &out.formula, &out.accounting).unwrap());
    }
}

#[test]
fn vivification_never_grows_clauses() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let f = preprocess_instance(&mut rng);
        for out in [vivify_propagation(&f), vivify_complete(&f, &Limits::default())] {
            if out.formula.has_empty_clause() {
                continue;
            }
            assert!(out.formula.num_clauses() <= f.num_clauses());
            for c in out.formula.clauses() {
                assert!(f.clauses().iter().any(|d| c.iter().all(|l| d.lits().contains(l))));
            }
        }
    }
}

#[test]
fn sparsify_second_pass_removes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..200 {
        let f = preprocess_instance(&mut rng);
        let once = sparsify(&f, &Limits::default()).formula;
        let twice = sparsify(&once, &Limits::default());
        assert_eq!(twice.formula, once);
        assert_eq!(twice.stats.clauses_removed, 0);
    }
}

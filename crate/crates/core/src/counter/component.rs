//! Connected components of the residual formula and their cache signatures.
//!
//! Signatures are keyed 128-bit SipHash values over a component's canonical
//! encoding; the component itself is never stored. For `m` lookups the
//! union bound puts the chance of any collision at `m^2 / 2^129`, which for
//! `m = 10^14` is about `1.5e-11`.

use std::hash::Hasher;

use siphasher::sip128::{Hasher128, SipHasher};

use crate::formula::{CnfFormula, Lit, Var};

/// An original clause as seen inside a component: its index and the
/// positions (in the clause's literal order) that are still unassigned.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComponentClause {
    pub index: u32,
    pub unassigned: Vec<u32>,
}

/// Variables sorted ascending, clauses sorted by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub vars: Vec<Var>,
    pub clauses: Vec<ComponentClause>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    /// Ordered by smallest variable.
    pub components: Vec<Component>,
    /// Unassigned scope variables without any unsatisfied clause.
    pub free: Vec<Var>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub hi: u64,
    pub lo: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignatureKey {
    k0: u64,
    k1: u64,
}

impl SignatureKey {
    pub fn from_seed(seed: u64) -> SignatureKey {
        let mut state = seed;
        SignatureKey {
            k0: splitmix64(&mut state),
            k1: splitmix64(&mut state),
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn component_signature(comp: &Component, key: &SignatureKey) -> Signature {
    let mut h = SipHasher::new_with_keys(key.k0, key.k1);
    h.write_u32(comp.vars.len() as u32);
    for v in &comp.vars {
        h.write_u32(v.index() as u32);
    }
    h.write_u32(comp.clauses.len() as u32);
    for c in &comp.clauses {
        h.write_u32(c.index);
        h.write_u32(c.unassigned.len() as u32);
        for &p in &c.unassigned {
            h.write_u32(p);
        }
    }
    let out = h.finish128();
    Signature { hi: out.h1, lo: out.h2 }
}

/// Reusable scratch space for splitting; marks are epoch-stamped so nothing
/// is cleared between calls.
pub(crate) struct Splitter {
    occurrences: Vec<Vec<u32>>,
    var_mark: Vec<u32>,
    clause_mark: Vec<u32>,
    epoch: u32,
}

impl Splitter {
    pub(crate) fn new(formula: &CnfFormula) -> Splitter {
        let mut occurrences = vec![Vec::new(); formula.num_vars()];
        for (i, clause) in formula.clauses().iter().enumerate() {
            for l in clause.lits() {
                occurrences[l.var().index()].push(i as u32);
            }
        }
        Splitter {
            occurrences,
            var_mark: vec![0; formula.num_vars()],
            clause_mark: vec![0; formula.num_clauses()],
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.var_mark.iter_mut().for_each(|m| *m = 0);
            self.clause_mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    /// Splits the unassigned variables of `scope` (sorted) into connected
    /// components over the clauses not yet satisfied.
    pub(crate) fn split(
        &mut self,
        formula: &CnfFormula,
        value: impl Fn(Lit) -> Option<bool>,
        scope: &[Var],
    ) -> Split {
        let epoch = self.next_epoch();
        let mut out = Split::default();
        let mut queue: Vec<Var> = Vec::new();
        for &start in scope {
            if self.var_mark[start.index()] == epoch || value(start.pos()).is_some() {
                continue;
            }
            self.var_mark[start.index()] = epoch;
            queue.clear();
            queue.push(start);
            let mut clauses = Vec::new();
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head];
                head += 1;
                for &ci in &self.occurrences[v.index()] {
                    if self.clause_mark[ci as usize] == epoch {
                        continue;
                    }
                    self.clause_mark[ci as usize] = epoch;
                    let lits = formula.clauses()[ci as usize].lits();
                    if lits.iter().any(|&l| value(l) == Some(true)) {
                        continue;
                    }
                    let mut unassigned = Vec::new();
                    for (pos, &l) in lits.iter().enumerate() {
                        if value(l).is_none() {
                            unassigned.push(pos as u32);
                            let u = l.var();
                            if self.var_mark[u.index()] != epoch {
                                self.var_mark[u.index()] = epoch;
                                queue.push(u);
                            }
                        }
                    }
                    clauses.push(ComponentClause { index: ci, unassigned });
                }
            }
            if clauses.is_empty() {
                out.free.push(start);
                continue;
            }
            let mut vars = queue.clone();
            vars.sort_unstable();
            clauses.sort_unstable_by_key(|c| c.index);
            out.components.push(Component { vars, clauses });
        }
        out
    }
}

/// Components of `formula` restricted to `scope` under a partial
/// assignment (`assignment[v]` is the value of variable `v`, if any).
pub fn split_components(formula: &CnfFormula, assignment: &[Option<bool>], scope: &[Var]) -> Split {
    let mut scope = scope.to_vec();
    scope.sort_unstable();
    scope.dedup();
    let value = |l: Lit| assignment[l.var().index()].map(|b| b == l.is_positive());
    Splitter::new(formula).split(formula, value, &scope)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::formula::{parse_input, ParseMode};

    fn parse(s: &str) -> CnfFormula {
        parse_input(s.as_bytes(), ParseMode::Auto).unwrap()
    }

    fn vars(ids: &[u32]) -> Vec<Var> {
        ids.iter().map(|&i| Var::new(i)).collect()
    }

    #[test]
    fn disjoint_clauses_split() {
        let f = parse("p cnf 4 2\n1 2 0\n3 4 0");
        let s = split_components(&f, &[None; 4], &vars(&[0, 1, 2, 3]));
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.components[0].vars, vars(&[0, 1]));
        assert_eq!(s.components[1].vars, vars(&[2, 3]));
        assert!(s.free.is_empty());
    }

    #[test]
    fn shared_variable_joins() {
        let f = parse("p cnf 3 2\n1 2 0\n2 3 0");
        let s = split_components(&f, &[None; 3], &vars(&[0, 1, 2]));
        assert_eq!(s.components.len(), 1);
        assert_eq!(s.components[0].vars, vars(&[0, 1, 2]));
    }

    #[test]
    fn satisfied_clause_frees_variable() {
        let f = parse("p cnf 5 2\n1 5 0\n2 3 0");
        let assignment = [Some(true), None, None, None, None];
        let s = split_components(&f, &assignment, &vars(&[0, 1, 2, 3, 4]));
        assert_eq!(s.components.len(), 1);
        assert_eq!(s.free, vars(&[3, 4]));
    }

    #[test]
    fn records_unassigned_positions() {
        let f = parse("p cnf 3 1\n1 2 3 0");
        let assignment = [None, Some(false), None];
        let s = split_components(&f, &assignment, &vars(&[0, 1, 2]));
        assert_eq!(s.components[0].clauses[0].unassigned, vec![0, 2]);
    }

    fn random_component(rng: &mut ChaCha8Rng) -> Component {
        let nv = rng.gen_range(1..12);
        let mut vs: Vec<Var> = (0..nv).map(|_| Var::new(rng.gen_range(0..1000))).collect();
        vs.sort_unstable();
        vs.dedup();
        let nc = rng.gen_range(1..6);
        let mut clauses: Vec<ComponentClause> = (0..nc)
            .map(|_| {
                let mut pos: Vec<u32> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..5)).collect();
                pos.sort_unstable();
                pos.dedup();
                ComponentClause {
                    index: rng.gen_range(0..5000),
                    unassigned: pos,
                }
            })
            .collect();
        clauses.sort_unstable_by_key(|c| c.index);
        clauses.dedup_by_key(|c| c.index);
        Component { vars: vs, clauses }
    }

    #[test]
    fn signatures_are_deterministic_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let key = SignatureKey::from_seed(1);
        let mut differ = 0;
        for s in 0..10_000u64 {
            let c = random_component(&mut rng);
            assert_eq!(component_signature(&c, &key), component_signature(&c.clone(), &key));
            let a = component_signature(&c, &SignatureKey::from_seed(2 * s + 100));
            let b = component_signature(&c, &SignatureKey::from_seed(2 * s + 101));
            if a != b {
                differ += 1;
            }
        }
        assert_eq!(differ, 10_000);
    }

    #[test]
    fn one_position_changes_signature() {
        let key = SignatureKey::from_seed(0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let c = random_component(&mut rng);
            let mut d = c.clone();
            let clause = &mut d.clauses[0];
            match clause.unassigned.pop() {
                Some(_) if !clause.unassigned.is_empty() => {}
                _ => clause.unassigned = vec![7],
            }
            assert_ne!(component_signature(&c, &key), component_signature(&d, &key));
        }
        let seen: HashSet<Signature> = (0..1000u64)
            .map(|s| component_signature(&random_component(&mut ChaCha8Rng::seed_from_u64(5)), &SignatureKey::from_seed(s)))
            .collect();
        assert_eq!(seen.len(), 1000);
    }
}

use crate::formula::CnfFormula;

/// Undirected simple graph over vertices `0..n`, adjacency lists sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PrimalGraph {
    adj: Vec<Vec<u32>>,
}

impl PrimalGraph {
    /// One vertex per variable, an edge between variables sharing a clause.
    pub fn from_formula(formula: &CnfFormula) -> PrimalGraph {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); formula.num_vars()];
        for clause in formula.clauses() {
            for (i, a) in clause.iter().enumerate() {
                for b in &clause[i + 1..] {
                    let (u, v) = (a.var().index(), b.var().index());
                    adj[u].push(v as u32);
                    adj[v].push(u as u32);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        PrimalGraph { adj }
    }

    /// Graph from an edge list; self-loops and repeated edges are dropped.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> PrimalGraph {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) out of range");
            if u != v {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        PrimalGraph { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Every edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v as usize > u).map(move |&v| (u as u32, v)))
    }

    /// Degeneracy: the largest minimum degree seen while repeatedly deleting
    /// a minimum-degree vertex. A lower bound on treewidth.
    pub fn degeneracy(&self) -> usize {
        let n = self.vertex_count();
        let mut degree: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let max_deg = degree.iter().copied().max().unwrap_or(0);
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); max_deg + 1];
        for (v, &d) in degree.iter().enumerate() {
            buckets[d].push(v as u32);
        }
        let mut removed = vec![false; n];
        let mut best = 0;
        let mut low = 0;
        for _ in 0..n {
            let v = loop {
                while buckets[low].is_empty() {
                    low += 1;
                }
                let v = buckets[low].pop().expect("non-empty");
                if !removed[v as usize] && degree[v as usize] == low {
                    break v;
                }
            };
            removed[v as usize] = true;
            best = best.max(low);
            for &u in &self.adj[v as usize] {
                if !removed[u as usize] {
                    degree[u as usize] -= 1;
                    let d = degree[u as usize];
                    buckets[d].push(u);
                    low = low.min(d);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Lit;

    fn formula(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        let cs: Vec<Vec<Lit>> = clauses.iter().map(|c| c.iter().map(|&x| Lit::from_dimacs(x)).collect()).collect();
        CnfFormula::new(n, cs, None).unwrap()
    }

    #[test]
    fn primal_graph_examples() {
        let path = PrimalGraph::from_formula(&formula(3, &[&[1, 2], &[2, 3]]));
        assert_eq!(path.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let tri = PrimalGraph::from_formula(&formula(3, &[&[1, -2, 3]]));
        assert_eq!(tri.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let empty = PrimalGraph::from_formula(&formula(4, &[]));
        assert_eq!(empty.vertex_count(), 4);
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn degeneracy_values() {
        let k4 = PrimalGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(k4.degeneracy(), 3);
        let cycle = PrimalGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(cycle.degeneracy(), 2);
        assert_eq!(PrimalGraph::from_edges(3, &[]).degeneracy(), 0);
    }
}

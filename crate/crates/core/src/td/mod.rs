//! Tree decompositions of the primal graph and the per-variable depth score
//! the branching heuristic uses.

mod graph;
mod heuristic;
mod pace;

use std::collections::VecDeque;

use thiserror::Error;

pub use graph::PrimalGraph;
pub use heuristic::{compute_td, elimination_order, Heuristic, TdConfig, TdOutcome};
pub use pace::{parse_pace, write_pace_gr, write_pace_td};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TdError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("vertex {0} is in no bag")]
    VertexNotCovered(u32),
    #[error("bag {node} names vertex {vertex}, which is not in the graph")]
    UnknownVertex { node: usize, vertex: u32 },
    #[error("edge ({0}, {1}) is in no bag")]
    EdgeNotCovered(u32, u32),
    #[error("the bags containing vertex {0} do not form a connected subtree")]
    Disconnected(u32),
    #[error("decomposition edges do not form a tree: {0}")]
    NotATree(String),
    #[error("decomposition has {found} vertices but the graph has {expected}")]
    VertexCountMismatch { expected: usize, found: usize },
}

/// A rooted tree decomposition. Bags are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<u32>>,
    edges: Vec<(usize, usize)>,
    root: usize,
}

impl TreeDecomposition {
    /// Decomposition from raw parts; bags are sorted and deduplicated. Call
    /// [`TreeDecomposition::validate`] before trusting it.
    pub fn new(bags: Vec<Vec<u32>>, edges: Vec<(usize, usize)>, root: usize) -> TreeDecomposition {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges, root }
    }

    /// Decomposition induced by eliminating the vertices in `order` (which
    /// must be a permutation of the graph's vertices). Node `i` holds the
    /// `i`-th eliminated vertex and its later neighbours in the elimination
    /// graph.
    pub fn from_elimination_order(graph: &PrimalGraph, order: &[u32]) -> TreeDecomposition {
        let n = graph.vertex_count();
        assert_eq!(order.len(), n, "order must list every vertex");
        if n == 0 {
            return TreeDecomposition::new(vec![Vec::new()], Vec::new(), 0);
        }
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            assert_eq!(position[v as usize], usize::MAX, "vertex {v} repeated in order");
            position[v as usize] = i;
        }
        let mut adj: Vec<std::collections::BTreeSet<u32>> =
            (0..n as u32).map(|v| graph.neighbors(v).iter().copied().collect()).collect();
        let mut bags = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(n);
        let mut roots = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            let nbrs: Vec<u32> = adj[v as usize].iter().copied().collect();
            for (a_idx, &a) in nbrs.iter().enumerate() {
                adj[a as usize].remove(&v);
                for &b in &nbrs[a_idx + 1..] {
                    adj[a as usize].insert(b);
                    adj[b as usize].insert(a);
                }
            }
            match nbrs.iter().map(|&u| position[u as usize]).min() {
                Some(p) => edges.push((i, p)),
                None => roots.push(i),
            }
            let mut bag = nbrs;
            bag.push(v);
            bags.push(bag);
        }
        for w in roots.windows(2) {
            edges.push((w[0], w[1]));
        }
        let root = *roots.last().expect("at least one root");
        TreeDecomposition::new(bags, edges, root).compacted()
    }

    pub fn bags(&self) -> &[Vec<u32>] {
        &self.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn with_root(mut self, root: usize) -> TreeDecomposition {
        assert!(root < self.bags.len());
        self.root = root;
        self
    }

    /// Largest bag size minus one (0 for a decomposition of no vertices).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Contracts tree edges whose one bag contains the other. Keeps every
    /// invariant and the width.
    pub fn compacted(self) -> TreeDecomposition {
        let nodes = self.bags.len();
        if nodes <= 1 {
            return self;
        }
        let mut adj: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); nodes];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let mut alive = vec![true; nodes];
        let mut root = self.root;
        let subset = |a: &[u32], b: &[u32]| {
            let mut j = 0;
            for &x in a {
                while j < b.len() && b[j] < x {
                    j += 1;
                }
                if j == b.len() || b[j] != x {
                    return false;
                }
            }
            true
        };
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..nodes {
                if !alive[a] {
                    continue;
                }
                let target = adj[a].iter().copied().find(|&b| subset(&self.bags[a], &self.bags[b]));
                if let Some(b) = target {
                    let nbrs: Vec<usize> = adj[a].iter().copied().collect();
                    for c in nbrs {
                        adj[c].remove(&a);
                        if c != b {
                            adj[c].insert(b);
                            adj[b].insert(c);
                        }
                    }
                    adj[a].clear();
                    alive[a] = false;
                    if root == a {
                        root = b;
                    }
                    changed = true;
                }
            }
        }
        let mut new_id = vec![usize::MAX; nodes];
        let mut bags = Vec::new();
        for a in 0..nodes {
            if alive[a] {
                new_id[a] = bags.len();
                bags.push(self.bags[a].clone());
            }
        }
        let mut edges = Vec::new();
        for a in 0..nodes {
            for &b in &adj[a] {
                if a < b {
                    edges.push((new_id[a], new_id[b]));
                }
            }
        }
        edges.sort_unstable();
        TreeDecomposition {
            bags,
            edges,
            root: new_id[root],
        }
    }

    /// Checks the decomposition against `graph`: tree shape, vertex
    /// coverage, edge coverage and connected occurrence subtrees.
    pub fn validate(&self, graph: &PrimalGraph) -> Result<(), TdError> {
        let n = graph.vertex_count();
        let nodes = self.bags.len();
        if nodes == 0 {
            return Err(TdError::NotATree("no nodes".into()));
        }
        if self.root >= nodes {
            return Err(TdError::NotATree(format!("root {} out of range", self.root)));
        }
        if self.edges.len() != nodes - 1 {
            return Err(TdError::NotATree(format!(
                "{} nodes need {} edges, found {}",
                nodes,
                nodes - 1,
                self.edges.len()
            )));
        }
        let mut uf: Vec<usize> = (0..nodes).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            if a >= nodes || b >= nodes {
                return Err(TdError::NotATree(format!("edge ({a}, {b}) names a missing node")));
            }
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra == rb {
                return Err(TdError::NotATree(format!("edge ({a}, {b}) closes a cycle")));
            }
            uf[ra] = rb;
        }

        let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (node, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v as usize >= n {
                    return Err(TdError::UnknownVertex { node, vertex: v });
                }
                occurrences[v as usize].push(node);
            }
        }
        if let Some(v) = occurrences.iter().position(Vec::is_empty) {
            return Err(TdError::VertexNotCovered(v as u32));
        }
        for (u, v) in graph.edges() {
            if !sorted_intersect(&occurrences[u as usize], &occurrences[v as usize]) {
                return Err(TdError::EdgeNotCovered(u, v));
            }
        }
        // In a tree, k nodes induce a connected subgraph iff they span k - 1
        // edges.
        let mut induced_edges = vec![0usize; n];
        for &(a, b) in &self.edges {
            for_each_common(&self.bags[a], &self.bags[b], |v| induced_edges[v as usize] += 1);
        }
        for v in 0..n {
            if induced_edges[v] + 1 != occurrences[v].len() {
                return Err(TdError::Disconnected(v as u32));
            }
        }
        Ok(())
    }

    /// Tree distance of every node from the root.
    fn node_depths(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut depth = vec![usize::MAX; self.bags.len()];
        let mut queue = VecDeque::new();
        depth[self.root] = 0;
        queue.push_back(self.root);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if depth[b] == usize::MAX {
                    depth[b] = depth[a] + 1;
                    queue.push_back(b);
                }
            }
        }
        depth
    }
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn for_each_common(a: &[u32], b: &[u32], mut f: impl FnMut(u32)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                f(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Size of the largest connected component of `graph` minus `removed`.
fn largest_component_without(graph: &PrimalGraph, removed: &[u32], mark: &mut [u32], stamp: u32) -> usize {
    for &v in removed {
        mark[v as usize] = stamp;
    }
    let mut best = 0;
    let mut stack = Vec::new();
    for s in 0..graph.vertex_count() as u32 {
        if mark[s as usize] == stamp {
            continue;
        }
        mark[s as usize] = stamp;
        stack.push(s);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &u in graph.neighbors(v) {
                if mark[u as usize] != stamp {
                    mark[u as usize] = stamp;
                    stack.push(u);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Work limit (nodes × (vertices + edges)) under which every node is scored
/// exactly.
const EXACT_ROOT_WORK: u128 = 200_000_000;
/// Candidates scored exactly when the proxy preselection is used.
const ROOT_SHORTLIST: usize = 64;

/// The node whose bag, removed from the graph, leaves the smallest largest
/// component; ties go to the smaller bag, then the lower node index.
///
/// On very large inputs the nodes are first ranked by a cheap upper bound
/// (the largest number of vertices confined to one side of the node in the
/// tree) and only the best [`ROOT_SHORTLIST`] are scored exactly.
pub fn select_root(td: &TreeDecomposition, graph: &PrimalGraph) -> usize {
    let nodes = td.num_nodes();
    if nodes <= 1 {
        return 0;
    }
    let work = nodes as u128 * (graph.vertex_count() + graph.edge_count()) as u128;
    let candidates: Vec<usize> = if work <= EXACT_ROOT_WORK {
        (0..nodes).collect()
    } else {
        let proxy = side_bounds(td, graph.vertex_count());
        let mut order: Vec<usize> = (0..nodes).collect();
        order.sort_by_key(|&a| (proxy[a], td.bags[a].len(), a));
        order.truncate(ROOT_SHORTLIST);
        order.sort_unstable();
        order
    };
    let mut mark = vec![0u32; graph.vertex_count()];
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, &a) in candidates.iter().enumerate() {
        let size = largest_component_without(graph, &td.bags[a], &mut mark, i as u32 + 1);
        let key = (size, td.bags[a].len(), a);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    best.expect("at least one node").2
}

/// For each node, the largest number of non-bag vertices confined to one
/// side of it in the tree; an upper bound on the largest component left by
/// removing its bag.
fn side_bounds(td: &TreeDecomposition, n: usize) -> Vec<usize> {
    let nodes = td.num_nodes();
    let adj = td.adjacency();
    let mut parent = vec![usize::MAX; nodes];
    let mut order = Vec::with_capacity(nodes);
    let mut seen = vec![false; nodes];
    seen[0] = true;
    order.push(0);
    let mut i = 0;
    while i < order.len() {
        let a = order[i];
        i += 1;
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                parent[b] = a;
                order.push(b);
            }
        }
    }
    let mut depth = vec![0usize; nodes];
    for &a in &order[1..] {
        depth[a] = depth[parent[a]] + 1;
    }
    // Each vertex's occurrence subtree hangs from its shallowest node.
    let mut top = vec![usize::MAX; n];
    for (a, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            let t = &mut top[v as usize];
            if *t == usize::MAX || depth[a] < depth[*t] {
                *t = a;
            }
        }
    }
    let mut tops_at = vec![0usize; nodes];
    for &t in &top {
        if t != usize::MAX {
            tops_at[t] += 1;
        }
    }
    let mut below = tops_at.clone();
    for &a in order.iter().rev() {
        if parent[a] != usize::MAX {
            below[parent[a]] += below[a];
        }
    }
    let mut bound = vec![0usize; nodes];
    for a in 0..nodes {
        let mut worst = n.saturating_sub(below[a] + (td.bags[a].len() - tops_at[a]));
        for &b in &adj[a] {
            if parent[b] == a {
                worst = worst.max(below[b]);
            }
        }
        bound[a] = worst;
    }
    bound
}

/// Normalized depth of every vertex: the tree distance from the root to the
/// closest bag containing it, divided by the largest such distance (all 0
/// when that is 0).
pub fn variable_depths(td: &TreeDecomposition, num_vertices: usize) -> Result<Vec<f64>, TdError> {
    let node_depth = td.node_depths();
    let mut raw = vec![usize::MAX; num_vertices];
    for (a, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v as usize >= num_vertices {
                return Err(TdError::UnknownVertex { node: a, vertex: v });
            }
            raw[v as usize] = raw[v as usize].min(node_depth[a]);
        }
    }
    if let Some(v) = raw.iter().position(|&d| d == usize::MAX) {
        return Err(TdError::VertexNotCovered(v as u32));
    }
    let max = raw.iter().copied().max().unwrap_or(0);
    Ok(raw
        .into_iter()
        .map(|d| if max == 0 { 0.0 } else { d as f64 / max as f64 })
        .collect())
}

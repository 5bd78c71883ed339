//! Vertex-weighted simple undirected graphs and the traversal helpers the
//! rest of the crate is built from.
//!
//! Vertices are dense ids `0..n`. Adjacency lists are sorted ascending and
//! every traversal visits neighbours in that order, so all outputs are
//! deterministic.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

/// Upper bound on the total weight of a graph.
pub const MAX_TOTAL_WEIGHT: i64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} has weight {1}; weights must be at least 1")]
    BadWeight(usize, i64),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("total weight exceeds 2^62")]
    WeightOverflow,
    #[error("restricted vertex set does not induce a connected subgraph")]
    DisconnectedInput,
    #[error("root {0} is not in the restricted set")]
    RootNotInSet(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    weight: Vec<i64>,
    adj: Vec<Vec<usize>>,
    m: usize,
    total: i64,
}

impl WeightedGraph {
    pub fn new(weights: Vec<i64>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let n = weights.len();
        let mut total: i64 = 0;
        for (v, &w) in weights.iter().enumerate() {
            if w < 1 {
                return Err(GraphError::BadWeight(v, w));
            }
            total = total
                .checked_add(w)
                .filter(|&t| t <= MAX_TOTAL_WEIGHT)
                .ok_or(GraphError::WeightOverflow)?;
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(WeightedGraph { weight: weights, adj, m: edges.len(), total })
    }

    /// Graph with every vertex weight equal to one.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(vec![1; n], edges)
    }

    pub fn n(&self) -> usize {
        self.weight.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weight[v]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weight
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn total_weight(&self) -> i64 {
        self.total
    }

    pub fn max_weight(&self) -> i64 {
        self.weight.iter().copied().max().unwrap_or(0)
    }

    pub fn min_weight(&self) -> i64 {
        self.weight.iter().copied().min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Same edges, new weights.
    pub fn with_weights(&self, weights: Vec<i64>) -> Result<Self, GraphError> {
        let edges: Vec<_> = self.edges().collect();
        Self::new(weights, &edges)
    }

    /// The subgraph induced by `set` with vertices renumbered in ascending
    /// order of their original ids. Returns the graph and the new-to-old map.
    pub fn induced_subgraph(&self, set: &[usize]) -> (WeightedGraph, Vec<usize>) {
        let mut old: Vec<usize> = set.to_vec();
        old.sort_unstable();
        old.dedup();
        let mut new_id = vec![usize::MAX; self.n()];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in old.iter().enumerate() {
            for &u in &self.adj[v] {
                let j = new_id[u];
                if j != usize::MAX && j > i {
                    edges.push((i, j));
                }
            }
        }
        let weights = old.iter().map(|&v| self.weight[v]).collect();
        let g = WeightedGraph::new(weights, &edges).expect("induced subgraph of a valid graph");
        (g, old)
    }
}

/// A family of disjoint vertex sets, each inducing a connected subgraph.
/// `covering` records whether the parts are meant to cover the whole
/// ground set (a CVP) or only to pack into it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConnectedPartition {
    pub parts: Vec<Vec<usize>>,
    pub covering: bool,
}

impl ConnectedPartition {
    pub fn cvp(parts: Vec<Vec<usize>>) -> Self {
        ConnectedPartition { parts, covering: true }
    }

    pub fn packing(parts: Vec<Vec<usize>>) -> Self {
        ConnectedPartition { parts, covering: false }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weights(&self, g: &WeightedGraph) -> Vec<i64> {
        self.parts.iter().map(|p| induced_weight(g, p)).collect()
    }
}

pub fn mask_of(n: usize, set: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in set {
        mask[v] = true;
    }
    mask
}

pub fn induced_weight(g: &WeightedGraph, s: &[usize]) -> i64 {
    s.iter().map(|&v| g.weight(v)).sum()
}

/// Components of `g[restrict]`, each sorted, ordered by smallest vertex.
pub fn connected_components(g: &WeightedGraph, restrict: &[usize]) -> Vec<Vec<usize>> {
    components_masked(g, &mask_of(g.n(), restrict))
}

/// Components of the subgraph induced by the vertices with `mask[v]`.
pub fn components_masked(g: &WeightedGraph, mask: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..g.n() {
        if !mask[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &u in g.neighbors(v) {
                if mask[u] && !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Components of the whole graph.
pub fn graph_components(g: &WeightedGraph) -> Vec<Vec<usize>> {
    components_masked(g, &vec![true; g.n()])
}

/// True iff `set` is non-empty and induces a connected subgraph.
pub fn is_connected_set(g: &WeightedGraph, set: &[usize]) -> bool {
    if set.is_empty() {
        return false;
    }
    let mask = mask_of(g.n(), set);
    let mut seen = vec![false; g.n()];
    let mut stack = vec![set[0]];
    seen[set[0]] = true;
    let mut count = 0;
    while let Some(v) = stack.pop() {
        count += 1;
        for &u in g.neighbors(v) {
            if mask[u] && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    let distinct = mask.iter().filter(|&&b| b).count();
    count == distinct
}

/// Breadth-first spanning tree of `g[restrict]` rooted at `root`, as a map
/// from each non-root vertex to its parent.
pub fn spanning_tree(
    g: &WeightedGraph,
    root: usize,
    restrict: &[usize],
) -> Result<BTreeMap<usize, usize>, GraphError> {
    let mask = mask_of(g.n(), restrict);
    if !mask[root] {
        return Err(GraphError::RootNotInSet(root));
    }
    let mut parent = BTreeMap::new();
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if mask[u] && !seen[u] {
                seen[u] = true;
                parent.insert(u, v);
                reached += 1;
                queue.push_back(u);
            }
        }
    }
    if reached != mask.iter().filter(|&&b| b).count() {
        return Err(GraphError::DisconnectedInput);
    }
    Ok(parent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    #[test]
    fn components_examples() {
        let tri = WeightedGraph::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(connected_components(&tri, &[0, 1, 2]), vec![vec![0, 1, 2]]);
        assert_eq!(connected_components(&path(3), &[0, 2]), vec![vec![0], vec![2]]);
        assert!(connected_components(&tri, &[]).is_empty());
    }

    #[test]
    fn weights_sum() {
        let g = WeightedGraph::new(vec![5, 7], &[(0, 1)]).unwrap();
        assert_eq!(induced_weight(&g, &[1]), 7);
        assert_eq!(induced_weight(&g, &[]), 0);
        assert_eq!(induced_weight(&path(3), &[0, 1, 2]), 3);
    }

    #[test]
    fn spanning_tree_examples() {
        let star = WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let t = spanning_tree(&star, 0, &[0, 1, 2, 3]).unwrap();
        assert_eq!(t, BTreeMap::from([(1, 0), (2, 0), (3, 0)]));
        let t = spanning_tree(&path(3), 2, &[0, 1, 2]).unwrap();
        assert_eq!(t, BTreeMap::from([(1, 2), (0, 1)]));
        assert!(spanning_tree(&star, 0, &[0]).unwrap().is_empty());
        assert_eq!(spanning_tree(&path(3), 0, &[0, 2]), Err(GraphError::DisconnectedInput));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(WeightedGraph::new(vec![1, 0], &[]), Err(GraphError::BadWeight(1, 0)));
        assert_eq!(WeightedGraph::unit(2, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            WeightedGraph::unit(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            WeightedGraph::new(vec![1 << 61, 1 << 61, 1], &[]),
            Err(GraphError::WeightOverflow)
        );
    }

    #[test]
    fn induced_subgraph_renumbers() {
        let (h, map) = path(5).induced_subgraph(&[4, 2, 3]);
        assert_eq!(map, vec![2, 3, 4]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
        (1usize..12).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            (
                proptest::collection::vec(1i64..6, n),
                proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()),
            )
                .prop_map(|(w, e)| WeightedGraph::new(w, &e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn components_partition_the_restriction(g in arb_graph(), bits in any::<u16>()) {
            let restrict: Vec<usize> = (0..g.n()).filter(|v| bits >> v & 1 == 1).collect();
            let comps = connected_components(&g, &restrict);
            let mut all: Vec<usize> = comps.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(&all, &restrict);
            for c in &comps {
                prop_assert!(is_connected_set(&g, c));
            }
            let total: i64 = comps.iter().map(|c| induced_weight(&g, c)).sum();
            prop_assert_eq!(total, induced_weight(&g, &restrict));
        }

        #[test]
        fn spanning_tree_is_a_tree(g in arb_graph()) {
            for comp in graph_components(&g) {
                let t = spanning_tree(&g, comp[0], &comp).unwrap();
                prop_assert_eq!(t.len(), comp.len() - 1);
                for (&c, &p) in &t {
                    prop_assert!(g.has_edge(c, p));
                }
                // walking parents from any vertex reaches the root without repeats
                for &v in &comp {
                    let mut x = v;
                    let mut steps = 0;
                    while let Some(&p) = t.get(&x) {
                        x = p;
                        steps += 1;
                        prop_assert!(steps <= comp.len());
                    }
                    prop_assert_eq!(x, comp[0]);
                }
            }
        }
    }
}

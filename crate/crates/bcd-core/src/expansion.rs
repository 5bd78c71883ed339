//! Balanced expansions in vertex-weighted bipartite graphs: the flow-based
//! fractional version, cycle canceling, tree rounding, and the plain
//! weighted q-expansion derived from them.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::netflow::{max_flow, FlowNetwork, ResidualView};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpansionError {
    #[error("vertex b{0} has no neighbour in A")]
    IsolatedBVertex(usize),
    #[error("edge (a{0}, b{1}) is out of range")]
    BadEdge(usize, usize),
    #[error("edge (a{0}, b{1}) given twice")]
    DuplicateEdge(usize, usize),
    #[error("bad weight {1} on {0}")]
    BadWeight(String, i64),
    #[error("q = {q} is below the largest B weight {wmax}")]
    QBelowMaxWeight { q: i64, wmax: i64 },
}

/// Bipartite graph with sides `A = 0..na` and `B = 0..nb`. A-weights may be
/// zero, B-weights are positive, and every b has a neighbour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteWeighted {
    a_weight: Vec<i64>,
    b_weight: Vec<i64>,
    a_adj: Vec<Vec<usize>>,
    b_adj: Vec<Vec<usize>>,
    wmax_b: i64,
}

impl BipartiteWeighted {
    pub fn new(
        a_weight: Vec<i64>,
        b_weight: Vec<i64>,
        edges: &[(usize, usize)],
    ) -> Result<Self, ExpansionError> {
        if let Some((i, &w)) = a_weight.iter().enumerate().find(|(_, &w)| w < 0) {
            return Err(ExpansionError::BadWeight(format!("a{i}"), w));
        }
        if let Some((j, &w)) = b_weight.iter().enumerate().find(|(_, &w)| w < 1) {
            return Err(ExpansionError::BadWeight(format!("b{j}"), w));
        }
        let mut a_adj = vec![Vec::new(); a_weight.len()];
        let mut b_adj = vec![Vec::new(); b_weight.len()];
        for &(a, b) in edges {
            if a >= a_weight.len() || b >= b_weight.len() {
                return Err(ExpansionError::BadEdge(a, b));
            }
            a_adj[a].push(b);
            b_adj[b].push(a);
        }
        for (a, l) in a_adj.iter_mut().enumerate() {
            l.sort_unstable();
            if let Some(w) = l.windows(2).find(|w| w[0] == w[1]) {
                return Err(ExpansionError::DuplicateEdge(a, w[0]));
            }
        }
        for (b, l) in b_adj.iter_mut().enumerate() {
            l.sort_unstable();
            if l.is_empty() {
                return Err(ExpansionError::IsolatedBVertex(b));
            }
        }
        let wmax_b = b_weight.iter().copied().max().unwrap_or(0);
        Ok(BipartiteWeighted { a_weight, b_weight, a_adj, b_adj, wmax_b })
    }

    pub fn na(&self) -> usize {
        self.a_weight.len()
    }

    pub fn nb(&self) -> usize {
        self.b_weight.len()
    }

    pub fn a_weight(&self, a: usize) -> i64 {
        self.a_weight[a]
    }

    pub fn b_weight(&self, b: usize) -> i64 {
        self.b_weight[b]
    }

    pub fn a_neighbors(&self, a: usize) -> &[usize] {
        &self.a_adj[a]
    }

    pub fn b_neighbors(&self, b: usize) -> &[usize] {
        &self.b_adj[b]
    }

    pub fn wmax_b(&self) -> i64 {
        self.wmax_b
    }

    pub fn total_weight(&self) -> i64 {
        self.a_weight.iter().sum::<i64>() + self.b_weight.iter().sum::<i64>()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.a_adj[a].binary_search(&b).is_ok()
    }

    /// Same edges and B side, new A-weights.
    pub fn with_a_weights(&self, a_weight: Vec<i64>) -> Self {
        assert_eq!(a_weight.len(), self.na());
        BipartiteWeighted { a_weight, ..self.clone() }
    }
}

/// Edge-weight map keyed by `(a, b)`; absent keys are zero.
pub type EdgeWeights = BTreeMap<(usize, usize), i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalBalancedExpansion {
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub g: EdgeWeights,
    pub q: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedExpansion {
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    /// `f[b]` is the A-vertex b is assigned to.
    pub f: Vec<usize>,
    pub q: i64,
}

impl BalancedExpansion {
    /// `w(a) + w(f^-1(a))` for every a.
    pub fn loads(&self, g: &BipartiteWeighted) -> Vec<i64> {
        let mut load = g.a_weight.clone();
        for (b, &a) in self.f.iter().enumerate() {
            load[a] += g.b_weight[b];
        }
        load
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedExpansionResult {
    pub h: Vec<usize>,
    pub c: Vec<usize>,
    pub f: BTreeMap<usize, usize>,
}

fn a_sums(g: &BipartiteWeighted, gm: &EdgeWeights) -> (Vec<i64>, Vec<i64>) {
    let mut sa = vec![0; g.na()];
    let mut sb = vec![0; g.nb()];
    for (&(a, b), &x) in gm {
        sa[a] += x;
        sb[b] += x;
    }
    (sa, sb)
}

/// Fractional balanced expansion from one max flow plus one residual
/// reachability test per saturated A-vertex.
pub fn fractional_balanced_expansion(g: &BipartiteWeighted, q: i64) -> FractionalBalancedExpansion {
    let heavy: Vec<bool> = g.a_weight.iter().map(|&w| w >= q).collect();
    let mut gm = EdgeWeights::new();
    let mut in_a1 = heavy.clone();
    let mut in_net_b = vec![false; g.nb()];
    for b in 0..g.nb() {
        match g.b_adj[b].iter().find(|&&a| !heavy[a]) {
            Some(_) => in_net_b[b] = true,
            None => {
                gm.insert((g.b_adj[b][0], b), g.b_weight[b]);
            }
        }
    }
    let light: Vec<usize> = (0..g.na()).filter(|&a| !heavy[a]).collect();
    if !light.is_empty() {
        // nodes: s, t, then light A, then network B
        let mut node_of_a = vec![usize::MAX; g.na()];
        for (i, &a) in light.iter().enumerate() {
            node_of_a[a] = 2 + i;
        }
        let net_b: Vec<usize> = (0..g.nb()).filter(|&b| in_net_b[b]).collect();
        let mut net = FlowNetwork::new(2 + light.len() + net_b.len(), 0, 1);
        let mut ba_arcs = Vec::new();
        for (j, &b) in net_b.iter().enumerate() {
            let node = 2 + light.len() + j;
            net.add_arc(0, node, g.b_weight[b]);
            for &a in &g.b_adj[b] {
                if !heavy[a] {
                    let id = net.add_arc(node, node_of_a[a], g.b_weight[b]);
                    ba_arcs.push((id, a, b));
                }
            }
        }
        let at_arcs: Vec<usize> =
            light.iter().map(|&a| net.add_arc(node_of_a[a], 1, q - g.a_weight[a])).collect();
        let y = max_flow(&net);
        for &(id, a, b) in &ba_arcs {
            if y.flow[id] > 0 {
                gm.insert((a, b), y.flow[id]);
            }
        }
        let saturated: Vec<bool> =
            at_arcs.iter().map(|&id| y.flow[id] == net.arcs()[id].cap).collect();
        if saturated.iter().all(|&s| s) {
            light.iter().for_each(|&a| in_a1[a] = true);
        } else {
            let view = ResidualView::new(&net, &y);
            for (i, &a) in light.iter().enumerate() {
                if saturated[i] && view.augments(&net, at_arcs[i]).expect("arc exists") {
                    in_a1[a] = true;
                }
            }
        }
    }
    let a1 = (0..g.na()).filter(|&a| in_a1[a]).collect();
    let a2 = (0..g.na()).filter(|&a| !in_a1[a]).collect();
    FractionalBalancedExpansion { a1, a2, g: gm, q }
}

/// Violations of the fractional balanced expansion conditions.
pub fn check_fractional(g: &BipartiteWeighted, fr: &FractionalBalancedExpansion) -> Vec<String> {
    let mut out = Vec::new();
    let mut side = vec![0u8; g.na()];
    fr.a1.iter().for_each(|&a| side[a] |= 1);
    fr.a2.iter().for_each(|&a| side[a] |= 2);
    if let Some(a) = side.iter().position(|&s| s != 1 && s != 2) {
        out.push(format!("A1/A2 do not partition A at a{a}"));
        return out;
    }
    for (&(a, b), &x) in &fr.g {
        if a >= g.na() || b >= g.nb() || !g.has_edge(a, b) || x < 0 {
            out.push(format!("g({a},{b}) = {x} is not on a valid edge"));
        }
    }
    let (sa, sb) = a_sums(g, &fr.g);
    for a in 0..g.na() {
        let load = g.a_weight[a] + sa[a];
        if side[a] == 1 && load < fr.q {
            out.push(format!("a{a} in A1 has load {load} < q"));
        }
        if side[a] == 2 && load > fr.q {
            out.push(format!("a{a} in A2 has load {load} > q"));
        }
    }
    for b in 0..g.nb() {
        if sb[b] > g.b_weight[b] {
            out.push(format!("b{b} over capacity"));
        }
        let unsaturated = sb[b] < g.b_weight[b];
        let feeds_a1 = g.b_adj[b].iter().any(|&a| side[a] == 1 && fr.g.get(&(a, b)).is_some_and(|&x| x > 0));
        if unsaturated || feeds_a1 {
            if let Some(&a) = g.b_adj[b].iter().find(|&&a| side[a] == 2) {
                out.push(format!("separator: b{b} reaches a{a} in A2"));
            }
        }
    }
    out
}

fn node_a(a: usize) -> usize {
    2 * a
}

fn node_b(b: usize) -> usize {
    2 * b + 1
}

/// Tree path between two nodes of a forest given as adjacency sets, or
/// None if they are in different trees.
fn forest_path(adj: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev = BTreeMap::new();
    prev.insert(from, from);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut x = to;
            while x != from {
                x = prev[&x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for &v in &adj[u] {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(v) {
                e.insert(u);
                queue.push_back(v);
            }
        }
    }
    None
}

fn edge_key(u: usize, v: usize) -> (usize, usize) {
    // nodes are interleaved: even = A, odd = B
    if u % 2 == 0 {
        (u / 2, v / 2)
    } else {
        (v / 2, u / 2)
    }
}

/// One cancellation on a cycle given as a closed node walk
/// `c[0], c[1], ..., c[L-1]` (edge `c[i]c[i+1 mod L]`). The lightest edge
/// (first one in walk order on ties) drops to zero and signs alternate from
/// there.
pub fn cancel_cycle(gm: &mut EdgeWeights, cycle: &[usize]) {
    let len = cycle.len();
    assert!(len >= 4 && len % 2 == 0, "bipartite cycles have even length >= 4");
    let key = |i: usize| edge_key(cycle[i % len], cycle[(i + 1) % len]);
    let start = (0..len).min_by_key(|&i| (gm[&key(i)], i)).unwrap();
    let x = gm[&key(start)];
    for j in 0..len {
        let k = key(start + j);
        let entry = gm.get_mut(&k).unwrap();
        if j % 2 == 0 {
            *entry -= x;
        } else {
            *entry += x;
        }
        if *entry == 0 {
            gm.remove(&k);
        }
    }
}

/// Cancel cycles in the support of `g` until it is a forest. Per-A and
/// per-B sums are unchanged.
pub fn cycle_cancel_to_forest(g: &BipartiteWeighted, frac: &FractionalBalancedExpansion) -> EdgeWeights {
    cancel_to_forest(g, frac.g.clone())
}

pub(crate) fn cancel_to_forest(g: &BipartiteWeighted, mut gm: EdgeWeights) -> EdgeWeights {
    gm.retain(|_, x| *x > 0);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * g.na().max(g.nb()) + 2];
    let pending: Vec<(usize, usize)> = gm.keys().copied().collect();
    for (a, b) in pending {
        let (u, v) = (node_a(a), node_b(b));
        if let Some(path) = forest_path(&adj, v, u) {
            // path runs b .. a; the new edge a-b closes it
            cancel_cycle(&mut gm, &path);
            for w in path.windows(2) {
                if !gm.contains_key(&edge_key(w[0], w[1])) {
                    adj[w[0]].retain(|&z| z != w[1]);
                    adj[w[1]].retain(|&z| z != w[0]);
                }
            }
        }
        if gm.contains_key(&(a, b)) {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    gm
}

/// Round a fractional expansion to an assignment by cycle canceling and
/// orienting the support trees. Does not check `q` against the B weights.
pub fn round_fractional(g: &BipartiteWeighted, frac: &FractionalBalancedExpansion) -> BalancedExpansion {
    let forest = cycle_cancel_to_forest(g, frac);
    let mut in_a1 = vec![false; g.na()];
    frac.a1.iter().for_each(|&a| in_a1[a] = true);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * g.na().max(g.nb()) + 2];
    for &(a, b) in forest.keys() {
        adj[node_a(a)].push(node_b(b));
        adj[node_b(b)].push(node_a(a));
    }
    adj.iter_mut().for_each(|l| l.sort_unstable());
    let mut f = vec![usize::MAX; g.nb()];
    let mut visited = vec![false; adj.len()];
    for root in 0..g.na() {
        let r = node_a(root);
        if visited[r] {
            continue;
        }
        // BFS order gives parents; the root is the lowest A id in its tree
        let mut order = vec![r];
        let mut parent = BTreeMap::new();
        visited[r] = true;
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            for &v in &adj[u] {
                if !visited[v] {
                    visited[v] = true;
                    parent.insert(v, u);
                    order.push(v);
                }
            }
        }
        let a1_tree = in_a1[root];
        for &u in order.iter().filter(|&&u| u % 2 == 1) {
            let b = u / 2;
            let p = parent[&u];
            let children: Vec<usize> = adj[u].iter().copied().filter(|&v| v != p).collect();
            let target = if a1_tree || children.is_empty() { p } else { children[0] };
            f[b] = target / 2;
        }
    }
    for b in 0..g.nb() {
        if f[b] == usize::MAX {
            f[b] = g.b_adj[b][0];
        }
    }
    BalancedExpansion { a1: frac.a1.clone(), a2: frac.a2.clone(), f, q: frac.q }
}

/// Balanced expansion by flow, cycle canceling and tree rounding.
pub fn balanced_expansion(g: &BipartiteWeighted, q: i64) -> Result<BalancedExpansion, ExpansionError> {
    if q < g.wmax_b {
        return Err(ExpansionError::QBelowMaxWeight { q, wmax: g.wmax_b });
    }
    Ok(round_fractional(g, &fractional_balanced_expansion(g, q)))
}

/// Violations of the balanced expansion conditions.
pub fn check_balanced_expansion(g: &BipartiteWeighted, be: &BalancedExpansion) -> Vec<String> {
    let mut out = Vec::new();
    let mut side = vec![0u8; g.na()];
    be.a1.iter().for_each(|&a| side[a] |= 1);
    be.a2.iter().for_each(|&a| side[a] |= 2);
    if let Some(a) = side.iter().position(|&s| s != 1 && s != 2) {
        out.push(format!("A1/A2 do not partition A at a{a}"));
        return out;
    }
    if be.f.len() != g.nb() {
        out.push("f is not total on B".into());
        return out;
    }
    for (b, &a) in be.f.iter().enumerate() {
        if a >= g.na() || !g.has_edge(a, b) {
            out.push(format!("f(b{b}) = a{a} is not a neighbour"));
            return out;
        }
    }
    let load = be.loads(g);
    let slack = g.wmax_b - 1;
    for a in 0..g.na() {
        if side[a] == 1 && load[a] < be.q - slack {
            out.push(format!("a{a} in A1 has load {} < q - wmax + 1", load[a]));
        }
        if side[a] == 2 && load[a] > be.q + slack {
            out.push(format!("a{a} in A2 has load {} > q + wmax - 1", load[a]));
        }
    }
    for (b, &a) in be.f.iter().enumerate() {
        if side[a] == 1 {
            if let Some(&x) = g.b_adj[b].iter().find(|&&x| side[x] == 2) {
                out.push(format!("separator: b{b} assigned to A1 touches a{x} in A2"));
            }
        }
    }
    out
}

/// Weighted q-expansion: unit A-weights and q + 1, or the degenerate
/// everything-assigned answer when q is at most `W - 2`.
pub fn weighted_expansion(g: &BipartiteWeighted, q: i64) -> WeightedExpansionResult {
    let w = g.wmax_b;
    if q <= w - 2 {
        let f = (0..g.nb()).map(|b| (b, g.b_adj[b][0])).collect();
        return WeightedExpansionResult { h: (0..g.na()).collect(), c: (0..g.nb()).collect(), f };
    }
    let unit = g.with_a_weights(vec![1; g.na()]);
    let be = balanced_expansion(&unit, q + 1).expect("q + 1 >= W");
    let mut in_a1 = vec![false; g.na()];
    be.a1.iter().for_each(|&a| in_a1[a] = true);
    let f: BTreeMap<usize, usize> =
        be.f.iter().enumerate().filter(|(_, &a)| in_a1[a]).map(|(b, &a)| (b, a)).collect();
    WeightedExpansionResult { h: be.a1, c: f.keys().copied().collect(), f }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig_left() -> BipartiteWeighted {
        let edges = [
            (0, 0), (1, 0), (0, 1), (0, 2), (1, 2), (1, 3), (3, 4), (0, 6), (2, 6), (1, 5), (3, 5),
        ];
        BipartiteWeighted::new(vec![0; 4], vec![1; 7], &edges).unwrap()
    }

    #[test]
    fn forced_saturation() {
        let g = BipartiteWeighted::new(vec![1], vec![1], &[(0, 0)]).unwrap();
        let fr = fractional_balanced_expansion(&g, 2);
        assert_eq!(fr.a1, vec![0]);
        assert_eq!(fr.g, EdgeWeights::from([((0, 0), 1)]));
    }

    #[test]
    fn q_zero_puts_everything_in_a1() {
        let g = BipartiteWeighted::new(vec![1, 2], vec![1, 3], &[(0, 0), (1, 1)]).unwrap();
        let fr = fractional_balanced_expansion(&g, 0);
        assert_eq!(fr.a1, vec![0, 1]);
        assert!(fr.a2.is_empty());
        assert!(check_fractional(&g, &fr).is_empty());
    }

    #[test]
    fn isolated_b_rejected() {
        assert_eq!(
            BipartiteWeighted::new(vec![1], vec![1, 1], &[(0, 0)]),
            Err(ExpansionError::IsolatedBVertex(1))
        );
    }

    #[test]
    fn single_heavy_a() {
        let g = BipartiteWeighted::new(vec![3], vec![1], &[(0, 0)]).unwrap();
        let be = balanced_expansion(&g, 3).unwrap();
        assert_eq!(be.a1, vec![0]);
        assert_eq!(be.f, vec![0]);
        assert!(check_balanced_expansion(&g, &be).is_empty());
    }

    #[test]
    fn q_below_max_weight() {
        let g = BipartiteWeighted::new(vec![0], vec![4], &[(0, 0)]).unwrap();
        assert_eq!(balanced_expansion(&g, 3), Err(ExpansionError::QBelowMaxWeight { q: 3, wmax: 4 }));
    }

    #[test]
    fn figure_left_instance() {
        // the drawn certificate is itself a balanced expansion
        let g = fig_left();
        let drawn = BalancedExpansion { a1: vec![0, 1], a2: vec![2, 3], f: vec![1, 0, 0, 1, 3, 3, 2], q: 2 };
        assert!(check_balanced_expansion(&g, &drawn).is_empty());
        let be = balanced_expansion(&g, 2).unwrap();
        assert!(check_balanced_expansion(&g, &be).is_empty(), "{:?}", check_balanced_expansion(&g, &be));
        // unit B weights leave no rounding slack: loads hit the q band exactly
        let load = be.loads(&g);
        assert!(be.a1.iter().all(|&a| load[a] >= 2));
        assert!(be.a2.iter().all(|&a| load[a] <= 2));
    }

    #[test]
    fn figure_cycle_cancel() {
        // cycle b1 - a0 - b2 - a2 - b1 carrying 3, 5, 7, 2 in walk order
        let mut gm = EdgeWeights::from([((0, 1), 3), ((0, 2), 5), ((2, 2), 7), ((2, 1), 2)]);
        let walk = [node_b(1), node_a(0), node_b(2), node_a(2)];
        cancel_cycle(&mut gm, &walk);
        assert_eq!(gm, EdgeWeights::from([((0, 1), 5), ((0, 2), 3), ((2, 2), 9)]));
    }

    #[test]
    fn acyclic_support_is_a_fixed_point() {
        let g = fig_left();
        let gm = EdgeWeights::from([((0, 0), 1), ((0, 1), 1), ((1, 3), 1)]);
        assert_eq!(cancel_to_forest(&g, gm.clone()), gm);
    }

    #[test]
    fn weighted_expansion_degenerate() {
        let g = BipartiteWeighted::new(vec![5, 5], vec![4, 1], &[(0, 0), (1, 0), (1, 1)]).unwrap();
        let r = weighted_expansion(&g, 2);
        assert_eq!(r.h, vec![0, 1]);
        assert_eq!(r.c, vec![0, 1]);
        assert_eq!(r.f, BTreeMap::from([(0, 0), (1, 1)]));
    }

    /// Every (A1, f) pair, checked against the definition.
    fn some_certificate_with_a1(g: &BipartiteWeighted, q: i64) -> bool {
        let nb = g.nb();
        (1u32..1 << g.na()).any(|mask| {
            let a1: Vec<usize> = (0..g.na()).filter(|a| mask >> a & 1 == 1).collect();
            let a2: Vec<usize> = (0..g.na()).filter(|a| mask >> a & 1 == 0).collect();
            let mut idx = vec![0usize; nb];
            loop {
                let f: Vec<usize> = (0..nb).map(|b| g.b_neighbors(b)[idx[b]]).collect();
                let be = BalancedExpansion { a1: a1.clone(), a2: a2.clone(), f, q };
                if check_balanced_expansion(g, &be).is_empty() {
                    return true;
                }
                let Some(b) = (0..nb).find(|&b| idx[b] + 1 < g.b_neighbors(b).len()) else { return false };
                idx[b] += 1;
                (0..b).for_each(|c| idx[c] = 0);
            }
        })
    }

    #[test]
    fn fractional_a1_against_exhaustive_search() {
        for seed in 0..300 {
            let g = crate::gen::random_bipartite(3, 5, 0.4, 1, 1, seed).with_a_weights(vec![1; 3]);
            let ours = !fractional_balanced_expansion(&g, 2).a1.is_empty();
            assert_eq!(ours, some_certificate_with_a1(&g, 2), "seed {seed}");
        }
    }

    fn arb_bipartite(max_side: usize, max_w: i64) -> impl Strategy<Value = BipartiteWeighted> {
        (1..=max_side, 1..=max_side).prop_flat_map(move |(na, nb)| {
            (
                proptest::collection::vec(0..=max_w, na),
                proptest::collection::vec(1..=max_w, nb),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), na), nb),
                proptest::collection::vec(0..na, nb),
            )
                .prop_map(move |(aw, bw, bits, forced)| {
                    let mut edges = Vec::new();
                    for b in 0..nb {
                        for a in 0..na {
                            if bits[b][a] || a == forced[b] {
                                edges.push((a, b));
                            }
                        }
                    }
                    BipartiteWeighted::new(aw, bw, &edges).unwrap()
                })
        })
    }

    fn is_forest(gm: &EdgeWeights) -> bool {
        // union-find over interleaved node ids
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let r = *p.entry(x).or_insert(x);
            if r == x { x } else { let root = find(p, r); p.insert(x, root); root }
        }
        for &(a, b) in gm.keys() {
            let (x, y) = (find(&mut parent, node_a(a)), find(&mut parent, node_b(b)));
            if x == y {
                return false;
            }
            parent.insert(x, y);
        }
        true
    }

    proptest! {
        #[test]
        fn fractional_is_valid(g in arb_bipartite(6, 4), q in 0i64..12) {
            let fr = fractional_balanced_expansion(&g, q);
            prop_assert!(check_fractional(&g, &fr).is_empty(), "{:?}", check_fractional(&g, &fr));
            if g.total_weight() >= q * g.na() as i64 {
                prop_assert!(!fr.a1.is_empty());
            }
        }

        #[test]
        fn cycle_cancel_keeps_sums(g in arb_bipartite(6, 4), q in 0i64..12) {
            let fr = fractional_balanced_expansion(&g, q);
            let forest = cycle_cancel_to_forest(&g, &fr);
            prop_assert!(is_forest(&forest));
            prop_assert_eq!(a_sums(&g, &forest).0, a_sums(&g, &fr.g).0);
            let (_, sb) = a_sums(&g, &forest);
            for b in 0..g.nb() {
                prop_assert!(sb[b] <= g.b_weight(b));
            }
        }

        #[test]
        fn random_cycles_cancel_to_forest(
            g in arb_bipartite(5, 4),
            raw in proptest::collection::vec(1i64..6, 25),
        ) {
            let mut gm = EdgeWeights::new();
            let mut i = 0;
            for a in 0..g.na() {
                for &b in g.a_neighbors(a) {
                    gm.insert((a, b), raw[i % raw.len()]);
                    i += 1;
                }
            }
            let before = a_sums(&g, &gm);
            let forest = cancel_to_forest(&g, gm);
            prop_assert!(is_forest(&forest));
            prop_assert_eq!(a_sums(&g, &forest), before);
        }

        #[test]
        fn balanced_is_valid(g in arb_bipartite(7, 4), extra in 0i64..9) {
            let q = g.wmax_b() + extra;
            let be = balanced_expansion(&g, q).unwrap();
            prop_assert!(check_balanced_expansion(&g, &be).is_empty(), "{:?}", check_balanced_expansion(&g, &be));
            if g.total_weight() >= q * g.na() as i64 {
                prop_assert!(!be.a1.is_empty());
            }
        }

        #[test]
        fn weighted_expansion_is_valid(g in arb_bipartite(6, 4), q in 0i64..8) {
            let r = weighted_expansion(&g, q);
            let w = g.wmax_b();
            let mut in_h = vec![false; g.na()];
            r.h.iter().for_each(|&a| in_h[a] = true);
            let mut load = vec![0; g.na()];
            for (&b, &a) in &r.f {
                prop_assert!(g.has_edge(a, b) && in_h[a]);
                prop_assert!(g.b_neighbors(b).iter().all(|&x| in_h[x]));
                load[a] += g.b_weight(b);
            }
            for &a in &r.h {
                prop_assert!(load[a] >= q - w + 1);
            }
            let wb: i64 = (0..g.nb()).map(|b| g.b_weight(b)).sum();
            if wb >= q * g.na() as i64 {
                prop_assert!(!r.h.is_empty());
            }
        }
    }
}

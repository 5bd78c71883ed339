//! st-orderings, splitting 2-connected parts, the divide-or-cut-vertex
//! routine, and connected vertex partition checks.


use thiserror::Error;

use crate::graph::{is_connected_set, mask_of, ConnectedPartition, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("graph is not 2-connected")]
    NotBiconnected,
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StOrdering {
    /// Vertices in rank order; `order[0] == s`, `order[n-1] == t`.
    pub order: Vec<usize>,
    pub s: usize,
    pub t: usize,
}

impl StOrdering {
    /// `rank[v]` in `1..=n`.
    pub fn ranks(&self, n: usize) -> Vec<usize> {
        let mut rank = vec![0; n];
        for (i, &v) in self.order.iter().enumerate() {
            rank[v] = i + 1;
        }
        rank
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivideOrCut {
    Divide { v1: Vec<usize>, v2: Vec<usize> },
    CutVertex(usize),
}

/// Compact adjacency over a subset of vertices, with weights that the
/// contraction loop may grow.
struct Local {
    orig: Vec<usize>,
    adj: Vec<Vec<usize>>,
    w: Vec<i64>,
    alive: Vec<bool>,
    /// local ids merged into each local vertex, itself included
    members: Vec<Vec<usize>>,
}

impl Local {
    fn new(g: &WeightedGraph, part: &[usize]) -> Self {
        let mut orig = part.to_vec();
        orig.sort_unstable();
        orig.dedup();
        let mut id = vec![usize::MAX; g.n()];
        for (i, &v) in orig.iter().enumerate() {
            id[v] = i;
        }
        let adj = orig
            .iter()
            .map(|&v| g.neighbors(v).iter().map(|&u| id[u]).filter(|&i| i != usize::MAX).collect())
            .collect();
        let w = orig.iter().map(|&v| g.weight(v)).collect();
        let members = (0..orig.len()).map(|i| vec![i]).collect();
        Local { alive: vec![true; orig.len()], orig, adj, w, members }
    }

    /// Original ids behind a set of local vertices, sorted.
    fn expand(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> =
            set.iter().flat_map(|&i| self.members[i].iter().map(|&j| self.orig[j])).collect();
        out.sort_unstable();
        out
    }

    /// Components of the alive vertices minus `skip`, ordered by smallest id.
    fn components_without(&self, skip: usize) -> Vec<Vec<usize>> {
        let n = self.w.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if !self.alive[s] || s == skip || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.adj[v] {
                    if self.alive[u] && u != skip && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Lowest cut vertex of the alive subgraph (assumed connected).
    fn lowest_cut_vertex(&self) -> Option<usize> {
        let n = self.w.len();
        let root = (0..n).find(|&i| self.alive[i])?;
        let mut pre = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_cut = vec![false; n];
        let mut counter = 0;
        pre[root] = counter;
        low[root] = counter;
        let mut root_children = 0;
        // (vertex, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (v, p, ref mut next)) = stack.last_mut() {
            if *next < self.adj[v].len() {
                let u = self.adj[v][*next];
                *next += 1;
                if !self.alive[u] || u == p {
                    continue;
                }
                if pre[u] == usize::MAX {
                    counter += 1;
                    pre[u] = counter;
                    low[u] = counter;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((u, v, 0));
                } else {
                    low[v] = low[v].min(pre[u]);
                }
            } else {
                stack.pop();
                if p != usize::MAX {
                    low[p] = low[p].min(low[v]);
                    if p != root && low[v] >= pre[p] {
                        is_cut[p] = true;
                    }
                }
            }
        }
        if root_children >= 2 {
            is_cut[root] = true;
        }
        (0..n).find(|&i| is_cut[i])
    }
}

enum Profile {
    NoCut,
    /// lowest cut vertex whose case ends the loop
    Terminal(usize),
    /// every cut vertex had one heavy side; all light sides were folded in
    Contracted,
}

impl Local {
    /// One DFS over the alive graph classifying every cut vertex by the
    /// weights of the components left after removing it.
    fn profile(&mut self, lambda: i64) -> Profile {
        let n = self.w.len();
        let Some(root) = (0..n).find(|&i| self.alive[i]) else { return Profile::NoCut };
        let mut pre = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut size = vec![1usize; n];
        let mut sw = vec![0i64; n];
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::new();
        let mut stack = vec![(root, 0usize)];
        pre[root] = 0;
        order.push(root);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < self.adj[v].len() {
                let u = self.adj[v][*next];
                *next += 1;
                if !self.alive[u] || u == parent[v] {
                    continue;
                }
                if pre[u] == usize::MAX {
                    pre[u] = order.len();
                    low[u] = pre[u];
                    parent[u] = v;
                    order.push(u);
                    stack.push((u, 0));
                } else {
                    low[v] = low[v].min(pre[u]);
                }
            } else {
                stack.pop();
                sw[v] += self.w[v];
                let p = parent[v];
                if p != usize::MAX {
                    low[p] = low[p].min(low[v]);
                    size[p] += size[v];
                    sw[p] += sw[v];
                }
            }
        }
        let total = sw[root];
        let m = order.len();
        let mut sep: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &c in &order[1..] {
            let p = parent[c];
            if low[c] >= pre[p] {
                sep[p].push(c);
            }
        }
        // +1 over the preorder positions of each light side
        let mut diff = vec![0i64; m + 1];
        let mut any_cut = false;
        for v in 0..n {
            if !self.alive[v] || sep[v].is_empty() || (v == root && sep[v].len() < 2) {
                continue;
            }
            any_cut = true;
            let mut comps: Vec<(i64, Option<usize>)> = sep[v].iter().map(|&c| (sw[c], Some(c))).collect();
            if v != root {
                let rest = total - self.w[v] - comps.iter().map(|c| c.0).sum::<i64>();
                comps.push((rest, None));
            }
            let heavy: Vec<&(i64, Option<usize>)> = comps.iter().filter(|c| c.0 >= lambda).collect();
            let light: i64 = comps.iter().filter(|c| c.0 < lambda).map(|c| c.0).sum();
            if heavy.len() != 1 || self.w[v] + light >= lambda {
                return Profile::Terminal(v);
            }
            match heavy[0].1 {
                None => {
                    for &c in &sep[v] {
                        diff[pre[c]] += 1;
                        diff[pre[c] + size[c]] -= 1;
                    }
                }
                Some(h) => {
                    diff[0] += 1;
                    diff[m] -= 1;
                    diff[pre[v]] -= 1;
                    diff[pre[v] + 1] += 1;
                    diff[pre[h]] -= 1;
                    diff[pre[h] + size[h]] += 1;
                }
            }
        }
        if !any_cut {
            return Profile::NoCut;
        }
        let mut dead = vec![false; n];
        let mut acc = 0;
        for (i, &v) in order.iter().enumerate() {
            acc += diff[i];
            dead[v] = acc > 0;
        }
        let mut seen = vec![false; n];
        for s in 0..n {
            if !dead[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            let mut anchor = usize::MAX;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &u in &self.adj[x] {
                    if !self.alive[u] {
                        continue;
                    }
                    if dead[u] {
                        if !seen[u] {
                            seen[u] = true;
                            comp.push(u);
                        }
                    } else {
                        debug_assert!(anchor == usize::MAX || anchor == u, "light side with two anchors");
                        anchor = u;
                    }
                }
            }
            for x in comp {
                self.alive[x] = false;
                let moved = std::mem::take(&mut self.members[x]);
                self.members[anchor].extend(moved);
                self.w[anchor] += self.w[x];
            }
        }
        Profile::Contracted
    }
}

/// st-ordering of the alive vertices of a 2-connected local graph, by the
/// lowpoint list-insertion construction. None if the rank property fails.
fn st_order_local(adj: &[Vec<usize>], alive: &[bool], s: usize, t: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut pre = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n]; // vertex with the smallest preorder reachable
    let mut preorder = Vec::new();
    pre[s] = 0;
    low[s] = s;
    preorder.push(s);
    // t is the first child of s
    pre[t] = 1;
    parent[t] = s;
    low[t] = t;
    preorder.push(t);
    let mut stack: Vec<(usize, usize)> = vec![(s, 0), (t, 0)];
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if *next < adj[v].len() {
            let u = adj[v][*next];
            *next += 1;
            if !alive[u] {
                continue;
            }
            if pre[u] == usize::MAX {
                pre[u] = preorder.len();
                parent[u] = v;
                low[u] = u;
                preorder.push(u);
                stack.push((u, 0));
            } else if u != parent[v] && pre[u] < pre[low[v]] {
                low[v] = u;
            }
        } else {
            stack.pop();
            let p = parent[v];
            if p != usize::MAX && pre[low[v]] < pre[low[p]] {
                low[p] = low[v];
            }
        }
    }
    if preorder.len() != alive.iter().filter(|&&a| a).count() {
        return None;
    }
    // doubly linked list
    let mut next = vec![usize::MAX; n];
    let mut prev = vec![usize::MAX; n];
    next[s] = t;
    prev[t] = s;
    let mut minus = vec![false; n];
    minus[s] = true;
    for &v in &preorder[2..] {
        let p = parent[v];
        if minus[low[v]] {
            // before p
            let a = prev[p];
            prev[v] = a;
            next[v] = p;
            prev[p] = v;
            if a != usize::MAX {
                next[a] = v;
            }
            minus[p] = false;
        } else {
            let b = next[p];
            next[v] = b;
            prev[v] = p;
            next[p] = v;
            if b != usize::MAX {
                prev[b] = v;
            }
            minus[p] = true;
        }
    }
    let mut order = Vec::with_capacity(preorder.len());
    let mut x = s;
    while x != usize::MAX {
        order.push(x);
        x = next[x];
    }
    if order.first() != Some(&s) || order.last() != Some(&t) || order.len() != preorder.len() {
        return None;
    }
    let mut rank = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let ok = order[1..order.len() - 1].iter().all(|&v| {
        let nb = adj[v].iter().filter(|&&u| alive[u]);
        nb.clone().any(|&u| rank[u] < rank[v]) && nb.clone().any(|&u| rank[u] > rank[v])
    });
    ok.then_some(order)
}

/// st-ordering of a 2-connected graph for the edge `st`.
pub fn st_ordering(g: &WeightedGraph, s: usize, t: usize) -> Result<StOrdering, PartitionError> {
    if s >= g.n() || t >= g.n() || !g.has_edge(s, t) {
        return Err(PartitionError::NotAnEdge(s, t));
    }
    let adj: Vec<Vec<usize>> = (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect();
    if g.n() < 3 && g.n() != 2 {
        return Err(PartitionError::NotBiconnected);
    }
    let order = st_order_local(&adj, &vec![true; g.n()], s, t).ok_or(PartitionError::NotBiconnected)?;
    Ok(StOrdering { order, s, t })
}

/// Whether every vertex other than s and t has a lower and a higher
/// ranked neighbour.
pub fn check_st_ordering(g: &WeightedGraph, st: &StOrdering) -> bool {
    let n = g.n();
    if st.order.len() != n || st.order.first() != Some(&st.s) || st.order.last() != Some(&st.t) {
        return false;
    }
    let rank = st.ranks(n);
    if rank.contains(&0) {
        return false;
    }
    st.order[1..n - 1].iter().all(|&v| {
        g.neighbors(v).iter().any(|&u| rank[u] < rank[v]) && g.neighbors(v).iter().any(|&u| rank[u] > rank[v])
    })
}

fn split_local(l: &Local, lambda: i64) -> Option<(Vec<usize>, Vec<usize>)> {
    let s = (0..l.w.len()).find(|&i| l.alive[i])?;
    let t = *l.adj[s].iter().find(|&&u| l.alive[u])?;
    let order = st_order_local(&l.adj, &l.alive, s, t)?;
    let mut acc = 0;
    let mut k = 0;
    while acc < lambda {
        acc += l.w[order[k]];
        k += 1;
    }
    Some((l.expand(&order[..k]), l.expand(&order[k..])))
}

fn check_pre(g: &WeightedGraph, part: &[usize], lambda: i64) -> Result<(), PartitionError> {
    let w: i64 = part.iter().map(|&v| g.weight(v)).sum();
    if w <= 3 * (lambda - 1) {
        return Err(PartitionError::PreconditionViolated(format!(
            "weight {w} is not above 3(lambda-1) = {}",
            3 * (lambda - 1)
        )));
    }
    if let Some(&v) = part.iter().find(|&&v| g.weight(v) >= lambda) {
        return Err(PartitionError::PreconditionViolated(format!("vertex {v} weighs at least lambda")));
    }
    if !is_connected_set(g, part) {
        return Err(PartitionError::PreconditionViolated("part is not connected".into()));
    }
    Ok(())
}

/// Split a 2-connected part at the first st-order prefix reaching `lambda`.
pub fn biconnected_split(
    g: &WeightedGraph,
    part: &[usize],
    lambda: i64,
) -> Result<(Vec<usize>, Vec<usize>), PartitionError> {
    check_pre(g, part, lambda)?;
    let l = Local::new(g, part);
    if l.lowest_cut_vertex().is_some() {
        return Err(PartitionError::NotBiconnected);
    }
    split_local(&l, lambda).ok_or(PartitionError::NotBiconnected)
}

/// Either a `[lambda, inf)`-CVP of `part` into two sets or a vertex whose
/// removal leaves only components lighter than `lambda`.
pub fn divide_or_cut(g: &WeightedGraph, part: &[usize], lambda: i64) -> Result<DivideOrCut, PartitionError> {
    check_pre(g, part, lambda)?;
    let mut l = Local::new(g, part);
    loop {
        let v = match l.profile(lambda) {
            Profile::NoCut => {
                let (v1, v2) = split_local(&l, lambda).expect("no cut vertex and at least four vertices");
                return Ok(DivideOrCut::Divide { v1, v2 });
            }
            Profile::Contracted => continue,
            Profile::Terminal(v) => v,
        };
        let comps = l.components_without(v);
        let cw: Vec<i64> = comps.iter().map(|c| c.iter().map(|&i| l.w[i]).sum()).collect();
        let heavy: Vec<usize> = (0..comps.len()).filter(|&i| cw[i] >= lambda).collect();
        match heavy.len() {
            0 => return Ok(DivideOrCut::CutVertex(l.orig[v])),
            1 => {
                let light: Vec<usize> =
                    (0..comps.len()).filter(|&i| i != heavy[0]).flat_map(|i| comps[i].clone()).collect();
                let lw: i64 = light.iter().map(|&i| l.w[i]).sum();
                if l.w[v] + lw >= lambda {
                    let mut side = light;
                    side.push(v);
                    return Ok(DivideOrCut::Divide { v1: l.expand(&comps[heavy[0]]), v2: l.expand(&side) });
                }
                for &i in &light {
                    l.alive[i] = false;
                    let moved = std::mem::take(&mut l.members[i]);
                    l.members[v].extend(moved);
                }
                l.w[v] += lw;
            }
            _ => {
                // the leftovers only touch v, so they ride along with it
                let v2 = l.expand(&comps[heavy[1]]);
                let mut side: Vec<usize> =
                    (0..comps.len()).filter(|&i| i != heavy[1]).flat_map(|i| comps[i].clone()).collect();
                side.push(v);
                return Ok(DivideOrCut::Divide { v1: l.expand(&side), v2 });
            }
        }
    }
}

/// Violations of: disjoint parts, each connected, weights in `[lo, hi]`,
/// union equal to `cover`.
pub fn cvp_violations(
    g: &WeightedGraph,
    p: &ConnectedPartition,
    lo: i64,
    hi: Option<i64>,
    cover: &[usize],
) -> Vec<String> {
    let mut out = Vec::new();
    let mut owner = vec![usize::MAX; g.n()];
    for (i, part) in p.parts.iter().enumerate() {
        for &v in part {
            if v >= g.n() {
                out.push(format!("part {i} names vertex {v} outside the graph"));
                return out;
            }
            if owner[v] != usize::MAX {
                out.push(format!("vertex {v} in parts {} and {i}", owner[v]));
            }
            owner[v] = i;
        }
        if !is_connected_set(g, part) {
            out.push(format!("part {i} is not connected"));
        }
        let w: i64 = part.iter().map(|&v| g.weight(v)).sum();
        if w < lo || hi.is_some_and(|h| w > h) {
            out.push(format!("part {i} weighs {w}, outside [{lo}, {}]", hi.map_or("inf".into(), |h| h.to_string())));
        }
    }
    let want = mask_of(g.n(), cover);
    for v in 0..g.n() {
        if want[v] != (owner[v] != usize::MAX) {
            out.push(format!("vertex {v} coverage mismatch"));
        }
    }
    out
}

pub fn validate_cvp(g: &WeightedGraph, p: &ConnectedPartition, lo: i64, hi: Option<i64>, cover: &[usize]) -> bool {
    cvp_violations(g, p, lo, hi, cover).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{connected_components, induced_weight};
    use proptest::prelude::*;

    fn cycle(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    fn complete(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        WeightedGraph::unit(n, &edges).unwrap()
    }

    #[test]
    fn st_examples() {
        let tri = complete(3);
        let st = st_ordering(&tri, 0, 2).unwrap();
        assert_eq!(st.order, vec![0, 1, 2]);
        let st = st_ordering(&cycle(4), 0, 1).unwrap();
        assert!(check_st_ordering(&cycle(4), &st));
        assert_eq!(st.order, vec![0, 3, 2, 1]);
        for s in 0..4 {
            for t in 0..4 {
                if s != t {
                    assert!(check_st_ordering(&complete(4), &st_ordering(&complete(4), s, t).unwrap()));
                }
            }
        }
    }

    #[test]
    fn st_errors() {
        let path = WeightedGraph::unit(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(st_ordering(&path, 0, 1), Err(PartitionError::NotBiconnected));
        assert_eq!(st_ordering(&cycle(4), 0, 2), Err(PartitionError::NotAnEdge(0, 2)));
    }

    #[test]
    fn split_examples() {
        let (v1, v2) = biconnected_split(&cycle(4), &[0, 1, 2, 3], 2).unwrap();
        assert_eq!((v1.len(), v2.len()), (2, 2));
        assert!(is_connected_set(&cycle(4), &v1) && is_connected_set(&cycle(4), &v2));
        let c5 = cycle(5);
        let (v1, v2) = biconnected_split(&c5, &[0, 1, 2, 3, 4], 2).unwrap();
        assert_eq!(v1.len(), 2);
        assert!(is_connected_set(&c5, &v1) && is_connected_set(&c5, &v2));
        for lambda in [2, 3, 5] {
            let tri = WeightedGraph::new(vec![lambda - 1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
            assert!(matches!(
                biconnected_split(&tri, &[0, 1, 2], lambda),
                Err(PartitionError::PreconditionViolated(_))
            ));
        }
    }

    #[test]
    fn divide_or_cut_examples() {
        let star = WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(divide_or_cut(&star, &[0, 1, 2, 3], 2), Ok(DivideOrCut::CutVertex(0)));
        let p4 = WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(
            divide_or_cut(&p4, &[0, 1, 2, 3], 2),
            Ok(DivideOrCut::Divide { v1: vec![2, 3], v2: vec![0, 1] })
        );
    }

    #[test]
    fn two_heavy_sides_keep_leftovers_connected() {
        // 0 is a cut vertex between paths 1-2, 3-4 and a pendant 5
        let g = WeightedGraph::unit(6, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5)]).unwrap();
        let r = divide_or_cut(&g, &[0, 1, 2, 3, 4, 5], 2).unwrap();
        let DivideOrCut::Divide { v1, v2 } = r else { panic!("expected divide") };
        assert!(is_connected_set(&g, &v1) && is_connected_set(&g, &v2));
        assert_eq!(v2, vec![3, 4]);
    }

    #[test]
    fn cvp_checks() {
        let p4 = WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let all = [0, 1, 2, 3];
        assert!(validate_cvp(&p4, &ConnectedPartition::cvp(vec![vec![0, 1], vec![2, 3]]), 2, Some(2), &all));
        assert!(!validate_cvp(&p4, &ConnectedPartition::cvp(vec![vec![0, 2], vec![1, 3]]), 1, None, &all));
        assert!(!validate_cvp(&p4, &ConnectedPartition::cvp(vec![vec![0, 1], vec![1, 2, 3]]), 1, None, &all));
        assert!(!validate_cvp(&p4, &ConnectedPartition::cvp(vec![vec![0, 1]]), 1, None, &all));
    }

    /// Random connected graph: a random tree plus extra edges.
    fn arb_connected(max_n: usize, max_w: i64) -> impl Strategy<Value = WeightedGraph> {
        (4..=max_n).prop_flat_map(move |n| {
            (
                proptest::collection::vec(1..=max_w, n),
                proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
                proptest::collection::vec((0..n, 0..n), 0..2 * n),
            )
                .prop_map(move |(w, parents, extra)| {
                    let mut edges: Vec<(usize, usize)> =
                        (1..n).map(|v| (parents[v - 1].index(v), v)).collect();
                    for (u, v) in extra {
                        if u != v {
                            edges.push((u.min(v), u.max(v)));
                        }
                    }
                    edges.sort_unstable();
                    edges.dedup();
                    WeightedGraph::new(w, &edges).unwrap()
                })
        })
    }

    /// Hamiltonian cycle plus chords, so always 2-connected.
    fn arb_biconnected(max_n: usize, max_w: i64) -> impl Strategy<Value = WeightedGraph> {
        (3..=max_n).prop_flat_map(move |n| {
            (proptest::collection::vec(1..=max_w, n), proptest::collection::vec((0..n, 0..n), 0..n))
                .prop_map(move |(w, extra)| {
                    let mut edges: Vec<(usize, usize)> =
                        (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
                    for (u, v) in extra {
                        if u != v {
                            edges.push((u.min(v), u.max(v)));
                        }
                    }
                    edges.sort_unstable();
                    edges.dedup();
                    WeightedGraph::new(w, &edges).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn divide_or_cut_contract(g in arb_connected(14, 3), lambda in 2i64..6) {
            let all: Vec<usize> = (0..g.n()).collect();
            prop_assume!(g.total_weight() > 3 * (lambda - 1) && g.max_weight() < lambda);
            match divide_or_cut(&g, &all, lambda).unwrap() {
                DivideOrCut::Divide { v1, v2 } => {
                    let p = ConnectedPartition::cvp(vec![v1, v2]);
                    prop_assert!(validate_cvp(&g, &p, lambda, None, &all), "{:?}", cvp_violations(&g, &p, lambda, None, &all));
                }
                DivideOrCut::CutVertex(x) => {
                    let rest: Vec<usize> = all.iter().copied().filter(|&v| v != x).collect();
                    for c in connected_components(&g, &rest) {
                        prop_assert!(induced_weight(&g, &c) < lambda);
                    }
                }
            }
        }

        #[test]
        fn st_ordering_on_biconnected(g in arb_biconnected(12, 1)) {
            for (s, t) in g.edges() {
                let st = st_ordering(&g, s, t).unwrap();
                prop_assert!(check_st_ordering(&g, &st));
            }
        }

        #[test]
        fn split_first_side_is_small(g in arb_biconnected(14, 3), extra in 1i64..4) {
            let all: Vec<usize> = (0..g.n()).collect();
            let lambda = g.max_weight() + extra;
            prop_assume!(g.total_weight() > 3 * (lambda - 1));
            let (v1, v2) = biconnected_split(&g, &all, lambda).unwrap();
            let w1 = induced_weight(&g, &v1);
            prop_assert!(w1 >= lambda && w1 <= 2 * (lambda - 1));
            prop_assert!(induced_weight(&g, &v2) >= lambda);
            prop_assert!(is_connected_set(&g, &v1) && is_connected_set(&g, &v2));
        }

        #[test]
        fn cut_vertex_detection_matches_brute_force(g in arb_connected(10, 1)) {
            let all: Vec<usize> = (0..g.n()).collect();
            let brute = (0..g.n()).find(|&x| {
                let rest: Vec<usize> = all.iter().copied().filter(|&v| v != x).collect();
                connected_components(&g, &rest).len() > 1
            });
            prop_assert_eq!(Local::new(&g, &all).lowest_cut_vertex(), brute);
        }
    }
}

//! Integral max-flow (Dinic) and exact min-cost flow (successive shortest
//! paths with potentials) on small directed networks.
//!
//! Residual edges are numbered `2i` (forward on arc `i`) and `2i + 1`
//! (backward). Per node they are scanned in ascending arc order, which keeps
//! every solver deterministic.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

pub type ArcId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("arc id {0} is not in the network")]
    InvalidArc(ArcId),
    #[error("required flow {required} exceeds the maximum flow {max}")]
    InfeasibleDemand { required: i64, max: i64 },
    #[error("arc {0} has a negative cost")]
    NegativeCost(ArcId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub cap: i64,
    pub cost: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < nodes && sink < nodes && source != sink);
        FlowNetwork { nodes, source, sink, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, cap: i64) -> ArcId {
        self.add_arc_with_cost(tail, head, cap, 0)
    }

    /// Panics on arcs into the source, out of the sink, or with negative
    /// capacity: those are construction bugs, not input errors.
    pub fn add_arc_with_cost(&mut self, tail: usize, head: usize, cap: i64, cost: i64) -> ArcId {
        assert!(tail < self.nodes && head < self.nodes, "arc endpoint out of range");
        assert!(head != self.source && tail != self.sink, "arc touches s or t the wrong way");
        assert!(cap >= 0, "negative capacity");
        self.arcs.push(Arc { tail, head, cap, cost });
        self.arcs.len() - 1
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> Option<&Arc> {
        self.arcs.get(id)
    }

    /// Capacity of the cut leaving the node set `side`.
    pub fn cut_capacity(&self, side: &[bool]) -> i64 {
        self.arcs.iter().filter(|a| side[a.tail] && !side[a.head]).map(|a| a.cap).sum()
    }

    fn residual_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for (i, a) in self.arcs.iter().enumerate() {
            adj[a.tail].push(2 * i);
            adj[a.head].push(2 * i + 1);
        }
        adj
    }

    fn ends(&self, e: usize) -> (usize, usize) {
        let a = &self.arcs[e / 2];
        if e % 2 == 0 {
            (a.tail, a.head)
        } else {
            (a.head, a.tail)
        }
    }
}

/// Network with a required flow value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostFlowNetwork {
    pub net: FlowNetwork,
    pub demand: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub flow: Vec<i64>,
    pub value: i64,
}

impl Flow {
    pub fn zero(net: &FlowNetwork) -> Self {
        Flow { flow: vec![0; net.arcs.len()], value: 0 }
    }

    pub fn cost(&self, net: &FlowNetwork) -> i64 {
        net.arcs.iter().zip(&self.flow).map(|(a, &f)| a.cost * f).sum()
    }

    /// Capacity bounds and conservation at every inner node, and a value
    /// that matches the net inflow of the sink.
    pub fn is_feasible(&self, net: &FlowNetwork) -> bool {
        if self.flow.len() != net.arcs.len() {
            return false;
        }
        let mut excess = vec![0i64; net.nodes];
        for (a, &f) in net.arcs.iter().zip(&self.flow) {
            if f < 0 || f > a.cap {
                return false;
            }
            excess[a.tail] -= f;
            excess[a.head] += f;
        }
        excess.iter().enumerate().all(|(v, &x)| v == net.source || v == net.sink || x == 0)
            && excess[net.sink] == self.value
    }

    fn residual(&self, net: &FlowNetwork, e: usize) -> i64 {
        let i = e / 2;
        if e % 2 == 0 {
            net.arcs[i].cap - self.flow[i]
        } else {
            self.flow[i]
        }
    }

    fn push(&mut self, e: usize, amount: i64) {
        if e % 2 == 0 {
            self.flow[e / 2] += amount;
        } else {
            self.flow[e / 2] -= amount;
        }
    }
}

/// Maximum integral s-t flow by Dinic's algorithm.
pub fn max_flow(net: &FlowNetwork) -> Flow {
    let adj = net.residual_adj();
    let mut f = Flow::zero(net);
    let (s, t) = (net.source, net.sink);
    let mut level = vec![usize::MAX; net.nodes];
    let mut it = vec![0usize; net.nodes];
    loop {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &adj[u] {
                let v = net.ends(e).1;
                if level[v] == usize::MAX && f.residual(net, e) > 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if level[t] == usize::MAX {
            break;
        }
        it.iter_mut().for_each(|i| *i = 0);
        // blocking flow with an explicit path stack
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let b = path.iter().map(|&e| f.residual(net, e)).min().unwrap();
                for &e in &path {
                    f.push(e, b);
                }
                f.value += b;
                let k = path.iter().position(|&e| f.residual(net, e) == 0).unwrap();
                u = net.ends(path[k]).0;
                path.truncate(k);
                continue;
            }
            let mut advanced = false;
            while it[u] < adj[u].len() {
                let e = adj[u][it[u]];
                let v = net.ends(e).1;
                if level[v] == level[u] + 1 && f.residual(net, e) > 0 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                it[u] += 1;
            }
            if !advanced {
                if u == s {
                    break;
                }
                let e = path.pop().unwrap();
                u = net.ends(e).0;
                it[u] += 1;
            }
        }
    }
    f
}

fn search(net: &FlowNetwork, f: &Flow, start: usize, forward: bool) -> Vec<bool> {
    let adj = net.residual_adj();
    let mut seen = vec![false; net.nodes];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &e in &adj[u] {
            // backward search walks residual edges into u, i.e. the twins of
            // the edges leaving u
            let (probe, v) = if forward { (e, net.ends(e).1) } else { (e ^ 1, net.ends(e).1) };
            if !seen[v] && f.residual(net, probe) > 0 {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Nodes reachable from `from` through arcs of positive residual capacity.
pub fn residual_reachable(net: &FlowNetwork, f: &Flow, from: usize) -> Vec<bool> {
    search(net, f, from, true)
}

/// Nodes that can reach `to` through arcs of positive residual capacity.
pub fn residual_coreachable(net: &FlowNetwork, f: &Flow, to: usize) -> Vec<bool> {
    search(net, f, to, false)
}

/// Residual reachability from s and to t, computed once and queried per arc.
#[derive(Debug, Clone)]
pub struct ResidualView {
    from_source: Vec<bool>,
    to_sink: Vec<bool>,
}

impl ResidualView {
    pub fn new(net: &FlowNetwork, f: &Flow) -> Self {
        ResidualView {
            from_source: residual_reachable(net, f, net.source),
            to_sink: residual_coreachable(net, f, net.sink),
        }
    }

    /// See [`augmenting_step`].
    pub fn augments(&self, net: &FlowNetwork, arc: ArcId) -> Result<bool, FlowError> {
        let a = net.arc(arc).ok_or(FlowError::InvalidArc(arc))?;
        Ok(self.from_source[a.tail] && self.to_sink[a.head])
    }
}

/// Whether raising the capacity of `arc` by one lets the maximum flow grow
/// by one. `f` must be a maximum flow, so any augmenting path in the bumped
/// network crosses the new unit on `arc`.
pub fn augmenting_step(net: &FlowNetwork, f: &Flow, arc: ArcId) -> Result<bool, FlowError> {
    ResidualView::new(net, f).augments(net, arc)
}

/// Integral flow of value exactly `demand` with minimum total cost.
pub fn min_cost_flow(cn: &CostFlowNetwork) -> Result<Flow, FlowError> {
    let net = &cn.net;
    if let Some(i) = net.arcs.iter().position(|a| a.cost < 0) {
        return Err(FlowError::NegativeCost(i));
    }
    let adj = net.residual_adj();
    let cost = |e: usize| if e % 2 == 0 { net.arcs[e / 2].cost } else { -net.arcs[e / 2].cost };
    let mut f = Flow::zero(net);
    let mut pi = vec![0i64; net.nodes];
    let (s, t) = (net.source, net.sink);
    while f.value < cn.demand {
        let mut dist = vec![i64::MAX; net.nodes];
        let mut pred = vec![usize::MAX; net.nodes];
        let mut done = vec![false; net.nodes];
        dist[s] = 0;
        let mut heap = BinaryHeap::from([Reverse((0i64, s))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &e in &adj[u] {
                if f.residual(net, e) == 0 {
                    continue;
                }
                let v = net.ends(e).1;
                let nd = d + cost(e) + pi[u] - pi[v];
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = e;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if dist[t] == i64::MAX {
            let max = max_flow(net).value;
            return Err(FlowError::InfeasibleDemand { required: cn.demand, max });
        }
        let reach_max = dist.iter().copied().filter(|&d| d != i64::MAX).max().unwrap();
        for v in 0..net.nodes {
            pi[v] += if dist[v] == i64::MAX { reach_max } else { dist[v] };
        }
        let mut b = cn.demand - f.value;
        let mut v = t;
        while v != s {
            let e = pred[v];
            b = b.min(f.residual(net, e));
            v = net.ends(e).0;
        }
        let mut v = t;
        while v != s {
            let e = pred[v];
            f.push(e, b);
            v = net.ends(e).0;
        }
        f.value += b;
    }
    assert!(!has_negative_residual_cycle(net, &f), "min-cost flow left a negative residual cycle");
    Ok(f)
}

/// Bellman-Ford from a virtual root joined to every node at cost 0.
pub fn has_negative_residual_cycle(net: &FlowNetwork, f: &Flow) -> bool {
    let mut dist = vec![0i64; net.nodes];
    let edges: Vec<(usize, usize, i64)> = (0..2 * net.arcs.len())
        .filter(|&e| f.residual(net, e) > 0)
        .map(|e| {
            let (u, v) = net.ends(e);
            let c = if e % 2 == 0 { net.arcs[e / 2].cost } else { -net.arcs[e / 2].cost };
            (u, v, c)
        })
        .collect();
    for _ in 0..net.nodes {
        let mut changed = false;
        for &(u, v, c) in &edges {
            if dist[u] + c < dist[v] {
                dist[v] = dist[u] + c;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
    }
    true
}

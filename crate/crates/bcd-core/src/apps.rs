//! Applications of balanced crown decompositions: kernels for W-weight
//! separator and packing, the packing approximation, and the Max-Min and
//! Min-Max balanced connected partition approximations.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use thiserror::Error;

use crate::bcd::{find_bcd, BalancedCrownDecomposition, BcdError, BcdOptions, BcdOutcome, BcdStats};
use crate::expansion::{round_fractional, BipartiteWeighted, EdgeWeights, FractionalBalancedExpansion};
use crate::graph::{connected_components, graph_components, induced_weight, spanning_tree, ConnectedPartition, WeightedGraph};
use crate::netflow::{min_cost_flow, ArcId, CostFlowNetwork, Flow, FlowError, FlowNetwork};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Bcd(#[from] BcdError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Reduced,
    TriviallyYes,
    TriviallyNo,
}

/// Crown `C`, head `H` and the assignment of crown vertices to heads, in
/// the ids of the input graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Crown {
    pub c: Vec<usize>,
    pub h: Vec<usize>,
    pub f: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone)]
pub struct KernelResult {
    pub verdict: Verdict,
    pub reduced_graph: WeightedGraph,
    /// Reduced vertex id to input vertex id.
    pub reduced_map: Vec<usize>,
    pub reduced_k: i64,
    pub certificate: Crown,
    /// Separator only: vertices of weight at least W, taken up front.
    pub forced: Vec<usize>,
    /// Vertices of components lighter than W, removed up front.
    pub dropped: Vec<usize>,
    /// Disjoint connected sets of weight at least W: more than k of them
    /// for a separator no-instance, at least k for a packing yes-instance.
    pub witness: Option<ConnectedPartition>,
    pub stats: Option<BcdStats>,
}

fn empty_graph() -> WeightedGraph {
    WeightedGraph::new(Vec::new(), &[]).expect("empty graph")
}

/// Remove every component lighter than `w_bound`.
fn drop_light(g: &WeightedGraph, w_bound: i64) -> (WeightedGraph, Vec<usize>, Vec<usize>) {
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for comp in graph_components(g) {
        if induced_weight(g, &comp) >= w_bound {
            keep.extend(comp);
        } else {
            dropped.extend(comp);
        }
    }
    dropped.sort_unstable();
    let (h, map) = g.induced_subgraph(&keep);
    (h, map, dropped)
}

fn lift(map: &[usize], set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().map(|&v| map[v]).collect();
    out.sort_unstable();
    out
}

fn lift_parts(map: &[usize], parts: &[Vec<usize>]) -> Vec<Vec<usize>> {
    parts.iter().map(|p| lift(map, p)).collect()
}

/// `{h} + f^-1(h)` for every head, then the body parts.
pub fn bcd_packing(bcd: &BalancedCrownDecomposition) -> Vec<Vec<usize>> {
    let mut by_head: BTreeMap<usize, Vec<usize>> = bcd.h.iter().map(|&h| (h, vec![h])).collect();
    for (&v, &h) in &bcd.f {
        by_head.get_mut(&h).expect("f maps into H").push(v);
    }
    let mut parts: Vec<Vec<usize>> = by_head.into_values().collect();
    parts.extend(bcd.r_parts.iter().cloned());
    for p in &mut parts {
        p.sort_unstable();
    }
    parts
}

/// Graph left after removing `C` and `H`, plus its id map into `map`'s
/// codomain.
fn strip_crown(g: &WeightedGraph, map: &[usize], bcd: &BalancedCrownDecomposition) -> (WeightedGraph, Vec<usize>, Crown) {
    let (rg, rmap) = g.induced_subgraph(&bcd.r());
    let rmap = rmap.iter().map(|&v| map[v]).collect();
    let crown = Crown {
        c: lift(map, &bcd.c),
        h: lift(map, &bcd.h),
        f: bcd.f.iter().map(|(&v, &h)| (map[v], map[h])).collect(),
    };
    (rg, rmap, crown)
}

/// Kernel for W-weight separator: either a certified no-instance or an
/// equivalent instance of weight at most `3k(W-1)`.
pub fn wsep_kernel(g: &WeightedGraph, w_bound: i64, k: i64) -> Result<KernelResult, AppError> {
    if w_bound < 2 || k < 0 {
        return Err(AppError::InvalidParams(format!("need W >= 2 and k >= 0, got W = {w_bound}, k = {k}")));
    }
    let forced: Vec<usize> = (0..g.n()).filter(|&v| g.weight(v) >= w_bound).collect();
    let rest: Vec<usize> = (0..g.n()).filter(|&v| g.weight(v) < w_bound).collect();
    let (g1, map1) = g.induced_subgraph(&rest);
    let (g2, map2, dropped) = drop_light(&g1, w_bound);
    let map: Vec<usize> = map2.iter().map(|&v| map1[v]).collect();
    let dropped = lift(&map1, &dropped);
    let mut res = KernelResult {
        verdict: Verdict::TriviallyNo,
        reduced_graph: empty_graph(),
        reduced_map: Vec::new(),
        reduced_k: k,
        certificate: Crown::default(),
        forced: forced.clone(),
        dropped,
        witness: None,
        stats: None,
    };
    let singles: Vec<Vec<usize>> = forced.iter().map(|&v| vec![v]).collect();
    let k1 = k - forced.len() as i64;
    if k1 < 0 {
        res.witness = Some(ConnectedPartition::packing(singles));
        return Ok(res);
    }
    if g2.n() == 0 {
        res.verdict = Verdict::Reduced;
        res.reduced_k = k1;
        return Ok(res);
    }
    let opts = BcdOptions { outer_cap: Some(k1 as usize + 1), ..Default::default() };
    match find_bcd(&g2, w_bound, &opts)? {
        BcdOutcome::CapHit { state, stats, .. } => {
            let mut sets = singles;
            sets.extend(lift_parts(&map, &state.outer_index_cvp(&g2).parts));
            res.witness = Some(ConnectedPartition::packing(sets));
            res.stats = Some(stats);
        }
        BcdOutcome::Completed { bcd, stats, .. } => {
            res.stats = Some(stats);
            if bcd.size() as i64 > k1 {
                let mut sets = singles;
                sets.extend(lift_parts(&map, &bcd_packing(&bcd)));
                res.witness = Some(ConnectedPartition::packing(sets));
                return Ok(res);
            }
            let (rg, rmap, crown) = strip_crown(&g2, &map, &bcd);
            res.verdict = Verdict::Reduced;
            res.reduced_k = k1 - bcd.h.len() as i64;
            res.reduced_graph = rg;
            res.reduced_map = rmap;
            res.certificate = crown;
        }
    }
    Ok(res)
}

/// Kernel for W-weight packing: either a certified yes-instance or an
/// equivalent instance of weight at most `3k(W-1)`.
pub fn wpack_kernel(g: &WeightedGraph, w_bound: i64, k: i64) -> Result<KernelResult, AppError> {
    if w_bound < 1 || k < 0 {
        return Err(AppError::InvalidParams(format!("need W >= 1 and k >= 0, got W = {w_bound}, k = {k}")));
    }
    let (g2, map, dropped) = drop_light(g, w_bound);
    let mut res = KernelResult {
        verdict: Verdict::TriviallyYes,
        reduced_graph: empty_graph(),
        reduced_map: Vec::new(),
        reduced_k: k,
        certificate: Crown::default(),
        forced: Vec::new(),
        dropped,
        witness: Some(ConnectedPartition::packing(Vec::new())),
        stats: None,
    };
    if k == 0 {
        return Ok(res);
    }
    if g2.n() == 0 {
        res.verdict = Verdict::Reduced;
        res.witness = None;
        return Ok(res);
    }
    let opts = BcdOptions { outer_cap: Some(k as usize), ..Default::default() };
    match find_bcd(&g2, w_bound, &opts)? {
        BcdOutcome::CapHit { state, stats, .. } => {
            res.witness = Some(ConnectedPartition::packing(lift_parts(&map, &state.outer_index_cvp(&g2).parts)));
            res.stats = Some(stats);
        }
        BcdOutcome::Completed { bcd, stats, .. } => {
            res.stats = Some(stats);
            if bcd.size() as i64 >= k {
                res.witness = Some(ConnectedPartition::packing(lift_parts(&map, &bcd_packing(&bcd))));
                return Ok(res);
            }
            let (rg, rmap, crown) = strip_crown(&g2, &map, &bcd);
            res.verdict = Verdict::Reduced;
            res.witness = None;
            res.reduced_k = k - bcd.h.len() as i64;
            res.reduced_graph = rg;
            res.reduced_map = rmap;
            res.certificate = crown;
        }
    }
    Ok(res)
}

/// A W-packing of size at least a third of the optimum.
pub fn wpack_approx(g: &WeightedGraph, w_bound: i64) -> Result<ConnectedPartition, AppError> {
    if w_bound < 1 {
        return Err(AppError::InvalidParams(format!("need W >= 1, got {w_bound}")));
    }
    let (g2, map, _) = drop_light(g, w_bound);
    if g2.n() == 0 {
        return Ok(ConnectedPartition::packing(Vec::new()));
    }
    let out = find_bcd(&g2, w_bound, &BcdOptions::default())?;
    let bcd = out.bcd().ok_or_else(|| AppError::Internal("uncapped run hit a cap".into()))?;
    Ok(ConnectedPartition::packing(lift_parts(&map, &bcd_packing(bcd))))
}

/// One binary-search probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub x: i64,
    pub lambda: i64,
    pub accepted: bool,
    /// Outer index when the decomposition finished or hit its cap.
    pub outer_index: usize,
    pub stats: Option<BcdStats>,
    /// Min-Max only: every `h -> t` arc saturated.
    pub saturated: Option<bool>,
    /// Min-Max only: exact `p(Y*) + |R|`.
    pub cost: Option<BigRational>,
    /// Min-Max only: k minus the components lighter than X.
    pub budget: Option<usize>,
    /// Min-Max only: heaviest part of the rounded partition.
    pub max_part: Option<i64>,
}

impl Probe {
    fn new(x: i64, lambda: i64) -> Self {
        Probe { x, lambda, accepted: false, outer_index: 0, stats: None, saturated: None, cost: None, budget: None, max_part: None }
    }
}

#[derive(Debug, Clone)]
pub struct BcpSolution {
    pub parts: ConnectedPartition,
    /// Minimum part weight for Max-Min, maximum for Min-Max.
    pub objective: i64,
    /// The accepted guess the partition was built from.
    pub x: i64,
    /// Probes in the order they ran.
    pub probes: Vec<Probe>,
    /// No accepted guess on the wrong side of a rejected one.
    pub monotone: bool,
}

fn check_bcp_input(g: &WeightedGraph, k: usize) -> Result<(), AppError> {
    if k == 0 {
        return Err(AppError::InvalidParams("k must be at least 1".into()));
    }
    if g.n() < k {
        return Err(AppError::Infeasible(format!("{} vertices < k = {k}", g.n())));
    }
    let c = graph_components(g).len();
    if c > k {
        return Err(AppError::Infeasible(format!("{c} components > k = {k}")));
    }
    Ok(())
}

/// Memoized probes keyed by X, each with the partition it produced.
struct Search<F> {
    run: F,
    memo: BTreeMap<i64, Option<Vec<Vec<usize>>>>,
    probes: Vec<Probe>,
}

impl<F: FnMut(i64) -> Result<(Probe, Option<Vec<Vec<usize>>>), AppError>> Search<F> {
    fn new(run: F) -> Self {
        Search { run, memo: BTreeMap::new(), probes: Vec::new() }
    }

    fn accept(&mut self, x: i64) -> Result<bool, AppError> {
        if let Some(p) = self.memo.get(&x) {
            return Ok(p.is_some());
        }
        let (probe, parts) = (self.run)(x)?;
        self.probes.push(probe);
        let ok = parts.is_some();
        self.memo.insert(x, parts);
        Ok(ok)
    }

    /// Largest accepted X in `[1, hi]`, assuming acceptance below the
    /// optimum: doubling, then bisection between accept and reject.
    fn largest(&mut self, hi: i64) -> Result<i64, AppError> {
        let mut good = 0;
        let mut x = 1;
        let bad = loop {
            if self.accept(x)? {
                good = x;
                if x == hi {
                    return Ok(hi);
                }
                x = (2 * x).min(hi);
            } else {
                break x;
            }
        };
        if good == 0 {
            return Err(AppError::Internal("X = 1 was rejected".into()));
        }
        self.bisect(good, bad)
    }

    /// Smallest accepted X in `[lo, hi]`, assuming acceptance above the
    /// optimum.
    fn smallest(&mut self, lo: i64, hi: i64) -> Result<i64, AppError> {
        let mut bad = lo - 1;
        let mut x = lo;
        let good = loop {
            if self.accept(x)? {
                break x;
            }
            if x == hi {
                return Err(AppError::Internal(format!("X = {hi} was rejected")));
            }
            bad = x;
            x = (2 * x).min(hi);
        };
        if bad < lo {
            return Ok(good);
        }
        self.bisect(good, bad)
    }

    fn bisect(&mut self, mut good: i64, mut bad: i64) -> Result<i64, AppError> {
        while (good - bad).abs() > 1 {
            let mid = good + (bad - good) / 2;
            if self.accept(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
        Ok(good)
    }

    /// True iff no accepted X lies on the wrong side of a rejected X.
    fn monotone(&self, accept_low: bool) -> bool {
        let acc = self.memo.iter().filter(|(_, p)| p.is_some()).map(|(&x, _)| x);
        let rej: Vec<i64> = self.memo.iter().filter(|(_, p)| p.is_none()).map(|(&x, _)| x).collect();
        let (lo_r, hi_r) = (rej.iter().min().copied(), rej.iter().max().copied());
        acc.into_iter().all(|a| if accept_low { lo_r.is_none_or(|r| a < r) } else { hi_r.is_none_or(|r| a > r) })
    }
}

/// Merge adjacent parts, lowest index first, until `k` remain.
fn merge_to_k(g: &WeightedGraph, mut parts: Vec<Vec<usize>>, k: usize) -> Vec<Vec<usize>> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            owner[v] = i;
        }
    }
    let mut alive: Vec<bool> = vec![true; parts.len()];
    let mut count = parts.len();
    let mut i = 0;
    while count > k && i < parts.len() {
        if !alive[i] {
            i += 1;
            continue;
        }
        let nb = parts[i].iter().flat_map(|&v| g.neighbors(v)).map(|&u| owner[u]).filter(|&j| j != i).min();
        match nb {
            Some(j) => {
                let moved = std::mem::take(&mut parts[j]);
                for &v in &moved {
                    owner[v] = i;
                }
                parts[i].extend(moved);
                alive[j] = false;
                count -= 1;
            }
            None => i += 1,
        }
    }
    let mut out: Vec<Vec<usize>> = parts.into_iter().zip(alive).filter(|(_, a)| *a).map(|(p, _)| p).collect();
    for p in &mut out {
        p.sort_unstable();
    }
    out
}

/// Split off spanning-tree leaves of the heaviest splittable part until
/// there are `k` parts.
fn pad_to_k(g: &WeightedGraph, mut parts: Vec<Vec<usize>>, k: usize) -> Result<Vec<Vec<usize>>, AppError> {
    while parts.len() < k {
        let i = (0..parts.len())
            .filter(|&i| parts[i].len() >= 2)
            .max_by_key(|&i| (induced_weight(g, &parts[i]), std::cmp::Reverse(i)))
            .ok_or_else(|| AppError::Internal("no part left to split".into()))?;
        let root = *parts[i].iter().min().unwrap();
        let tree = spanning_tree(g, root, &parts[i]).map_err(|e| AppError::Internal(e.to_string()))?;
        let inner: BTreeSet<usize> = tree.values().copied().collect();
        let leaf = *tree.keys().find(|v| !inner.contains(v)).expect("a tree with an edge has a non-root leaf");
        parts[i].retain(|&v| v != leaf);
        parts.push(vec![leaf]);
    }
    Ok(parts)
}

fn objective(g: &WeightedGraph, parts: &[Vec<usize>], max: bool) -> i64 {
    let ws = parts.iter().map(|p| induced_weight(g, p));
    if max { ws.max() } else { ws.min() }.unwrap_or(0)
}

/// Connected k-partition whose lightest part is at least a third of the
/// best possible.
pub fn maxmin_bcp(g: &WeightedGraph, k: usize) -> Result<BcpSolution, AppError> {
    check_bcp_input(g, k)?;
    let w_min = graph_components(g).iter().map(|c| induced_weight(g, c)).min().unwrap_or(0);
    let hi = ((g.total_weight() + k as i64 - 1) / k as i64).min(w_min);
    let mut search = Search::new(|x: i64| {
        let lambda = (x + 2) / 3;
        let mut probe = Probe::new(x, lambda);
        let opts = BcdOptions { outer_cap: Some(k), ..Default::default() };
        let parts = match find_bcd(g, lambda, &opts)? {
            BcdOutcome::CapHit { state, stats, .. } => {
                probe.outer_index = state.outer_index();
                probe.stats = Some(stats);
                Some(state.outer_index_cvp(g).parts)
            }
            BcdOutcome::Completed { bcd, stats, .. } => {
                probe.outer_index = bcd.size();
                probe.stats = Some(stats);
                (bcd.size() >= k).then(|| bcd_packing(&bcd))
            }
        };
        probe.accepted = parts.is_some();
        Ok((probe, parts.map(|p| merge_to_k(g, p, k))))
    });
    let x = search.largest(hi)?;
    let monotone = search.monotone(true);
    let parts = search.memo[&x].clone().expect("accepted probe has parts");
    if parts.len() != k {
        return Err(AppError::Internal(format!("merged to {} parts, not {k}", parts.len())));
    }
    Ok(BcpSolution { objective: objective(g, &parts, false), parts: ConnectedPartition::cvp(parts), x, probes: search.probes, monotone })
}

/// The min-cost flow network that decides, for each crown component,
/// whether it becomes a part of its own or joins a head.
#[derive(Debug, Clone)]
pub struct HLambdaNetwork {
    pub cn: CostFlowNetwork,
    pub lambda: i64,
    /// Crown components, in the order of the `q` nodes.
    pub comps: Vec<Vec<usize>>,
    pub comp_weight: Vec<i64>,
    pub heads: Vec<usize>,
    pub head_weight: Vec<i64>,
    pub sq: Vec<ArcId>,
    pub qq: Vec<ArcId>,
    pub qt: Vec<ArcId>,
    /// `q -> h` arcs per component, as `(head index, arc)`.
    pub qh: Vec<Vec<(usize, ArcId)>>,
    pub ht: Vec<ArcId>,
}

impl HLambdaNetwork {
    /// Panics if some head weighs more than lambda; Min-Max only builds
    /// the network for `X >= w_max`.
    pub fn new(g: &WeightedGraph, bcd: &BalancedCrownDecomposition) -> Self {
        let lambda = bcd.lambda;
        let comps = connected_components(g, &bcd.c);
        let heads = bcd.h.clone();
        let head_idx: BTreeMap<usize, usize> = heads.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let nq = comps.len();
        let (s, t) = (0, 1);
        let q = |i: usize| 2 + i;
        let qc = |i: usize| 2 + nq + i;
        let hn = |j: usize| 2 + 2 * nq + j;
        let mut net = FlowNetwork::new(2 + 2 * nq + heads.len(), s, t);
        let comp_weight: Vec<i64> = comps.iter().map(|c| induced_weight(g, c)).collect();
        let head_weight: Vec<i64> = heads.iter().map(|&h| g.weight(h)).collect();
        let (mut sq, mut qq, mut qt, mut qh) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (i, comp) in comps.iter().enumerate() {
            let w = comp_weight[i];
            sq.push(net.add_arc(s, q(i), w));
            let nbrs: BTreeSet<usize> = comp.iter().flat_map(|&v| g.neighbors(v)).filter_map(|u| head_idx.get(u).copied()).collect();
            qh.push(nbrs.into_iter().map(|j| (j, net.add_arc(q(i), hn(j), w))).collect());
            qq.push(net.add_arc(q(i), qc(i), w));
            // integer surrogate of the cost y / w(Q)
            qt.push(net.add_arc_with_cost(qc(i), t, w, lambda + 1 - w));
        }
        // integer surrogate of the cost (w(h) + y) / lambda
        let ht = (0..heads.len()).map(|j| net.add_arc_with_cost(hn(j), t, lambda - head_weight[j], 1)).collect();
        let demand = comp_weight.iter().sum();
        HLambdaNetwork { cn: CostFlowNetwork { net, demand }, lambda, comps, comp_weight, heads, head_weight, sq, qq, qt, qh, ht }
    }

    /// The exact rational cost of `flow` under the original cost functions.
    pub fn exact_cost(&self, flow: &Flow) -> BigRational {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let mut p = r(0, 1);
        for (j, &arc) in self.ht.iter().enumerate() {
            p += r(self.head_weight[j] + flow.flow[arc], self.lambda);
        }
        for (i, &arc) in self.qt.iter().enumerate() {
            p += r(flow.flow[arc], self.comp_weight[i]);
        }
        p
    }

    pub fn saturated(&self, flow: &Flow) -> bool {
        self.ht.iter().enumerate().all(|(j, &arc)| flow.flow[arc] == self.lambda - self.head_weight[j])
    }

    /// Round an optimal flow into parts covering `C + H`: one per head
    /// and one per component routed entirely to its copy.
    pub fn round(&self, flow: &Flow) -> Result<Vec<Vec<usize>>, AppError> {
        let nq = self.comps.len();
        let mut yq: Vec<i64> = self.qq.iter().map(|&a| flow.flow[a]).collect();
        let mut yh: Vec<BTreeMap<usize, i64>> =
            self.qh.iter().map(|l| l.iter().map(|&(j, a)| (j, flow.flow[a])).filter(|&(_, y)| y > 0).collect()).collect();
        // at most one undecided component per head
        for j in 0..self.heads.len() {
            loop {
                let undecided: Vec<usize> = (0..nq).filter(|&i| yq[i] > 0 && yh[i].contains_key(&j)).take(2).collect();
                let [i1, i2] = undecided[..] else { break };
                if self.comp_weight[i1] != self.comp_weight[i2] {
                    return Err(AppError::Internal(format!("undecided components {i1}, {i2} of head {j} differ in weight")));
                }
                let x = yq[i1].min(yh[i2][&j]);
                yq[i1] -= x;
                *yh[i1].get_mut(&j).unwrap() += x;
                yq[i2] += x;
                let e = yh[i2].get_mut(&j).unwrap();
                *e -= x;
                if *e == 0 {
                    yh[i2].remove(&j);
                }
            }
        }
        let mut parts = Vec::new();
        let mut bw = Vec::new();
        let mut bcomp = Vec::new();
        let mut gm = EdgeWeights::new();
        let mut edges = Vec::new();
        for i in 0..nq {
            if yh[i].is_empty() {
                parts.push(self.comps[i].clone());
                continue;
            }
            let b = bw.len();
            bw.push(self.comp_weight[i]);
            bcomp.push(i);
            let keep = *yh[i].keys().next().unwrap();
            for (&j, &y) in &yh[i] {
                let extra = if j == keep { yq[i] } else { 0 };
                gm.insert((j, b), y + extra);
                edges.push((j, b));
            }
        }
        let bip = BipartiteWeighted::new(self.head_weight.clone(), bw, &edges).map_err(|e| AppError::Internal(e.to_string()))?;
        let frac = FractionalBalancedExpansion { a1: Vec::new(), a2: (0..self.heads.len()).collect(), g: gm, q: 2 * self.lambda - 1 };
        let be = round_fractional(&bip, &frac);
        let mut head_parts: Vec<Vec<usize>> = self.heads.iter().map(|&h| vec![h]).collect();
        for (b, &j) in be.f.iter().enumerate() {
            head_parts[j].extend(&self.comps[bcomp[b]]);
        }
        parts.extend(head_parts);
        for p in &mut parts {
            p.sort_unstable();
        }
        Ok(parts)
    }
}

/// Connected k-partition whose heaviest part is at most three times the
/// best possible.
pub fn minmax_bcp(g: &WeightedGraph, k: usize) -> Result<BcpSolution, AppError> {
    check_bcp_input(g, k)?;
    let lo = ((g.total_weight() + k as i64 - 1) / k as i64).max(g.max_weight());
    let hi = g.total_weight();
    let comps = graph_components(g);
    let mut search = Search::new(|x: i64| {
        let mut probe = Probe::new(x, x);
        let (light, heavy): (Vec<&Vec<usize>>, Vec<&Vec<usize>>) = comps.iter().partition(|c| induced_weight(g, c) < x);
        let budget = k - light.len();
        probe.budget = Some(budget);
        let mut parts: Vec<Vec<usize>> = light.into_iter().cloned().collect();
        if !heavy.is_empty() {
            let keep: Vec<usize> = heavy.into_iter().flatten().copied().collect();
            let (g2, map) = g.induced_subgraph(&keep);
            let opts = BcdOptions { outer_cap: Some(budget + 1), ..Default::default() };
            let bcd = match find_bcd(&g2, x, &opts)? {
                BcdOutcome::CapHit { state, stats, .. } => {
                    probe.outer_index = state.outer_index();
                    probe.stats = Some(stats);
                    return Ok((probe, None));
                }
                BcdOutcome::Completed { bcd, stats, .. } => {
                    probe.outer_index = bcd.size();
                    probe.stats = Some(stats);
                    bcd
                }
            };
            if bcd.size() > budget {
                return Ok((probe, None));
            }
            let net = HLambdaNetwork::new(&g2, &bcd);
            let flow = min_cost_flow(&net.cn)?;
            probe.saturated = Some(net.saturated(&flow));
            let cost = net.exact_cost(&flow) + BigRational::from_integer((bcd.r_parts.len() as i64).into());
            let over = cost > BigRational::from_integer((budget as i64).into());
            probe.cost = Some(cost);
            if over {
                return Ok((probe, None));
            }
            let mut local = net.round(&flow)?;
            local.extend(bcd.r_parts.iter().cloned());
            parts.extend(lift_parts(&map, &local));
        }
        if parts.len() > k {
            return Err(AppError::Internal(format!("rounding produced {} > {k} parts at X = {x}", parts.len())));
        }
        probe.max_part = Some(objective(g, &parts, true));
        probe.accepted = true;
        Ok((probe, Some(pad_to_k(g, parts, k)?)))
    });
    let x = search.smallest(lo, hi)?;
    let monotone = search.monotone(false);
    let parts = search.memo[&x].clone().expect("accepted probe has parts");
    Ok(BcpSolution { objective: objective(g, &parts, true), parts: ConnectedPartition::cvp(parts), x, probes: search.probes, monotone })
}

/// Line graph of an edge list: one vertex per edge, weighted by the edge
/// weight, adjacent when the edges share an endpoint.
pub fn line_graph(n: usize, edges: &[((usize, usize), i64)]) -> Result<WeightedGraph, AppError> {
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &((u, v), w)) in edges.iter().enumerate() {
        if u >= n || v >= n || u == v || w < 1 {
            return Err(AppError::InvalidParams(format!("bad edge {i}: ({u}, {v}) of weight {w}")));
        }
        inc[u].push(i);
        inc[v].push(i);
    }
    let mut le = BTreeSet::new();
    for l in &inc {
        for (a, &i) in l.iter().enumerate() {
            for &j in &l[a + 1..] {
                if !le.insert((i.min(j), i.max(j))) {
                    return Err(AppError::InvalidParams(format!("edges {i} and {j} are parallel")));
                }
            }
        }
    }
    let le: Vec<_> = le.into_iter().collect();
    WeightedGraph::new(edges.iter().map(|e| e.1).collect(), &le).map_err(|e| AppError::InvalidParams(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct EdgePartitionSolution {
    /// Edge indices per part.
    pub parts: Vec<Vec<usize>>,
    pub objective: i64,
    pub inner: BcpSolution,
}

/// Max-Min connected edge partition through the line graph.
pub fn maxmin_bcep(n: usize, edges: &[((usize, usize), i64)], k: usize) -> Result<EdgePartitionSolution, AppError> {
    let lg = line_graph(n, edges)?;
    let inner = maxmin_bcp(&lg, k)?;
    Ok(EdgePartitionSolution { parts: inner.parts.parts.clone(), objective: inner.objective, inner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcd::validate_bcd;
    use crate::gen::{gnp, random_connected};
    use crate::oracle::{oracle_maxmin, oracle_minmax, oracle_wpack, oracle_wsep, verify_result, Claim, Objective, OracleBudget};

    fn path(n: usize) -> WeightedGraph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        WeightedGraph::unit(n, &e).unwrap()
    }

    fn complete(n: usize) -> WeightedGraph {
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                e.push((a, b));
            }
        }
        WeightedGraph::unit(n, &e).unwrap()
    }

    #[test]
    fn wsep_small_cases() {
        // all components light: nothing to separate
        let g = WeightedGraph::unit(4, &[(0, 1), (2, 3)]).unwrap();
        let r = wsep_kernel(&g, 3, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Reduced);
        assert_eq!((r.reduced_graph.n(), r.reduced_k), (0, 0));
        assert_eq!(r.dropped, vec![0, 1, 2, 3]);

        // K4 needs 3 deletions for W = 2
        let r = wsep_kernel(&complete(4), 2, 2).unwrap();
        let b = OracleBudget::default();
        let reduced_yes = r.verdict == Verdict::Reduced && oracle_wsep(&r.reduced_graph, 2, &b).unwrap() as i64 <= r.reduced_k;
        assert!(!reduced_yes && r.verdict != Verdict::TriviallyYes);

        // heavy vertices are forced
        let g = WeightedGraph::new(vec![1, 5, 1, 5], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = wsep_kernel(&g, 3, 1).unwrap();
        assert_eq!(r.verdict, Verdict::TriviallyNo);
        assert_eq!(r.witness.unwrap().len(), 2);
        let r = wsep_kernel(&g, 3, 2).unwrap();
        assert_eq!((r.verdict, r.forced.clone(), r.reduced_k), (Verdict::Reduced, vec![1, 3], 0));

        assert!(matches!(wsep_kernel(&g, 1, 2), Err(AppError::InvalidParams(_))));
        assert!(matches!(wsep_kernel(&g, 2, -1), Err(AppError::InvalidParams(_))));
    }

    #[test]
    fn wpack_small_cases() {
        let r = wpack_kernel(&path(3), 2, 1).unwrap();
        assert_eq!(r.verdict, Verdict::TriviallyYes);
        let w = r.witness.unwrap();
        assert!(verify_result(&path(3), &Claim::Packing { w_bound: 2, sets: w.parts.clone() }).is_empty());
        assert!(!w.is_empty());

        let r = wpack_kernel(&path(3), 2, 0).unwrap();
        assert_eq!(r.verdict, Verdict::TriviallyYes);

        let light = WeightedGraph::unit(2, &[]).unwrap();
        let r = wpack_kernel(&light, 2, 1).unwrap();
        assert_eq!((r.verdict, r.reduced_graph.n(), r.reduced_k), (Verdict::Reduced, 0, 1));
    }

    #[test]
    fn kernels_agree_with_brute_force() {
        let b = OracleBudget::default();
        for seed in 0..150u64 {
            let n = 3 + (seed % 6) as usize;
            let g = gnp(n, 0.45, 3, seed);
            for w_bound in [2, 3, 4] {
                for k in 0..=3i64 {
                    let r = wsep_kernel(&g, w_bound, k).unwrap();
                    let orig = oracle_wsep(&g, w_bound, &b).unwrap() as i64 <= k;
                    let red = match r.verdict {
                        Verdict::TriviallyNo => false,
                        Verdict::TriviallyYes => true,
                        Verdict::Reduced => {
                            assert!(r.reduced_graph.total_weight() <= 3 * k * (w_bound - 1));
                            r.reduced_k >= 0 && oracle_wsep(&r.reduced_graph, w_bound, &b).unwrap() as i64 <= r.reduced_k
                        }
                    };
                    assert_eq!(orig, red, "wsep seed {seed} W {w_bound} k {k}");
                    if let Some(wit) = &r.witness {
                        assert!(verify_result(&g, &Claim::Packing { w_bound, sets: wit.parts.clone() }).is_empty());
                    }

                    let r = wpack_kernel(&g, w_bound, k).unwrap();
                    let orig = oracle_wpack(&g, w_bound, &b).unwrap() as i64 >= k;
                    let red = match r.verdict {
                        Verdict::TriviallyNo => false,
                        Verdict::TriviallyYes => true,
                        Verdict::Reduced => {
                            assert!(r.reduced_graph.total_weight() <= 3 * k * (w_bound - 1));
                            oracle_wpack(&r.reduced_graph, w_bound, &b).unwrap() as i64 >= r.reduced_k
                        }
                    };
                    assert_eq!(orig, red, "wpack seed {seed} W {w_bound} k {k}");
                    if r.verdict == Verdict::Reduced {
                        let cert = &r.certificate;
                        let claim = Claim::Crown { w_bound, c: cert.c.clone(), h: cert.h.clone(), f: cert.f.clone() };
                        assert!(verify_result(&g, &claim).is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn packing_approx_small() {
        let b = OracleBudget::default();
        let p = wpack_approx(&path(6), 2).unwrap();
        assert!(!p.is_empty() && p.len() <= 3);
        let four = WeightedGraph::new(vec![2; 4], &[]).unwrap();
        assert_eq!(wpack_approx(&four, 2).unwrap().len(), 4);
        for seed in 0..60 {
            let g = gnp(4 + (seed % 7) as usize, 0.35, 3, seed);
            for w_bound in [2, 3, 5] {
                let p = wpack_approx(&g, w_bound).unwrap();
                assert!(verify_result(&g, &Claim::Packing { w_bound, sets: p.parts.clone() }).is_empty());
                let opt = oracle_wpack(&g, w_bound, &b).unwrap();
                assert!(3 * p.len() >= opt, "seed {seed}: {} vs {opt}", p.len());
            }
        }
    }

    #[test]
    fn maxmin_trivial_and_ratio() {
        let g = random_connected(8, 12, 4, 3);
        let s = maxmin_bcp(&g, 1).unwrap();
        assert_eq!(s.objective, g.total_weight());
        let s = maxmin_bcp(&g, 8).unwrap();
        assert_eq!(s.objective, g.min_weight());
        let b = OracleBudget::default();
        for seed in 0..40 {
            let g = random_connected(5 + (seed % 5) as usize, 10, 4, seed);
            for k in [2, 3] {
                let s = maxmin_bcp(&g, k).unwrap();
                let claim = Claim::Partition { k, parts: s.parts.parts.clone(), objective: Some((Objective::MaxMin, s.objective)) };
                assert!(verify_result(&g, &claim).is_empty());
                let opt = oracle_maxmin(&g, k, &b).unwrap();
                assert!(s.objective >= (opt + 2) / 3 && s.objective <= opt, "seed {seed} k {k}");
                assert!(s.monotone);
            }
        }
        let two = WeightedGraph::unit(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(maxmin_bcp(&two, 1), Err(AppError::Infeasible(_))));
        assert!(matches!(maxmin_bcp(&two, 5), Err(AppError::Infeasible(_))));
        assert_eq!(maxmin_bcp(&two, 2).unwrap().objective, 2);
    }

    #[test]
    fn minmax_trivial_and_ratio() {
        let g = random_connected(8, 12, 4, 5);
        let s = minmax_bcp(&g, 1).unwrap();
        assert_eq!(s.objective, g.total_weight());
        let b = OracleBudget::default();
        for seed in 0..40 {
            let g = random_connected(5 + (seed % 5) as usize, 9, 3, seed);
            for k in [2, 3] {
                let s = minmax_bcp(&g, k).unwrap();
                let claim = Claim::Partition { k, parts: s.parts.parts.clone(), objective: Some((Objective::MinMax, s.objective)) };
                assert!(verify_result(&g, &claim).is_empty());
                let opt = oracle_minmax(&g, k, &b).unwrap();
                assert!(s.objective >= opt && s.objective <= 3 * opt, "seed {seed} k {k}");
                for p in s.probes.iter().filter(|p| p.accepted && p.saturated.is_some()) {
                    assert_eq!(p.saturated, Some(true));
                    assert!(p.max_part.unwrap() <= (3 * p.x - 3).max(p.x));
                }
            }
        }
        // disconnected input with a light component
        let g = WeightedGraph::new(vec![1, 4, 4, 4], &[(1, 2), (2, 3)]).unwrap();
        let s = minmax_bcp(&g, 3).unwrap();
        assert_eq!(s.parts.len(), 3);
        assert!(s.objective <= 3 * oracle_minmax(&g, 3, &b).unwrap());
    }

    // Star: the centre is the only head, three unit leaves are its crown.
    #[test]
    fn h_lambda_network_shape() {
        let g = WeightedGraph::new(vec![1, 1, 1, 1], &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let bcd = BalancedCrownDecomposition { lambda: 3, c: vec![1, 2, 3], h: vec![0], r_parts: vec![], f: [(1, 0), (2, 0), (3, 0)].into() };
        assert!(validate_bcd(&g, &bcd).is_empty());
        let net = HLambdaNetwork::new(&g, &bcd);
        assert_eq!(net.cn.net.nodes(), 2 + 3 + 3 + 1);
        assert_eq!(net.cn.net.arcs().len(), 3 * 4 + 1);
        assert_eq!(net.cn.demand, 3);
        assert_eq!(net.cn.net.arc(net.ht[0]).unwrap().cap, 2);
        let flow = min_cost_flow(&net.cn).unwrap();
        assert!(net.saturated(&flow));
        // s->q arcs always carry w(Q)
        assert!(net.sq.iter().all(|&a| flow.flow[a] == 1));
        // two leaves ride with the centre (cost 3/3), one stays alone (cost 1)
        assert_eq!(net.exact_cost(&flow), BigRational::from_integer(2.into()));
        let parts = net.round(&flow).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.contains(&vec![0, 1, 2]));
    }

    #[test]
    fn edge_partition() {
        let tri = [((0, 1), 1), ((1, 2), 1), ((0, 2), 1)];
        let s = maxmin_bcep(3, &tri, 3).unwrap();
        assert_eq!((s.parts.len(), s.objective), (3, 1));
        let s = maxmin_bcep(3, &tri, 1).unwrap();
        assert_eq!(s.objective, 3);
        assert!(matches!(maxmin_bcep(3, &[((0, 0), 1)], 1), Err(AppError::InvalidParams(_))));
    }

    #[test]
    fn padding_and_merging() {
        let g = path(6);
        let parts = pad_to_k(&g, vec![(0..6).collect()], 4).unwrap();
        assert_eq!(parts.len(), 4);
        assert!(verify_result(&g, &Claim::Partition { k: 4, parts, objective: None }).is_empty());
        let parts = merge_to_k(&g, (0..6).map(|v| vec![v]).collect(), 2);
        assert!(verify_result(&g, &Claim::Partition { k: 2, parts, objective: None }).is_empty());
    }
}

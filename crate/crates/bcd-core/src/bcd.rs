//! The `find_bcd` engine: heavy-vertex removal, then rounds of
//! divide-or-cut, balanced expansion, private assignment and merging
//! until the body is fully balanced.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::expansion::{balanced_expansion, BipartiteWeighted};
use crate::graph::{components_masked, connected_components, induced_weight, is_connected_set, ConnectedPartition, WeightedGraph};
use crate::partition::{cvp_violations, divide_or_cut, DivideOrCut};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BcdError {
    #[error("lambda must be positive, got {0}")]
    LambdaNonPositive(i64),
    #[error("component containing vertex {vertex} weighs {weight} < lambda")]
    SmallComponent { vertex: usize, weight: i64 },
    #[error("invariant violated after {step:?}: {details:?}")]
    InvariantViolated { step: Step, details: Vec<String> },
    #[error("internal error: {0}")]
    Internal(String),
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(BcdError::Internal(format!($($fmt)+)));
        }
    };
}

/// A lambda-balanced crown decomposition. `f` maps every crown vertex to
/// the head its component is assigned to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedCrownDecomposition {
    pub lambda: i64,
    pub c: Vec<usize>,
    pub h: Vec<usize>,
    pub r_parts: Vec<Vec<usize>>,
    pub f: BTreeMap<usize, usize>,
}

impl BalancedCrownDecomposition {
    pub fn r(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.r_parts.iter().flatten().copied().collect();
        r.sort_unstable();
        r
    }

    /// `|H| + |R_parts|`.
    pub fn size(&self) -> usize {
        self.h.len() + self.r_parts.len()
    }

    pub fn body_partition(&self) -> ConnectedPartition {
        ConnectedPartition::cvp(self.r_parts.clone())
    }

    /// Crown components grouped by head.
    pub fn crown_of(&self, g: &WeightedGraph) -> BTreeMap<usize, Vec<Vec<usize>>> {
        let mut out: BTreeMap<usize, Vec<Vec<usize>>> = self.h.iter().map(|&h| (h, Vec::new())).collect();
        for comp in connected_components(g, &self.c) {
            if let Some(&h) = self.f.get(&comp[0]) {
                out.entry(h).or_default().push(comp);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    RemoveHeavy,
    Init,
    Divide,
    Cut,
    CutCleanup,
    Expansion,
    PrivateAssign,
    MergeUnassigned,
    Finalize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub step: Step,
    pub outer: usize,
    pub inner: usize,
    pub heads: usize,
    pub parts: usize,
    pub subs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BcdStats {
    pub rounds: usize,
    pub divides: usize,
    pub cuts: usize,
    pub cleanups: usize,
    pub subtree_moves: usize,
    pub merges: usize,
    pub outer_monotone: bool,
    pub inner_monotone: bool,
}

#[derive(Debug, Clone, Default)]
pub struct BcdOptions {
    /// Stop as soon as the outer index reaches this value.
    pub outer_cap: Option<usize>,
    pub trace: bool,
    /// Run the state validators after every step (slow).
    pub check_invariants: bool,
}

impl BcdOptions {
    pub fn checked() -> Self {
        BcdOptions { check_invariants: true, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub enum BcdOutcome {
    Completed { bcd: BalancedCrownDecomposition, trace: Vec<TraceRecord>, stats: BcdStats },
    CapHit { state: PbCodState, trace: Vec<TraceRecord>, stats: BcdStats },
}

impl BcdOutcome {
    pub fn bcd(&self) -> Option<&BalancedCrownDecomposition> {
        match self {
            BcdOutcome::Completed { bcd, .. } => Some(bcd),
            BcdOutcome::CapHit { .. } => None,
        }
    }

    pub fn stats(&self) -> &BcdStats {
        match self {
            BcdOutcome::Completed { stats, .. } | BcdOutcome::CapHit { stats, .. } => stats,
        }
    }

    pub fn trace(&self) -> &[TraceRecord] {
        match self {
            BcdOutcome::Completed { trace, .. } | BcdOutcome::CapHit { trace, .. } => trace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    /// moved to the crown accumulator
    Out,
    Part(usize),
    Head,
    Sub(usize),
}

#[derive(Debug, Clone)]
struct Sub {
    verts: Vec<usize>,
    weight: i64,
    assigned: Option<usize>,
}

#[derive(Debug, Clone)]
struct Part {
    verts: Vec<usize>,
    weight: i64,
}

/// Working state: sub-components, heads, body parts and the crown
/// accumulator. `g'` is stored as a representative vertex and resolves to
/// whichever sub-component currently contains it.
#[derive(Debug, Clone)]
pub struct PbCodState {
    lambda: i64,
    loc: Vec<Loc>,
    subs: Vec<Option<Sub>>,
    parts: BTreeMap<usize, Part>,
    next_part: usize,
    heads: BTreeMap<usize, Option<usize>>,
    hstar: Vec<usize>,
    crown: Vec<(Vec<usize>, usize)>,
}

impl PbCodState {
    fn new(n: usize, lambda: i64) -> Self {
        PbCodState {
            lambda,
            loc: vec![Loc::Out; n],
            subs: Vec::new(),
            parts: BTreeMap::new(),
            next_part: 0,
            heads: BTreeMap::new(),
            hstar: Vec::new(),
            crown: Vec::new(),
        }
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    /// `|H*| + |H| + |parts|`.
    pub fn outer_index(&self) -> usize {
        self.hstar.len() + self.heads.len() + self.parts.len()
    }

    /// `|H*| + |H|`.
    pub fn inner_index(&self) -> usize {
        self.hstar.len() + self.heads.len()
    }

    pub fn heads(&self) -> Vec<usize> {
        self.heads.keys().copied().collect()
    }

    pub fn crown_heads(&self) -> &[usize] {
        &self.hstar
    }

    pub fn body_parts(&self) -> Vec<Vec<usize>> {
        self.parts.values().map(|p| p.verts.clone()).collect()
    }

    pub fn sub_components(&self) -> Vec<(Vec<usize>, Option<usize>)> {
        self.subs.iter().flatten().map(|s| (s.verts.clone(), s.assigned)).collect()
    }

    fn record(&self, step: Step) -> TraceRecord {
        TraceRecord {
            step,
            outer: self.outer_index(),
            inner: self.inner_index(),
            heads: self.heads.len(),
            parts: self.parts.len(),
            subs: self.subs.iter().flatten().count(),
        }
    }

    fn add_sub(&mut self, verts: Vec<usize>, weight: i64, assigned: Option<usize>) -> usize {
        let id = self.subs.len();
        for &v in &verts {
            self.loc[v] = Loc::Sub(id);
        }
        self.subs.push(Some(Sub { verts, weight, assigned }));
        id
    }

    fn take_sub(&mut self, id: usize) -> Sub {
        let s = self.subs[id].take().expect("live sub-component");
        for &v in &s.verts {
            self.loc[v] = Loc::Out;
        }
        s
    }

    fn sub(&self, id: usize) -> &Sub {
        self.subs[id].as_ref().expect("live sub-component")
    }

    fn add_part(&mut self, mut verts: Vec<usize>, weight: i64) -> usize {
        verts.sort_unstable();
        let id = self.next_part;
        self.next_part += 1;
        for &v in &verts {
            self.loc[v] = Loc::Part(id);
        }
        self.parts.insert(id, Part { verts, weight });
        id
    }

    fn take_part(&mut self, id: usize) -> Part {
        let p = self.parts.remove(&id).expect("live part");
        for &v in &p.verts {
            self.loc[v] = Loc::Out;
        }
        p
    }

    fn live_subs(&self) -> impl Iterator<Item = (usize, &Sub)> {
        self.subs.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|s| (i, s)))
    }

    fn assigned_to(&self, h: usize) -> Vec<usize> {
        self.live_subs().filter(|(_, s)| s.assigned == Some(h)).map(|(i, _)| i).collect()
    }

    fn assignment(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = self.heads.keys().map(|&h| (h, Vec::new())).collect();
        for (i, s) in self.live_subs() {
            if let Some(h) = s.assigned {
                m.entry(h).or_default().push(i);
            }
        }
        m
    }

    /// `w(h) + w(g^-1(h))`.
    fn g_weight(&self, g: &WeightedGraph, h: usize) -> i64 {
        g.weight(h) + self.live_subs().filter(|(_, s)| s.assigned == Some(h)).map(|(_, s)| s.weight).sum::<i64>()
    }

    fn g_prime(&self, h: usize) -> Option<usize> {
        match self.heads.get(&h).copied().flatten().map(|v| self.loc[v]) {
            Some(Loc::Sub(id)) => Some(id),
            _ => None,
        }
    }

    fn sub_mask(&self) -> Vec<bool> {
        self.loc.iter().map(|l| matches!(l, Loc::Sub(_))).collect()
    }

    /// Components of G[V(subs)] with a private flag (no edge into a part).
    fn sub_components_private(&self, g: &WeightedGraph) -> Vec<(Vec<usize>, bool)> {
        components_masked(g, &self.sub_mask())
            .into_iter()
            .map(|q| {
                let private =
                    !q.iter().any(|&v| g.neighbors(v).iter().any(|&u| matches!(self.loc[u], Loc::Part(_))));
                (q, private)
            })
            .collect()
    }

    fn private_vertex_mask(&self, g: &WeightedGraph) -> Vec<bool> {
        let mut mask = vec![false; g.n()];
        for (q, private) in self.sub_components_private(g) {
            if private {
                q.iter().for_each(|&v| mask[v] = true);
            }
        }
        mask
    }

    fn adjacent_subs(&self, g: &WeightedGraph, verts: &[usize]) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &v in verts {
            for &u in g.neighbors(v) {
                if let Loc::Sub(id) = self.loc[u] {
                    out.insert(id);
                }
            }
        }
        out
    }

    fn touches(&self, g: &WeightedGraph, verts: &[usize], x: usize) -> bool {
        verts.iter().any(|&v| g.has_edge(v, x))
    }

    /// Unassigned sub-components adjacent to a part.
    fn unassigned_nbhd(&self, g: &WeightedGraph, pid: usize) -> Vec<usize> {
        let me = &self.parts[&pid];
        self.adjacent_subs(g, &me.verts).into_iter().filter(|&s| self.sub(s).assigned.is_none()).collect()
    }

    fn effective_weight(&self, g: &WeightedGraph, pid: usize) -> i64 {
        self.parts[&pid].weight + self.unassigned_nbhd(g, pid).iter().map(|&s| self.sub(s).weight).sum::<i64>()
    }

    pub fn is_fully_balanced(&self, g: &WeightedGraph) -> bool {
        self.parts.keys().all(|&p| self.effective_weight(g, p) <= 3 * (self.lambda - 1))
    }

    /// A `[lambda, inf)`-CVP of V with one part per crown head, per head
    /// and per body part; leftover sub-component vertices join an adjacent
    /// part.
    pub fn outer_index_cvp(&self, g: &WeightedGraph) -> ConnectedPartition {
        let mut parts: Vec<Vec<usize>> = Vec::new();
        let mut owner = vec![usize::MAX; g.n()];
        let mut push = |set: Vec<usize>, owner: &mut Vec<usize>| {
            for &v in &set {
                owner[v] = parts.len();
            }
            parts.push(set);
        };
        let mut by_head: BTreeMap<usize, Vec<usize>> = self.hstar.iter().map(|&h| (h, vec![h])).collect();
        for (comp, h) in &self.crown {
            by_head.entry(*h).or_default().extend(comp);
        }
        for (_, set) in by_head {
            push(set, &mut owner);
        }
        for (h, subs) in self.assignment() {
            let mut set = vec![h];
            for s in subs {
                set.extend(&self.sub(s).verts);
            }
            push(set, &mut owner);
        }
        for p in self.parts.values() {
            push(p.verts.clone(), &mut owner);
        }
        let mut queue: VecDeque<usize> = (0..g.n()).filter(|&v| owner[v] != usize::MAX).collect();
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if owner[u] == usize::MAX {
                    owner[u] = owner[v];
                    parts[owner[v]].push(u);
                    queue.push_back(u);
                }
            }
        }
        for p in &mut parts {
            p.sort_unstable();
        }
        ConnectedPartition::cvp(parts)
    }

    /// Violations of the partially balanced decomposition invariants on
    /// the working graph, plus structural bookkeeping.
    pub fn violations(&self, g: &WeightedGraph) -> Vec<String> {
        let lam = self.lambda;
        let mut out = Vec::new();
        for (i, s) in self.live_subs() {
            if s.verts.iter().any(|&v| self.loc[v] != Loc::Sub(i)) {
                out.push(format!("sub {i}: location table out of sync"));
            }
            if !is_connected_set(g, &s.verts) {
                out.push(format!("sub {i} is not connected"));
            }
            if induced_weight(g, &s.verts) != s.weight {
                out.push(format!("sub {i}: cached weight stale"));
            }
        }
        for (&pid, p) in &self.parts {
            if p.verts.iter().any(|&v| self.loc[v] != Loc::Part(pid)) {
                out.push(format!("part {pid}: location table out of sync"));
            }
            if !is_connected_set(g, &p.verts) {
                out.push(format!("part {pid} is not connected"));
            }
            if p.weight < lam || induced_weight(g, &p.verts) != p.weight {
                out.push(format!("part {pid} weighs {} < lambda or cached weight stale", p.weight));
            }
        }
        for &h in self.heads.keys() {
            if self.loc[h] != Loc::Head {
                out.push(format!("head {h}: location table out of sync"));
            }
        }
        let comps = self.sub_components_private(g);
        let mut private = vec![false; g.n()];
        for (q, p) in &comps {
            let w = induced_weight(g, q);
            if w >= lam {
                out.push(format!("component condition: sub-component union at {} weighs {w}", q[0]));
            }
            if *p {
                q.iter().for_each(|&v| private[v] = true);
            }
        }
        for (i, s) in self.live_subs() {
            if let Some(h) = s.assigned {
                if !self.heads.contains_key(&h) || !self.touches(g, &s.verts, h) {
                    out.push(format!("g-neighbor: sub {i} assigned to non-adjacent or missing head {h}"));
                }
            }
        }
        for (h, assigned) in self.assignment() {
            if !self.heads.contains_key(&h) {
                continue;
            }
            let wg = g.weight(h) + assigned.iter().map(|&s| self.sub(s).weight).sum::<i64>();
            let gp = self.g_prime(h);
            if let Some(c) = gp {
                if self.sub(c).assigned == Some(h) || !self.touches(g, &self.sub(c).verts, h) {
                    out.push(format!("g'-neighbor: head {h} reserve {c} not a free neighbour"));
                }
            }
            if wg < 2 * lam - 1 || wg > 3 * lam - 3 {
                out.push(format!("g-weight: head {h} has {wg}"));
            }
            let nonpriv: Vec<usize> = assigned.iter().copied().filter(|&s| !private[self.sub(s).verts[0]]).collect();
            let gpw = gp.map_or(0, |c| self.sub(c).weight);
            if !nonpriv.is_empty() && wg + gpw < 3 * lam - 2 {
                out.push(format!("(g+g')-weight: head {h} has {}", wg + gpw));
            }
            if 2 * wg < 5 * (lam - 1) {
                for s in nonpriv {
                    if 2 * self.sub(s).weight < lam - 1 {
                        out.push(format!("half-lambda condition: head {h}, sub {s}"));
                    }
                }
            }
        }
        out
    }

    /// Violations of the weighted crown conditions for the accumulator and
    /// of the working-graph minimum component weight.
    pub fn crown_violations(&self, g: &WeightedGraph) -> Vec<String> {
        let lam = self.lambda;
        let mut out = Vec::new();
        let mut is_hstar = vec![false; g.n()];
        self.hstar.iter().for_each(|&h| is_hstar[h] = true);
        let mut in_crown = vec![false; g.n()];
        let mut load: BTreeMap<usize, i64> = self.hstar.iter().map(|&h| (h, g.weight(h))).collect();
        for (comp, h) in &self.crown {
            comp.iter().for_each(|&v| in_crown[v] = true);
            let w = induced_weight(g, comp);
            if w >= lam {
                out.push(format!("crown component at {} weighs {w}", comp[0]));
            }
            if !is_hstar[*h] || !self.touches(g, comp, *h) {
                out.push(format!("crown component at {} assigned to non-adjacent head {h}", comp[0]));
            }
            *load.entry(*h).or_default() += w;
        }
        for (comp, _) in &self.crown {
            for &v in comp {
                if let Some(&u) = g.neighbors(v).iter().find(|&&u| !in_crown[u] && !is_hstar[u]) {
                    out.push(format!("crown vertex {v} touches body vertex {u}"));
                }
            }
        }
        for (h, l) in load {
            if l < lam {
                out.push(format!("crown head {h} has load {l}"));
            }
        }
        let alive: Vec<bool> = self.loc.iter().map(|l| *l != Loc::Out).collect();
        for q in components_masked(g, &alive) {
            let w = induced_weight(g, &q);
            if w < lam {
                out.push(format!("working component at {} weighs {w}", q[0]));
            }
        }
        out
    }
}

/// Violations of the balanced crown decomposition conditions, plus the
/// bound `|H| + |R_parts| <= min(w(G)/lambda, n)`.
pub fn validate_bcd(g: &WeightedGraph, bcd: &BalancedCrownDecomposition) -> Vec<String> {
    let lam = bcd.lambda;
    let n = g.n();
    let mut out = Vec::new();
    // 0 = unset, 1 = C, 2 = H, 3 = R
    let mut side = vec![0u8; n];
    let r = bcd.r();
    for (set, tag) in [(&bcd.c, 1u8), (&bcd.h, 2), (&r, 3)] {
        for &v in set {
            if v >= n {
                out.push(format!("vertex {v} out of range"));
                return out;
            }
            if side[v] != 0 {
                out.push(format!("vertex {v} in two of C, H, R"));
            }
            side[v] = tag;
        }
    }
    if let Some(v) = side.iter().position(|&s| s == 0) {
        out.push(format!("vertex {v} not covered by C, H, R"));
    }
    for &v in &bcd.c {
        if let Some(&u) = g.neighbors(v).iter().find(|&&u| side[u] == 3) {
            out.push(format!("C-R edge ({v},{u})"));
        }
    }
    let mut load: BTreeMap<usize, i64> = bcd.h.iter().map(|&h| (h, g.weight(h))).collect();
    for comp in connected_components(g, &bcd.c) {
        let w = induced_weight(g, &comp);
        if w >= lam {
            out.push(format!("crown component at {} weighs {w} >= lambda", comp[0]));
        }
        let heads: BTreeSet<Option<&usize>> = comp.iter().map(|v| bcd.f.get(v)).collect();
        match heads.into_iter().collect::<Vec<_>>().as_slice() {
            [Some(&h)] => {
                if side.get(h) != Some(&2) || !comp.iter().any(|&v| g.has_edge(v, h)) {
                    out.push(format!("f maps component at {} to non-neighbour {h}", comp[0]));
                }
                *load.entry(h).or_default() += w;
            }
            _ => out.push(format!("f is not a single head on component at {}", comp[0])),
        }
    }
    for (h, l) in load {
        if l < lam {
            out.push(format!("head {h} under lambda: {l}"));
        }
    }
    let hi = 3 * lam - 3;
    for v in cvp_violations(g, &bcd.body_partition(), lam, Some(hi), &r) {
        out.push(format!("body: {v}"));
    }
    let k = std::cmp::min((g.total_weight() / lam) as usize, n);
    if bcd.size() > k {
        out.push(format!("|H| + |R| = {} exceeds {k}", bcd.size()));
    }
    out
}

struct Engine<'g> {
    g: &'g WeightedGraph,
    st: PbCodState,
    opts: BcdOptions,
    trace: Vec<TraceRecord>,
    stats: BcdStats,
    last: (usize, usize),
}

enum Flow {
    Continue,
    Cap,
}

impl<'g> Engine<'g> {
    fn lam(&self) -> i64 {
        self.st.lambda
    }

    fn after(&mut self, step: Step) -> Result<Flow, BcdError> {
        let (outer, inner) = (self.st.outer_index(), self.st.inner_index());
        if outer < self.last.0 {
            self.stats.outer_monotone = false;
        }
        if outer == self.last.0 && inner < self.last.1 {
            self.stats.inner_monotone = false;
        }
        self.last = (outer, inner);
        if self.opts.trace {
            self.trace.push(self.st.record(step));
        }
        if self.opts.check_invariants {
            let mut details = self.st.violations(self.g);
            details.extend(self.st.crown_violations(self.g));
            if !details.is_empty() {
                return Err(BcdError::InvariantViolated { step, details });
            }
        }
        match self.opts.outer_cap {
            Some(cap) if outer >= cap => Ok(Flow::Cap),
            _ => Ok(Flow::Continue),
        }
    }

    fn remove_heavy(&mut self) {
        let g = self.g;
        let lam = self.lam();
        let light: Vec<bool> = (0..g.n()).map(|v| g.weight(v) < lam).collect();
        for v in 0..g.n() {
            if !light[v] {
                self.st.hstar.push(v);
            }
        }
        for q in components_masked(g, &light) {
            if induced_weight(g, &q) >= lam {
                continue;
            }
            let h = q.iter().flat_map(|&v| g.neighbors(v)).copied().filter(|&u| !light[u]).min();
            // a light component without heavy neighbours would be a small
            // component of G, excluded by the precondition
            let h = h.expect("light component has a heavy neighbour");
            self.st.crown.push((q, h));
        }
    }

    fn init(&mut self) {
        let g = self.g;
        let mut alive = vec![true; g.n()];
        self.st.hstar.iter().for_each(|&h| alive[h] = false);
        for (q, _) in &self.st.crown {
            q.iter().for_each(|&v| alive[v] = false);
        }
        for q in components_masked(g, &alive) {
            let w = induced_weight(g, &q);
            self.st.add_part(q, w);
        }
    }

    /// Divide-or-cut until fully balanced. Returns `Cap` on early exit.
    fn divide_or_cut_phase(&mut self) -> Result<Flow, BcdError> {
        let g = self.g;
        let lam = self.lam();
        loop {
            let pick = self.st.parts.keys().copied().find_map(|pid| {
                let nb = self.st.unassigned_nbhd(g, pid);
                let w = self.st.parts[&pid].weight + nb.iter().map(|&s| self.st.sub(s).weight).sum::<i64>();
                (w >= 3 * lam - 2).then_some((pid, nb))
            });
            let Some((pid, nb)) = pick else { return Ok(Flow::Continue) };
            let mut set = self.st.parts[&pid].verts.clone();
            for &s in &nb {
                set.extend(&self.st.sub(s).verts);
            }
            set.sort_unstable();
            let res = divide_or_cut(g, &set, lam).map_err(|e| BcdError::Internal(e.to_string()))?;
            let step = match res {
                DivideOrCut::Divide { v1, v2 } => {
                    self.divide(pid, &nb, v1, v2)?;
                    Step::Divide
                }
                DivideOrCut::CutVertex(hc) => self.cut(pid, &nb, &set, hc)?,
            };
            if let Flow::Cap = self.after(step)? {
                return Ok(Flow::Cap);
            }
        }
    }

    fn divide(&mut self, pid: usize, nb: &[usize], v1: Vec<usize>, v2: Vec<usize>) -> Result<(), BcdError> {
        let g = self.g;
        self.stats.divides += 1;
        self.st.take_part(pid);
        for &s in nb {
            self.st.take_sub(s);
        }
        let (a, b) = if v1.iter().min() < v2.iter().min() { (v1, v2) } else { (v2, v1) };
        for set in [a, b] {
            let w = induced_weight(g, &set);
            ensure!(w >= self.lam(), "divide produced a light side");
            self.st.add_part(set, w);
        }
        self.dissolve_heads_wholesale();
        Ok(())
    }

    fn dissolve_heads_wholesale(&mut self) {
        let g = self.g;
        for (h, subs) in self.st.assignment() {
            let mut set = vec![h];
            for s in subs {
                set.extend(self.st.take_sub(s).verts);
            }
            let w = induced_weight(g, &set);
            self.st.add_part(set, w);
        }
        self.st.heads.clear();
    }

    fn cut(&mut self, pid: usize, nb: &[usize], set: &[usize], hc: usize) -> Result<Step, BcdError> {
        let g = self.g;
        let lam = self.lam();
        self.stats.cuts += 1;
        ensure!(self.st.parts[&pid].verts.binary_search(&hc).is_ok(), "cut vertex {hc} outside the chosen part");
        self.st.take_part(pid);
        for &s in nb {
            self.st.take_sub(s);
        }
        self.st.loc[hc] = Loc::Head;
        let rest: Vec<usize> = set.iter().copied().filter(|&v| v != hc).collect();
        let mut comps: Vec<(i64, Vec<usize>)> =
            connected_components(g, &rest).into_iter().map(|c| (induced_weight(g, &c), c)).collect();
        comps.sort_by(|a, b| b.0.cmp(&a.0).then(a.1[0].cmp(&b.1[0])));
        let mut acc = g.weight(hc);
        let mut i = None;
        for (j, (w, _)) in comps.iter().enumerate() {
            ensure!(*w < lam, "cut vertex leaves a heavy component");
            acc += w;
            if acc >= 3 * lam - 2 {
                i = Some(j);
                break;
            }
        }
        let Some(i) = i else {
            return Err(BcdError::Internal("cut prefix never reaches 3*lambda - 2".into()));
        };
        let reserve = comps[i].1[0];
        for (j, (w, c)) in comps.into_iter().enumerate() {
            self.st.add_sub(c, w, (j < i).then_some(hc));
        }
        self.st.heads.insert(hc, Some(reserve));
        let heavy = components_masked(g, &self.st.sub_mask()).into_iter().find(|q| induced_weight(g, q) >= lam);
        if let Some(qhat) = heavy {
            // not a valid decomposition until the cleanup has run
            if self.opts.trace {
                self.trace.push(self.st.record(Step::Cut));
            }
            self.cut_cleanup(&qhat)?;
            return Ok(Step::CutCleanup);
        }
        Ok(Step::Cut)
    }

    fn cut_cleanup(&mut self, qhat: &[usize]) -> Result<(), BcdError> {
        let g = self.g;
        let lam = self.lam();
        self.stats.cleanups += 1;
        let ids: BTreeSet<usize> = qhat
            .iter()
            .filter_map(|&v| match self.st.loc[v] {
                Loc::Sub(id) => Some(id),
                _ => None,
            })
            .collect();
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &s in &ids {
            let mut nb = self.st.adjacent_subs(g, &self.st.sub(s).verts);
            nb.remove(&s);
            adj.insert(s, nb);
        }
        // breadth-first spanning tree over the sub-component graph
        let root = *ids.iter().next().expect("non-empty component");
        let mut tree: BTreeMap<usize, BTreeSet<usize>> = ids.iter().map(|&s| (s, BTreeSet::new())).collect();
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            for &t in &adj[&s] {
                if seen.insert(t) {
                    tree.get_mut(&s).unwrap().insert(t);
                    tree.get_mut(&t).unwrap().insert(s);
                    queue.push_back(t);
                }
            }
        }
        ensure!(seen.len() == ids.len(), "sub-component graph of a component is disconnected");
        let mut total: i64 = ids.iter().map(|&s| self.st.sub(s).weight).sum();
        loop {
            if tree.len() < 2 {
                break;
            }
            let leaf = tree
                .iter()
                .find(|(s, nb)| nb.len() == 1 && total - self.st.sub(**s).weight >= lam)
                .map(|(s, _)| *s);
            let Some(leaf) = leaf else { break };
            let nb = tree.remove(&leaf).unwrap();
            for t in nb {
                tree.get_mut(&t).unwrap().remove(&leaf);
            }
            total -= self.st.sub(leaf).weight;
        }
        ensure!(total >= lam && total <= 2 * lam - 2, "pruned tree weighs {total}");
        let mut qprime = Vec::new();
        for &s in tree.keys() {
            qprime.extend(self.st.take_sub(s).verts);
        }
        self.st.add_part(qprime, total);

        let heads: Vec<usize> = self.st.heads.keys().copied().collect();
        let deficient: Vec<usize> = heads.iter().copied().filter(|&h| self.st.g_weight(g, h) < lam).collect();
        ensure!(deficient.len() <= 1, "more than one deficient head: {deficient:?}");
        let reserve = match deficient.first() {
            Some(&hd) => {
                let r = self.st.g_prime(hd);
                ensure!(r.is_some(), "deficient head {hd} has no reserve");
                r
            }
            None => None,
        };
        let assignment = self.st.assignment();
        for h in heads {
            let mut members: Vec<usize> = assignment[&h].iter().copied().filter(|&s| Some(s) != reserve).collect();
            if deficient.first() == Some(&h) {
                members.extend(reserve);
            }
            let mut set = vec![h];
            for s in members {
                set.extend(self.st.take_sub(s).verts);
            }
            let w = induced_weight(g, &set);
            ensure!(w >= lam, "head part at {h} weighs {w}");
            self.st.add_part(set, w);
        }
        self.st.heads.clear();
        let rest: Vec<usize> = self.st.live_subs().map(|(i, _)| i).collect();
        let mut verts = Vec::new();
        for s in rest {
            verts.extend(self.st.take_sub(s).verts);
        }
        for q in connected_components(g, &verts) {
            let w = induced_weight(g, &q);
            if w >= lam {
                self.st.add_part(q, w);
            } else {
                self.st.add_sub(q, w, None);
            }
        }
        Ok(())
    }

    /// Balanced expansion between heads and private components; returns the
    /// surviving private components with the head `f` chose for them.
    fn expansion(&mut self) -> Result<Vec<(Vec<usize>, usize)>, BcdError> {
        let g = self.g;
        let lam = self.lam();
        if self.st.heads.is_empty() {
            return Ok(Vec::new());
        }
        let heads: Vec<usize> = self.st.heads.keys().copied().collect();
        let index: BTreeMap<usize, usize> = heads.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let private: Vec<Vec<usize>> =
            self.st.sub_components_private(g).into_iter().filter(|(_, p)| *p).map(|(q, _)| q).collect();
        if private.is_empty() {
            return Ok(Vec::new());
        }
        let mut edges = BTreeSet::new();
        for (b, q) in private.iter().enumerate() {
            for &v in q {
                for &u in g.neighbors(v) {
                    if let Some(&a) = index.get(&u) {
                        edges.insert((a, b));
                    }
                }
            }
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        let bip = BipartiteWeighted::new(
            heads.iter().map(|&h| g.weight(h)).collect(),
            private.iter().map(|q| induced_weight(g, q)).collect(),
            &edges,
        )
        .map_err(|e| BcdError::Internal(e.to_string()))?;
        let be = balanced_expansion(&bip, 2 * lam - 1).map_err(|e| BcdError::Internal(e.to_string()))?;
        let h1: BTreeSet<usize> = be.a1.iter().map(|&a| heads[a]).collect();
        let mut survivors = Vec::new();
        for (b, q) in private.into_iter().enumerate() {
            let h = heads[be.f[b]];
            if h1.contains(&h) {
                let ids: BTreeSet<usize> = q
                    .iter()
                    .map(|&v| match self.st.loc[v] {
                        Loc::Sub(id) => id,
                        _ => unreachable!("private component vertex outside sub-components"),
                    })
                    .collect();
                for s in ids {
                    self.st.take_sub(s);
                }
                self.st.crown.push((q, h));
            } else {
                survivors.push((q, h));
            }
        }
        for &h in &h1 {
            self.st.heads.remove(&h);
            self.st.loc[h] = Loc::Out;
            self.st.hstar.push(h);
        }
        for s in self.st.subs.iter_mut().flatten() {
            if s.assigned.is_some_and(|h| h1.contains(&h)) {
                s.assigned = None;
            }
        }
        Ok(survivors)
    }

    /// Private assignment: assign-priv, merge-subcomp, fill-deficit.
    fn private_assignment(&mut self, priv_f: Vec<(Vec<usize>, usize)>) -> Result<(), BcdError> {
        let g = self.g;
        let lam = self.lam();
        let n_subs = self.st.subs.len();
        let g0: Vec<Option<usize>> = (0..n_subs).map(|i| self.st.subs[i].as_ref().and_then(|s| s.assigned)).collect();
        let g0_prime = self.st.heads.clone();
        let mut private = vec![false; g.n()];
        let mut f_of = vec![usize::MAX; g.n()];
        for (q, h) in &priv_f {
            for &v in q {
                private[v] = true;
                f_of[v] = *h;
            }
        }
        let is_priv = |st: &PbCodState, s: usize| private[st.sub(s).verts[0]];
        let priv_subs: Vec<usize> = self.st.live_subs().map(|(i, _)| i).filter(|&i| is_priv(&self.st, i)).collect();
        for s in self.st.subs.iter_mut().flatten() {
            s.assigned = if private[s.verts[0]] { Some(f_of[s.verts[0]]) } else { None };
        }

        // trees T_h over heads and private sub-components
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        enum Node {
            Head(usize),
            Sub(usize),
        }
        let mut sub_adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &s in &priv_subs {
            let mut nb = self.st.adjacent_subs(g, &self.st.sub(s).verts);
            nb.remove(&s);
            sub_adj.insert(s, nb);
        }
        let mut parent: BTreeMap<usize, Node> = BTreeMap::new();
        let mut children: BTreeMap<Node, BTreeSet<usize>> = BTreeMap::new();
        let heads: Vec<usize> = self.st.heads.keys().copied().collect();
        for &h in &heads {
            let mut queue = VecDeque::new();
            let mut roots: BTreeSet<usize> = BTreeSet::new();
            for &u in g.neighbors(h) {
                if let Loc::Sub(s) = self.st.loc[u] {
                    if self.st.sub(s).assigned == Some(h) {
                        roots.insert(s);
                    }
                }
            }
            for s in roots {
                if !parent.contains_key(&s) {
                    parent.insert(s, Node::Head(h));
                    children.entry(Node::Head(h)).or_default().insert(s);
                    queue.push_back(s);
                }
            }
            while let Some(s) = queue.pop_front() {
                for &t in &sub_adj[&s] {
                    if self.st.sub(t).assigned == Some(h) && !parent.contains_key(&t) {
                        parent.insert(t, Node::Sub(s));
                        children.entry(Node::Sub(s)).or_default().insert(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        ensure!(parent.len() == priv_subs.len(), "private sub-components not spanned by head trees");

        let mut gw: BTreeMap<usize, i64> = heads.iter().map(|&h| (h, self.st.g_weight(g, h))).collect();
        let mut moved_roots = BTreeSet::new();
        loop {
            let mut moved = false;
            for &h in &heads {
                if gw[&h] >= 2 * lam - 1 {
                    continue;
                }
                let cand = priv_subs.iter().copied().find(|&s| g0[s] == Some(h) && self.st.sub(s).assigned != Some(h));
                let Some(ct) = cand else { continue };
                ensure!(moved_roots.insert(ct), "sub-component {ct} chosen twice as a moved root");
                let from = self.st.sub(ct).assigned.expect("private sub-components stay assigned");
                let mut stack = vec![ct];
                while let Some(s) = stack.pop() {
                    let w = self.st.sub(s).weight;
                    *gw.get_mut(&from).unwrap() -= w;
                    *gw.get_mut(&h).unwrap() += w;
                    self.st.subs[s].as_mut().unwrap().assigned = Some(h);
                    stack.extend(children.get(&Node::Sub(s)).into_iter().flatten());
                }
                let p = parent.insert(ct, Node::Head(h)).unwrap();
                children.get_mut(&p).unwrap().remove(&ct);
                children.entry(Node::Head(h)).or_default().insert(ct);
                self.stats.subtree_moves += 1;
                moved = true;
                ensure!(gw[&h] <= 3 * lam - 3, "subtree move overfilled head {h}");
            }
            if !moved {
                break;
            }
        }

        // merge every head-child subtree into one sub-component
        for &h in &heads {
            let kids: Vec<usize> = children.get(&Node::Head(h)).into_iter().flatten().copied().collect();
            for c in kids {
                let mut verts = Vec::new();
                let mut weight = 0;
                let mut stack = vec![c];
                while let Some(s) = stack.pop() {
                    let sub = self.st.take_sub(s);
                    weight += sub.weight;
                    verts.extend(sub.verts);
                    stack.extend(children.get(&Node::Sub(s)).into_iter().flatten());
                }
                verts.sort_unstable();
                self.st.add_sub(verts, weight, Some(h));
            }
        }

        // fill deficits from the old non-private assignment
        for &h in &heads {
            let mut wg = self.st.g_weight(g, h);
            if wg >= 2 * lam - 1 {
                self.st.heads.insert(h, None);
                continue;
            }
            let mut old: Vec<usize> = (0..n_subs)
                .filter(|&s| g0[s] == Some(h) && self.st.subs[s].is_some() && !is_priv(&self.st, s))
                .collect();
            old.sort_by(|&a, &b| self.st.sub(b).weight.cmp(&self.st.sub(a).weight).then(a.cmp(&b)));
            let mut reserve = g0_prime.get(&h).copied().flatten();
            for s in old.iter().copied() {
                let w = self.st.sub(s).weight;
                if wg + w <= 3 * lam - 3 {
                    self.st.subs[s].as_mut().unwrap().assigned = Some(h);
                    wg += w;
                } else {
                    reserve = Some(self.st.sub(s).verts[0]);
                    break;
                }
            }
            self.st.heads.insert(h, reserve);
        }
        Ok(())
    }

    /// Merge unassigned sub-components into neighbours until each one is a
    /// whole component.
    fn merge_unassigned(&mut self) -> Result<(), BcdError> {
        let g = self.g;
        let lam = self.lam();
        let private = self.st.private_vertex_mask(g);
        let mut todo: BTreeSet<usize> =
            self.st.live_subs().filter(|(_, s)| s.assigned.is_none()).map(|(i, _)| i).collect();
        while let Some(c) = todo.pop_first() {
            if self.st.subs[c].as_ref().is_none_or(|s| s.assigned.is_some()) {
                continue;
            }
            let mut nb = self.st.adjacent_subs(g, &self.st.sub(c).verts);
            nb.remove(&c);
            let Some(&other) = nb.iter().next() else { continue };
            let a = self.st.take_sub(c);
            let b = self.st.take_sub(other);
            let mut verts = a.verts;
            verts.extend(b.verts);
            verts.sort_unstable();
            let id = self.st.add_sub(verts, a.weight + b.weight, b.assigned);
            self.stats.merges += 1;
            let Some(h) = b.assigned else {
                todo.insert(id);
                continue;
            };
            let mut wg = self.st.g_weight(g, h);
            if wg >= 3 * lam - 2 {
                let mut nonpriv: Vec<usize> =
                    self.st.assigned_to(h).into_iter().filter(|&s| !private[self.st.sub(s).verts[0]]).collect();
                nonpriv.sort_by(|&x, &y| self.st.sub(x).weight.cmp(&self.st.sub(y).weight).then(x.cmp(&y)));
                let mut last = None;
                for s in nonpriv {
                    if wg <= 3 * lam - 3 {
                        break;
                    }
                    wg -= self.st.sub(s).weight;
                    self.st.subs[s].as_mut().unwrap().assigned = None;
                    todo.insert(s);
                    last = Some(s);
                }
                ensure!(wg <= 3 * lam - 3, "shedding left head {h} at {wg}");
                self.st.heads.insert(h, last.map(|s| self.st.sub(s).verts[0]));
            }
        }
        Ok(())
    }

    fn finalize(&mut self) -> Result<BalancedCrownDecomposition, BcdError> {
        let g = self.g;
        let lam = self.lam();
        let mut taken = vec![false; g.n()];
        let mut r_parts = Vec::new();
        let pids: Vec<usize> = self.st.parts.keys().copied().collect();
        for pid in pids {
            let mut set = self.st.parts[&pid].verts.clone();
            for s in self.st.unassigned_nbhd(g, pid) {
                set.extend(&self.st.sub(s).verts);
            }
            set.retain(|&v| !taken[v]);
            set.iter().for_each(|&v| taken[v] = true);
            set.sort_unstable();
            r_parts.push(set);
        }
        for (h, subs) in self.st.assignment() {
            let mut set = vec![h];
            for s in subs {
                set.extend(&self.st.sub(s).verts);
            }
            set.sort_unstable();
            set.iter().for_each(|&v| taken[v] = true);
            r_parts.push(set);
        }
        for (i, l) in self.st.loc.iter().enumerate() {
            ensure!(*l == Loc::Out || taken[i], "vertex {i} left out of the body");
        }
        let mut c = Vec::new();
        let mut f = BTreeMap::new();
        for (q, h) in &self.st.crown {
            for &v in q {
                c.push(v);
                f.insert(v, *h);
            }
        }
        c.sort_unstable();
        let mut h = self.st.hstar.clone();
        h.sort_unstable();
        Ok(BalancedCrownDecomposition { lambda: lam, c, h, r_parts, f })
    }

    fn outcome_cap(self) -> BcdOutcome {
        BcdOutcome::CapHit { state: self.st, trace: self.trace, stats: self.stats }
    }
}

/// Compute a lambda-balanced crown decomposition, or stop early once the
/// outer index reaches `opts.outer_cap`.
pub fn find_bcd(g: &WeightedGraph, lambda: i64, opts: &BcdOptions) -> Result<BcdOutcome, BcdError> {
    if lambda <= 0 {
        return Err(BcdError::LambdaNonPositive(lambda));
    }
    for q in components_masked(g, &vec![true; g.n()]) {
        let w = induced_weight(g, &q);
        if w < lambda {
            return Err(BcdError::SmallComponent { vertex: q[0], weight: w });
        }
    }
    let mut e = Engine {
        g,
        st: PbCodState::new(g.n(), lambda),
        opts: opts.clone(),
        trace: Vec::new(),
        stats: BcdStats { outer_monotone: true, inner_monotone: true, ..Default::default() },
        last: (0, 0),
    };
    e.remove_heavy();
    // step I leaves the accumulator only; its checks run after init
    if e.opts.trace {
        e.trace.push(e.st.record(Step::RemoveHeavy));
    }
    e.init();
    if let Flow::Cap = e.after(Step::Init)? {
        return Ok(e.outcome_cap());
    }
    loop {
        e.stats.rounds += 1;
        if let Flow::Cap = e.divide_or_cut_phase()? {
            return Ok(e.outcome_cap());
        }
        let survivors = e.expansion()?;
        e.after(Step::Expansion)?;
        e.private_assignment(survivors)?;
        e.after(Step::PrivateAssign)?;
        e.merge_unassigned()?;
        e.after(Step::MergeUnassigned)?;
        if e.st.is_fully_balanced(g) {
            let bcd = e.finalize()?;
            if e.opts.trace {
                e.trace.push(e.st.record(Step::Finalize));
            }
            return Ok(BcdOutcome::Completed { bcd, trace: e.trace, stats: e.stats });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{grid, random_connected, random_tree};

    fn run(g: &WeightedGraph, lambda: i64) -> (BalancedCrownDecomposition, BcdStats) {
        match find_bcd(g, lambda, &BcdOptions::checked()).unwrap() {
            BcdOutcome::Completed { bcd, stats, .. } => (bcd, stats),
            BcdOutcome::CapHit { .. } => panic!("no cap was set"),
        }
    }

    fn engine(g: &WeightedGraph, lambda: i64) -> Engine<'_> {
        Engine {
            g,
            st: PbCodState::new(g.n(), lambda),
            opts: BcdOptions::checked(),
            trace: Vec::new(),
            stats: BcdStats::default(),
            last: (0, 0),
        }
    }

    #[test]
    fn tight_triangle() {
        for lambda in [2, 3, 5] {
            let g = WeightedGraph::new(vec![lambda - 1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
            let (bcd, _) = run(&g, lambda);
            assert!(bcd.c.is_empty() && bcd.h.is_empty());
            assert_eq!(bcd.r_parts, vec![vec![0, 1, 2]]);
            assert!(validate_bcd(&g, &bcd).is_empty());
        }
    }

    #[test]
    fn heavy_singleton_is_a_head() {
        let g = WeightedGraph::new(vec![4], &[]).unwrap();
        let (bcd, _) = run(&g, 3);
        assert_eq!(bcd.h, vec![0]);
        assert!(bcd.r_parts.is_empty());
        assert!(validate_bcd(&g, &bcd).is_empty());
    }

    #[test]
    fn heavy_star_center() {
        let g = WeightedGraph::new(vec![3, 1, 1, 1], &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (bcd, _) = run(&g, 3);
        assert_eq!(bcd.h, vec![0]);
        assert_eq!(bcd.c, vec![1, 2, 3]);
        assert!(bcd.f.values().all(|&h| h == 0));
    }

    #[test]
    fn crown_head_is_lowest_heavy_neighbour() {
        // light vertex 2 between heavy 0 and heavy 1
        let g = WeightedGraph::new(vec![5, 5, 1], &[(0, 2), (1, 2)]).unwrap();
        let (bcd, _) = run(&g, 3);
        assert_eq!(bcd.f[&2], 0);
    }

    #[test]
    fn errors() {
        let g = WeightedGraph::new(vec![1, 1], &[]).unwrap();
        assert_eq!(find_bcd(&g, 2, &BcdOptions::default()).unwrap_err(), BcdError::SmallComponent { vertex: 0, weight: 1 });
        assert_eq!(find_bcd(&g, 0, &BcdOptions::default()).unwrap_err(), BcdError::LambdaNonPositive(0));
    }

    #[test]
    fn divide_fixture_raises_outer_index() {
        let w = vec![1, 2, 2, 2, 2, 2, 2, 2, 2];
        let edges = [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8)];
        let g = WeightedGraph::new(w, &edges).unwrap();
        let mut e = engine(&g, 3);
        e.st.add_part(vec![3, 4, 5, 6], 8);
        e.st.add_part(vec![7, 8], 4);
        e.st.loc[0] = Loc::Head;
        e.st.heads.insert(0, None);
        e.st.add_sub(vec![1], 2, Some(0));
        e.st.add_sub(vec![2], 2, Some(0));
        assert_eq!(e.st.violations(&g), Vec::<String>::new());
        assert_eq!(e.st.outer_index(), 3);
        assert!(matches!(e.divide_or_cut_phase().unwrap(), Flow::Continue));
        assert_eq!(e.stats.divides, 1);
        assert_eq!(e.st.outer_index(), 4);
        assert!(e.st.heads.is_empty());
        assert!(e.st.body_parts().contains(&vec![0, 1, 2]));
        assert!(e.st.violations(&g).is_empty());
    }

    #[test]
    fn cut_fixture_prefix_rule() {
        // centre 0 of weight 1, three arms of weight lambda - 1
        let g = WeightedGraph::new(vec![1, 2, 2, 2], &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut e = engine(&g, 3);
        e.st.add_part(vec![0, 1, 2, 3], 7);
        e.divide_or_cut_phase().unwrap();
        assert_eq!(e.stats.cuts, 1);
        assert_eq!(e.st.heads, BTreeMap::from([(0, Some(3))]));
        let subs = e.st.sub_components();
        assert_eq!(subs, vec![(vec![1], Some(0)), (vec![2], Some(0)), (vec![3], None)]);
        assert!(e.st.violations(&g).is_empty());
        let (bcd, _) = run(&g, 3);
        assert_eq!((bcd.h.clone(), bcd.c.clone()), (vec![0], vec![1, 2, 3]));
    }

    #[test]
    fn cleanup_prunes_to_window() {
        let g = WeightedGraph::new(vec![2, 1, 2, 3], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut e = engine(&g, 3);
        e.st.add_sub(vec![0], 2, None);
        e.st.add_sub(vec![1], 1, None);
        e.st.add_sub(vec![2], 2, None);
        e.st.add_part(vec![3], 3);
        e.cut_cleanup(&[0, 1, 2]).unwrap();
        assert_eq!(e.st.body_parts(), vec![vec![3], vec![1, 2]]);
        assert_eq!(e.st.sub_components(), vec![(vec![0], None)]);
        assert!(e.st.violations(&g).is_empty());
    }

    #[test]
    fn merge_into_assigned_then_shed() {
        // head 0; A={1}, B={2} private, D={3} touches the part through C={4}
        let w = vec![1, 4, 4, 3, 1, 4, 4];
        let edges = [(0, 1), (0, 2), (0, 3), (0, 4), (3, 4), (4, 5), (5, 6)];
        let g = WeightedGraph::new(w, &edges).unwrap();
        let mut e = engine(&g, 5);
        e.st.add_part(vec![5, 6], 8);
        e.st.loc[0] = Loc::Head;
        e.st.heads.insert(0, Some(4));
        e.st.add_sub(vec![1], 4, Some(0));
        e.st.add_sub(vec![2], 4, Some(0));
        e.st.add_sub(vec![3], 3, Some(0));
        e.st.add_sub(vec![4], 1, None);
        assert_eq!(e.st.violations(&g), Vec::<String>::new());
        e.merge_unassigned().unwrap();
        assert_eq!(e.stats.merges, 1);
        assert_eq!(e.st.sub_components(), vec![(vec![1], Some(0)), (vec![2], Some(0)), (vec![3, 4], None)]);
        assert_eq!(e.st.g_prime(0).map(|s| e.st.sub(s).verts.clone()), Some(vec![3, 4]));
        assert_eq!(e.st.g_weight(&g, 0), 9);
        assert_eq!(e.st.violations(&g), Vec::<String>::new());
        assert!(e.st.is_fully_balanced(&g));
    }

    #[test]
    fn merge_unassigned_pair() {
        let g = WeightedGraph::new(vec![1, 1, 2, 2], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut e = engine(&g, 3);
        e.st.add_sub(vec![0], 1, None);
        e.st.add_sub(vec![1], 1, None);
        e.st.add_part(vec![2, 3], 4);
        e.merge_unassigned().unwrap();
        assert_eq!(e.st.sub_components(), vec![(vec![0, 1], None)]);
    }

    #[test]
    fn outer_index_partition_after_init() {
        let g = random_connected(12, 20, 3, 1);
        let mut e = engine(&g, 4);
        e.remove_heavy();
        e.init();
        let p = e.st.outer_index_cvp(&g);
        assert_eq!(p.len(), e.st.outer_index());
        let all: Vec<usize> = (0..g.n()).collect();
        assert!(cvp_violations(&g, &p, 4, None, &all).is_empty());
    }

    fn check_run(g: &WeightedGraph, lambda: i64) {
        let (bcd, stats) = run(g, lambda);
        let v = validate_bcd(g, &bcd);
        assert!(v.is_empty(), "lambda {lambda}: {v:?}");
        let k = std::cmp::min((g.total_weight() / lambda) as usize, g.n());
        assert!(stats.divides + stats.cuts <= k * k);
        assert!(stats.outer_monotone && stats.inner_monotone);
        for (h, set) in bcd.crown_of(g) {
            let _ = (h, set);
        }
    }

    #[test]
    fn small_random_sweep() {
        for seed in 0..150 {
            let n = 3 + (seed as usize % 12);
            let g = random_connected(n, n + seed as usize % 9, 3, seed);
            for lambda in 2..=5 {
                if g.total_weight() >= lambda {
                    check_run(&g, lambda);
                }
            }
        }
    }

    #[test]
    fn trees_and_grids() {
        for seed in 0..30 {
            let t = random_tree(40, 4, seed);
            let gr = grid(6, 7, 3, seed);
            for lambda in [3, 6, 11] {
                check_run(&t, lambda);
                check_run(&gr, lambda);
            }
        }
    }

    #[test]
    fn medium_random_sweep() {
        for seed in 0..40 {
            let g = random_connected(80, 80 + (seed as usize * 7) % 120, 6, 1000 + seed);
            for lambda in [4, 9, 17, 40] {
                check_run(&g, lambda);
            }
        }
    }

    #[test]
    fn cap_returns_partial_state() {
        let g = random_connected(60, 90, 3, 5);
        let opts = BcdOptions { outer_cap: Some(5), trace: true, check_invariants: true };
        match find_bcd(&g, 4, &opts).unwrap() {
            BcdOutcome::CapHit { state, trace, .. } => {
                assert!(state.outer_index() >= 5);
                let p = state.outer_index_cvp(&g);
                assert_eq!(p.len(), state.outer_index());
                let all: Vec<usize> = (0..g.n()).collect();
                assert!(cvp_violations(&g, &p, 4, None, &all).is_empty());
                assert!(!trace.is_empty());
            }
            BcdOutcome::Completed { .. } => panic!("cap of 5 should be reached"),
        }
    }

    #[test]
    fn validator_catches_injected_faults() {
        let g = WeightedGraph::new(vec![3, 1, 1, 2, 2], &[(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        let (bcd, _) = run(&g, 3);
        assert!(validate_bcd(&g, &bcd).is_empty());
        let mut bad = bcd.clone();
        bad.f.insert(1, 4);
        assert!(!validate_bcd(&g, &bad).is_empty());
        let mut light = BalancedCrownDecomposition {
            lambda: 3,
            c: vec![1],
            h: vec![2],
            r_parts: vec![vec![0, 3, 4]],
            f: BTreeMap::from([(1, 0)]),
        };
        let v = validate_bcd(&g, &light);
        assert!(v.iter().any(|s| s.contains("C-R edge")));
        light.f.insert(1, 2);
        assert!(validate_bcd(&g, &light).iter().any(|s| s.contains("under lambda") || s.contains("non-neighbour")));
    }
}

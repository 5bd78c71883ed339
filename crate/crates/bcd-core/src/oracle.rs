//! Brute-force ground truth for tiny instances, and certificate checks
//! written straight from the definitions. Nothing here calls into the
//! engine or the applications: only the graph type is shared.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::WeightedGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone)]
pub struct OracleBudget {
    pub max_vertices: usize,
    /// Cap on enumerated set partitions (or subsets).
    pub max_partitions: u64,
    pub time_cap: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 10, max_partitions: 50_000_000, time_cap: Duration::from_secs(60) }
    }
}

struct Meter<'a> {
    budget: &'a OracleBudget,
    start: Instant,
    count: u64,
}

impl<'a> Meter<'a> {
    fn new(g: &WeightedGraph, budget: &'a OracleBudget) -> Result<Self, OracleError> {
        if g.n() > budget.max_vertices || g.n() > 24 {
            return Err(OracleError::BudgetExceeded(format!("{} vertices > {}", g.n(), budget.max_vertices)));
        }
        Ok(Meter { budget, start: Instant::now(), count: 0 })
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.count += 1;
        if self.count > self.budget.max_partitions {
            return Err(OracleError::BudgetExceeded(format!("more than {} candidates", self.budget.max_partitions)));
        }
        if self.count % 4096 == 0 && self.start.elapsed() > self.budget.time_cap {
            return Err(OracleError::BudgetExceeded(format!("time cap {:?}", self.budget.time_cap)));
        }
        Ok(())
    }
}

/// Bitmask view of a small graph with a memo of connected subsets.
struct Small {
    n: usize,
    adj: Vec<u32>,
    w: Vec<i64>,
    conn: Vec<u8>,
}

impl Small {
    fn new(g: &WeightedGraph) -> Self {
        let n = g.n();
        let adj = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
        Small { n, adj, w: g.weights().to_vec(), conn: vec![0; 1usize << n] }
    }

    fn weight(&self, mask: u32) -> i64 {
        (0..self.n).filter(|&v| mask >> v & 1 == 1).map(|v| self.w[v]).sum()
    }

    fn connected(&mut self, mask: u32) -> bool {
        if mask == 0 {
            return false;
        }
        let slot = &mut self.conn[mask as usize];
        if *slot == 0 {
            let mut seen = 1u32 << mask.trailing_zeros();
            loop {
                let mut next = seen;
                for v in 0..self.n {
                    if seen >> v & 1 == 1 {
                        next |= self.adj[v] & mask;
                    }
                }
                if next == seen {
                    break;
                }
                seen = next;
            }
            *slot = if seen == mask { 1 } else { 2 };
        }
        *slot == 1
    }

    /// Masks of the components of `g[mask]`.
    fn components(&self, mask: u32) -> Vec<u32> {
        let mut rest = mask;
        let mut out = Vec::new();
        while rest != 0 {
            let mut comp = 1u32 << rest.trailing_zeros();
            loop {
                let mut next = comp;
                for v in 0..self.n {
                    if comp >> v & 1 == 1 {
                        next |= self.adj[v] & mask;
                    }
                }
                if next == comp {
                    break;
                }
                comp = next;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }
}

/// Every partition of V into exactly `k` connected parts, as part weights,
/// via restricted-growth strings.
fn for_each_connected_k_partition(
    g: &WeightedGraph,
    k: usize,
    budget: &OracleBudget,
    mut visit: impl FnMut(&[i64]),
) -> Result<bool, OracleError> {
    let mut meter = Meter::new(g, budget)?;
    let n = g.n();
    if k == 0 || k > n {
        return Ok(false);
    }
    let mut sm = Small::new(g);
    let mut label = vec![0usize; n];
    let mut found = false;
    // label[0] = 0; label[i] <= max(label[..i]) + 1, with exactly k labels
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        used: usize,
        k: usize,
        label: &mut Vec<usize>,
        sm: &mut Small,
        meter: &mut Meter,
        found: &mut bool,
        visit: &mut dyn FnMut(&[i64]),
    ) -> Result<(), OracleError> {
        let n = label.len();
        if n - i < k - used {
            return Ok(());
        }
        if i == n {
            meter.tick()?;
            let mut masks = vec![0u32; k];
            for (v, &l) in label.iter().enumerate() {
                masks[l] |= 1 << v;
            }
            if masks.iter().all(|&m| sm.connected(m)) {
                *found = true;
                let ws: Vec<i64> = masks.iter().map(|&m| sm.weight(m)).collect();
                visit(&ws);
            }
            return Ok(());
        }
        for l in 0..(used + 1).min(k) {
            label[i] = l;
            rec(i + 1, used.max(l + 1), k, label, sm, meter, found, visit)?;
        }
        Ok(())
    }
    rec(1, 1, k, &mut label, &mut sm, &mut meter, &mut found, &mut visit)?;
    Ok(found)
}

/// Largest possible minimum part weight over connected k-partitions.
pub fn oracle_maxmin(g: &WeightedGraph, k: usize, budget: &OracleBudget) -> Result<i64, OracleError> {
    let mut best = i64::MIN;
    let found = for_each_connected_k_partition(g, k, budget, |ws| {
        best = best.max(*ws.iter().min().unwrap());
    })?;
    if !found {
        return Err(OracleError::Infeasible(format!("no connected {k}-partition")));
    }
    Ok(best)
}

/// Smallest possible maximum part weight over connected k-partitions.
pub fn oracle_minmax(g: &WeightedGraph, k: usize, budget: &OracleBudget) -> Result<i64, OracleError> {
    let mut best = i64::MAX;
    let found = for_each_connected_k_partition(g, k, budget, |ws| {
        best = best.min(*ws.iter().max().unwrap());
    })?;
    if !found {
        return Err(OracleError::Infeasible(format!("no connected {k}-partition")));
    }
    Ok(best)
}

/// Minimum number of vertices whose removal leaves only components of
/// weight below `w_bound`.
pub fn oracle_wsep(g: &WeightedGraph, w_bound: i64, budget: &OracleBudget) -> Result<usize, OracleError> {
    let mut meter = Meter::new(g, budget)?;
    let sm = Small::new(g);
    let full: u32 = (1u32 << g.n()) - 1;
    let mut best = g.n();
    for s in 0..=full {
        meter.tick()?;
        let size = s.count_ones() as usize;
        if size >= best {
            continue;
        }
        if sm.components(full & !s).iter().all(|&c| sm.weight(c) < w_bound) {
            best = size;
        }
    }
    Ok(best)
}

/// Maximum number of disjoint connected sets of weight at least `w_bound`.
pub fn oracle_wpack(g: &WeightedGraph, w_bound: i64, budget: &OracleBudget) -> Result<usize, OracleError> {
    let mut meter = Meter::new(g, budget)?;
    let n = g.n();
    let mut sm = Small::new(g);
    let full: u32 = (1u32 << n) - 1;
    let mut heavy_by_min: Vec<Vec<u32>> = vec![Vec::new(); n];
    for m in 1..=full {
        meter.tick()?;
        if sm.weight(m) >= w_bound && sm.connected(m) {
            heavy_by_min[m.trailing_zeros() as usize].push(m);
        }
    }
    // best[avail] = max packing inside avail; the lowest available vertex is
    // either unused or the lowest vertex of one packed set
    let mut best = vec![0usize; 1usize << n];
    for avail in 1..=full {
        let v = avail.trailing_zeros() as usize;
        let mut b = best[(avail & !(1 << v)) as usize];
        for &t in &heavy_by_min[v] {
            if t & avail == t {
                b = b.max(1 + best[(avail & !t) as usize]);
            }
        }
        best[avail as usize] = b;
    }
    Ok(best[full as usize])
}

/// Which problem a partition claim solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MaxMin,
    MinMax,
}

/// A result record to check against its definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    Bcd { lambda: i64, c: Vec<usize>, h: Vec<usize>, r_parts: Vec<Vec<usize>>, f: BTreeMap<usize, usize> },
    /// Crown part of a decomposition: `H` separates `C` from the rest.
    Crown { w_bound: i64, c: Vec<usize>, h: Vec<usize>, f: BTreeMap<usize, usize> },
    Separator { w_bound: i64, s: Vec<usize> },
    Packing { w_bound: i64, sets: Vec<Vec<usize>> },
    Partition { k: usize, parts: Vec<Vec<usize>>, objective: Option<(Objective, i64)> },
    /// Edge partition; every edge is named by its endpoints.
    EdgePartition { k: usize, parts: Vec<Vec<(usize, usize)>>, edge_weights: BTreeMap<(usize, usize), i64>, objective: Option<i64> },
    /// Balanced expansion on the bipartite graph between `a_side` and the
    /// remaining vertices; `f` maps each B vertex to an A vertex.
    Expansion { q: i64, a_side: Vec<usize>, a1: Vec<usize>, f: BTreeMap<usize, usize> },
}

fn in_range(g: &WeightedGraph, sets: &[&[usize]], out: &mut Vec<String>) -> bool {
    for s in sets {
        if let Some(&v) = s.iter().find(|&&v| v >= g.n()) {
            out.push(format!("vertex {v} does not exist"));
            return false;
        }
    }
    true
}

fn weight(g: &WeightedGraph, s: &[usize]) -> i64 {
    s.iter().map(|&v| g.weight(v)).sum()
}

fn connected(g: &WeightedGraph, s: &[usize]) -> bool {
    let set: BTreeSet<usize> = s.iter().copied().collect();
    let Some(&start) = set.first() else { return false };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &u in g.neighbors(v) {
            if set.contains(&u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen.len() == set.len()
}

fn components(g: &WeightedGraph, s: &[usize]) -> Vec<Vec<usize>> {
    let set: BTreeSet<usize> = s.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &r in &set {
        if !seen.insert(r) {
            continue;
        }
        let mut comp = vec![r];
        let mut i = 0;
        while i < comp.len() {
            for &u in g.neighbors(comp[i]) {
                if set.contains(&u) && seen.insert(u) {
                    comp.push(u);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Disjointness and, if `cover`, exact coverage of V.
fn disjoint(g: &WeightedGraph, sets: &[Vec<usize>], cover: bool, out: &mut Vec<String>) {
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, s) in sets.iter().enumerate() {
        for &v in s {
            if let Some(j) = owner.insert(v, i) {
                out.push(format!("vertex {v} appears in sets {j} and {i}"));
            }
        }
    }
    if cover {
        if let Some(v) = (0..g.n()).find(|v| !owner.contains_key(v)) {
            out.push(format!("vertex {v} is not covered"));
        }
    }
}

/// Violations of the claim's defining conditions; empty iff it holds.
pub fn verify_result(g: &WeightedGraph, claim: &Claim) -> Vec<String> {
    let mut out = Vec::new();
    match claim {
        Claim::Bcd { lambda, c, h, r_parts, f } => {
            let mut sets: Vec<&[usize]> = vec![c, h];
            sets.extend(r_parts.iter().map(|p| p.as_slice()));
            if !in_range(g, &sets, &mut out) {
                return out;
            }
            let mut all = vec![c.clone(), h.clone()];
            all.extend(r_parts.iter().cloned());
            disjoint(g, &all, true, &mut out);
            crown_checks(g, *lambda, c, h, f, &mut out);
            for (i, p) in r_parts.iter().enumerate() {
                let w = weight(g, p);
                if !connected(g, p) {
                    out.push(format!("body part {i} is not connected"));
                }
                if w < *lambda || w > 3 * lambda - 3 {
                    out.push(format!("body part {i} weighs {w}, outside [{lambda}, {}]", 3 * lambda - 3));
                }
            }
        }
        Claim::Crown { w_bound, c, h, f } => {
            if !in_range(g, &[c, h], &mut out) {
                return out;
            }
            disjoint(g, &[c.clone(), h.clone()], false, &mut out);
            crown_checks(g, *w_bound, c, h, f, &mut out);
        }
        Claim::Separator { w_bound, s } => {
            if !in_range(g, &[s], &mut out) {
                return out;
            }
            let gone: BTreeSet<usize> = s.iter().copied().collect();
            let rest: Vec<usize> = (0..g.n()).filter(|v| !gone.contains(v)).collect();
            for comp in components(g, &rest) {
                let w = weight(g, &comp);
                if w >= *w_bound {
                    out.push(format!("component {comp:?} of weight {w} survives the separator"));
                }
            }
        }
        Claim::Packing { w_bound, sets } => {
            let refs: Vec<&[usize]> = sets.iter().map(|s| s.as_slice()).collect();
            if !in_range(g, &refs, &mut out) {
                return out;
            }
            disjoint(g, sets, false, &mut out);
            for (i, s) in sets.iter().enumerate() {
                if !connected(g, s) {
                    out.push(format!("set {i} is not connected"));
                }
                let w = weight(g, s);
                if w < *w_bound {
                    out.push(format!("set {i} weighs {w} < {w_bound}"));
                }
            }
        }
        Claim::Partition { k, parts, objective } => {
            let refs: Vec<&[usize]> = parts.iter().map(|s| s.as_slice()).collect();
            if !in_range(g, &refs, &mut out) {
                return out;
            }
            if parts.len() != *k {
                out.push(format!("{} parts, expected {k}", parts.len()));
            }
            disjoint(g, parts, true, &mut out);
            for (i, p) in parts.iter().enumerate() {
                if !connected(g, p) {
                    out.push(format!("part {i} is not connected"));
                }
            }
            if let Some((kind, value)) = objective {
                let ws = parts.iter().map(|p| weight(g, p));
                let actual = match kind {
                    Objective::MaxMin => ws.min(),
                    Objective::MinMax => ws.max(),
                };
                if actual != Some(*value) {
                    out.push(format!("objective {value} claimed, partition gives {actual:?}"));
                }
            }
        }
        Claim::EdgePartition { k, parts, edge_weights, objective } => {
            if parts.len() != *k {
                out.push(format!("{} parts, expected {k}", parts.len()));
            }
            let norm = |&(u, v): &(usize, usize)| (u.min(v), u.max(v));
            let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for (i, p) in parts.iter().enumerate() {
                for e in p {
                    let e = norm(e);
                    if !edge_weights.contains_key(&e) || e.1 >= g.n() || !g.has_edge(e.0, e.1) {
                        out.push(format!("part {i} names non-edge {e:?}"));
                        continue;
                    }
                    if let Some(j) = owner.insert(e, i) {
                        out.push(format!("edge {e:?} in parts {j} and {i}"));
                    }
                }
                let verts: BTreeSet<usize> = p.iter().flat_map(|&(u, v)| [u, v]).collect();
                let verts: Vec<usize> = verts.into_iter().filter(|&v| v < g.n()).collect();
                // connected as an edge set: its endpoints connected via its edges
                let sub = p.iter().map(norm).collect::<BTreeSet<_>>();
                if p.is_empty() || !edge_set_connected(&verts, &sub) {
                    out.push(format!("part {i} is not a connected edge set"));
                }
            }
            if let Some(e) = g.edges().find(|e| !owner.contains_key(e)) {
                out.push(format!("edge {e:?} is not covered"));
            }
            if let Some(value) = objective {
                let actual = parts.iter().map(|p| p.iter().map(|e| edge_weights.get(&norm(e)).copied().unwrap_or(0)).sum::<i64>()).min();
                if actual != Some(*value) {
                    out.push(format!("objective {value} claimed, partition gives {actual:?}"));
                }
            }
        }
        Claim::Expansion { q, a_side, a1, f } => {
            if !in_range(g, &[a_side, a1], &mut out) {
                return out;
            }
            let a: BTreeSet<usize> = a_side.iter().copied().collect();
            let a1: BTreeSet<usize> = a1.iter().copied().collect();
            if !a1.is_subset(&a) {
                out.push("A1 is not inside A".into());
            }
            let b: Vec<usize> = (0..g.n()).filter(|v| !a.contains(v)).collect();
            for &v in &b {
                if g.neighbors(v).iter().any(|u| !a.contains(u)) {
                    out.push(format!("vertex {v} has a neighbour on its own side"));
                }
            }
            let wmax_b = b.iter().map(|&v| g.weight(v)).max().unwrap_or(0);
            let mut load: BTreeMap<usize, i64> = a.iter().map(|&x| (x, g.weight(x))).collect();
            for &v in &b {
                match f.get(&v) {
                    Some(&x) if g.has_edge(v, x) && a.contains(&x) => *load.get_mut(&x).unwrap() += g.weight(v),
                    Some(&x) => out.push(format!("f({v}) = {x} is not a neighbour in A")),
                    None => out.push(format!("f({v}) is undefined")),
                }
            }
            for (&x, &l) in &load {
                if a1.contains(&x) && l < q - wmax_b + 1 {
                    out.push(format!("A1 vertex {x} has load {l} < {}", q - wmax_b + 1));
                }
                if !a1.contains(&x) && l > q + wmax_b - 1 {
                    out.push(format!("A2 vertex {x} has load {l} > {}", q + wmax_b - 1));
                }
            }
            for &v in &b {
                if f.get(&v).is_some_and(|x| a1.contains(x)) {
                    if let Some(u) = g.neighbors(v).iter().find(|u| !a1.contains(u)) {
                        out.push(format!("vertex {v} assigned into A1 has neighbour {u} outside A1"));
                    }
                }
            }
        }
    }
    out
}

fn edge_set_connected(verts: &[usize], edges: &BTreeSet<(usize, usize)>) -> bool {
    let Some(&start) = verts.first() else { return false };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let other = if a == v { b } else if b == v { a } else { continue };
            if seen.insert(other) {
                stack.push(other);
            }
        }
    }
    seen.len() == verts.len()
}

/// Crown conditions: no C-to-outside edge except into H, light crown
/// components, each component mapped to one adjacent head, heavy heads.
fn crown_checks(g: &WeightedGraph, lambda: i64, c: &[usize], h: &[usize], f: &BTreeMap<usize, usize>, out: &mut Vec<String>) {
    let cs: BTreeSet<usize> = c.iter().copied().collect();
    let hs: BTreeSet<usize> = h.iter().copied().collect();
    for &v in c {
        for &u in g.neighbors(v) {
            if !cs.contains(&u) && !hs.contains(&u) {
                out.push(format!("crown vertex {v} touches {u} outside the crown and head"));
            }
        }
    }
    let mut load: BTreeMap<usize, i64> = h.iter().map(|&x| (x, g.weight(x))).collect();
    for comp in components(g, c) {
        let w = weight(g, &comp);
        if w >= lambda {
            out.push(format!("crown component {comp:?} weighs {w} >= {lambda}"));
        }
        let heads: BTreeSet<Option<&usize>> = comp.iter().map(|v| f.get(v)).collect();
        match heads.into_iter().collect::<Vec<_>>().as_slice() {
            [Some(&x)] if hs.contains(&x) && comp.iter().any(|&v| g.has_edge(v, x)) => {
                *load.get_mut(&x).unwrap() += w;
            }
            _ => out.push(format!("crown component {comp:?} is not mapped to a single adjacent head")),
        }
    }
    for (x, l) in load {
        if l < lambda {
            out.push(format!("head {x} carries {l} < {lambda}"));
        }
    }
}

//! Seeded instance generators. All take a `u64` seed and are
//! deterministic across platforms (ChaCha8).

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expansion::BipartiteWeighted;
use crate::graph::WeightedGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weights(r: &mut ChaCha8Rng, n: usize, wmax: i64) -> Vec<i64> {
    (0..n).map(|_| r.random_range(1..=wmax.max(1))).collect()
}

/// Connected graph on `n` vertices with `m` edges (capped at the simple
/// maximum, floored at `n - 1`), weights uniform in `1..=wmax`.
pub fn random_connected(n: usize, m: usize, wmax: i64, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let w = weights(&mut r, n, wmax);
    WeightedGraph::new(w, &connected_edges(&mut r, n, m)).expect("generator emits simple edges")
}

fn connected_edges(r: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut set = BTreeSet::new();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, r.random_range(0..=i));
    }
    for i in 1..n {
        let j = r.random_range(0..i);
        let (a, b) = (perm[i], perm[j]);
        set.insert((a.min(b), a.max(b)));
    }
    let max = n * n.saturating_sub(1) / 2;
    let target = m.clamp(n.saturating_sub(1), max);
    while set.len() < target {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    set.into_iter().collect()
}

/// Random spanning tree with uniform weights.
pub fn random_tree(n: usize, wmax: i64, seed: u64) -> WeightedGraph {
    random_connected(n, 0, wmax, seed)
}

/// `rows x cols` grid graph with uniform random weights.
pub fn grid(rows: usize, cols: usize, wmax: i64, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let w = weights(&mut r, rows * cols, wmax);
    let mut edges = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                edges.push((v, v + 1));
            }
            if i + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    WeightedGraph::new(w, &edges).expect("grid is simple")
}

/// Possibly disconnected graph: every pair is an edge with probability `p`.
pub fn gnp(n: usize, p: f64, wmax: i64, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let w = weights(&mut r, n, wmax);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    WeightedGraph::new(w, &edges).expect("gnp is simple")
}

/// Bipartite instance with every B-vertex given at least one neighbour.
pub fn random_bipartite(na: usize, nb: usize, p: f64, a_wmax: i64, b_wmax: i64, seed: u64) -> BipartiteWeighted {
    let mut r = rng(seed);
    let aw: Vec<i64> = (0..na).map(|_| r.random_range(0..=a_wmax.max(0))).collect();
    let bw = weights(&mut r, nb, b_wmax);
    let mut edges = BTreeSet::new();
    for b in 0..nb {
        edges.insert((r.random_range(0..na), b));
        for a in 0..na {
            if r.random_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    BipartiteWeighted::new(aw, bw, &edges).expect("every b has a neighbour")
}

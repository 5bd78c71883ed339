//! Instances that once drove rarely used branches of the engine.

use bcd_core::bcd::{find_bcd, validate_bcd, BcdOptions, BcdOutcome, BcdStats};
use bcd_core::gen::{gnp, rng};
use bcd_core::graph::graph_components;
use bcd_core::WeightedGraph;
use rand::Rng;

fn fuzz_instance(seed: u64) -> (WeightedGraph, i64) {
    let n = 4 + (seed % 14) as usize;
    let lambda = 2 + (seed / 14 % 7) as i64;
    let p = [0.15, 0.25, 0.4][(seed % 3) as usize];
    (gnp(n, p, lambda - 1, seed), lambda)
}

fn run(g: &WeightedGraph, lambda: i64) -> BcdStats {
    match find_bcd(g, lambda, &BcdOptions::checked()).unwrap() {
        BcdOutcome::Completed { bcd, stats, .. } => {
            let v = validate_bcd(g, &bcd);
            assert!(v.is_empty(), "{v:?}");
            stats
        }
        BcdOutcome::CapHit { .. } => panic!("uncapped run hit a cap"),
    }
}

#[test]
fn subtree_moves() {
    for seed in [2947, 15592, 19441, 57925] {
        let (g, lambda) = fuzz_instance(seed);
        assert!(run(&g, lambda).subtree_moves > 0, "seed {seed}");
    }
}

#[test]
fn cut_cleanups() {
    for seed in [15789, 49102] {
        let (g, lambda) = fuzz_instance(seed);
        assert!(run(&g, lambda).cleanups > 0, "seed {seed}");
    }
}

/// Light hubs on a path or cycle, each carrying pendant paths, some of
/// which loop back to another hub. Produces deep crowns.
fn hubs(seed: u64, lambda: i64) -> WeightedGraph {
    let mut r = rng(seed);
    let k = r.random_range(2..8usize);
    let mut w = Vec::new();
    let mut e = Vec::new();
    for i in 0..k {
        w.push(r.random_range(1..lambda));
        if i > 0 {
            e.push((i - 1, i));
        }
    }
    if k > 2 && r.random_bool(0.5) {
        e.push((0, k - 1));
    }
    for h in 0..k {
        for _ in 0..r.random_range(1..6usize) {
            let mut prev = h;
            for _ in 0..r.random_range(1..4usize) {
                let v = w.len();
                w.push(r.random_range(1..lambda));
                e.push((prev, v));
                prev = v;
            }
            if r.random_bool(0.3) {
                let o = r.random_range(0..k);
                if o != h {
                    e.push((o, prev));
                }
            }
        }
    }
    e.sort_unstable();
    e.dedup();
    WeightedGraph::new(w, &e).unwrap()
}

#[test]
fn hub_graphs() {
    let mut crowns = 0;
    for lambda in [3, 5, 8] {
        for seed in 0..150 {
            let g = hubs(seed, lambda);
            if graph_components(&g).iter().any(|c| c.iter().map(|&v| g.weight(v)).sum::<i64>() < lambda) {
                continue;
            }
            let out = find_bcd(&g, lambda, &BcdOptions::checked()).unwrap();
            let bcd = out.bcd().unwrap();
            assert!(validate_bcd(&g, bcd).is_empty(), "seed {seed} lambda {lambda}");
            crowns += usize::from(!bcd.c.is_empty());
        }
    }
    assert!(crowns > 0);
}

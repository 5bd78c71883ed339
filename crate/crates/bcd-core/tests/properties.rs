use bcd_core::apps::{maxmin_bcp, minmax_bcp, wpack_approx, wpack_kernel, wsep_kernel, Verdict};
use bcd_core::bcd::{find_bcd, validate_bcd, BcdOptions};
use bcd_core::oracle::{oracle_maxmin, oracle_minmax, oracle_wpack, verify_result, Claim, OracleBudget};
use bcd_core::WeightedGraph;
use proptest::prelude::*;

/// Connected graph: a random spanning tree plus extra edges.
fn arb_connected(max_n: usize, wmax: i64) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
        let extra = prop::collection::vec((0..n, 0..n), 0..=n);
        let weights = prop::collection::vec(1..=wmax, n);
        (parents, extra, weights).prop_map(|(par, extra, w)| {
            let mut e: Vec<(usize, usize)> = par.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            e.extend(extra.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))));
            e.sort_unstable();
            e.dedup();
            WeightedGraph::new(w, &e).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bcd_is_valid(g in arb_connected(24, 5), lambda in 2i64..7) {
        prop_assume!(g.total_weight() >= lambda);
        let out = find_bcd(&g, lambda, &BcdOptions { trace: true, ..Default::default() }).unwrap();
        let bcd = out.bcd().unwrap();
        prop_assert!(validate_bcd(&g, bcd).is_empty());
        let claim = Claim::Bcd { lambda, c: bcd.c.clone(), h: bcd.h.clone(), r_parts: bcd.r_parts.clone(), f: bcd.f.clone() };
        prop_assert!(verify_result(&g, &claim).is_empty());
        let bound = std::cmp::min((g.total_weight() / lambda) as usize, g.n());
        prop_assert!(bcd.size() <= bound);
        prop_assert!(out.stats().outer_monotone);
        prop_assert!(out.stats().divides + out.stats().cuts <= bound * bound);
    }

    #[test]
    fn kernels_respect_weight_bound(g in arb_connected(20, 4), w in 2i64..6, k in 0i64..5) {
        let bound = 3 * k * (w - 1);
        for (r, sep) in [(wsep_kernel(&g, w, k).unwrap(), true), (wpack_kernel(&g, w, k).unwrap(), false)] {
            if r.verdict == Verdict::Reduced {
                prop_assert!(r.reduced_graph.total_weight() <= bound);
            } else {
                let sets = r.witness.clone().unwrap().parts;
                let n = sets.len() as i64;
                let v = verify_result(&g, &Claim::Packing { w_bound: w, sets });
                prop_assert!(v.is_empty());
                let enough = if sep { n > k } else { n >= k };
                prop_assert!(enough);
            }
        }
    }

    #[test]
    fn bcp_within_factor_three(g in arb_connected(8, 6), k in 1usize..4) {
        prop_assume!(g.n() >= k);
        let b = OracleBudget::default();
        let lo = maxmin_bcp(&g, k).unwrap().objective;
        let opt = oracle_maxmin(&g, k, &b).unwrap();
        prop_assert!(lo <= opt && 3 * lo >= opt);
        let hi = minmax_bcp(&g, k).unwrap().objective;
        let opt = oracle_minmax(&g, k, &b).unwrap();
        prop_assert!(hi >= opt && hi <= 3 * opt);
    }

    #[test]
    fn packing_within_factor_three(g in arb_connected(10, 3), w in 1i64..6) {
        let p = wpack_approx(&g, w).unwrap();
        let v = verify_result(&g, &Claim::Packing { w_bound: w, sets: p.parts.clone() });
        prop_assert!(v.is_empty());
        let opt = oracle_wpack(&g, w, &OracleBudget::default()).unwrap();
        prop_assert!(3 * p.len() >= opt && p.len() <= opt);
    }
}

//! The reference oracles checked against brute force: minimum cuts by
//! enumerating every s-t partition, maximum matchings by enumerating every
//! edge subset, distances by Floyd-Warshall, and SAT by literal-level search.

use dynred_core::instances::{gen_cnf, gen_tcstar};
use dynred_core::oracles::{
    apsp_bfs_oracle, max_flow_oracle, max_matching_oracle, sat_oracle, tcstar_oracle, BipartiteGraph, FlowNetwork,
    Side,
};
use proptest::prelude::*;

fn min_cut_brute(net: &FlowNetwork) -> i64 {
    let others: Vec<usize> = (0..net.node_count).filter(|&x| x != net.s && x != net.t).collect();
    let mut best = i64::MAX;
    for mask in 0u32..(1 << others.len()) {
        let mut source_side = vec![false; net.node_count];
        source_side[net.s] = true;
        for (bit, &x) in others.iter().enumerate() {
            source_side[x] = mask >> bit & 1 == 1;
        }
        let cut = net.arcs.iter().filter(|a| source_side[a.0] && !source_side[a.1]).map(|a| a.2).sum();
        best = best.min(cut);
    }
    best
}

fn matching_brute(g: &BipartiteGraph) -> usize {
    let m = g.edges.len();
    let mut best = 0;
    for mask in 0u32..(1 << m) {
        let mut used = vec![false; g.sides.len()];
        let mut ok = true;
        for (i, &(u, v)) in g.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if used[u] || used[v] {
                    ok = false;
                    break;
                }
                used[u] = true;
                used[v] = true;
            }
        }
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

fn network() -> impl Strategy<Value = FlowNetwork> {
    (2usize..=12).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0i64..9), 0..24).prop_map(move |arcs| FlowNetwork {
            node_count: n,
            arcs: arcs.into_iter().filter(|a| a.0 != a.1).collect(),
            s: 0,
            t: n - 1,
        })
    })
}

fn bipartite() -> impl Strategy<Value = BipartiteGraph> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(l, r)| {
        prop::collection::btree_set((0..l, 0..r), 0..=12).prop_map(move |pairs| BipartiteGraph {
            sides: (0..l).map(|_| Side::Left).chain((0..r).map(|_| Side::Right)).collect(),
            edges: pairs.into_iter().map(|(a, b)| (a, l + b)).collect(),
        })
    })
}

fn floyd(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(u, v) in edges {
        if u != v {
            d[u][v] = Some(1);
            d[v][u] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn max_flow_equals_min_cut(net in network()) {
        prop_assert_eq!(max_flow_oracle(&net).unwrap(), min_cut_brute(&net));
    }

    #[test]
    fn matching_oracle_equals_subset_search(g in bipartite()) {
        prop_assert_eq!(max_matching_oracle(&g).unwrap(), matching_brute(&g));
    }

    #[test]
    fn bfs_apsp_equals_floyd(n in 1usize..14, edges in prop::collection::vec((0usize..14, 0usize..14), 0..30)) {
        let edges: Vec<_> = edges.into_iter().filter(|e| e.0 < n && e.1 < n).collect();
        let report = apsp_bfs_oracle(n, &edges);
        let d = floyd(n, &edges);
        prop_assert_eq!(&report.dist, &d);
        let diameter = d.iter().flatten().try_fold(0, |acc, x| x.map(|x| acc.max(x)));
        prop_assert_eq!(report.diameter, diameter);
    }

    #[test]
    fn sat_oracle_matches_literal_backtracking(vars in 1usize..6, clauses in 1usize..14, seed in any::<u64>()) {
        let f = gen_cnf(2 * vars, clauses, 3.min(2 * vars), seed).unwrap();
        fn search(f: &dynred_core::instances::CnfFormula, assign: &mut Vec<Option<bool>>, var: usize) -> bool {
            let falsified = f.clauses().iter().any(|c| {
                c.iter().all(|l| assign[l.var].is_some_and(|v| v != l.positive))
            });
            if falsified {
                return false;
            }
            if var == assign.len() {
                return true;
            }
            for value in [false, true] {
                assign[var] = Some(value);
                if search(f, assign, var + 1) {
                    return true;
                }
            }
            assign[var] = None;
            false
        }
        let mut assign = vec![None; f.num_vars()];
        prop_assert_eq!(sat_oracle(&f).unwrap(), search(&f, &mut assign, 0));
    }

    #[test]
    fn triangle_oracle_matches_instance_query(n in 1usize..5, delta in 1usize..3, p in 1usize..3, density in 0.0f64..1.0, seed in any::<u64>()) {
        let inst = gen_tcstar(n, delta, p, density, seed).unwrap();
        let report = tcstar_oracle(&inst).unwrap();
        let mut expected = Vec::new();
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if !inst.has_triangle(i, a, b) {
                        expected.push((i, a, b));
                    }
                }
            }
        }
        prop_assert_eq!(report.answer, !expected.is_empty());
        prop_assert_eq!(report.witnesses, expected);
    }
}

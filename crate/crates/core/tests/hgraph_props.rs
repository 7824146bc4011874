use loose_hc::hgraph::Seed;
use loose_hc::models::binomial;
use loose_hc::{validate_loose_cycle, validate_loose_path, Hypergraph3, LooseCycle, LoosePath, VertexSet};
use proptest::prelude::*;

fn triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Graph on `n` vertices keeping each triple independently with probability `density`.
fn graph(max_n: usize, density: f64) -> impl Strategy<Value = Hypergraph3> {
    (3..=max_n).prop_flat_map(move |n| {
        let all = triples(n);
        proptest::collection::vec(proptest::bool::weighted(density), all.len()).prop_map(move |keep| {
            let edges = all.iter().zip(&keep).filter(|(_, &k)| k).map(|(e, _)| *e);
            Hypergraph3::new(n, edges).unwrap()
        })
    })
}

fn subset(n: usize) -> impl Strategy<Value = VertexSet> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|m| m.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn e_triple_matches_triple_loop((g, x, y, z) in graph(30, 0.05).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), subset(n), subset(n), subset(n))
    })) {
        let mut naive = 0;
        for a in x.iter() {
            for b in y.iter() {
                for c in z.iter() {
                    if a != b && b != c && a != c && g.has_edge(a, b, c) {
                        naive += 1;
                    }
                }
            }
        }
        prop_assert_eq!(g.e_triple(&x, &y, &z), naive);
    }

    #[test]
    fn pair_degree_is_common_neighbourhood((g, u, v, w) in graph(20, 0.2).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), 0..n, 0..n, subset(n))
    })) {
        prop_assume!(u != v);
        let rest = w.difference(&[u, v].into_iter().collect());
        let nb = g.neighborhood(Seed::Pair(u, v), &rest);
        prop_assert_eq!(g.deg_set(&[u, v], Some(&rest)).unwrap(), nb.len());
        let all = VertexSet::range(g.n());
        prop_assert_eq!(g.deg_set(&[u, v], None).unwrap(), g.neighborhood(Seed::Pair(u, v), &all).len());
    }

    #[test]
    fn serialization_round_trips(g in graph(16, 0.3)) {
        let text = g.to_text();
        let back = Hypergraph3::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        let json = g.to_json();
        let back = Hypergraph3::from_json(&json).unwrap();
        prop_assert_eq!(back.to_json(), json);
        prop_assert_eq!(back.edge_list(), g.edge_list());
    }

    #[test]
    fn cycle_validation_is_exactly_the_window_test((g, seq) in graph(12, 0.5).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 0..=n)
    }).prop_map(|(g, perm, k)| (g, perm[..k].to_vec()))) {
        let k = seq.len();
        let windows = k >= 6 && k % 2 == 0
            && (0..k).step_by(2).all(|i| g.has_edge(seq[i], seq[i + 1], seq[(i + 2) % k]));
        prop_assert_eq!(validate_loose_cycle(&g, &LooseCycle::new(seq.clone())).is_ok(), windows);
        if windows && k == g.n() {
            prop_assert_eq!(g.n() % 2, 0);
        }
        let path_windows = k % 2 == 1 && (0..k.saturating_sub(2)).step_by(2).all(|i| g.has_edge(seq[i], seq[i + 1], seq[i + 2]));
        prop_assert_eq!(validate_loose_path(&g, &LoosePath::new(seq.clone())).is_ok(), path_windows);
    }

    #[test]
    fn induced_subgraph_keeps_exactly_inner_edges((g, keep) in graph(14, 0.3).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), subset(n))
    })) {
        let (h, back) = g.induced(&keep);
        let expected = g.edges().filter(|e| e.iter().all(|&v| keep.contains(v))).count();
        prop_assert_eq!(h.edge_count(), expected);
        for [a, b, c] in h.edges() {
            prop_assert!(g.has_edge(back[a], back[b], back[c]));
        }
    }
}

#[test]
fn complete_graph_degrees() {
    for n in 3..=20 {
        let k = Hypergraph3::complete(n);
        assert_eq!(k.min_d_degree(1).unwrap() as u64, binomial(n - 1, 2));
        assert_eq!(k.min_d_degree(2).unwrap(), n - 2);
    }
}

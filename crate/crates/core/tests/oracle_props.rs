use loose_hc::models::{sample_h3np, ModelParams};
use loose_hc::oracle::{find_loose_hc_pipeline, has_loose_hc, Decision, PipelineConfig};
use loose_hc::{validate_loose_cycle, Hypergraph3};
use proptest::prelude::*;

/// Tries every cyclic order starting at vertex 0 and checks the windows directly.
fn naive_has_cycle(g: &Hypergraph3) -> bool {
    let n = g.n();
    if n < 6 || n % 2 == 1 {
        return false;
    }
    fn extend(g: &Hypergraph3, seq: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let n = g.n();
        let k = seq.len();
        if k >= 3 && k % 2 == 1 && !g.has_edge(seq[k - 3], seq[k - 2], seq[k - 1]) {
            return false;
        }
        if k == n {
            return g.has_edge(seq[n - 2], seq[n - 1], seq[0]);
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                seq.push(v);
                let ok = extend(g, seq, used);
                seq.pop();
                used[v] = false;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[0] = true;
    // vertex 0 is either a joint (first) or a middle vertex (second) of some cycle order
    if extend(g, &mut vec![0], &mut used) {
        return true;
    }
    (1..n).any(|s| {
        used[s] = true;
        let ok = extend(g, &mut vec![s, 0], &mut used);
        used[s] = false;
        ok
    })
}

fn random_graph(ns: &'static [usize]) -> impl Strategy<Value = Hypergraph3> {
    (proptest::sample::select(ns), 0.1f64..0.7, any::<u64>()).prop_map(|(n, p, seed)| sample_h3np(&ModelParams { n, p, seed }).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exhaustive_oracle_agrees_with_naive(g in random_graph(&[6, 8])) {
        let r = has_loose_hc(&g).unwrap();
        prop_assert!(r.exhaustive);
        prop_assert_eq!(r.decision == Decision::Yes, naive_has_cycle(&g));
        if let Some(w) = &r.witness {
            prop_assert!(validate_loose_cycle(&g, w).is_ok());
            prop_assert!(w.is_hamilton(g.n()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_edges_keeps_yes(g in random_graph(&[6, 8, 10]), extra in proptest::collection::vec((0usize..10, 0usize..10, 0usize..10), 1..8)) {
        let n = g.n();
        let add: Vec<[usize; 3]> = extra
            .into_iter()
            .map(|(a, b, c)| [a % n, b % n, c % n])
            .filter(|&[a, b, c]| a != b && b != c && a != c && !g.has_edge(a, b, c))
            .map(loose_hc::hgraph::sorted3)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let bigger = g.with_edges(&add).unwrap();
        let before = has_loose_hc(&g).unwrap().decision;
        let after = has_loose_hc(&bigger).unwrap().decision;
        prop_assert!(!(before == Decision::Yes && after == Decision::No));
    }

    #[test]
    fn odd_order_never_hamiltonian(g in random_graph(&[7, 9, 11])) {
        prop_assert_eq!(has_loose_hc(&g).unwrap().decision, Decision::No);
    }

    #[test]
    fn pipeline_yes_is_sound(g in random_graph(&[14]), seed in any::<u64>()) {
        let dense = sample_h3np(&ModelParams { n: g.n(), p: 0.9, seed }).unwrap();
        for h in [&g, &dense] {
            if let Ok(s) = find_loose_hc_pipeline(h, &PipelineConfig { seed, retries: 3, ..PipelineConfig::default() }) {
                prop_assert!(validate_loose_cycle(h, &s.cycle).is_ok());
                prop_assert!(s.cycle.is_hamilton(h.n()));
                prop_assert_eq!(has_loose_hc(h).unwrap().decision, Decision::Yes);
            }
        }
    }
}

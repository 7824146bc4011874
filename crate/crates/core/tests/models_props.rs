use loose_hc::models::{
    adversary_prune, check_concentration, extremal_codegree, extremal_degree, extremal_set_size, sample_h3np,
    AdversaryKind, AdversaryStrategy, ConcentrationConfig, LemmaId, ModelError, ModelParams,
};
use loose_hc::oracle::{has_loose_hc, Decision};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_is_reproducible(n in 3usize..40, p in 0.01f64..1.0, seed in any::<u64>()) {
        let params = ModelParams { n, p, seed };
        let a = sample_h3np(&params).unwrap();
        let b = sample_h3np(&params).unwrap();
        prop_assert_eq!(a.to_text(), b.to_text());
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn pruning_yields_a_subgraph(
        n in 8usize..30,
        p in 0.3f64..1.0,
        d in 1usize..=2,
        rate in 0.0f64..1.0,
        frac in 0.05f64..1.0,
        seed in any::<u64>(),
        extremal in any::<bool>(),
    ) {
        let h = sample_h3np(&ModelParams { n, p, seed }).unwrap();
        let kind = if extremal { AdversaryKind::ExtremalPattern } else { AdversaryKind::RandomThinning { removal_rate: rate } };
        let strategy = AdversaryStrategy { kind, d, target_fraction: frac, p };
        let out = match adversary_prune(&h, &strategy, seed ^ 1) {
            Ok(out) => out,
            Err(ModelError::InfeasibleFloor { set, degree, floor }) => {
                prop_assert_eq!(h.deg_set(&set, None).unwrap(), degree);
                prop_assert!(degree < floor);
                prop_assert_eq!(floor, strategy.floor(n));
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(out.graph.is_subgraph_of(&h));
        prop_assert_eq!(out.graph.n(), h.n());
        prop_assert_eq!(out.floor, strategy.floor(n));
        prop_assert_eq!(out.min_degree, out.graph.min_d_degree(d).unwrap());
        prop_assert_eq!(out.meets_floor, out.min_degree >= out.floor);
    }

    #[test]
    fn concentration_violations_bounded(n in 10usize..40, p in 0.05f64..0.6, trials in 1usize..40, seed in any::<u64>(), which in 0usize..4) {
        let lemma = [LemmaId::VaryingSizeSets, LemmaId::OneEdge, LemmaId::TwoEdge, LemmaId::GeneralEdge][which];
        let h = sample_h3np(&ModelParams { n, p, seed }).unwrap();
        let rep = check_concentration(&h, &ConcentrationConfig::new(lemma, 0.2, p, trials, seed)).unwrap();
        prop_assert!(rep.violations <= rep.trials);
        prop_assert!(rep.violation_fraction() <= 1.0);
    }
}

#[test]
fn extremal_instances_are_covered_and_non_hamiltonian() {
    for n in (8..=14).step_by(2) {
        for inst in [extremal_codegree(n).unwrap(), extremal_degree(n).unwrap()] {
            assert_eq!(inst.special.len(), extremal_set_size(n));
            for e in inst.graph.edges() {
                assert!(e.iter().any(|&v| inst.special.contains(v)), "edge {e:?} misses the special set");
            }
            // every vertex of the special set lies in at most two cycle edges, a Hamilton cycle has n/2
            assert!(2 * inst.special.len() < n / 2);
            let r = has_loose_hc(&inst.graph).unwrap();
            assert!(r.exhaustive);
            assert_eq!(r.decision, Decision::No, "n = {n}");
        }
    }
}

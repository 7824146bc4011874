use std::sync::OnceLock;

use loose_hc::absorb::{absorb, assemble_absorber, contract, m3_density, AbsorberAssembly, AbsorberParams, ContractionSpec, Origin};
use loose_hc::models::{sample_h3np, ModelParams};
use loose_hc::{validate_loose_path, Hypergraph3, VertexSet};
use num_rational::Rational64;
use proptest::prelude::*;

mod common;
use common::naive_m3;

/// Random linear 3-graph: candidate triples kept greedily while pairwise intersections stay at most one vertex.
fn linear(max_n: usize, max_e: usize) -> impl Strategy<Value = Hypergraph3> {
    (4..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 3), 0..=3 * max_e).prop_map(
            move |cands| {
                let mut kept: Vec<[usize; 3]> = Vec::new();
                for c in cands {
                    let t = [c[0], c[1], c[2]];
                    if kept.len() < max_e && kept.iter().all(|k| k.iter().filter(|v| t.contains(v)).count() <= 1) {
                        kept.push(t);
                    }
                }
                Hypergraph3::new(n, kept).unwrap()
            },
        )
    })
}

fn glue(h1: &Hypergraph3, h2: &Hypergraph3, at1: usize, at2: usize) -> Hypergraph3 {
    let n = h1.n() + h2.n() - 1;
    let map2 = |v: usize| if v == at2 { at1 } else { h1.n() + v - usize::from(v > at2) };
    let edges = h1.edges().chain(h2.edges().map(|e| e.map(map2)));
    Hypergraph3::new(n, edges).unwrap()
}

fn assembly() -> &'static (Hypergraph3, AbsorberAssembly) {
    static ASM: OnceLock<(Hypergraph3, AbsorberAssembly)> = OnceLock::new();
    ASM.get_or_init(|| {
        let g = Hypergraph3::complete(70);
        let r: VertexSet = (0..6).collect();
        let w: VertexSet = (56..70).collect();
        let asm = assemble_absorber(&g, &r, &w, &AbsorberParams::default()).unwrap();
        (g, asm)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn m3_matches_vertex_subset_enumeration(h in linear(10, 8)) {
        prop_assert!(h.is_linear());
        prop_assert_eq!(m3_density(&h).unwrap().value, naive_m3(&h));
    }

    #[test]
    fn gluing_at_one_vertex_does_not_raise_density((h1, h2, a, b) in (linear(6, 4), linear(6, 4)).prop_flat_map(|(h1, h2)| {
        let (n1, n2) = (h1.n(), h2.n());
        (Just(h1), Just(h2), 0..n1, 0..n2)
    })) {
        let h = glue(&h1, &h2, a, b);
        prop_assert!(h.is_linear());
        let bound = naive_m3(&h1).max(naive_m3(&h2)).max(Rational64::new(1, 2));
        prop_assert!(naive_m3(&h) <= bound);
    }
}

fn contraction_case() -> impl Strategy<Value = (Hypergraph3, ContractionSpec)> {
    (8usize..=30, 0.05f64..0.5, any::<u64>()).prop_flat_map(|(n, p, seed)| {
        let g = sample_h3np(&ModelParams { n, p, seed }).unwrap();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 1..=n / 4, 1..=n / 4).prop_map(|(g, perm, a, b)| {
            let u1: VertexSet = perm[..a].iter().copied().collect();
            let u2: VertexSet = perm[a..a + b].iter().copied().collect();
            let rest = &perm[a + b..];
            let tuples: Vec<[usize; 4]> = rest.chunks_exact(4).take(3).map(|c| [c[0], c[1], c[2], c[3]]).collect();
            (g, ContractionSpec { u1, u2, tuples })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn contraction_edges_are_exactly_the_certified_ones((g, spec) in contraction_case()) {
        let c = contract(&g, &spec).unwrap();
        let k = c.graph.n();
        prop_assert_eq!(k, spec.u1.len() + spec.u2.len() + spec.tuples.len());
        let certified = |x: usize, y: usize, z: usize| -> bool {
            let mut base = Vec::new();
            let mut tuple = None;
            for v in [x, y, z] {
                match c.origin[v] {
                    Origin::Vertex(u) => base.push(u),
                    Origin::Tuple(i) if tuple.is_none() => tuple = Some(i),
                    Origin::Tuple(_) => return false,
                }
            }
            match tuple {
                None => g.has_edge(base[0], base[1], base[2]),
                Some(i) => {
                    let t = spec.tuples[i];
                    let (u, v) = (base[0], base[1]);
                    (spec.u1.contains(u) && spec.u1.contains(v) && g.has_edge(t[1], u, v))
                        || (spec.u2.contains(u) && spec.u2.contains(v) && g.has_edge(t[3], u, v))
                }
            }
        };
        for x in 0..k {
            for y in x + 1..k {
                for z in y + 1..k {
                    prop_assert_eq!(c.graph.has_edge(x, y, z), certified(x, y, z), "triple {:?}", (x, y, z));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn absorbing_leaves_exactly_the_rest(mask in 0u8..64) {
        let (g, asm) = assembly();
        let rp: VertexSet = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        match absorb(asm, &rp) {
            Ok(path) => {
                prop_assert!(asm.admits(&rp).is_ok());
                prop_assert!(validate_loose_path(g, &path).is_ok());
                prop_assert_eq!((path.first(), path.last()), (asm.a, asm.b));
                prop_assert_eq!(path.vertex_set(), asm.total_vertices.difference(&rp));
                prop_assert_eq!(asm.r0.union(&asm.r.difference(&rp)).len() % 2, 0);
            }
            Err(_) => prop_assert!(asm.admits(&rp).is_err()),
        }
    }
}

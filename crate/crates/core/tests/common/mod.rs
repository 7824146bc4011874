#![allow(dead_code)]

use loose_hc::Hypergraph3;
use num_rational::Rational64;
use rand::Rng;

/// Max of `(e(S) - 1)/(|S| - 3)` over vertex subsets with `|S| >= 4`; 0 below four vertices.
pub fn naive_m3(h: &Hypergraph3) -> Rational64 {
    let n = h.n();
    if n < 4 {
        return Rational64::from_integer(0);
    }
    let edges = h.edge_list();
    let mut best: Option<Rational64> = None;
    for s in 0u32..1 << n {
        let v = s.count_ones() as i64;
        if v < 4 {
            continue;
        }
        let e = edges.iter().filter(|t| t.iter().all(|&x| s >> x & 1 == 1)).count() as i64;
        let val = Rational64::new(e - 1, v - 3);
        if best.is_none_or(|b| val > b) {
            best = Some(val);
        }
    }
    best.unwrap()
}

/// Greedy random linear 3-graph on `n` vertices with at most `max_e` edges.
pub fn random_linear(rng: &mut impl Rng, n: usize, max_e: usize) -> Hypergraph3 {
    let target = rng.gen_range(0..=max_e);
    let mut kept: Vec<[usize; 3]> = Vec::new();
    for _ in 0..50 * (max_e + 1) {
        if kept.len() >= target {
            break;
        }
        let mut t = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] {
            continue;
        }
        if kept.iter().all(|k| k.iter().filter(|v| t.contains(v)).count() <= 1) {
            kept.push(t);
        }
    }
    Hypergraph3::new(n, kept).unwrap()
}

/// Whether the graph on `keep` vertices with these edges has a perfect matching (plain recursion).
pub fn has_perfect_matching(keep: &[bool], edges: &[(usize, usize)]) -> bool {
    let Some(first) = keep.iter().position(|&k| k) else {
        return true;
    };
    for &(u, v) in edges {
        let other = if u == first { v } else if v == first { u } else { continue };
        if keep[other] {
            let mut rest = keep.to_vec();
            rest[first] = false;
            rest[other] = false;
            if has_perfect_matching(&rest, edges) {
                return true;
            }
        }
    }
    false
}

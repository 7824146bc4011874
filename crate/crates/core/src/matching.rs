//! Perfect matchings in ordinary graphs, via petgraph's blossom-based maximum matching.

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};

/// Perfect matching of the subgraph induced by `keep` (all vertices when `None`).
///
/// Returns pairs `(u, v)` with `u < v`, sorted, or `None` when no perfect matching exists.
pub fn perfect_matching(n: usize, edges: &[(usize, usize)], keep: Option<&[bool]>) -> Option<Vec<(usize, usize)>> {
    let alive = |v: usize| keep.is_none_or(|k| k[v]);
    let mut local = vec![usize::MAX; n];
    let mut global = Vec::new();
    for v in (0..n).filter(|&v| alive(v)) {
        local[v] = global.len();
        global.push(v);
    }
    if global.len() % 2 == 1 {
        return None;
    }
    let mut g: UnGraph<(), ()> = UnGraph::with_capacity(global.len(), edges.len());
    for _ in 0..global.len() {
        g.add_node(());
    }
    for &(u, v) in edges {
        if u != v && alive(u) && alive(v) {
            g.add_edge(NodeIndex::new(local[u]), NodeIndex::new(local[v]), ());
        }
    }
    let m = maximum_matching(&g);
    if !m.is_perfect() {
        return None;
    }
    let mut out: Vec<(usize, usize)> = m
        .edges()
        .map(|(a, b)| {
            let (a, b) = (global[a.index()], global[b.index()]);
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort_unstable();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let path4 = [(0, 1), (1, 2), (2, 3)];
        assert_eq!(perfect_matching(4, &path4, None), Some(vec![(0, 1), (2, 3)]));
        assert_eq!(perfect_matching(4, &path4, Some(&[false, true, true, false])), Some(vec![(1, 2)]));
        assert_eq!(perfect_matching(4, &path4, Some(&[true, false, false, true])), None);
        assert_eq!(perfect_matching(3, &[(0, 1), (1, 2), (0, 2)], None), None);
        assert_eq!(perfect_matching(0, &[], None), Some(vec![]));
        // two triangles joined by an edge, needs a blossom
        let e = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)];
        assert_eq!(perfect_matching(6, &e, None).map(|m| m.len()), Some(3));
    }
}

//! Long loose paths in tripartite 3-graphs (stack-based DFS) and a greedy almost-spanning
//! path cover.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hgraph::{validate_loose_path, Hypergraph3, LoosePath, VertexSet};
use crate::models::binomial;

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("invalid tripartite instance: {0}")]
    BadInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Host graph with parts `V1, V2, V3` of sizes `t, 2t, t` and supersaturation parameter `k`.
#[derive(Clone, Debug)]
pub struct TripartiteInstance<'a> {
    pub host: &'a Hypergraph3,
    pub v1: VertexSet,
    pub v2: VertexSet,
    pub v3: VertexSet,
    pub k: usize,
}

impl<'a> TripartiteInstance<'a> {
    pub fn new(host: &'a Hypergraph3, v1: VertexSet, v2: VertexSet, v3: VertexSet, k: usize) -> Result<Self, CoverError> {
        let bad = |m: &str| Err(CoverError::BadInstance(m.to_string()));
        if k == 0 {
            return bad("k must be at least 1");
        }
        if v1.len() != v3.len() || v2.len() != 2 * v1.len() {
            return bad("part sizes must be t, 2t, t");
        }
        if !v1.is_disjoint(&v2) || !v1.is_disjoint(&v3) || !v2.is_disjoint(&v3) {
            return bad("parts must be pairwise disjoint");
        }
        for part in [&v1, &v2, &v3] {
            if part.check_range(host.n()).is_err() {
                return bad("part vertex out of range");
            }
        }
        Ok(TripartiteInstance { host, v1, v2, v3, k })
    }

    pub fn t(&self) -> usize {
        self.v1.len()
    }

    /// Part index (1, 2, 3) per vertex, 0 outside the parts.
    fn parts(&self) -> Vec<u8> {
        let mut part = vec![0u8; self.host.n()];
        for (tag, set) in [(1u8, &self.v1), (2, &self.v2), (3, &self.v3)] {
            for v in set {
                part[v] = tag;
            }
        }
        part
    }

    /// Length the lemma promises when supersaturation holds.
    pub fn promised_length(&self) -> usize {
        (2 * self.t()).saturating_sub(4 * self.k)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DfsOutcome {
    /// Longest stack content seen during the run.
    pub longest: LoosePath,
    /// Stack content when the run ended.
    pub last: LoosePath,
    pub iterations: usize,
}

/// Stack procedure: push a start vertex of `V1 ∪ V3` when the stack is empty, extend by
/// the lexicographically smallest `(v, w)` with `v ∈ V2`, `w` in the opposite outer part,
/// and otherwise retire the top one or two vertices.
pub fn dfs_tripartite_run(inst: &TripartiteInstance) -> DfsOutcome {
    let g = inst.host;
    let part = inst.parts();
    let mut unvisited: Vec<bool> = part.iter().map(|&p| p != 0).collect();
    let mut outer_left: usize = inst.v1.len() + inst.v3.len();
    let mut stack: Vec<usize> = Vec::new();
    let mut best: Vec<usize> = Vec::new();
    let mut iterations = 0;
    while outer_left > 0 {
        iterations += 1;
        if stack.is_empty() {
            let start = (0..g.n()).find(|&v| unvisited[v] && (part[v] == 1 || part[v] == 3)).unwrap();
            unvisited[start] = false;
            outer_left -= 1;
            stack.push(start);
        } else {
            let top = *stack.last().unwrap();
            let target = 4 - part[top];
            let mut choice: Option<(usize, usize)> = None;
            for (a, b) in g.link(top) {
                for (v, w) in [(a, b), (b, a)] {
                    if unvisited[v] && unvisited[w] && part[v] == 2 && part[w] == target
                        && choice.is_none_or(|c| (v, w) < c) {
                            choice = Some((v, w));
                        }
                }
            }
            match choice {
                Some((v, w)) => {
                    unvisited[v] = false;
                    unvisited[w] = false;
                    outer_left -= 1;
                    stack.push(v);
                    stack.push(w);
                }
                None if stack.len() >= 3 => {
                    stack.truncate(stack.len() - 2);
                }
                None => {
                    stack.pop();
                }
            }
        }
        let c1 = stack.iter().filter(|&&v| part[v] == 1).count();
        let c3 = stack.iter().filter(|&&v| part[v] == 3).count();
        assert!(c1.abs_diff(c3) <= 1, "outer parts unbalanced on the stack");
        if stack.len() > best.len() {
            best = stack.clone();
        }
    }
    if best.is_empty() {
        if let Some(v) = inst.v1.iter().chain(inst.v3.iter()).next() {
            best.push(v);
        }
    }
    DfsOutcome { longest: LoosePath::new(best), last: LoosePath::new(stack), iterations }
}

/// Longest loose path produced by the stack procedure.
pub fn dfs_tripartite_path(inst: &TripartiteInstance) -> LoosePath {
    dfs_tripartite_run(inst).longest
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Supersaturation {
    Holds,
    Violated { x1: Vec<usize>, x2: Vec<usize>, x3: Vec<usize> },
    Unchecked { combinations: u128 },
}

pub const SUPERSATURATION_LIMIT: u128 = 100_000_000;

/// Calls `f` on every `k`-subset of `items` (lexicographic); stops when `f` returns false.
pub(crate) fn for_each_combination(items: &[usize], k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let n = items.len();
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<usize> = idx.iter().map(|&i| items[i]).collect();
    loop {
        if !f(&buf) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..k {
            buf[j] = items[idx[j]];
        }
    }
}

/// Exhaustively tests that every choice of k-sets, one per part, spans a crossing edge.
pub fn check_supersaturation(inst: &TripartiteInstance) -> Supersaturation {
    let t = inst.t();
    let k = inst.k;
    let combos = (binomial(t, k) as u128).pow(2) * binomial(2 * t, k) as u128;
    if combos > SUPERSATURATION_LIMIT {
        return Supersaturation::Unchecked { combinations: combos };
    }
    let g = inst.host;
    let v1 = inst.v1.to_vec();
    let v2 = inst.v2.to_vec();
    let v3 = inst.v3.to_vec();
    let in_v2 = inst.v2.mask(g.n());
    let mut witness = None;
    for_each_combination(&v1, k, |x1| {
        for_each_combination(&v3, k, |x3| {
            let mut hit = vec![false; g.n()];
            for &a in x1 {
                for &c in x3 {
                    for &b in g.common(a, c) {
                        if in_v2[b as usize] {
                            hit[b as usize] = true;
                        }
                    }
                }
            }
            let free: Vec<usize> = v2.iter().copied().filter(|&b| !hit[b]).take(k).collect();
            if free.len() == k {
                witness = Some((x1.to_vec(), free, x3.to_vec()));
                return false;
            }
            true
        });
        witness.is_none()
    });
    match witness {
        None => Supersaturation::Holds,
        Some((x1, x2, x3)) => Supersaturation::Violated { x1, x2, x3 },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCoverConfig {
    pub rho: f64,
    pub backtrack_depth: usize,
    /// Search nodes allowed per backtracking attempt.
    pub node_budget: usize,
}

impl Default for PathCoverConfig {
    fn default() -> Self {
        PathCoverConfig { rho: 0.25, backtrack_depth: 3, node_budget: 20_000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathCover {
    pub paths: Vec<LoosePath>,
    pub covered: VertexSet,
    /// `floor(rho * n)`.
    pub budget: usize,
    pub within_budget: bool,
}

pub fn greedy_path_cover(g: &Hypergraph3, rho: f64) -> Result<PathCover, CoverError> {
    let cfg = PathCoverConfig { rho, ..PathCoverConfig::default() };
    greedy_path_cover_within(g, &VertexSet::range(g.n()), &cfg)
}

struct Grower<'a> {
    g: &'a Hypergraph3,
    free: Vec<bool>,
    /// `pair_free[u * n + v]`: free common neighbours of `u` and `v`.
    pair_free: Vec<u32>,
    /// Free pairs in the link of each vertex.
    link_free: Vec<usize>,
    free_count: usize,
}

impl<'a> Grower<'a> {
    fn new(g: &'a Hypergraph3, free: Vec<bool>) -> Self {
        let n = g.n();
        let mut pair_free = vec![0u32; n * n];
        let mut link_free = vec![0usize; n];
        for e in g.edges() {
            for (i, &c) in e.iter().enumerate() {
                if free[c] {
                    let (u, v) = (e[(i + 1) % 3], e[(i + 2) % 3]);
                    pair_free[u * n + v] += 1;
                    pair_free[v * n + u] += 1;
                }
            }
            for i in 0..3 {
                let (u, v) = (e[(i + 1) % 3], e[(i + 2) % 3]);
                if free[u] && free[v] {
                    link_free[e[i]] += 1;
                }
            }
        }
        let free_count = free.iter().filter(|&&f| f).count();
        Grower { g, free, pair_free, link_free, free_count }
    }

    fn take(&mut self, v: usize) {
        let n = self.g.n();
        debug_assert!(self.free[v]);
        for j in 0..n {
            self.link_free[j] -= self.pair_free[j * n + v] as usize;
        }
        self.free[v] = false;
        self.free_count -= 1;
        for (x, y) in self.g.link(v) {
            self.pair_free[x * n + y] -= 1;
            self.pair_free[y * n + x] -= 1;
        }
    }

    fn release(&mut self, v: usize) {
        let n = self.g.n();
        debug_assert!(!self.free[v]);
        for (x, y) in self.g.link(v) {
            self.pair_free[x * n + y] += 1;
            self.pair_free[y * n + x] += 1;
        }
        self.free[v] = true;
        self.free_count += 1;
        for j in 0..n {
            self.link_free[j] += self.pair_free[j * n + v] as usize;
        }
    }

    /// Flips the flag only; counts go stale until the flag is restored.
    fn mark(&mut self, v: usize, free: bool) {
        self.free[v] = free;
        if free {
            self.free_count += 1;
        } else {
            self.free_count -= 1;
        }
    }

    /// Free pairs in the link of `j` avoiding the free vertex `m`.
    fn onward(&self, j: usize, m: usize) -> usize {
        self.link_free[j] - self.pair_free[j * self.g.n() + m] as usize
    }

    /// Extension `(middle, new_end)` from `end`, preferring the new end with the fewest
    /// positive onward options.
    fn choose(&self, end: usize) -> Option<(usize, usize)> {
        let mut best: Option<((bool, usize, usize, usize), (usize, usize))> = None;
        for (a, b) in self.g.link(end) {
            if !(self.free[a] && self.free[b]) {
                continue;
            }
            for (m, j) in [(a, b), (b, a)] {
                let o = self.onward(j, m);
                let key = (o == 0, o, m, j);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, (m, j)));
                }
            }
        }
        best.map(|(_, e)| e)
    }

    fn candidates(&self, end: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if self.free_count * self.free_count < 2 * self.g.degree(end) {
            let open: Vec<usize> = (0..self.g.n()).filter(|&v| self.free[v]).collect();
            for (i, &a) in open.iter().enumerate() {
                for &b in &open[i + 1..] {
                    if self.g.has_edge(end, a, b) {
                        out.push((a, b));
                        out.push((b, a));
                    }
                }
            }
        } else {
            for (a, b) in self.g.link(end) {
                if self.free[a] && self.free[b] {
                    out.push((a, b));
                    out.push((b, a));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Depth-first search for `steps` consecutive extensions from `end`.
    fn search(&mut self, end: usize, steps: usize, budget: &mut usize, acc: &mut Vec<(usize, usize)>) -> bool {
        if steps == 0 {
            return true;
        }
        for (m, j) in self.candidates(end) {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            self.mark(m, false);
            self.mark(j, false);
            acc.push((m, j));
            if self.search(j, steps - 1, budget, acc) {
                return true;
            }
            acc.pop();
            self.mark(m, true);
            self.mark(j, true);
        }
        false
    }

    /// Drops up to `depth` edges at one end and looks for a strictly longer continuation.
    fn improve(&mut self, path: &mut VecDeque<usize>, back: bool, depth: usize, node_budget: usize) -> bool {
        for r in 1..=depth {
            if path.len() < 2 * r + 1 {
                break;
            }
            let mut removed = Vec::with_capacity(2 * r);
            for _ in 0..2 * r {
                let v = if back { path.pop_back() } else { path.pop_front() }.unwrap();
                self.release(v);
                removed.push(v);
            }
            let end = if back { *path.back().unwrap() } else { *path.front().unwrap() };
            let mut budget = node_budget;
            let mut acc = Vec::new();
            if self.search(end, r + 1, &mut budget, &mut acc) {
                for &(m, j) in &acc {
                    // the search only flipped flags; redo the bookkeeping
                    self.mark(m, true);
                    self.mark(j, true);
                    self.take(m);
                    self.take(j);
                }
                for (m, j) in acc {
                    if back {
                        path.push_back(m);
                        path.push_back(j);
                    } else {
                        path.push_front(m);
                        path.push_front(j);
                    }
                }
                return true;
            }
            for &v in removed.iter().rev() {
                self.take(v);
                if back {
                    path.push_back(v);
                } else {
                    path.push_front(v);
                }
            }
        }
        false
    }
}

/// Greedy double-ended growth of loose paths covering exactly `allowed`.
pub fn greedy_path_cover_within(
    g: &Hypergraph3,
    allowed: &VertexSet,
    cfg: &PathCoverConfig,
) -> Result<PathCover, CoverError> {
    if !(cfg.rho > 0.0 && cfg.rho <= 1.0) {
        return Err(CoverError::InvalidParameter(format!("rho must lie in (0, 1], got {}", cfg.rho)));
    }
    if allowed.check_range(g.n()).is_err() {
        return Err(CoverError::InvalidParameter("allowed set out of range".into()));
    }
    let mut grower = Grower::new(g, allowed.mask(g.n()));
    let mut paths = Vec::new();
    while let Some(start) = (0..g.n()).find(|&v| grower.free[v]) {
        grower.take(start);
        let mut path: VecDeque<usize> = VecDeque::from([start]);
        loop {
            let mut grew = false;
            for back in [true, false] {
                let end = if back { *path.back().unwrap() } else { *path.front().unwrap() };
                if let Some((m, j)) = grower.choose(end) {
                    grower.take(m);
                    grower.take(j);
                    if back {
                        path.push_back(m);
                        path.push_back(j);
                    } else {
                        path.push_front(m);
                        path.push_front(j);
                    }
                    grew = true;
                }
            }
            if grew {
                continue;
            }
            if cfg.backtrack_depth > 0
                && (grower.improve(&mut path, true, cfg.backtrack_depth, cfg.node_budget)
                    || grower.improve(&mut path, false, cfg.backtrack_depth, cfg.node_budget))
            {
                continue;
            }
            break;
        }
        paths.push(LoosePath::new(path.into_iter().collect()));
    }
    let mut covered = VertexSet::new();
    for p in &paths {
        assert!(validate_loose_path(g, p).is_ok(), "cover produced an invalid path");
        for &v in &p.vertices {
            assert!(covered.insert(v), "cover paths overlap at {v}");
        }
    }
    assert_eq!(&covered, allowed, "cover does not match the target set");
    let budget = (cfg.rho * g.n() as f64).floor() as usize;
    Ok(PathCover { within_budget: paths.len() <= budget, paths, covered, budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_tripartite(t: usize) -> (Hypergraph3, VertexSet, VertexSet, VertexSet) {
        let v1: Vec<usize> = (0..t).collect();
        let v2: Vec<usize> = (t..3 * t).collect();
        let v3: Vec<usize> = (3 * t..4 * t).collect();
        let mut edges = Vec::new();
        for &a in &v1 {
            for &b in &v2 {
                for &c in &v3 {
                    edges.push([a, b, c]);
                }
            }
        }
        (Hypergraph3::new(4 * t, edges).unwrap(), v1.into(), v2.into(), v3.into())
    }

    fn assert_structure(inst: &TripartiteInstance, p: &LoosePath) {
        assert!(validate_loose_path(inst.host, p).is_ok());
        for (i, &v) in p.vertices.iter().enumerate() {
            if i % 2 == 1 {
                assert!(inst.v2.contains(v));
            } else {
                assert!(inst.v1.contains(v) || inst.v3.contains(v));
            }
        }
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut seen = Vec::new();
        for_each_combination(&[1, 2, 3, 4], 2, |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![1, 2]);
        assert_eq!(seen[5], vec![3, 4]);
        let mut count = 0;
        for_each_combination(&[1, 2, 3], 3, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn complete_tripartite_path() {
        let (g, v1, v2, v3) = complete_tripartite(4);
        let inst = TripartiteInstance::new(&g, v1, v2, v3, 1).unwrap();
        assert_eq!(check_supersaturation(&inst), Supersaturation::Holds);
        let p = dfs_tripartite_path(&inst);
        assert!(p.len() >= 4);
        assert_structure(&inst, &p);
    }

    #[test]
    fn edgeless_instance() {
        let g = Hypergraph3::empty(12);
        let inst = TripartiteInstance::new(&g, (0..3).collect(), (3..9).collect(), (9..12).collect(), 1).unwrap();
        let p = dfs_tripartite_path(&inst);
        assert_eq!(p.len(), 0);
        assert!(matches!(check_supersaturation(&inst), Supersaturation::Violated { .. }));
    }

    #[test]
    fn tripartite_minus_matching() {
        let t = 10;
        let (full, v1, v2, v3) = complete_tripartite(t);
        let g = full.filter_edges(|e| !(e[1] == e[0] + t && e[2] == e[0] + 3 * t));
        assert_eq!(g.edge_count(), t * 2 * t * t - t);
        let inst = TripartiteInstance::new(&g, v1, v2, v3, 2).unwrap();
        assert_eq!(check_supersaturation(&inst), Supersaturation::Holds);
        let p = dfs_tripartite_path(&inst);
        assert!(p.len() >= 12, "length {}", p.len());
        assert_structure(&inst, &p);
    }

    #[test]
    fn supersaturation_survives_a_dead_middle_vertex() {
        let (full, v1, v2, v3) = complete_tripartite(4);
        let dead = 4;
        let g = full.filter_edges(|e| !e.contains(&dead));
        let inst = TripartiteInstance::new(&g, v1, v2, v3, 2).unwrap();
        assert_eq!(check_supersaturation(&inst), Supersaturation::Holds);
    }

    #[test]
    fn supersaturation_guard() {
        let g = Hypergraph3::empty(120);
        let inst = TripartiteInstance::new(&g, (0..30).collect(), (30..90).collect(), (90..120).collect(), 5).unwrap();
        assert!(matches!(check_supersaturation(&inst), Supersaturation::Unchecked { .. }));
    }

    #[test]
    fn cover_of_complete_and_empty() {
        for n in [3usize, 5, 9, 13] {
            let c = greedy_path_cover(&Hypergraph3::complete(n), 0.5).unwrap();
            assert!(c.paths.len() <= 2);
            assert_eq!(c.covered.len(), n);
        }
        let e = greedy_path_cover(&Hypergraph3::empty(7), 0.5).unwrap();
        assert_eq!(e.paths.len(), 7);
        assert!(e.paths.iter().all(|p| p.is_empty()));
    }

    #[test]
    fn cover_respects_allowed_set() {
        let g = Hypergraph3::complete(10);
        let allowed: VertexSet = [1, 3, 4, 6, 8].into_iter().collect();
        let c = greedy_path_cover_within(&g, &allowed, &PathCoverConfig::default()).unwrap();
        assert_eq!(c.covered, allowed);
        assert_eq!(c.paths.len(), 1);
    }
}

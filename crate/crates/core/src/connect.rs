//! Haxell-type matchings in bipartite hypergraphs and short loose paths between vertex pairs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hgraph::{validate_loose_path, Hypergraph3, LoosePath, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectError {
    #[error("invalid bipartite hypergraph: {0}")]
    InvalidHypergraph(String),
    #[error("invalid connect request: {0}")]
    InvalidRequest(String),
    #[error("pair {pair} could not be connected ({})", if *.disproved { "no solution exists" } else { "search budget exhausted" })]
    Failed { pair: usize, disproved: bool },
    #[error("enumeration budget of {0} paths exceeded")]
    EnumerationBudget(usize),
}

/// Edge of a bipartite hypergraph: one `A` index plus `ell - 1` sorted `B` indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BipartiteEdge {
    pub a: usize,
    pub b: Vec<usize>,
}

/// `ell`-graph on `A ∪ B` where each edge meets `A` once and `B` in `ell - 1` vertices.
///
/// `a_labels`/`b_labels` name the sides in some host; edges refer to positions in those lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteHypergraph {
    ell: usize,
    a_labels: Vec<usize>,
    b_labels: Vec<usize>,
    edges: Vec<BipartiteEdge>,
}

impl BipartiteHypergraph {
    /// Edges are given by position; duplicates are merged.
    pub fn new(ell: usize, a_len: usize, b_len: usize, edges: Vec<(usize, Vec<usize>)>) -> Result<Self, ConnectError> {
        Self::labelled(ell, (0..a_len).collect(), (0..b_len).collect(), edges)
    }

    pub fn labelled(
        ell: usize,
        a_labels: Vec<usize>,
        b_labels: Vec<usize>,
        edges: Vec<(usize, Vec<usize>)>,
    ) -> Result<Self, ConnectError> {
        if ell < 2 {
            return Err(ConnectError::InvalidHypergraph(format!("edge size {ell} < 2")));
        }
        let mut set = BTreeSet::new();
        for (a, mut b) in edges {
            if a >= a_labels.len() {
                return Err(ConnectError::InvalidHypergraph(format!("A index {a} out of range")));
            }
            b.sort_unstable();
            b.dedup();
            if b.len() != ell - 1 {
                return Err(ConnectError::InvalidHypergraph(format!(
                    "edge at A index {a} meets B in {} distinct vertices, expected {}",
                    b.len(),
                    ell - 1
                )));
            }
            if let Some(&x) = b.iter().find(|&&x| x >= b_labels.len()) {
                return Err(ConnectError::InvalidHypergraph(format!("B index {x} out of range")));
            }
            set.insert(BipartiteEdge { a, b });
        }
        Ok(BipartiteHypergraph { ell, a_labels, b_labels, edges: set.into_iter().collect() })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn a_len(&self) -> usize {
        self.a_labels.len()
    }

    pub fn b_len(&self) -> usize {
        self.b_labels.len()
    }

    pub fn a_labels(&self) -> &[usize] {
        &self.a_labels
    }

    pub fn b_labels(&self) -> &[usize] {
        &self.b_labels
    }

    pub fn edges(&self) -> &[BipartiteEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum HaxellOutcome {
    Pass,
    /// Every edge meeting `a_prime` hits `b_prime`, and `|b_prime|` is within the bound.
    Violation { a_prime: Vec<usize>, b_prime: Vec<usize> },
    Unchecked { nodes: u64 },
}

/// Default search-node budget for `haxell_check`.
pub const HAXELL_BUDGET: u64 = 10_000_000;

/// Checks the Haxell condition: for all `A' ⊆ A` and `B' ⊆ B` with
/// `|B'| ≤ (2ell-3)(|A'|-1)` some edge meets `A'` and avoids `B'`.
///
/// Subsets `A'` are visited by size then lexicographically; for each one a minimum
/// hitting set of the edges meeting it is searched, so the witness is minimal in
/// `|A'|` and then `|B'|`.
pub fn haxell_check(h: &BipartiteHypergraph, budget: u64) -> HaxellOutcome {
    let mut by_a: Vec<Vec<&[usize]>> = vec![Vec::new(); h.a_len()];
    for e in &h.edges {
        by_a[e.a].push(&e.b);
    }
    let all: Vec<usize> = (0..h.a_len()).collect();
    let mut nodes = 0u64;
    let mut outcome = HaxellOutcome::Pass;
    for size in 1..=h.a_len() {
        let bound = (2 * h.ell - 3) * (size - 1);
        crate::pathcover::for_each_combination(&all, size, |a_prime| {
            let sets: Vec<&[usize]> = a_prime.iter().flat_map(|&a| by_a[a].iter().copied()).collect();
            let mut chosen = Vec::new();
            for k in 0..=bound.min(h.b_len()) {
                match hitting_set(&sets, k, &mut chosen, &mut nodes, budget) {
                    Some(true) => {
                        chosen.sort_unstable();
                        outcome = HaxellOutcome::Violation { a_prime: a_prime.to_vec(), b_prime: chosen.clone() };
                        return false;
                    }
                    Some(false) => {}
                    None => {
                        outcome = HaxellOutcome::Unchecked { nodes };
                        return false;
                    }
                }
            }
            true
        });
        if outcome != HaxellOutcome::Pass {
            break;
        }
    }
    outcome
}

/// Is there a set of at most `k` more elements hitting every set not yet hit by `chosen`?
/// `None` when the node budget runs out.
fn hitting_set(sets: &[&[usize]], k: usize, chosen: &mut Vec<usize>, nodes: &mut u64, budget: u64) -> Option<bool> {
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    let open = sets
        .iter()
        .filter(|s| !s.iter().any(|x| chosen.contains(x)))
        .min_by_key(|s| s.len());
    let Some(open) = open else {
        return Some(true);
    };
    if k == 0 {
        return Some(false);
    }
    for &x in open.iter() {
        chosen.push(x);
        let r = hitting_set(sets, k - 1, chosen, nodes, budget);
        if r != Some(false) {
            if r.is_none() {
                chosen.pop();
            }
            return r;
        }
        chosen.pop();
    }
    Some(false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MatchingSearch {
    /// Indices into `edges()`, one per `A` vertex in ascending `A` order.
    Found { edges: Vec<usize> },
    /// The search was complete: no `A`-saturating matching exists.
    NoMatching,
    Timeout { nodes: u64 },
}

pub const MATCHING_BUDGET: u64 = 10_000_000;

/// Backtracking search for disjoint edges covering all of `A`.
pub fn find_saturating_matching(h: &BipartiteHypergraph, budget: u64) -> MatchingSearch {
    let sets: Vec<(usize, &[usize])> = h.edges.iter().map(|e| (e.a, e.b.as_slice())).collect();
    match saturate(h.a_len(), h.b_len(), &sets, budget) {
        Ok(Some(chosen)) => MatchingSearch::Found { edges: chosen },
        Ok(None) => MatchingSearch::NoMatching,
        Err(nodes) => MatchingSearch::Timeout { nodes },
    }
}

/// Shared saturating-matching search over edges `(a, b-set)` with arbitrary `b`-set sizes.
/// Returns per-`a` edge indices, `Ok(None)` if none exists, `Err(nodes)` on budget exhaustion.
fn saturate(a_len: usize, b_len: usize, sets: &[(usize, &[usize])], budget: u64) -> Result<Option<Vec<usize>>, u64> {
    struct Search<'a> {
        by_a: Vec<Vec<usize>>,
        sets: &'a [(usize, &'a [usize])],
        used: Vec<bool>,
        pick: Vec<Option<usize>>,
        nodes: u64,
        budget: u64,
    }
    impl Search<'_> {
        fn free(&self, e: usize) -> bool {
            self.sets[e].1.iter().all(|&x| !self.used[x])
        }
        fn go(&mut self) -> Result<bool, ()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            let mut best: Option<(usize, usize)> = None;
            for a in 0..self.by_a.len() {
                if self.pick[a].is_some() {
                    continue;
                }
                let opts = self.by_a[a].iter().filter(|&&e| self.free(e)).count();
                if best.is_none_or(|(_, c)| opts < c) {
                    best = Some((a, opts));
                }
            }
            let Some((a, opts)) = best else {
                return Ok(true);
            };
            if opts == 0 {
                return Ok(false);
            }
            for i in 0..self.by_a[a].len() {
                let e = self.by_a[a][i];
                if !self.free(e) {
                    continue;
                }
                for &x in self.sets[e].1 {
                    self.used[x] = true;
                }
                self.pick[a] = Some(e);
                if self.go()? {
                    return Ok(true);
                }
                self.pick[a] = None;
                for &x in self.sets[e].1 {
                    self.used[x] = false;
                }
            }
            Ok(false)
        }
    }
    let mut by_a = vec![Vec::new(); a_len];
    for (i, &(a, _)) in sets.iter().enumerate() {
        by_a[a].push(i);
    }
    let mut s = Search { by_a, sets, used: vec![false; b_len], pick: vec![None; a_len], nodes: 0, budget };
    match s.go() {
        Ok(true) => Ok(Some(s.pick.into_iter().map(|p| p.expect("all picked")).collect())),
        Ok(false) => Ok(None),
        Err(()) => Err(s.nodes),
    }
}

/// Pairs `{x_i, y_i}` to join by loose paths whose internal vertices lie in `reservoir`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectRequest {
    pub pairs: Vec<(usize, usize)>,
    pub reservoir: VertexSet,
    pub max_len: usize,
    /// Shortest admissible path length; gadget path slots pin this to `max_len`.
    #[serde(default = "one")]
    pub min_len: usize,
}

fn one() -> usize {
    1
}

impl ConnectRequest {
    pub fn new(pairs: Vec<(usize, usize)>, reservoir: VertexSet) -> Self {
        ConnectRequest { pairs, reservoir, max_len: 4, min_len: 1 }
    }

    pub fn exact(pairs: Vec<(usize, usize)>, reservoir: VertexSet, len: usize) -> Self {
        ConnectRequest { pairs, reservoir, max_len: len, min_len: len }
    }

    pub fn validate(&self, n: usize) -> Result<(), ConnectError> {
        let bad = |m: String| Err(ConnectError::InvalidRequest(m));
        if self.min_len == 0 || self.min_len > self.max_len {
            return bad(format!("length range {}..={} is empty or contains 0", self.min_len, self.max_len));
        }
        if let Some(v) = self.reservoir.iter().find(|&v| v >= n) {
            return bad(format!("reservoir vertex {v} out of range"));
        }
        let mut uses: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, &(x, y)) in self.pairs.iter().enumerate() {
            if x >= n || y >= n {
                return bad(format!("pair {i} has a vertex out of range"));
            }
            if x == y {
                return bad(format!("pair {i} repeats vertex {x}"));
            }
            for u in [x, y] {
                if self.reservoir.contains(u) {
                    return bad(format!("pair vertex {u} lies in the reservoir"));
                }
                *uses.entry(u).or_default() += 1;
            }
        }
        if let Some((u, c)) = uses.iter().find(|(_, &c)| c > 2) {
            return bad(format!("vertex {u} appears in {c} pairs"));
        }
        Ok(())
    }
}

/// Three-part split of the reservoir: internal vertices 1-2 in the first part,
/// 3-5 in the second, 6-7 in the third (length-4 paths only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReservoirParts {
    pub first: VertexSet,
    pub second: VertexSet,
    pub third: VertexSet,
}

impl ReservoirParts {
    /// Round-robin split of `w` in ascending order.
    pub fn equipartition(w: &VertexSet) -> Self {
        let mut parts = [VertexSet::new(), VertexSet::new(), VertexSet::new()];
        for (i, v) in w.iter().enumerate() {
            parts[i % 3].insert(v);
        }
        let [first, second, third] = parts;
        ReservoirParts { first, second, third }
    }

    fn class(&self, pos: usize) -> &VertexSet {
        match pos {
            0 | 1 => &self.first,
            2..=4 => &self.second,
            _ => &self.third,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectConfig {
    /// Search nodes allowed per pair; the total budget is this times the pair count.
    pub node_budget_per_pair: u64,
    /// Reject requests with more than this fraction of `|W|` pairs.
    pub max_pair_fraction: Option<f64>,
    pub structured: Option<ReservoirParts>,
    pub fallback_max_reservoir: usize,
    pub fallback_max_pairs: usize,
    pub fallback_budget: u64,
}

impl Default for ConnectConfig {
    fn default() -> Self {
        ConnectConfig {
            node_budget_per_pair: 100_000,
            max_pair_fraction: None,
            structured: None,
            fallback_max_reservoir: 20,
            fallback_max_pairs: 6,
            fallback_budget: 2_000_000,
        }
    }
}

/// One loose path per request pair, internally disjoint, internals inside the reservoir.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionMatching {
    pub paths: Vec<LoosePath>,
}

impl ConnectionMatching {
    pub fn internal_vertices(&self) -> VertexSet {
        self.paths.iter().flat_map(|p| p.internal().iter().copied()).collect()
    }

    /// Re-checks every output guarantee against `g` and `req`.
    pub fn validate(&self, g: &Hypergraph3, req: &ConnectRequest) -> Result<(), String> {
        if self.paths.len() != req.pairs.len() {
            return Err(format!("{} paths for {} pairs", self.paths.len(), req.pairs.len()));
        }
        let mut seen = BTreeSet::new();
        for (i, (p, &(x, y))) in self.paths.iter().zip(&req.pairs).enumerate() {
            if p.first() != x || p.last() != y {
                return Err(format!("path {i} has wrong endpoints"));
            }
            if p.len() < req.min_len || p.len() > req.max_len {
                return Err(format!("path {i} has length {}", p.len()));
            }
            validate_loose_path(g, p).map_err(|d| format!("path {i}: {d}"))?;
            for &v in p.internal() {
                if !req.reservoir.contains(v) {
                    return Err(format!("path {i} uses {v} outside the reservoir"));
                }
                if !seen.insert(v) {
                    return Err(format!("internal vertex {v} used twice"));
                }
            }
        }
        Ok(())
    }
}

/// Joins every pair of `req` by a loose path of length at most `req.max_len`.
///
/// Pairs are processed most-constrained first (fewest length-1 options), each trying
/// lengths in ascending order with ascending candidate vertices, backtracking across
/// pairs. When the node budget runs out on a small request, the auxiliary saturating
/// matching formulation is tried instead.
pub fn connect_pairs(g: &Hypergraph3, req: &ConnectRequest, cfg: &ConnectConfig) -> Result<ConnectionMatching, ConnectError> {
    req.validate(g.n())?;
    if let Some(f) = cfg.max_pair_fraction {
        if req.pairs.len() as f64 > f * req.reservoir.len() as f64 {
            return Err(ConnectError::InvalidRequest(format!(
                "{} pairs exceed fraction {f} of a reservoir of size {}",
                req.pairs.len(),
                req.reservoir.len()
            )));
        }
    }
    if let Some(parts) = &cfg.structured {
        let union = parts.first.union(&parts.second).union(&parts.third);
        let total = parts.first.len() + parts.second.len() + parts.third.len();
        if union.len() != total || !union.is_subset(&req.reservoir) {
            return Err(ConnectError::InvalidRequest("reservoir parts must be disjoint subsets of the reservoir".into()));
        }
    }
    let mut solver = Solver::new(g, req, cfg);
    let t = req.pairs.len();
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by_key(|&i| (solver.short_options(i), i));
    let budget = cfg.node_budget_per_pair.saturating_mul(t.max(1) as u64);
    solver.budget = budget;
    match solver.solve(&order, 0) {
        Ok(true) => {
            let paths = solver.found.into_iter().map(|p| p.expect("every pair solved")).collect();
            Ok(ConnectionMatching { paths })
        }
        Ok(false) => Err(ConnectError::Failed { pair: order[solver.deepest_fail], disproved: true }),
        Err(()) => {
            let pair = order[solver.deepest_fail];
            if req.reservoir.len() <= cfg.fallback_max_reservoir && t <= cfg.fallback_max_pairs {
                return fallback(g, req, cfg, pair);
            }
            Err(ConnectError::Failed { pair, disproved: false })
        }
    }
}

struct Solver<'a> {
    g: &'a Hypergraph3,
    req: &'a ConnectRequest,
    parts: Option<&'a ReservoirParts>,
    free: Vec<bool>,
    found: Vec<Option<LoosePath>>,
    nodes: u64,
    budget: u64,
    deepest_fail: usize,
}

impl<'a> Solver<'a> {
    fn new(g: &'a Hypergraph3, req: &'a ConnectRequest, cfg: &'a ConnectConfig) -> Self {
        let mut free = vec![false; g.n()];
        for v in req.reservoir.iter() {
            free[v] = true;
        }
        Solver {
            g,
            req,
            parts: cfg.structured.as_ref(),
            free,
            found: vec![None; req.pairs.len()],
            nodes: 0,
            budget: u64::MAX,
            deepest_fail: 0,
        }
    }

    fn lengths(&self) -> std::ops::RangeInclusive<usize> {
        if self.parts.is_some() {
            4..=4
        } else {
            self.req.min_len..=self.req.max_len
        }
    }

    fn allowed(&self, v: usize, pos: usize) -> bool {
        self.free[v] && self.parts.is_none_or(|p| p.class(pos).contains(v))
    }

    fn short_options(&self, i: usize) -> usize {
        let (x, y) = self.req.pairs[i];
        self.g.common(x, y).iter().filter(|&&w| self.free[w as usize]).count()
    }

    fn solve(&mut self, order: &[usize], k: usize) -> Result<bool, ()> {
        if k == order.len() {
            return Ok(true);
        }
        let pair = order[k];
        let (x, _) = self.req.pairs[pair];
        for len in self.lengths() {
            let mut buf = Vec::with_capacity(2 * len - 1);
            if self.extend(order, k, len, x, &mut buf)? {
                return Ok(true);
            }
        }
        self.deepest_fail = self.deepest_fail.max(k);
        Ok(false)
    }

    /// Extends the internal sequence `buf` of the current pair's path from joint `c`.
    fn extend(&mut self, order: &[usize], k: usize, len: usize, c: usize, buf: &mut Vec<usize>) -> Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        let pair = order[k];
        let (x, y) = self.req.pairs[pair];
        let pos = buf.len();
        if pos == 2 * len - 2 {
            let g = self.g;
            for &w in g.common(c, y) {
                let w = w as usize;
                if !self.allowed(w, pos) {
                    continue;
                }
                buf.push(w);
                let mut vertices = Vec::with_capacity(buf.len() + 2);
                vertices.push(x);
                vertices.extend_from_slice(buf);
                vertices.push(y);
                self.free[w] = false;
                self.found[pair] = Some(LoosePath::new(vertices));
                let ok = self.solve(order, k + 1);
                self.free[w] = true;
                buf.pop();
                if ok? {
                    return Ok(true);
                }
                self.found[pair] = None;
            }
            return Ok(false);
        }
        let candidates: Vec<usize> = self.req.reservoir.iter().filter(|&u| self.allowed(u, pos)).collect();
        let g = self.g;
        for u in candidates {
            self.free[u] = false;
            buf.push(u);
            for &v in g.common(c, u) {
                let v = v as usize;
                if !self.allowed(v, pos + 1) {
                    continue;
                }
                self.free[v] = false;
                buf.push(v);
                let r = self.extend(order, k, len, v, buf);
                buf.pop();
                self.free[v] = true;
                if r.as_ref().map_or(true, |&ok| ok) {
                    buf.pop();
                    self.free[u] = true;
                    return r;
                }
            }
            buf.pop();
            self.free[u] = true;
        }
        Ok(false)
    }
}

/// Loose `xy`-paths of exactly length `len` with internals in `allowed`, deduplicated by
/// internal vertex set (first path in ascending order kept). `Err` when more than
/// `budget` paths are generated.
fn paths_by_support(
    g: &Hypergraph3,
    x: usize,
    y: usize,
    len: usize,
    allowed: &dyn Fn(usize, usize) -> bool,
    pool: &[usize],
    budget: usize,
) -> Result<BTreeMap<Vec<usize>, Vec<usize>>, ConnectError> {
    fn rec(
        g: &Hypergraph3,
        y: usize,
        len: usize,
        c: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        pool: &[usize],
        buf: &mut Vec<usize>,
        out: &mut BTreeMap<Vec<usize>, Vec<usize>>,
        count: &mut usize,
        budget: usize,
    ) -> Result<(), ConnectError> {
        let pos = buf.len();
        if pos == 2 * len - 2 {
            for &w in g.common(c, y) {
                let w = w as usize;
                if allowed(w, pos) && !buf.contains(&w) {
                    *count += 1;
                    if *count > budget {
                        return Err(ConnectError::EnumerationBudget(budget));
                    }
                    buf.push(w);
                    let mut key = buf.clone();
                    key.sort_unstable();
                    out.entry(key).or_insert_with(|| buf.clone());
                    buf.pop();
                }
            }
            return Ok(());
        }
        for &u in pool {
            if !allowed(u, pos) || buf.contains(&u) {
                continue;
            }
            buf.push(u);
            for &v in g.common(c, u) {
                let v = v as usize;
                if allowed(v, pos + 1) && !buf.contains(&v) {
                    buf.push(v);
                    rec(g, y, len, v, allowed, pool, buf, out, count, budget)?;
                    buf.pop();
                }
            }
            buf.pop();
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    let mut count = 0;
    rec(g, y, len, x, allowed, pool, &mut Vec::new(), &mut out, &mut count, budget)?;
    Ok(out)
}

fn fallback(g: &Hypergraph3, req: &ConnectRequest, cfg: &ConnectConfig, stuck: usize) -> Result<ConnectionMatching, ConnectError> {
    let pool = req.reservoir.to_vec();
    let index: BTreeMap<usize, usize> = pool.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let parts = cfg.structured.as_ref();
    let allowed = |v: usize, pos: usize| index.contains_key(&v) && parts.is_none_or(|p| p.class(pos).contains(v));
    let lengths: Vec<usize> = if parts.is_some() { vec![4] } else { (req.min_len..=req.max_len).collect() };
    let mut witnesses: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut sets: Vec<(usize, Vec<usize>)> = Vec::new();
    let enum_budget = cfg.fallback_budget as usize;
    for (i, &(x, y)) in req.pairs.iter().enumerate() {
        for &len in &lengths {
            let found = match paths_by_support(g, x, y, len, &allowed, &pool, enum_budget) {
                Ok(f) => f,
                Err(_) => return Err(ConnectError::Failed { pair: stuck, disproved: false }),
            };
            for (key, path) in found {
                sets.push((i, key.iter().map(|v| index[v]).collect()));
                witnesses.push((i, path));
            }
        }
    }
    let refs: Vec<(usize, &[usize])> = sets.iter().map(|(a, b)| (*a, b.as_slice())).collect();
    match saturate(req.pairs.len(), pool.len(), &refs, cfg.fallback_budget) {
        Ok(Some(pick)) => {
            let paths = pick
                .into_iter()
                .map(|e| {
                    let (i, internals) = &witnesses[e];
                    let (x, y) = req.pairs[*i];
                    let mut v = vec![x];
                    v.extend_from_slice(internals);
                    v.push(y);
                    LoosePath::new(v)
                })
                .collect();
            Ok(ConnectionMatching { paths })
        }
        Ok(None) => Err(ConnectError::Failed { pair: stuck, disproved: true }),
        Err(_) => Err(ConnectError::Failed { pair: stuck, disproved: false }),
    }
}

/// Which auxiliary hypergraph to build: internal sets of single-edge paths (2-graph) or of
/// length-4 paths (8-graph), optionally in the three-part shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxRegime {
    Codegree,
    Degree { parts: Option<ReservoirParts> },
}

pub const AUX_BUDGET: usize = 5_000_000;

/// Auxiliary hypergraph on `[t] ∪ W`: `{i} ∪ Z` is an edge iff some `x_i y_i`-path has
/// internal vertex set exactly `Z` (`|Z| = 1` or `7` by regime).
pub fn build_aux_connection_hypergraph(
    g: &Hypergraph3,
    req: &ConnectRequest,
    regime: &AuxRegime,
    budget: usize,
) -> Result<BipartiteHypergraph, ConnectError> {
    req.validate(g.n())?;
    let pool = req.reservoir.to_vec();
    let index: BTreeMap<usize, usize> = pool.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let (len, parts) = match regime {
        AuxRegime::Codegree => (1, None),
        AuxRegime::Degree { parts } => (4, parts.as_ref()),
    };
    let allowed = |v: usize, pos: usize| index.contains_key(&v) && parts.is_none_or(|p| p.class(pos).contains(v));
    let mut edges = Vec::new();
    let mut total = 0;
    for (i, &(x, y)) in req.pairs.iter().enumerate() {
        let found = paths_by_support(g, x, y, len, &allowed, &pool, budget.saturating_sub(total))?;
        total += found.len();
        for key in found.into_keys() {
            edges.push((i, key.iter().map(|v| index[v]).collect()));
        }
    }
    BipartiteHypergraph::labelled(2 * len, (0..req.pairs.len()).collect(), pool, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bip(ell: usize, a: usize, b: usize, edges: &[(usize, &[usize])]) -> BipartiteHypergraph {
        BipartiteHypergraph::new(ell, a, b, edges.iter().map(|(a, b)| (*a, b.to_vec())).collect()).unwrap()
    }

    #[test]
    fn haxell_examples() {
        let pm = bip(2, 2, 2, &[(0, &[0]), (1, &[1])]);
        assert_eq!(haxell_check(&pm, HAXELL_BUDGET), HaxellOutcome::Pass);
        assert!(matches!(find_saturating_matching(&pm, MATCHING_BUDGET), MatchingSearch::Found { ref edges } if edges.len() == 2));

        let star = bip(2, 2, 2, &[(0, &[0]), (1, &[0])]);
        assert_eq!(
            haxell_check(&star, HAXELL_BUDGET),
            HaxellOutcome::Violation { a_prime: vec![0, 1], b_prime: vec![0] }
        );
        assert_eq!(find_saturating_matching(&star, MATCHING_BUDGET), MatchingSearch::NoMatching);

        let three = bip(3, 1, 4, &[(0, &[0, 1]), (0, &[2, 3])]);
        assert_eq!(haxell_check(&three, HAXELL_BUDGET), HaxellOutcome::Pass);

        let isolated = bip(3, 2, 4, &[(0, &[0, 1])]);
        assert_eq!(haxell_check(&isolated, HAXELL_BUDGET), HaxellOutcome::Violation { a_prime: vec![1], b_prime: vec![] });
    }

    #[test]
    fn bipartite_validation() {
        assert!(BipartiteHypergraph::new(3, 1, 3, vec![(0, vec![0])]).is_err());
        assert!(BipartiteHypergraph::new(3, 1, 3, vec![(0, vec![1, 1])]).is_err());
        assert!(BipartiteHypergraph::new(2, 1, 3, vec![(1, vec![0])]).is_err());
        assert!(BipartiteHypergraph::new(2, 1, 3, vec![(0, vec![5])]).is_err());
        assert!(BipartiteHypergraph::new(1, 1, 3, vec![]).is_err());
    }

    #[test]
    fn tiny_budget_is_unchecked() {
        let h = bip(2, 3, 3, &[(0, &[0]), (1, &[1]), (2, &[2])]);
        assert!(matches!(haxell_check(&h, 2), HaxellOutcome::Unchecked { .. }));
        assert!(matches!(find_saturating_matching(&h, 1), MatchingSearch::Timeout { .. }));
    }

    #[test]
    fn single_pair_single_edge() {
        let g = Hypergraph3::new(3, [[0, 1, 2]]).unwrap();
        let req = ConnectRequest::new(vec![(0, 2)], VertexSet::from(vec![1]));
        let m = connect_pairs(&g, &req, &ConnectConfig::default()).unwrap();
        assert_eq!(m.paths, vec![LoosePath::new(vec![0, 1, 2])]);
        m.validate(&g, &req).unwrap();
    }

    #[test]
    fn two_pairs_in_complete_graph() {
        let g = Hypergraph3::complete(9);
        let req = ConnectRequest::new(vec![(0, 1), (2, 3)], VertexSet::from(vec![4, 5, 6, 7, 8]));
        let m = connect_pairs(&g, &req, &ConnectConfig::default()).unwrap();
        m.validate(&g, &req).unwrap();
        assert_eq!(m.paths[0].vertices, vec![0, 4, 1]);
        assert_eq!(m.paths[1].vertices, vec![2, 5, 3]);
    }

    #[test]
    fn empty_graph_is_disproved() {
        let g = Hypergraph3::empty(8);
        let req = ConnectRequest::new(vec![(0, 1)], VertexSet::from(vec![2, 3, 4, 5, 6, 7]));
        assert_eq!(
            connect_pairs(&g, &req, &ConnectConfig::default()),
            Err(ConnectError::Failed { pair: 0, disproved: true })
        );
        let cfg = ConnectConfig { node_budget_per_pair: 1, ..ConnectConfig::default() };
        assert_eq!(connect_pairs(&g, &req, &cfg), Err(ConnectError::Failed { pair: 0, disproved: true }));
    }

    #[test]
    fn request_validation() {
        let g = Hypergraph3::complete(10);
        let w = VertexSet::from(vec![7, 8, 9]);
        let cfg = ConnectConfig::default();
        let thrice = ConnectRequest::new(vec![(0, 1), (0, 2), (0, 3)], w.clone());
        assert!(matches!(connect_pairs(&g, &thrice, &cfg), Err(ConnectError::InvalidRequest(_))));
        let overlap = ConnectRequest::new(vec![(0, 7)], w.clone());
        assert!(matches!(connect_pairs(&g, &overlap, &cfg), Err(ConnectError::InvalidRequest(_))));
        let frac = ConnectConfig { max_pair_fraction: Some(0.5), ..ConnectConfig::default() };
        let many = ConnectRequest::new(vec![(0, 1), (2, 3)], w);
        assert!(matches!(connect_pairs(&g, &many, &frac), Err(ConnectError::InvalidRequest(_))));
    }

    #[test]
    fn longer_paths_when_needed() {
        // 0 and 6 share no edge through W; the only route is 0-1-2 / 2-3-4 / 4-5-6
        let g = Hypergraph3::new(7, [[0, 1, 2], [2, 3, 4], [4, 5, 6]]).unwrap();
        let req = ConnectRequest::new(vec![(0, 6)], VertexSet::from(vec![1, 2, 3, 4, 5]));
        let m = connect_pairs(&g, &req, &ConnectConfig::default()).unwrap();
        assert_eq!(m.paths[0].vertices, vec![0, 1, 2, 3, 4, 5, 6]);
        let short = ConnectRequest { max_len: 2, ..req.clone() };
        assert!(connect_pairs(&g, &short, &ConnectConfig::default()).is_err());
        let g = Hypergraph3::complete(12);
        let exact = ConnectRequest::exact(vec![(0, 1)], (2..12).collect(), 4);
        let m = connect_pairs(&g, &exact, &ConnectConfig::default()).unwrap();
        assert_eq!(m.paths[0].len(), 4);
    }

    #[test]
    fn structured_mode_uses_parts() {
        let g = Hypergraph3::complete(12);
        let w: VertexSet = (2..12).collect();
        let parts = ReservoirParts::equipartition(&w);
        let cfg = ConnectConfig { structured: Some(parts.clone()), ..ConnectConfig::default() };
        let req = ConnectRequest::new(vec![(0, 1)], w);
        let m = connect_pairs(&g, &req, &cfg).unwrap();
        m.validate(&g, &req).unwrap();
        let p = &m.paths[0];
        assert_eq!(p.len(), 4);
        for (pos, &v) in p.internal().iter().enumerate() {
            assert!(parts.class(pos).contains(v));
        }
    }

    #[test]
    fn fallback_matches_direct_search() {
        let g = Hypergraph3::complete(9);
        let req = ConnectRequest::new(vec![(0, 1), (2, 3)], VertexSet::from(vec![4, 5, 6, 7, 8]));
        let cfg = ConnectConfig { node_budget_per_pair: 1, ..ConnectConfig::default() };
        let m = connect_pairs(&g, &req, &cfg).unwrap();
        m.validate(&g, &req).unwrap();
    }

    #[test]
    fn aux_hypergraph() {
        let g = Hypergraph3::complete(7);
        let req = ConnectRequest::new(vec![(0, 1)], VertexSet::from(vec![2, 3, 4]));
        let h = build_aux_connection_hypergraph(&g, &req, &AuxRegime::Codegree, AUX_BUDGET).unwrap();
        assert_eq!(h.ell(), 2);
        assert_eq!(h.edge_count(), 3);
        let e = build_aux_connection_hypergraph(&Hypergraph3::empty(7), &req, &AuxRegime::Codegree, AUX_BUDGET).unwrap();
        assert_eq!(e.edge_count(), 0);

        let g = Hypergraph3::complete(11);
        let req = ConnectRequest::new(vec![(0, 1)], (2..11).collect());
        let h = build_aux_connection_hypergraph(&g, &req, &AuxRegime::Degree { parts: None }, AUX_BUDGET).unwrap();
        assert_eq!(h.ell(), 8);
        // any 7 of the 9 reservoir vertices support a length-4 path in a complete graph
        assert_eq!(h.edge_count(), 36);
        assert!(matches!(find_saturating_matching(&h, MATCHING_BUDGET), MatchingSearch::Found { .. }));
    }
}

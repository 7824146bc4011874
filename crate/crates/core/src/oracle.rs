//! Exact small-instance solvers for loose Hamilton cycles and loose paths, plus the
//! end-to-end randomized pipeline (reserve, cover, connect, absorb).

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::absorb::{absorb, assemble_absorber, AbsorberParams};
use crate::connect::{connect_pairs, ConnectConfig, ConnectRequest};
use crate::hgraph::{validate_loose_cycle, Hypergraph3, LooseCycle, LoosePath, VertexSet};
use crate::pathcover::{greedy_path_cover_within, PathCoverConfig};
use crate::rng::{derive_seed, rng_for};

pub const EXHAUSTIVE_MAX_N: usize = 16;
pub const COUNT_MAX_N: usize = 12;
pub const ORACLE_BUDGET: u64 = 2_000_000_000;
const MEMO_CAP: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("n = {n} exceeds the exhaustive limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub decision: Decision,
    pub witness: Option<LooseCycle>,
    pub nodes_explored: u64,
    /// `false` only when the node budget ran out before a witness was found.
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl OracleResult {
    fn trivial_no(reason: &str) -> Self {
        OracleResult { decision: Decision::No, witness: None, nodes_explored: 0, exhaustive: true, reason: Some(reason.into()) }
    }
}

/// Per-vertex list of `(pair bitmask, a, b)` for every edge `{v, a, b}`.
fn incidence(g: &Hypergraph3) -> Vec<Vec<(u32, u8, u8)>> {
    let mut inc = vec![Vec::new(); g.n()];
    for v in 0..g.n() {
        for (a, b) in g.link(v) {
            inc[v].push((1u32 << a | 1u32 << b, a as u8, b as u8));
        }
    }
    inc
}

/// Backtracking over cyclic sequences `j0 m0 j1 m1 ...` where edge `i` is `{j_i, m_i, j_{i+1}}`.
///
/// Each cycle is generated once: either vertex 0 is a joint placed first with `m0 < m_last`,
/// or vertex 0 is the middle of the first edge `(a, 0, b)` with `a < b`.
struct Search<'a> {
    g: &'a Hypergraph3,
    inc: Vec<Vec<(u32, u8, u8)>>,
    full: u32,
    seq: Vec<usize>,
    nodes: u64,
    budget: u64,
    prune: bool,
    /// Completions from `(used, current joint, start, bound)`; the bound encodes the closing constraint.
    memo: HashMap<(u32, u8, u8, u8), u64>,
    count_mode: bool,
    found: Option<Vec<usize>>,
    out_of_budget: bool,
}

impl Search<'_> {
    fn new(g: &Hypergraph3, budget: u64, count_mode: bool) -> Search<'_> {
        let n = g.n();
        Search {
            g,
            inc: incidence(g),
            full: if n == 32 { u32::MAX } else { (1u32 << n) - 1 },
            seq: Vec::with_capacity(n),
            nodes: 0,
            budget,
            prune: n >= 12,
            memo: HashMap::new(),
            count_mode,
            found: None,
            out_of_budget: false,
        }
    }

    /// Every uncovered vertex still has an edge inside `uncovered ∪ {cur, start}`.
    fn viable(&self, used: u32, cur: usize, start: usize) -> bool {
        let open = !used & self.full | 1 << cur | 1 << start;
        let mut rest = !used & self.full;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if !self.inc[v].iter().any(|&(m, _, _)| m & open == m) {
                return false;
            }
        }
        true
    }

    /// Number of ways (capped at 1 outside count mode) to finish a cycle from joint `cur`.
    /// `lower` is the smallest admissible final middle vertex.
    fn extend(&mut self, used: u32, cur: usize, start: usize, lower: usize) -> u64 {
        if self.out_of_budget || (!self.count_mode && self.found.is_some()) {
            return 0;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.out_of_budget = true;
            return 0;
        }
        let left = !used & self.full;
        if left.count_ones() == 1 {
            let m = left.trailing_zeros() as usize;
            if m >= lower && self.g.has_edge(cur, m, start) {
                if self.found.is_none() {
                    let mut w = self.seq.clone();
                    w.push(m);
                    self.found = Some(w);
                }
                return 1;
            }
            return 0;
        }
        let key = (used, cur as u8, start as u8, lower as u8);
        if let Some(&c) = self.memo.get(&key) {
            if c == 0 || self.count_mode {
                return c;
            }
        }
        if self.prune && !self.viable(used, cur, start) {
            return 0;
        }
        let mut total = 0;
        for i in 0..self.inc[cur].len() {
            let (mask, a, b) = self.inc[cur][i];
            if mask & used != 0 {
                continue;
            }
            for (m, j) in [(a as usize, b as usize), (b as usize, a as usize)] {
                self.seq.push(m);
                self.seq.push(j);
                total += self.extend(used | mask, j, start, lower);
                self.seq.truncate(self.seq.len() - 2);
                if self.out_of_budget || (!self.count_mode && total > 0) {
                    return total;
                }
            }
        }
        if self.memo.len() < MEMO_CAP {
            self.memo.insert(key, total);
        }
        total
    }

    fn run(&mut self) -> u64 {
        let n = self.g.n();
        let mut total = 0;
        // vertex 0 as a joint; m0 < m_last
        for i in 0..self.inc[0].len() {
            let (mask, a, b) = self.inc[0][i];
            for (m, j) in [(a as usize, b as usize), (b as usize, a as usize)] {
                self.seq = vec![0, m, j];
                total += self.extend(1 | mask, j, 0, m + 1);
                if self.done() {
                    return total;
                }
            }
        }
        // vertex 0 as a middle: first edge (a, 0, b) with a < b
        for i in 0..self.inc[0].len() {
            let (mask, a, b) = self.inc[0][i];
            let (a, b) = (a.min(b) as usize, a.max(b) as usize);
            self.seq = vec![a, 0, b];
            total += self.extend(1 | mask, b, a, 0);
            if self.done() {
                return total;
            }
        }
        debug_assert!(n >= 6);
        total
    }

    fn done(&self) -> bool {
        self.out_of_budget || (!self.count_mode && self.found.is_some())
    }
}

fn precheck(g: &Hypergraph3) -> Option<OracleResult> {
    let n = g.n();
    if n % 2 == 1 {
        return Some(OracleResult::trivial_no("parity"));
    }
    if n < 6 {
        return Some(OracleResult::trivial_no("fewer than 6 vertices"));
    }
    if (0..n).any(|v| g.degree(v) == 0) {
        return Some(OracleResult::trivial_no("isolated vertex"));
    }
    None
}

/// Exhaustive decision with the default node budget.
pub fn has_loose_hc(g: &Hypergraph3) -> Result<OracleResult, OracleError> {
    has_loose_hc_with_budget(g, ORACLE_BUDGET)
}

/// Exhaustive decision; a budget hit gives `decision = no, exhaustive = false`.
pub fn has_loose_hc_with_budget(g: &Hypergraph3, budget: u64) -> Result<OracleResult, OracleError> {
    if g.n() > EXHAUSTIVE_MAX_N {
        return Err(OracleError::TooLarge { n: g.n(), limit: EXHAUSTIVE_MAX_N });
    }
    if let Some(r) = precheck(g) {
        return Ok(r);
    }
    let mut s = Search::new(g, budget, false);
    s.run();
    let witness = s.found.map(LooseCycle::new);
    if let Some(w) = &witness {
        debug_assert!(validate_loose_cycle(g, w).is_ok());
    }
    Ok(OracleResult {
        decision: if witness.is_some() { Decision::Yes } else { Decision::No },
        exhaustive: witness.is_some() || !s.out_of_budget,
        reason: if s.out_of_budget && witness.is_none() { Some("node budget exhausted".into()) } else { None },
        witness,
        nodes_explored: s.nodes,
    })
}

/// Number of distinct loose Hamilton cycles, i.e. distinct edge sets forming one.
pub fn count_loose_hc(g: &Hypergraph3) -> Result<u64, OracleError> {
    if g.n() > COUNT_MAX_N {
        return Err(OracleError::TooLarge { n: g.n(), limit: COUNT_MAX_N });
    }
    if precheck(g).is_some() {
        return Ok(0);
    }
    let mut s = Search::new(g, u64::MAX, true);
    Ok(s.run())
}

/// Canonical vertex sequence of a loose cycle: rotated to start at its smallest joint,
/// oriented so that the smaller of the two neighbouring joints comes second.
pub fn canonical_cycle(c: &LooseCycle) -> LooseCycle {
    let v = &c.vertices;
    let k = v.len();
    if k < 2 {
        return c.clone();
    }
    let start = (0..k).step_by(2).min_by_key(|&i| v[i]).expect("nonempty");
    let fwd: Vec<usize> = (0..k).map(|i| v[(start + i) % k]).collect();
    let back: Vec<usize> = (0..k).map(|i| v[(start + k - i) % k]).collect();
    let fwd_next = fwd.get(2).copied().unwrap_or(usize::MAX);
    let back_next = back.get(2).copied().unwrap_or(usize::MAX);
    LooseCycle::new(if back_next < fwd_next { back } else { fwd })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEnumeration {
    pub paths: Vec<LoosePath>,
    pub truncated: bool,
}

/// All loose `xy`-paths of length `1..=max_len`, ordered by length, then lexicographically.
pub fn enumerate_loose_paths(
    g: &Hypergraph3,
    x: usize,
    y: usize,
    max_len: usize,
    limit: usize,
) -> Result<PathEnumeration, OracleError> {
    let n = g.n();
    if x >= n || y >= n || x == y {
        return Err(OracleError::InvalidInput("x and y must be distinct vertices".into()));
    }
    struct St<'a> {
        g: &'a Hypergraph3,
        y: usize,
        max_len: usize,
        limit: usize,
        used: Vec<bool>,
        seq: Vec<usize>,
        out: Vec<LoosePath>,
        truncated: bool,
    }
    fn go(s: &mut St) {
        let cur = *s.seq.last().expect("nonempty");
        let len = s.seq.len() / 2;
        if len == s.max_len || s.truncated {
            return;
        }
        let pairs: Vec<(usize, usize)> = s.g.link(cur).collect();
        for (a, b) in pairs {
            for (m, j) in [(a, b), (b, a)] {
                if s.used[m] || s.used[j] || m == s.y {
                    continue;
                }
                if s.out.len() >= s.limit {
                    s.truncated = true;
                    return;
                }
                s.seq.push(m);
                s.seq.push(j);
                if j == s.y {
                    s.out.push(LoosePath::new(s.seq.clone()));
                } else {
                    s.used[m] = true;
                    s.used[j] = true;
                    go(s);
                    s.used[m] = false;
                    s.used[j] = false;
                }
                s.seq.truncate(s.seq.len() - 2);
            }
        }
    }
    let mut used = vec![false; n];
    used[x] = true;
    let mut s = St { g, y, max_len, limit, used, seq: vec![x], out: Vec::new(), truncated: false };
    go(&mut s);
    s.out.sort_by(|p, q| p.len().cmp(&q.len()).then_with(|| p.vertices.cmp(&q.vertices)));
    Ok(PathEnumeration { paths: s.out, truncated: s.truncated })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum AbsorptionStrategy {
    /// Leftover reservoir vertices are switched into the finished cycle two at a time by
    /// rerouting a three-edge stretch through a two-vertex gadget.
    OnCycleGadgets,
    /// A template-based absorber is built around the reservoir first.
    Template { params: AbsorberParams, absorber_reservoir_fraction: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub strategy: AbsorptionStrategy,
    /// Reservoir size as a fraction of `n`.
    pub alpha: f64,
    /// Multiplies `alpha` after each failed attempt, capped at `0.5`.
    pub alpha_growth: f64,
    pub cover: PathCoverConfig,
    pub connect: ConnectConfig,
    pub retries: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            strategy: AbsorptionStrategy::OnCycleGadgets,
            alpha: 0.25,
            alpha_growth: 1.1,
            cover: PathCoverConfig::default(),
            connect: ConnectConfig::default(),
            retries: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineStage {
    Reserve,
    Absorber,
    Cover,
    Connect,
    Absorb,
    Validate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: usize,
    pub seed: u64,
    pub reservoir_size: usize,
    pub stage: Option<PipelineStage>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineSuccess {
    pub cycle: LooseCycle,
    pub attempts: Vec<AttemptRecord>,
    pub paths_in_cover: usize,
    pub absorbed: usize,
}

#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
#[error("pipeline failed after {} attempts", attempts.len())]
pub struct PipelineFailure {
    pub attempts: Vec<AttemptRecord>,
    /// Failed attempts per stage.
    pub by_stage: Vec<(PipelineStage, usize)>,
}

struct StageErr(PipelineStage, String);

struct Built {
    cycle: Vec<usize>,
    paths: usize,
    absorbed: usize,
}

/// Reserve, cover, connect and absorb, retrying with fresh seeds.
pub fn find_loose_hc_pipeline(g: &Hypergraph3, cfg: &PipelineConfig) -> Result<PipelineSuccess, PipelineFailure> {
    let n = g.n();
    let mut attempts = Vec::new();
    let mut alpha = cfg.alpha;
    for attempt in 0..cfg.retries.max(1) {
        let seed = derive_seed(cfg.seed, attempt as u64);
        let size = ((alpha * n as f64).ceil() as usize).min(n);
        let outcome = if n % 2 == 1 || n < 6 {
            Err(StageErr(PipelineStage::Reserve, format!("no loose Hamilton cycle on {n} vertices")))
        } else {
            match &cfg.strategy {
                AbsorptionStrategy::OnCycleGadgets => on_cycle_attempt(g, cfg, size, seed),
                AbsorptionStrategy::Template { params, absorber_reservoir_fraction } => {
                    template_attempt(g, cfg, params, *absorber_reservoir_fraction, size, seed)
                }
            }
        };
        let outcome = outcome.and_then(|b| {
            let c = LooseCycle::new(b.cycle);
            match validate_loose_cycle(g, &c) {
                Ok(()) if c.is_hamilton(n) => Ok((c, b.paths, b.absorbed)),
                Ok(()) => Err(StageErr(PipelineStage::Validate, "cycle is not spanning".into())),
                Err(d) => Err(StageErr(PipelineStage::Validate, d.to_string())),
            }
        });
        match outcome {
            Ok((cycle, paths_in_cover, absorbed)) => {
                attempts.push(AttemptRecord { attempt, seed, reservoir_size: size, stage: None, detail: "ok".into() });
                return Ok(PipelineSuccess { cycle, attempts, paths_in_cover, absorbed });
            }
            Err(StageErr(stage, detail)) => {
                attempts.push(AttemptRecord { attempt, seed, reservoir_size: size, stage: Some(stage), detail });
                if n % 2 == 1 || n < 6 {
                    break;
                }
                alpha = (alpha * cfg.alpha_growth).min(0.5);
            }
        }
    }
    let mut by_stage: Vec<(PipelineStage, usize)> = Vec::new();
    for a in &attempts {
        let s = a.stage.expect("failed attempt has a stage");
        match by_stage.iter_mut().find(|(t, _)| *t == s) {
            Some((_, c)) => *c += 1,
            None => by_stage.push((s, 1)),
        }
    }
    Err(PipelineFailure { attempts, by_stage })
}

fn random_subset(pool: &[usize], k: usize, seed: u64, stream: u64) -> VertexSet {
    let mut rng = rng_for(seed, stream);
    pool.choose_multiple(&mut rng, k.min(pool.len())).copied().collect()
}

/// Joins `pieces` cyclically through `reservoir`; returns the cyclic sequence and the used reservoir vertices.
fn close_up(
    g: &Hypergraph3,
    pieces: &[Vec<usize>],
    reservoir: &VertexSet,
    cfg: &ConnectConfig,
) -> Result<(Vec<usize>, VertexSet), StageErr> {
    let k = pieces.len();
    if k == 0 {
        return Err(StageErr(PipelineStage::Cover, "nothing to connect".into()));
    }
    let pairs: Vec<(usize, usize)> =
        (0..k).map(|i| (*pieces[i].last().expect("nonempty"), pieces[(i + 1) % k][0])).collect();
    let req = ConnectRequest::new(pairs, reservoir.clone());
    let conn = connect_pairs(g, &req, cfg).map_err(|e| StageErr(PipelineStage::Connect, e.to_string()))?;
    let mut seq = Vec::new();
    for (p, c) in pieces.iter().zip(&conn.paths) {
        seq.extend_from_slice(p);
        seq.extend_from_slice(c.internal());
    }
    Ok((seq, conn.internal_vertices()))
}

fn cover(g: &Hypergraph3, allowed: &VertexSet, cfg: &PathCoverConfig) -> Result<Vec<Vec<usize>>, StageErr> {
    let pc = greedy_path_cover_within(g, allowed, cfg).map_err(|e| StageErr(PipelineStage::Cover, e.to_string()))?;
    Ok(pc.paths.into_iter().map(|p| p.vertices).collect())
}

fn on_cycle_attempt(g: &Hypergraph3, cfg: &PipelineConfig, size: usize, seed: u64) -> Result<Built, StageErr> {
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let r = random_subset(&all, size, seed, 10);
    let rest = VertexSet::range(n).difference(&r);
    if rest.is_empty() {
        return Err(StageErr(PipelineStage::Reserve, "reservoir covers every vertex".into()));
    }
    let mut pieces = cover(g, &rest, &cfg.cover)?;
    // a lone single-vertex piece cannot be closed onto itself
    if pieces.len() == 1 && pieces[0].len() == 1 {
        return Err(StageErr(PipelineStage::Cover, "cover is a single vertex".into()));
    }
    let mut rng = rng_for(seed, 11);
    pieces.shuffle(&mut rng);
    let paths = pieces.len();
    let (mut cycle, used) = close_up(g, &pieces, &r, &cfg.connect)?;
    let mut left = r.difference(&used).to_vec();
    let absorbed = left.len();
    left.shuffle(&mut rng);
    absorb_on_cycle(g, &mut cycle, left).map_err(|d| StageErr(PipelineStage::Absorb, d))?;
    Ok(Built { cycle, paths, absorbed })
}

/// Inserts the vertices of `left` two at a time: a stretch `v1 .. v7` of the cycle starting at a
/// joint, with edges `v2 x v4` and `v4 y v6`, becomes `v1 v3 v2 x v4 y v6 v5 v7`.
pub fn absorb_on_cycle(g: &Hypergraph3, cycle: &mut Vec<usize>, mut left: Vec<usize>) -> Result<(), String> {
    if left.len() % 2 == 1 {
        return Err(format!("{} leftover vertices is odd", left.len()));
    }
    while let Some(x) = left.pop() {
        let mut done = false;
        'partner: for yi in (0..left.len()).rev() {
            let y = left[yi];
            let k = cycle.len();
            if k < 6 {
                break;
            }
            for s in (0..k).step_by(2) {
                let at = |i: usize| cycle[(s + i) % k];
                for (p, q) in [(x, y), (y, x)] {
                    if g.has_edge(at(1), p, at(3)) && g.has_edge(at(3), q, at(5)) {
                        let stretch = [at(0), at(2), at(1), p, at(3), q, at(5), at(4), at(6)];
                        let mut next: Vec<usize> = Vec::with_capacity(k + 2);
                        let rotated: Vec<usize> = (0..k).map(|i| cycle[(s + i) % k]).collect();
                        next.extend_from_slice(&stretch);
                        if k > 6 {
                            next.extend_from_slice(&rotated[7..]);
                        } else {
                            // v7 wraps to v1; drop the duplicate
                            next.pop();
                        }
                        *cycle = next;
                        left.remove(yi);
                        done = true;
                        break 'partner;
                    }
                }
            }
        }
        if !done {
            return Err(format!("no switch absorbs vertex {x}"));
        }
    }
    Ok(())
}

fn template_attempt(
    g: &Hypergraph3,
    cfg: &PipelineConfig,
    params: &AbsorberParams,
    w_fraction: f64,
    size: usize,
    seed: u64,
) -> Result<Built, StageErr> {
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let r = random_subset(&all, size, seed, 20);
    let others: Vec<usize> = VertexSet::range(n).difference(&r).to_vec();
    let w = random_subset(&others, (w_fraction * n as f64).ceil() as usize, seed, 21);
    let params = AbsorberParams { seed: derive_seed(seed, 22), ..params.clone() };
    let asm = assemble_absorber(g, &r, &w, &params).map_err(|e| StageErr(PipelineStage::Absorber, e.to_string()))?;
    let rest = VertexSet::range(n).difference(&asm.total_vertices);
    let mut pieces = vec![vec![asm.a, asm.b]];
    if !rest.is_empty() {
        pieces.extend(cover(g, &rest, &cfg.cover)?);
    }
    let paths = pieces.len() - 1;
    // the absorber is a placeholder `a .. b` piece until the used reservoir is known
    let k = pieces.len();
    let pairs: Vec<(usize, usize)> =
        (0..k).map(|i| (*pieces[i].last().expect("nonempty"), pieces[(i + 1) % k][0])).collect();
    if pairs.iter().any(|&(u, v)| u == v) {
        return Err(StageErr(PipelineStage::Connect, "degenerate pair".into()));
    }
    let req = ConnectRequest::new(pairs, r.clone());
    let conn = connect_pairs(g, &req, &cfg.connect).map_err(|e| StageErr(PipelineStage::Connect, e.to_string()))?;
    let used = conn.internal_vertices();
    let path = absorb(&asm, &used).map_err(|e| StageErr(PipelineStage::Absorb, e.to_string()))?;
    let mut seq = path.vertices.clone();
    seq.extend_from_slice(conn.paths[0].internal());
    for (p, c) in pieces[1..].iter().zip(&conn.paths[1..]) {
        seq.extend_from_slice(p);
        seq.extend_from_slice(c.internal());
    }
    Ok(Built { cycle: seq, paths, absorbed: r.len() - used.len() })
}

/// Independent check: every cyclic vertex ordering, filtered, counted as distinct edge sets.
#[doc(hidden)]
pub fn naive_loose_hc_edge_sets(g: &Hypergraph3) -> HashSet<Vec<[usize; 3]>> {
    let n = g.n();
    let mut out = HashSet::new();
    if n % 2 == 1 || n < 6 {
        return out;
    }
    let mut perm: Vec<usize> = (1..n).collect();
    heap_permutations(&mut perm, &mut |p| {
        let mut seq = vec![0];
        seq.extend_from_slice(p);
        for shift in 0..2 {
            let rot: Vec<usize> = (0..n).map(|i| seq[(i + shift) % n]).collect();
            let c = LooseCycle::new(rot);
            if validate_loose_cycle(g, &c).is_ok() {
                let mut e = c.edges();
                e.sort_unstable();
                out.insert(e);
            }
        }
    });
    out
}

fn heap_permutations(a: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let k = a.len();
    let mut c = vec![0; k];
    f(a);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

//! Absorbers: gadget templates, 3-density, contraction, template graphs, gadget embedding,
//! and assembly of `(a, b, R)`-absorbers together with the absorb step.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connect::{connect_pairs, ConnectConfig, ConnectRequest, ConnectionMatching};
use crate::hgraph::{sorted3, validate_loose_path, GraphError, Hypergraph3, LoosePath, VertexSet};
use crate::matching::perfect_matching;
use crate::pathcover::for_each_combination;
use crate::rng::rng_for;

#[derive(Debug, Error)]
pub enum AbsorbError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{edges} edges exceed the enumeration limit of {limit}")]
    TooManyEdges { edges: usize, limit: usize },
    #[error("exhaustive check needs {needed} cases, limit is {limit}")]
    TooLarge { needed: u128, limit: u128 },
    #[error("template construction failed after {retries} attempts")]
    TemplateRetries { retries: usize },
    #[error("assembly failed at {stage}: {detail}")]
    Stage { stage: AssemblyStage, detail: String },
    #[error("no perfect matching of the template avoids {r_prime:?}")]
    NoMatching { r_prime: Vec<usize> },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyStage {
    Template,
    Reserve,
    Gadget,
    Connect,
}

impl fmt::Display for AssemblyStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AssemblyStage::Template => "template",
            AssemblyStage::Reserve => "reserve",
            AssemblyStage::Gadget => "gadget",
            AssemblyStage::Connect => "connect",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    A2,
    A1,
    Backbone1,
    ContractedBackbone,
}

/// A labelled path slot of a gadget, to be filled by a loose path of fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSlot {
    pub from: usize,
    pub to: usize,
    /// Internal labels in order from `from` to `to`.
    pub internal: Vec<usize>,
}

/// Abstract gadget on labelled vertices `0..labels.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetTemplate {
    pub kind: GadgetKind,
    pub labels: Vec<String>,
    pub edges: Vec<[usize; 3]>,
    /// Labels of the two absorbed (or contracted) vertices.
    pub roles: (usize, usize),
    /// Start and end labels of the covering and noncovering paths.
    pub ends: Option<(usize, usize)>,
    pub covering: Option<Vec<usize>>,
    pub noncovering: Option<Vec<usize>>,
    pub slots: Vec<PathSlot>,
}

struct Labels {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Labels {
    fn new() -> Self {
        Labels { names: Vec::new(), index: BTreeMap::new() }
    }

    fn id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    fn edge(&mut self, a: &str, b: &str, c: &str) -> [usize; 3] {
        [self.id(a), self.id(b), self.id(c)]
    }

    fn seq(&mut self, names: &[String]) -> Vec<usize> {
        names.iter().map(|s| self.id(s)).collect()
    }
}

fn names(prefix: &str, range: impl Iterator<Item = usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

fn s(list: &[&str]) -> Vec<String> {
    list.iter().map(|x| x.to_string()).collect()
}

fn a2_edges(l: &mut Labels, x: &str, y: &str) -> Vec<[usize; 3]> {
    vec![
        l.edge("v1", "v2", "v3"),
        l.edge("v3", "v4", "v5"),
        l.edge("v5", "v6", "v7"),
        l.edge("v2", x, "v4"),
        l.edge("v4", y, "v6"),
    ]
}

/// Edges of a length-4 path `from, internal..., to`.
fn slot_edges(l: &mut Labels, from: &str, internal: &[String], to: &str) -> Vec<[usize; 3]> {
    let mut all = vec![from.to_string()];
    all.extend_from_slice(internal);
    all.push(to.to_string());
    all.windows(3).step_by(2).map(|w| l.edge(&w[0], &w[1], &w[2])).collect()
}

/// The two five-edge side structures: cycle arc `x6..x10` (or its contracted form) and the `a` edges.
fn side_edges(l: &mut Labels, side: char, corner: char, contracted: bool) -> Vec<[usize; 3]> {
    let v = |i: usize| format!("{side}{i}");
    let c = |i: usize| format!("{corner}{i}");
    let mut e = Vec::new();
    if contracted {
        let hub = format!("{side}'");
        e.push(l.edge(&hub, &v(7), &v(8)));
        e.push(l.edge(&v(8), &v(9), &v(10)));
        e.push(l.edge(&c(1), &c(2), &c(3)));
        e.push(l.edge(&c(2), &c(4), &hub));
        e.push(l.edge(&c(3), &c(4), &v(9)));
    } else {
        let centre = side.to_string();
        e.push(l.edge(&v(1), &v(2), &v(3)));
        e.push(l.edge(&v(3), &centre, &v(4)));
        e.push(l.edge(&v(4), &v(5), &v(6)));
        e.push(l.edge(&v(6), &v(7), &v(8)));
        e.push(l.edge(&v(8), &v(9), &v(10)));
        e.push(l.edge(&c(1), &c(2), &c(3)));
        e.push(l.edge(&c(2), &c(4), &v(2)));
        e.push(l.edge(&c(3), &c(4), &v(9)));
    }
    e
}

/// Builds the labelled gadget of the given kind.
pub fn build_gadget_template(kind: GadgetKind) -> GadgetTemplate {
    let mut l = Labels::new();
    let t = match kind {
        GadgetKind::A2 => {
            let (x, y) = (l.id("x"), l.id("y"));
            let v: Vec<String> = names("v", 1..8);
            l.seq(&v);
            let edges = a2_edges(&mut l, "x", "y");
            let covering = l.seq(&s(&["v1", "v3", "v2", "x", "v4", "y", "v6", "v5", "v7"]));
            let noncovering = l.seq(&v);
            let ends = (l.id("v1"), l.id("v7"));
            GadgetTemplate {
                kind,
                labels: Vec::new(),
                edges,
                roles: (x, y),
                ends: Some(ends),
                covering: Some(covering),
                noncovering: Some(noncovering),
                slots: Vec::new(),
            }
        }
        GadgetKind::ContractedBackbone => {
            let (x, y) = (l.id("x'"), l.id("y'"));
            let mut edges = side_edges(&mut l, 'x', 'a', true);
            edges.extend(side_edges(&mut l, 'y', 'b', true));
            edges.extend(a2_edges(&mut l, "x7", "y7"));
            GadgetTemplate {
                kind,
                labels: Vec::new(),
                edges,
                roles: (x, y),
                ends: None,
                covering: None,
                noncovering: None,
                slots: Vec::new(),
            }
        }
        GadgetKind::A1 | GadgetKind::Backbone1 => {
            let (x, y) = (l.id("x"), l.id("y"));
            let mut edges = side_edges(&mut l, 'x', 'a', false);
            edges.extend(side_edges(&mut l, 'y', 'b', false));
            edges.extend(a2_edges(&mut l, "x7", "y7"));
            let mut slots = Vec::new();
            let mut tpl = GadgetTemplate {
                kind,
                labels: Vec::new(),
                edges: Vec::new(),
                roles: (x, y),
                ends: None,
                covering: None,
                noncovering: None,
                slots: Vec::new(),
            };
            if kind == GadgetKind::A1 {
                let px = names("px", 1..8);
                let py = names("py", 1..8);
                let c = names("c", 1..8);
                let d = names("d", 1..8);
                for (from, internal, to) in [("x1", &px, "x10"), ("y1", &py, "y10"), ("x5", &c, "y5"), ("v7", &d, "b1")] {
                    edges.extend(slot_edges(&mut l, from, internal, to));
                    slots.push(PathSlot { from: l.id(from), to: l.id(to), internal: l.seq(internal) });
                }
                let rev = |v: &[String]| v.iter().rev().cloned().collect::<Vec<_>>();
                let mut cov = s(&["a1", "a2", "a3", "a4", "x9", "x8", "x10"]);
                cov.extend(rev(&px));
                cov.extend(s(&["x1", "x2", "x3", "x", "x4", "x6", "x5"]));
                cov.extend(c.iter().cloned());
                cov.extend(s(&["y5", "y6", "y4", "y", "y3", "y2", "y1"]));
                cov.extend(py.iter().cloned());
                cov.extend(s(&["y10", "y8", "y9", "b4", "b3", "b2", "b1"]));
                cov.extend(rev(&d));
                cov.extend(s(&["v7", "v5", "v6", "y7", "v4", "x7", "v2", "v3", "v1"]));
                let mut non = s(&["a1", "a3", "a2", "a4", "x2", "x3", "x1"]);
                non.extend(px.iter().cloned());
                non.extend(s(&["x10", "x9", "x8", "x7", "x6", "x4", "x5"]));
                non.extend(c.iter().cloned());
                non.extend(s(&["y5", "y4", "y6", "y7", "y8", "y9", "y10"]));
                non.extend(rev(&py));
                non.extend(s(&["y1", "y3", "y2", "b4", "b2", "b3", "b1"]));
                non.extend(rev(&d));
                non.extend(s(&["v7", "v6", "v5", "v4", "v3", "v2", "v1"]));
                tpl.covering = Some(l.seq(&cov));
                tpl.noncovering = Some(l.seq(&non));
                tpl.ends = Some((l.id("a1"), l.id("v1")));
            }
            tpl.edges = edges;
            tpl.slots = slots;
            tpl
        }
    };
    let t = GadgetTemplate { labels: l.names, ..t };
    debug_assert!(t.hypergraph().is_linear());
    t
}

impl GadgetTemplate {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn hypergraph(&self) -> Hypergraph3 {
        Hypergraph3::new(self.labels.len(), self.edges.iter().copied()).expect("gadget edges are well formed")
    }

    /// Edges of the slot paths, which an embedding of the backbone leaves open.
    fn slot_edge_set(&self) -> Vec<[usize; 3]> {
        self.slots
            .iter()
            .flat_map(|s| {
                let mut seq = vec![s.from];
                seq.extend_from_slice(&s.internal);
                seq.push(s.to);
                LoosePath::new(seq).edges()
            })
            .collect()
    }

    /// The template without its slot paths and their internal vertices, plus the old-to-new label map.
    fn backbone(&self) -> (Hypergraph3, Vec<Option<usize>>) {
        let slot_internal: Vec<usize> = self.slots.iter().flat_map(|s| s.internal.iter().copied()).collect();
        let mut map = vec![None; self.labels.len()];
        let mut next = 0;
        for (i, m) in map.iter_mut().enumerate() {
            if !slot_internal.contains(&i) {
                *m = Some(next);
                next += 1;
            }
        }
        let slot_edges = self.slot_edge_set();
        let edges: Vec<[usize; 3]> = self
            .edges
            .iter()
            .map(|e| sorted3(*e))
            .filter(|e| !slot_edges.contains(e))
            .map(|e| e.map(|v| map[v].expect("backbone edge avoids slot internals")))
            .collect();
        (Hypergraph3::new(next, edges).expect("backbone edges are well formed"), map)
    }
}

/// Exact 3-density with a witness subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M3Density {
    pub value: Rational64,
    pub edges: Vec<[usize; 3]>,
    pub vertices: Vec<usize>,
}

impl M3Density {
    /// `p/q` with the fraction reduced; zero is `0/1`.
    pub fn fraction(&self) -> String {
        format!("{}/{}", self.value.numer(), self.value.denom())
    }
}

impl Serialize for M3Density {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("M3Density", 3)?;
        st.serialize_field("m3", &self.fraction())?;
        st.serialize_field("edges", &self.edges)?;
        st.serialize_field("vertices", &self.vertices)?;
        st.end()
    }
}

pub const M3_EDGE_LIMIT: usize = 20;

/// `max (e(H')-1)/(v(H')-3)` over subgraphs with at least four vertices, by enumerating edge subsets.
///
/// A subset whose support has fewer than four vertices is padded with isolated vertices.
/// Graphs on fewer than four vertices have no admissible subgraph and get `0`.
pub fn m3_density(h: &Hypergraph3) -> Result<M3Density, AbsorbError> {
    let e = h.edge_count();
    if e > M3_EDGE_LIMIT {
        return Err(AbsorbError::TooManyEdges { edges: e, limit: M3_EDGE_LIMIT });
    }
    let n = h.n();
    if n < 4 {
        return Ok(M3Density { value: Rational64::from_integer(0), edges: Vec::new(), vertices: Vec::new() });
    }
    let edges = h.edge_list();
    // support masks as vertex bitsets over at most 64 distinct used vertices
    let used: Vec<usize> = {
        let mut u: Vec<usize> = edges.iter().flatten().copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    if used.len() > 64 {
        return Err(AbsorbError::InvalidInput("more than 64 non-isolated vertices".into()));
    }
    let pos = |v: usize| used.binary_search(&v).expect("used vertex");
    let masks: Vec<u64> = edges.iter().map(|t| t.iter().fold(0u64, |m, &v| m | 1 << pos(v))).collect();
    let mut support = vec![0u64; 1 << e];
    let mut best = (Rational64::new(-1, n as i64 - 3), 0usize);
    for sub in 1usize..1 << e {
        let low = sub.trailing_zeros() as usize;
        support[sub] = support[sub & (sub - 1)] | masks[low];
        let v = (support[sub].count_ones() as i64).max(4);
        let val = Rational64::new(sub.count_ones() as i64 - 1, v - 3);
        if val > best.0 {
            best = (val, sub);
        }
    }
    let (value, sub) = best;
    let chosen: Vec<[usize; 3]> = (0..e).filter(|&i| sub >> i & 1 == 1).map(|i| edges[i]).collect();
    let mut vertices: Vec<usize> = chosen.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    let target = if sub == 0 { n } else { vertices.len().max(4) };
    let mut pad = 0;
    while vertices.len() < target {
        if !vertices.contains(&pad) {
            vertices.push(pad);
        }
        pad += 1;
    }
    vertices.sort_unstable();
    Ok(M3Density { value, edges: chosen, vertices })
}

/// Two disjoint vertex sets and disjoint 4-tuples outside them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionSpec {
    pub u1: VertexSet,
    pub u2: VertexSet,
    pub tuples: Vec<[usize; 4]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Vertex(usize),
    Tuple(usize),
}

/// Contracted graph; vertex `i` of `graph` came from `origin[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contracted {
    pub graph: Hypergraph3,
    pub origin: Vec<Origin>,
}

impl Contracted {
    pub fn vertex_of(&self, v: usize) -> Option<usize> {
        self.origin.iter().position(|o| *o == Origin::Vertex(v))
    }

    pub fn tuple_vertex(&self, i: usize) -> Option<usize> {
        self.origin.iter().position(|o| *o == Origin::Tuple(i))
    }
}

impl ContractionSpec {
    pub fn validate(&self, n: usize) -> Result<(), AbsorbError> {
        let bad = |m: String| Err(AbsorbError::InvalidInput(m));
        self.u1.check_range(n)?;
        self.u2.check_range(n)?;
        if !self.u1.is_disjoint(&self.u2) {
            return bad("U1 and U2 intersect".into());
        }
        let mut seen = self.u1.union(&self.u2);
        for (i, t) in self.tuples.iter().enumerate() {
            for &w in t {
                if w >= n {
                    return bad(format!("tuple {i} has vertex {w} out of range"));
                }
                if !seen.insert(w) {
                    return bad(format!("tuple {i} reuses vertex {w}"));
                }
            }
        }
        Ok(())
    }
}

/// `G(U, F)`: `G[U1 ∪ U2]` plus, per tuple `w`, edges `w u v` for `u, v ∈ U1` with `w2 u v ∈ G`
/// and for `u, v ∈ U2` with `w4 u v ∈ G`. Vertices are `U1 ∪ U2` ascending, then one per tuple.
pub fn contract(g: &Hypergraph3, spec: &ContractionSpec) -> Result<Contracted, AbsorbError> {
    spec.validate(g.n())?;
    let base = spec.u1.union(&spec.u2);
    let mut origin: Vec<Origin> = base.iter().map(Origin::Vertex).collect();
    let mut local = vec![usize::MAX; g.n()];
    for (i, v) in base.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for e in g.edges() {
        if e.iter().all(|&v| local[v] != usize::MAX) {
            edges.push(e.map(|v| local[v]));
        }
    }
    for (i, t) in spec.tuples.iter().enumerate() {
        let w = origin.len();
        origin.push(Origin::Tuple(i));
        for (anchor, side) in [(t[1], &spec.u1), (t[3], &spec.u2)] {
            for (u, v) in g.link(anchor) {
                if side.contains(u) && side.contains(v) {
                    edges.push([w, local[u], local[v]]);
                }
            }
        }
    }
    let graph = Hypergraph3::new(origin.len(), edges)?;
    Ok(Contracted { graph, origin })
}

/// Disjoint pairs `{u, v}` closing an edge with `x`, and disjoint 4-tuples `(w1, w2, w3, w4)` each
/// attached to a pair with `u w1 w2` and `v w3 w4` edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionFamilies {
    pub pairs: Vec<(usize, usize)>,
    pub tuples: Vec<[usize; 4]>,
    /// Index into `pairs` for each tuple, oriented so that `pairs[k].0` goes with `w1, w2`.
    pub tuple_pair: Vec<usize>,
}

/// Greedy maximal families inside `w ∖ {x}`: pairs first, then tuples (in ascending order).
pub fn expansion_families(g: &Hypergraph3, x: usize, w: &VertexSet, max_pairs: Option<usize>) -> ExpansionFamilies {
    let mut free = vec![false; g.n()];
    for v in w.iter().filter(|&v| v != x) {
        free[v] = true;
    }
    let mut pairs = Vec::new();
    for (u, v) in g.link(x) {
        if max_pairs.is_some_and(|m| pairs.len() >= m) {
            break;
        }
        if free[u] && free[v] {
            free[u] = false;
            free[v] = false;
            pairs.push((u, v));
        }
    }
    let first_pair = |c: usize, free: &[bool]| g.link(c).find(|&(a, b)| free[a] && free[b]);
    let mut tuples = Vec::new();
    let mut tuple_pair = Vec::new();
    for k in 0..pairs.len() {
        loop {
            let (u, v) = pairs[k];
            let mut found = None;
            for (p, q) in [(u, v), (v, u)] {
                if let Some((w1, w2)) = first_pair(p, &free) {
                    free[w1] = false;
                    free[w2] = false;
                    let second = first_pair(q, &free);
                    free[w1] = true;
                    free[w2] = true;
                    if let Some((w3, w4)) = second {
                        found = Some(((p, q), [w1, w2, w3, w4]));
                        break;
                    }
                }
            }
            let Some(((p, q), t)) = found else { break };
            pairs[k] = (p, q);
            for &v in &t {
                free[v] = false;
            }
            tuples.push(t);
            tuple_pair.push(k);
        }
    }
    ExpansionFamilies { pairs, tuples, tuple_pair }
}

/// Graph `T` on `0..order` with special set `Z` of size `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateGraph {
    pub order: usize,
    pub edges: Vec<(usize, usize)>,
    pub z: Vec<usize>,
    pub max_degree: usize,
}

impl TemplateGraph {
    pub fn new(order: usize, edges: Vec<(usize, usize)>, z: Vec<usize>) -> Result<Self, AbsorbError> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v || u >= order || v >= order {
                return Err(AbsorbError::InvalidInput(format!("bad template edge ({u}, {v})")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut z = z;
        z.sort_unstable();
        z.dedup();
        if z.iter().any(|&v| v >= order) {
            return Err(AbsorbError::InvalidInput("special vertex out of range".into()));
        }
        let mut deg = vec![0; order];
        for &(u, v) in &norm {
            deg[u] += 1;
            deg[v] += 1;
        }
        let max_degree = deg.into_iter().max().unwrap_or(0);
        Ok(TemplateGraph { order, edges: norm, z, max_degree })
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    /// Whether `2m ≤ v(T)`.
    pub fn has_room(&self) -> bool {
        2 * self.m() <= self.order
    }

    /// Perfect matching of `T - removed`.
    pub fn matching_without(&self, removed: &[usize]) -> Option<Vec<(usize, usize)>> {
        let mut keep = vec![true; self.order];
        for &v in removed {
            keep[v] = false;
        }
        perfect_matching(self.order, &self.edges, Some(&keep))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TemplateMode {
    /// Complete graph on `2m` vertices.
    ExactSmall,
    /// Random bipartite part of bounded degree plus the square of a cycle on `Z`.
    RandomBoundedDegree { degree: usize, retries: usize, trials: usize },
    /// Vertices `0..order`, `i ~ i ± k` for `k ≤ span`, `Z = 0..m`.
    Circulant { order: usize, span: usize },
    /// Fewest-edge circulant on `m` or `m + 1` vertices passing exhaustive verification.
    Compact,
}

impl TemplateMode {
    pub fn random(degree: usize) -> Self {
        TemplateMode::RandomBoundedDegree { degree, retries: 5, trials: 1000 }
    }
}

pub const EXACT_SMALL_MAX: usize = 12;
pub const TEMPLATE_EXHAUSTIVE_LIMIT: u128 = 1_000_000;

fn circulant(order: usize, span: usize, m: usize) -> Result<TemplateGraph, AbsorbError> {
    if m > order {
        return Err(AbsorbError::InvalidInput(format!("m = {m} exceeds order {order}")));
    }
    let mut edges = Vec::new();
    for i in 0..order {
        for k in 1..=span {
            let j = (i + k) % order;
            if i != j {
                edges.push((i, j));
            }
        }
    }
    TemplateGraph::new(order, edges, (0..m).collect())
}

/// Builds a template for `|Z| = m`. Random mode resamples until sampled verification passes.
pub fn build_template(m: usize, mode: &TemplateMode, seed: u64) -> Result<TemplateGraph, AbsorbError> {
    if m == 0 {
        return TemplateGraph::new(0, Vec::new(), Vec::new());
    }
    match *mode {
        TemplateMode::ExactSmall => {
            if m > EXACT_SMALL_MAX {
                return Err(AbsorbError::InvalidInput(format!("exact mode supports m ≤ {EXACT_SMALL_MAX}")));
            }
            let order = 2 * m;
            let edges = (0..order).flat_map(|u| (u + 1..order).map(move |v| (u, v))).collect();
            TemplateGraph::new(order, edges, (0..m).collect())
        }
        TemplateMode::Circulant { order, span } => circulant(order, span, m),
        TemplateMode::Compact => {
            let mut candidates = Vec::new();
            for order in [m, m + 1] {
                for span in 1..=order / 2 {
                    if order >= 2 {
                        candidates.push((circulant(order, span, m)?, order));
                    }
                }
            }
            candidates.sort_by_key(|(t, order)| (t.edges.len(), *order));
            for (t, _) in candidates {
                if verify_template(&t, &TemplateCheck::Exhaustive)?.passed() {
                    return Ok(t);
                }
            }
            Err(AbsorbError::TemplateRetries { retries: 0 })
        }
        TemplateMode::RandomBoundedDegree { degree, retries, trials } => {
            for attempt in 0..retries.max(1) {
                let t = random_template(m, degree, seed, attempt as u64);
                let check = TemplateCheck::Sampled { trials, seed: crate::rng::derive_seed(seed, attempt as u64) };
                if verify_template(&t, &check)?.passed() {
                    return Ok(t);
                }
            }
            Err(AbsorbError::TemplateRetries { retries })
        }
    }
}

fn random_template(m: usize, degree: usize, seed: u64, attempt: u64) -> TemplateGraph {
    let s = m.div_ceil(2);
    let (nx, ny) = (3 * s, 2 * s);
    let order = nx + ny + m;
    let z0 = nx + ny;
    let mut rng = rng_for(seed, 1000 + attempt);
    let mut load = vec![0usize; order];
    let mut edges = Vec::new();
    for x in 0..nx {
        let mut open: Vec<usize> = (nx..order).filter(|&v| load[v] < degree).collect();
        open.shuffle(&mut rng);
        for &v in open.iter().take(degree) {
            load[v] += 1;
            edges.push((x, v));
        }
    }
    for i in 0..m {
        for k in 1..=2 {
            let j = (i + k) % m;
            if i != j {
                edges.push((z0 + i, z0 + j));
            }
        }
    }
    TemplateGraph::new(order, edges, (z0..order).collect()).expect("well-formed random template")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TemplateCheck {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateReport {
    pub exhaustive: bool,
    pub tested: usize,
    pub failures: Vec<Vec<usize>>,
}

impl TemplateReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Sizes `j < m/2` with `v(T) - j` even.
fn removal_sizes(order: usize, m: usize) -> Vec<usize> {
    (0..m).filter(|&j| 2 * j < m && (order - j).is_multiple_of(2)).collect()
}

/// Checks that `T - Z'` has a perfect matching for every tested `Z' ⊆ Z` with `|Z'| < m/2`
/// and `|V(T) ∖ Z'|` even.
pub fn verify_template(t: &TemplateGraph, check: &TemplateCheck) -> Result<TemplateReport, AbsorbError> {
    let m = t.m();
    let sizes = removal_sizes(t.order, m);
    let mut report = TemplateReport { exhaustive: false, tested: 0, failures: Vec::new() };
    match check {
        TemplateCheck::Exhaustive => {
            let needed: u128 = (0..m).filter(|&j| 2 * j < m).map(|j| binom(m, j)).sum();
            if needed > TEMPLATE_EXHAUSTIVE_LIMIT {
                return Err(AbsorbError::TooLarge { needed, limit: TEMPLATE_EXHAUSTIVE_LIMIT });
            }
            report.exhaustive = true;
            for &j in &sizes {
                for_each_combination(&t.z, j, |zp| {
                    report.tested += 1;
                    if t.matching_without(zp).is_none() {
                        report.failures.push(zp.to_vec());
                    }
                    true
                });
            }
        }
        TemplateCheck::Sampled { trials, seed } => {
            if sizes.is_empty() {
                return Ok(report);
            }
            let mut rng = rng_for(*seed, 2000);
            for _ in 0..*trials {
                let j = sizes[rng.gen_range(0..sizes.len())];
                let mut zp: Vec<usize> = t.z.choose_multiple(&mut rng, j).copied().collect();
                zp.sort_unstable();
                report.tested += 1;
                if t.matching_without(&zp).is_none() && !report.failures.contains(&zp) {
                    report.failures.push(zp);
                }
            }
        }
    }
    Ok(report)
}

/// Result of a pattern search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum EmbedOutcome {
    /// Host vertex for every pattern vertex.
    Found { map: Vec<usize> },
    /// The search space was exhausted without a (further accepted) embedding.
    Exhausted { nodes: u64 },
    Budget { nodes: u64 },
}

enum Step {
    One { p: usize, q: usize, r: usize, checks: Vec<[usize; 3]> },
    Two { q: usize, p1: usize, p2: usize, checks: Vec<[usize; 3]> },
    Three { p: [usize; 3], checks: Vec<[usize; 3]> },
    Free { p: usize },
}

fn plan(pattern: &Hypergraph3, fixed: &[(usize, usize)]) -> Vec<Step> {
    let k = pattern.n();
    let mut placed = vec![false; k];
    for &(p, _) in fixed {
        placed[p] = true;
    }
    let edges = pattern.edge_list();
    let mut done = vec![false; edges.len()];
    let mut steps = Vec::new();
    let mut pre_checks = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        if e.iter().all(|&v| placed[v]) {
            done[i] = true;
            pre_checks.push(*e);
        }
    }
    if !pre_checks.is_empty() {
        // edges among fixed vertices: a degenerate first step with no new vertex
        steps.push(Step::Three { p: [usize::MAX; 3], checks: pre_checks });
    }
    while let Some(i) = (0..edges.len())
        .filter(|&i| !done[i])
        .max_by_key(|&i| (edges[i].iter().filter(|&&v| placed[v]).count(), std::cmp::Reverse(i)))
    {
        let e = edges[i];
        done[i] = true;
        let fresh: Vec<usize> = e.iter().copied().filter(|&v| !placed[v]).collect();
        let old: Vec<usize> = e.iter().copied().filter(|&v| placed[v]).collect();
        for &v in &fresh {
            placed[v] = true;
        }
        let mut checks = Vec::new();
        for (j, f) in edges.iter().enumerate() {
            if !done[j] && f.iter().all(|&v| placed[v]) {
                done[j] = true;
                checks.push(*f);
            }
        }
        steps.push(match fresh.len() {
            1 => Step::One { p: fresh[0], q: old[0], r: old[1], checks },
            2 => Step::Two { q: old[0], p1: fresh[0], p2: fresh[1], checks },
            _ => Step::Three { p: [fresh[0], fresh[1], fresh[2]], checks },
        });
    }
    for p in 0..k {
        if !placed[p] {
            steps.push(Step::Free { p });
        }
    }
    steps
}

struct Embedder<'a, F: FnMut(&[usize]) -> bool> {
    g: &'a Hypergraph3,
    steps: Vec<Step>,
    map: Vec<usize>,
    used: Vec<bool>,
    allowed: &'a dyn Fn(usize, usize) -> bool,
    nodes: u64,
    budget: u64,
    visit: F,
}

impl<F: FnMut(&[usize]) -> bool> Embedder<'_, F> {
    fn ok(&self, p: usize, v: usize) -> bool {
        !self.used[v] && (self.allowed)(p, v)
    }

    fn checks_hold(&self, checks: &[[usize; 3]]) -> bool {
        checks.iter().all(|e| self.g.has_edge(self.map[e[0]], self.map[e[1]], self.map[e[2]]))
    }

    fn set(&mut self, p: usize, v: usize) {
        self.map[p] = v;
        self.used[v] = true;
    }

    fn unset(&mut self, p: usize) {
        self.used[self.map[p]] = false;
        self.map[p] = usize::MAX;
    }

    /// `Err` on budget; `Ok(false)` once the visitor asks to stop.
    fn run(&mut self, i: usize) -> Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if i == self.steps.len() {
            return Ok((self.visit)(&self.map));
        }
        let g = self.g;
        match &self.steps[i] {
            Step::One { p, q, r, checks } => {
                let (p, checks) = (*p, checks.clone());
                for &v in g.common(self.map[*q], self.map[*r]) {
                    let v = v as usize;
                    if !self.ok(p, v) {
                        continue;
                    }
                    self.set(p, v);
                    let r = if self.checks_hold(&checks) { self.run(i + 1) } else { Ok(true) };
                    self.unset(p);
                    if !r? {
                        return Ok(false);
                    }
                }
            }
            Step::Two { q, p1, p2, checks } => {
                let (q, p1, p2, checks) = (*q, *p1, *p2, checks.clone());
                let anchor = self.map[q];
                for u in 0..g.n() {
                    if !self.ok(p1, u) {
                        continue;
                    }
                    self.set(p1, u);
                    for &v in g.common(anchor, u) {
                        let v = v as usize;
                        if !self.ok(p2, v) {
                            continue;
                        }
                        self.set(p2, v);
                        let r = if self.checks_hold(&checks) { self.run(i + 1) } else { Ok(true) };
                        self.unset(p2);
                        if !r.inspect_err(|_| self.unset(p1))? {
                            self.unset(p1);
                            return Ok(false);
                        }
                    }
                    self.unset(p1);
                }
            }
            Step::Three { p, checks } => {
                let (p, checks) = (*p, checks.clone());
                if p[0] == usize::MAX {
                    return if self.checks_hold(&checks) { self.run(i + 1) } else { Ok(true) };
                }
                for e in g.edges() {
                    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                        let img = perm.map(|j| e[j]);
                        if (0..3).any(|j| !self.ok(p[j], img[j])) {
                            continue;
                        }
                        for j in 0..3 {
                            self.set(p[j], img[j]);
                        }
                        let r = if self.checks_hold(&checks) { self.run(i + 1) } else { Ok(true) };
                        for &pj in &p {
                            self.unset(pj);
                        }
                        if !r? {
                            return Ok(false);
                        }
                    }
                }
            }
            Step::Free { p } => {
                let p = *p;
                for v in 0..g.n() {
                    if !self.ok(p, v) {
                        continue;
                    }
                    self.set(p, v);
                    let r = self.run(i + 1);
                    self.unset(p);
                    if !r? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Enumerates injective maps of `pattern` into `g` that respect `fixed` and `allowed(pattern, host)`.
///
/// `visit` receives each embedding and returns whether to continue. Returns the node count and
/// `true` if the budget ran out.
pub fn embed_pattern(
    g: &Hypergraph3,
    pattern: &Hypergraph3,
    fixed: &[(usize, usize)],
    allowed: &dyn Fn(usize, usize) -> bool,
    budget: u64,
    visit: impl FnMut(&[usize]) -> bool,
) -> (u64, bool) {
    let mut e = Embedder {
        g,
        steps: plan(pattern, fixed),
        map: vec![usize::MAX; pattern.n()],
        used: vec![false; g.n()],
        allowed,
        nodes: 0,
        budget,
        visit,
    };
    for &(p, v) in fixed {
        if v >= g.n() || e.used[v] {
            return (0, false);
        }
        e.set(p, v);
    }
    let r = e.run(0);
    (e.nodes, r.is_err())
}

/// First embedding, or why there is none.
pub fn first_embedding(
    g: &Hypergraph3,
    pattern: &Hypergraph3,
    fixed: &[(usize, usize)],
    allowed: &dyn Fn(usize, usize) -> bool,
    budget: u64,
) -> EmbedOutcome {
    let mut found = None;
    let (nodes, out) = embed_pattern(g, pattern, fixed, allowed, budget, |m| {
        found = Some(m.to_vec());
        false
    });
    match found {
        Some(map) => EmbedOutcome::Found { map },
        None if out => EmbedOutcome::Budget { nodes },
        None => EmbedOutcome::Exhausted { nodes },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedOptions {
    pub node_budget: u64,
    /// Reservoir for the path slots of gadgets that have them.
    pub slot_reservoir: Option<VertexSet>,
    pub connect: ConnectConfig,
    /// Backbone embeddings tried before giving up on filling the slots.
    pub slot_attempts: usize,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions { node_budget: 2_000_000, slot_reservoir: None, connect: ConnectConfig::default(), slot_attempts: 50 }
    }
}

/// Copy of a gadget with `roles` mapped to `x, y` and every other vertex outside `forbidden`.
///
/// Gadgets with path slots embed their backbone first and then fill the slots with exact-length
/// paths through `opts.slot_reservoir` (minus the backbone and `forbidden`).
pub fn find_gadget_embedding(
    g: &Hypergraph3,
    kind: GadgetKind,
    x: usize,
    y: usize,
    forbidden: &VertexSet,
    opts: &EmbedOptions,
) -> Result<EmbedOutcome, AbsorbError> {
    if x == y || x >= g.n() || y >= g.n() {
        return Err(AbsorbError::InvalidInput("x and y must be distinct vertices".into()));
    }
    if forbidden.contains(x) || forbidden.contains(y) {
        return Err(AbsorbError::InvalidInput("x and y must not be forbidden".into()));
    }
    let tpl = build_gadget_template(kind);
    let (rx, ry) = tpl.roles;
    let mask = forbidden.mask(g.n());
    let allowed = |_: usize, v: usize| !mask[v];
    if tpl.slots.is_empty() {
        return Ok(first_embedding(g, &tpl.hypergraph(), &[(rx, x), (ry, y)], &allowed, opts.node_budget));
    }
    let Some(reservoir) = &opts.slot_reservoir else {
        return Err(AbsorbError::InvalidInput("gadget has path slots but no slot reservoir was given".into()));
    };
    let (bb, to_bb) = tpl.backbone();
    let from_bb: Vec<usize> = {
        let mut v = vec![0; bb.n()];
        for (old, new) in to_bb.iter().enumerate() {
            if let Some(new) = new {
                v[*new] = old;
            }
        }
        v
    };
    let fixed = [(to_bb[rx].expect("role in backbone"), x), (to_bb[ry].expect("role in backbone"), y)];
    let mut result = None;
    let mut attempts = 0;
    let (nodes, out) = embed_pattern(g, &bb, &fixed, &allowed, opts.node_budget, |bmap| {
        attempts += 1;
        let image: VertexSet = bmap.iter().copied().collect();
        let pool = reservoir.difference(&image).difference(forbidden);
        let pairs = tpl.slots.iter().map(|s| (bmap[to_bb[s.from].unwrap()], bmap[to_bb[s.to].unwrap()])).collect();
        let req = ConnectRequest::exact(pairs, pool, 4);
        if let Ok(paths) = connect_pairs(g, &req, &opts.connect) {
            let mut map = vec![usize::MAX; tpl.vertex_count()];
            for (b, &old) in from_bb.iter().enumerate() {
                map[old] = bmap[b];
            }
            for (slot, path) in tpl.slots.iter().zip(&paths.paths) {
                for (&label, &v) in slot.internal.iter().zip(path.internal()) {
                    map[label] = v;
                }
            }
            result = Some(map);
            return false;
        }
        attempts < opts.slot_attempts
    });
    Ok(match result {
        Some(map) => EmbedOutcome::Found { map },
        None if out || attempts >= opts.slot_attempts => EmbedOutcome::Budget { nodes },
        None => EmbedOutcome::Exhausted { nodes },
    })
}

pub const A2_COUNT_MAX_N: usize = 16;

/// Exact number of injective 7-tuples `(v1..v7)` forming a copy of the `xy`-gadget with two edges per side.
pub fn count_a2_embeddings(g: &Hypergraph3, x: usize, y: usize) -> Result<u64, AbsorbError> {
    if g.n() > A2_COUNT_MAX_N {
        return Err(AbsorbError::InvalidInput(format!("count needs n ≤ {A2_COUNT_MAX_N}")));
    }
    if x == y || x >= g.n() || y >= g.n() {
        return Err(AbsorbError::InvalidInput("x and y must be distinct vertices".into()));
    }
    let tpl = build_gadget_template(GadgetKind::A2);
    let mut count = 0u64;
    embed_pattern(g, &tpl.hypergraph(), &[(tpl.roles.0, x), (tpl.roles.1, y)], &|_, _| true, u64::MAX, |_| {
        count += 1;
        true
    });
    Ok(count)
}

/// One embedded gadget: template edge `(i, j)` of `T`, absorbing `f(i), f(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetEmbedding {
    pub template_edge: (usize, usize),
    /// Host vertex per gadget label.
    pub map: Vec<usize>,
}

/// An `(a, b, R)`-absorber built from a template graph, gadgets and connecting paths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbsorberAssembly {
    pub kind: GadgetKind,
    pub a: usize,
    pub b: usize,
    pub r: VertexSet,
    pub r0: VertexSet,
    pub template: TemplateGraph,
    /// Host vertex of each template vertex.
    pub f: Vec<usize>,
    pub gadgets: Vec<GadgetEmbedding>,
    /// Path `i` joins gadget `i` to gadget `i + 1`; with no gadgets, the single `ab`-path.
    pub connectors: ConnectionMatching,
    pub total_vertices: VertexSet,
    /// The absorber as a subgraph of the host.
    pub graph: Hypergraph3,
    #[serde(skip)]
    template_gadget: GadgetTemplate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorberParams {
    pub gadget: GadgetKind,
    pub template: TemplateMode,
    pub seed: u64,
    pub embed: EmbedOptions,
    /// Full restarts of gadget placement with a reshuffled edge order.
    pub restarts: usize,
}

impl Default for AbsorberParams {
    fn default() -> Self {
        AbsorberParams {
            gadget: GadgetKind::A2,
            template: TemplateMode::Compact,
            seed: 0,
            embed: EmbedOptions::default(),
            restarts: 3,
        }
    }
}

fn stage(stage: AssemblyStage, detail: impl Into<String>) -> AbsorbError {
    AbsorbError::Stage { stage, detail: detail.into() }
}

/// Builds an `(a, b, R)`-absorber: template `T` for `m = |R|`, a bijection `f` onto `R₀ ∪ R`
/// with `Z → R`, one gadget per template edge with pairwise disjoint internals avoiding `W`,
/// and connecting paths through `W` between consecutive gadgets.
pub fn assemble_absorber(
    g: &Hypergraph3,
    r: &VertexSet,
    w: &VertexSet,
    params: &AbsorberParams,
) -> Result<AbsorberAssembly, AbsorbError> {
    r.check_range(g.n())?;
    w.check_range(g.n())?;
    if !r.is_disjoint(w) {
        return Err(AbsorbError::InvalidInput("R and W intersect".into()));
    }
    if !matches!(params.gadget, GadgetKind::A1 | GadgetKind::A2) {
        return Err(AbsorbError::InvalidInput("absorbers use the A1 or A2 gadget".into()));
    }
    let tpl = build_gadget_template(params.gadget);
    let (start, end) = tpl.ends.expect("absorbing gadget has endpoints");
    let mut rng = rng_for(params.seed, 3000);
    let outside = VertexSet::range(g.n()).difference(r).difference(w);

    if r.is_empty() {
        let edge = g
            .edges()
            .find(|e| e.iter().all(|&v| outside.contains(v)))
            .ok_or_else(|| stage(AssemblyStage::Gadget, "no edge avoids R and W"))?;
        let path = LoosePath::new(edge.to_vec());
        let graph = Hypergraph3::new(g.n(), [edge])?;
        return Ok(AbsorberAssembly {
            kind: params.gadget,
            a: edge[0],
            b: edge[2],
            r: r.clone(),
            r0: VertexSet::new(),
            template: TemplateGraph::new(0, Vec::new(), Vec::new())?,
            f: Vec::new(),
            gadgets: Vec::new(),
            connectors: ConnectionMatching { paths: vec![path] },
            total_vertices: edge.into_iter().collect(),
            graph,
            template_gadget: tpl,
        });
    }

    let template = build_template(r.len(), &params.template, params.seed).map_err(|e| stage(AssemblyStage::Template, e.to_string()))?;
    let extra = template.order - template.m();
    let mut pool = outside.to_vec();
    pool.shuffle(&mut rng);
    if pool.len() < extra {
        return Err(stage(AssemblyStage::Reserve, format!("need {extra} template vertices outside R and W")));
    }
    let r0: VertexSet = pool[..extra].iter().copied().collect();
    let mut f = vec![usize::MAX; template.order];
    {
        let mut rest = r0.iter();
        let mut rv = r.iter();
        for (t, slot) in f.iter_mut().enumerate() {
            *slot = if template.z.binary_search(&t).is_ok() { rv.next() } else { rest.next() }.expect("sizes match");
        }
    }
    let anchors = r.union(&r0);

    let mut last_err = String::new();
    let mut order: Vec<(usize, usize)> = template.edges.clone();
    for attempt in 0..=params.restarts {
        if attempt > 0 {
            order.shuffle(&mut rng);
        }
        let mut taken = anchors.union(w);
        let mut gadgets = Vec::new();
        let mut failed = None;
        for &(i, j) in &order {
            let (x, y) = (f[i], f[j]);
            let mut forbidden = taken.clone();
            forbidden.remove(x);
            forbidden.remove(y);
            let mut opts = params.embed.clone();
            if params.gadget == GadgetKind::A1 && opts.slot_reservoir.is_none() {
                opts.slot_reservoir = Some(VertexSet::range(g.n()).difference(&forbidden));
            }
            match find_gadget_embedding(g, params.gadget, x, y, &forbidden, &opts)? {
                EmbedOutcome::Found { map } => {
                    for &v in &map {
                        taken.insert(v);
                    }
                    gadgets.push(GadgetEmbedding { template_edge: (i, j), map });
                }
                other => {
                    failed = Some(format!("template edge ({i}, {j}) on host pair ({x}, {y}): {other:?}"));
                    break;
                }
            }
        }
        if let Some(msg) = failed {
            last_err = msg;
            continue;
        }
        let pairs: Vec<(usize, usize)> = gadgets.windows(2).map(|p| (p[0].map[end], p[1].map[start])).collect();
        let req = ConnectRequest::new(pairs, w.clone());
        let connectors = match connect_pairs(g, &req, &params.embed.connect) {
            Ok(c) => c,
            Err(e) => {
                last_err = e.to_string();
                if attempt == params.restarts {
                    return Err(stage(AssemblyStage::Connect, last_err));
                }
                continue;
            }
        };
        let mut edges = Vec::new();
        let mut total = anchors.clone();
        for gd in &gadgets {
            edges.extend(tpl.edges.iter().map(|e| sorted3(e.map(|l| gd.map[l]))));
            total = total.union(&gd.map.iter().copied().collect());
        }
        for p in &connectors.paths {
            edges.extend(p.edges());
            total = total.union(&p.vertex_set());
        }
        let graph = Hypergraph3::from_edge_set(g.n(), edges)?;
        let a = gadgets[0].map[start];
        let b = gadgets.last().expect("template has edges").map[end];
        return Ok(AbsorberAssembly {
            kind: params.gadget,
            a,
            b,
            r: r.clone(),
            r0,
            template,
            f,
            gadgets,
            connectors,
            total_vertices: total,
            graph,
            template_gadget: tpl,
        });
    }
    Err(stage(AssemblyStage::Gadget, last_err))
}

impl AbsorberAssembly {
    pub fn vertex_count(&self) -> usize {
        self.total_vertices.len()
    }

    /// Which `R'` are admissible: `R' ⊆ R`, `|R'| < |R|/2` (or both empty), `|V(A) ∖ R'|` odd.
    pub fn admits(&self, r_prime: &VertexSet) -> Result<(), AbsorbError> {
        if !r_prime.is_subset(&self.r) {
            return Err(AbsorbError::InvalidInput("R' is not a subset of R".into()));
        }
        if !(r_prime.is_empty() || 2 * r_prime.len() < self.r.len()) {
            return Err(AbsorbError::InvalidInput(format!("|R'| = {} is not below |R|/2", r_prime.len())));
        }
        if (self.total_vertices.len() - r_prime.len()).is_multiple_of(2) {
            return Err(AbsorbError::InvalidInput("V(A) ∖ R' has even size".into()));
        }
        Ok(())
    }
}

/// Loose `ab`-path on exactly `V(A) ∖ R'`: a perfect matching of `T - f⁻¹(R')` picks the gadgets
/// that use their covering path; all others use the noncovering one.
pub fn absorb(asm: &AbsorberAssembly, r_prime: &VertexSet) -> Result<LoosePath, AbsorbError> {
    asm.admits(r_prime)?;
    if asm.gadgets.is_empty() {
        return Ok(asm.connectors.paths[0].clone());
    }
    let removed: Vec<usize> = (0..asm.template.order).filter(|&t| r_prime.contains(asm.f[t])).collect();
    let matching = asm
        .template
        .matching_without(&removed)
        .ok_or_else(|| AbsorbError::NoMatching { r_prime: r_prime.to_vec() })?;
    let tpl = &asm.template_gadget;
    let cover = tpl.covering.as_ref().expect("absorbing gadget");
    let skip = tpl.noncovering.as_ref().expect("absorbing gadget");
    let mut seq: Vec<usize> = Vec::with_capacity(asm.total_vertices.len());
    for (k, gd) in asm.gadgets.iter().enumerate() {
        let (i, j) = gd.template_edge;
        let labels = if matching.binary_search(&(i.min(j), i.max(j))).is_ok() { cover } else { skip };
        seq.extend(labels.iter().map(|&l| gd.map[l]));
        if let Some(c) = asm.connectors.paths.get(k) {
            seq.extend_from_slice(c.internal());
        }
    }
    let path = LoosePath::new(seq);
    validate_loose_path(&asm.graph, &path).map_err(|d| AbsorbError::InvalidInput(format!("absorbed path invalid: {d}")))?;
    let expect = asm.total_vertices.difference(r_prime);
    if path.vertex_set() != expect || path.vertices.len() != expect.len() {
        return Err(AbsorbError::InvalidInput("absorbed path has the wrong vertex set".into()));
    }
    Ok(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AbsorberCheck {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorberFailure {
    pub r_prime: Vec<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorberReport {
    pub exhaustive: bool,
    pub tested: usize,
    pub failures: Vec<AbsorberFailure>,
}

impl AbsorberReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const ABSORBER_EXHAUSTIVE_LIMIT: u128 = 1_000_000;

/// Runs `absorb` for every (or sampled) admissible `R'` and validates each path in `g`.
pub fn verify_absorber(g: &Hypergraph3, asm: &AbsorberAssembly, check: &AbsorberCheck) -> Result<AbsorberReport, AbsorbError> {
    let rs = asm.r.to_vec();
    let m = rs.len();
    let sizes: Vec<usize> = (0..=m)
        .filter(|&j| (j == 0 || 2 * j < m) && (asm.total_vertices.len() - j) % 2 == 1)
        .collect();
    let mut report = AbsorberReport { exhaustive: false, tested: 0, failures: Vec::new() };
    let test = |rp: &[usize], report: &mut AbsorberReport| {
        report.tested += 1;
        let set: VertexSet = rp.iter().copied().collect();
        let outcome = absorb(asm, &set).and_then(|p| {
            validate_loose_path(g, &p).map_err(|d| AbsorbError::InvalidInput(format!("not a path of the host: {d}")))?;
            if p.first() != asm.a || p.last() != asm.b {
                return Err(AbsorbError::InvalidInput("wrong endpoints".into()));
            }
            Ok(())
        });
        if let Err(e) = outcome {
            report.failures.push(AbsorberFailure { r_prime: rp.to_vec(), reason: e.to_string() });
        }
    };
    match check {
        AbsorberCheck::Exhaustive => {
            let needed = 1u128 << m.min(127);
            if needed > ABSORBER_EXHAUSTIVE_LIMIT {
                return Err(AbsorbError::TooLarge { needed, limit: ABSORBER_EXHAUSTIVE_LIMIT });
            }
            report.exhaustive = true;
            for &j in &sizes {
                for_each_combination(&rs, j, |rp| {
                    test(rp, &mut report);
                    true
                });
            }
        }
        AbsorberCheck::Sampled { trials, seed } => {
            if sizes.is_empty() {
                return Ok(report);
            }
            let mut rng = rng_for(*seed, 4000);
            for _ in 0..*trials {
                let j = sizes[rng.gen_range(0..sizes.len())];
                let mut rp: Vec<usize> = rs.choose_multiple(&mut rng, j).copied().collect();
                rp.sort_unstable();
                test(&rp, &mut report);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgraph::validate_loose_path;

    fn template_path(t: &GadgetTemplate, seq: &[usize]) -> bool {
        validate_loose_path(&t.hypergraph(), &LoosePath::new(seq.to_vec())).is_ok()
    }

    #[test]
    fn gadget_shapes() {
        let a2 = build_gadget_template(GadgetKind::A2);
        assert_eq!((a2.vertex_count(), a2.edges.len()), (9, 5));
        let a1 = build_gadget_template(GadgetKind::A1);
        assert_eq!((a1.vertex_count(), a1.edges.len()), (65, 37));
        let bb = build_gadget_template(GadgetKind::Backbone1);
        assert_eq!((bb.vertex_count(), bb.edges.len()), (37, 21));
        let cb = build_gadget_template(GadgetKind::ContractedBackbone);
        assert_eq!((cb.vertex_count(), cb.edges.len()), (25, 15));
        for t in [&a2, &a1, &bb, &cb] {
            assert!(t.hypergraph().is_linear(), "{:?}", t.kind);
        }
        let (h, _) = a1.backbone();
        assert_eq!((h.n(), h.edge_count()), (37, 21));
    }

    #[test]
    fn absorbing_paths_are_valid() {
        for kind in [GadgetKind::A2, GadgetKind::A1] {
            let t = build_gadget_template(kind);
            let (cov, non) = (t.covering.clone().unwrap(), t.noncovering.clone().unwrap());
            assert!(template_path(&t, &cov), "{kind:?} covering");
            assert!(template_path(&t, &non), "{kind:?} noncovering");
            let (s, e) = t.ends.unwrap();
            assert_eq!((cov[0], *cov.last().unwrap()), (s, e));
            assert_eq!((non[0], *non.last().unwrap()), (s, e));
            assert_eq!(cov.len(), t.vertex_count());
            let mut rest: Vec<usize> = cov.iter().copied().filter(|&v| v != t.roles.0 && v != t.roles.1).collect();
            let mut non_sorted = non.clone();
            rest.sort_unstable();
            non_sorted.sort_unstable();
            assert_eq!(rest, non_sorted);
        }
    }

    #[test]
    fn m3_values() {
        let half = |t| m3_density(&build_gadget_template(t).hypergraph()).unwrap();
        let a2 = half(GadgetKind::A2);
        assert_eq!(a2.fraction(), "2/3");
        let v = a2.vertices.len().max(4) as i64 - 3;
        assert_eq!(Rational64::new(a2.edges.len() as i64 - 1, v), a2.value);
        assert_eq!(half(GadgetKind::ContractedBackbone).fraction(), "2/3");
        let one = Hypergraph3::new(4, [[0, 1, 2]]).unwrap();
        assert_eq!(m3_density(&one).unwrap().fraction(), "0/1");
        assert_eq!(m3_density(&Hypergraph3::empty(3)).unwrap().fraction(), "0/1");
        assert_eq!(m3_density(&Hypergraph3::empty(7)).unwrap().fraction(), "-1/4");
        assert_eq!(m3_density(&Hypergraph3::complete(5)).unwrap().fraction(), "9/2");
        assert!(matches!(m3_density(&Hypergraph3::complete(7)), Err(AbsorbError::TooManyEdges { .. })));
    }

    #[test]
    fn contraction_examples() {
        // tuple (6,7,8,9); U1 = {0,1,2}, U2 = {3,4,5}
        let g = Hypergraph3::new(10, [[0, 1, 2], [7, 0, 1], [9, 0, 1], [9, 3, 4], [7, 3, 4], [0, 3, 6]]).unwrap();
        let spec = ContractionSpec {
            u1: VertexSet::from(vec![0, 1, 2]),
            u2: VertexSet::from(vec![3, 4, 5]),
            tuples: vec![[6, 7, 8, 9]],
        };
        let c = contract(&g, &spec).unwrap();
        let w = c.tuple_vertex(0).unwrap();
        let (a, b) = (c.vertex_of(0).unwrap(), c.vertex_of(1).unwrap());
        let (d, e) = (c.vertex_of(3).unwrap(), c.vertex_of(4).unwrap());
        assert!(c.graph.has_edge(w, a, b));
        assert!(c.graph.has_edge(w, d, e));
        assert!(c.graph.has_edge(a, b, c.vertex_of(2).unwrap()));
        assert_eq!(c.graph.edge_count(), 3);

        let empty = ContractionSpec { tuples: vec![], ..spec.clone() };
        let c = contract(&g, &empty).unwrap();
        let (ind, _) = g.induced(&spec.u1.union(&spec.u2));
        assert_eq!(c.graph, ind);

        let clash = ContractionSpec { tuples: vec![[0, 7, 8, 9]], ..spec };
        assert!(contract(&g, &clash).is_err());
    }

    #[test]
    fn expansion_in_complete_graph() {
        let g = Hypergraph3::complete(20);
        let w: VertexSet = (1..20).collect();
        let fam = expansion_families(&g, 0, &w, Some(2));
        assert_eq!(fam.pairs.len(), 2);
        assert_eq!(fam.tuples.len(), 3);
        for (t, &k) in fam.tuples.iter().zip(&fam.tuple_pair) {
            let (u, v) = fam.pairs[k];
            assert!(g.has_edge(u, t[0], t[1]) && g.has_edge(v, t[2], t[3]));
        }
        let mut all: Vec<usize> = fam.tuples.iter().flatten().copied().collect();
        all.extend(fam.pairs.iter().flat_map(|&(u, v)| [u, v]));
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn template_modes() {
        for m in 2..=6 {
            let t = build_template(m, &TemplateMode::ExactSmall, 0).unwrap();
            assert_eq!(t.order, 2 * m);
            assert!(verify_template(&t, &TemplateCheck::Exhaustive).unwrap().passed());
        }
        let c = build_template(6, &TemplateMode::Compact, 0).unwrap();
        assert_eq!((c.order, c.edges.len()), (7, 7));
        let r = build_template(8, &TemplateMode::random(6), 3).unwrap();
        assert!(r.order <= 7 * 4 && r.max_degree <= 6 + 4);

        let p4 = TemplateGraph::new(4, vec![(0, 1), (1, 2), (2, 3)], vec![0, 3]).unwrap();
        let rep = verify_template(&p4, &TemplateCheck::Exhaustive).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.tested, 1);

        let two_triangles =
            TemplateGraph::new(7, vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], vec![0, 1, 2, 3, 4, 5]).unwrap();
        let rep = verify_template(&two_triangles, &TemplateCheck::Exhaustive).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.failures[0], vec![0]);
    }

    #[test]
    fn a2_counts() {
        assert_eq!(count_a2_embeddings(&Hypergraph3::complete(9), 0, 1).unwrap(), 5040);
        assert_eq!(count_a2_embeddings(&Hypergraph3::empty(9), 0, 1).unwrap(), 0);
        assert!(count_a2_embeddings(&Hypergraph3::complete(17), 0, 1).is_err());
    }

    #[test]
    fn gadget_embedding_basic() {
        let g = Hypergraph3::complete(11);
        let found = find_gadget_embedding(&g, GadgetKind::A2, 3, 5, &VertexSet::new(), &EmbedOptions::default()).unwrap();
        let EmbedOutcome::Found { map } = found else { panic!("{found:?}") };
        let tpl = build_gadget_template(GadgetKind::A2);
        assert_eq!((map[tpl.roles.0], map[tpl.roles.1]), (3, 5));
        let e = find_gadget_embedding(&Hypergraph3::empty(11), GadgetKind::A2, 0, 1, &VertexSet::new(), &EmbedOptions::default())
            .unwrap();
        assert!(matches!(e, EmbedOutcome::Exhausted { .. }));
    }

    #[test]
    fn a1_embedding_in_dense_graph() {
        let g = Hypergraph3::complete(70);
        let opts = EmbedOptions { slot_reservoir: Some((0..70).collect()), ..EmbedOptions::default() };
        let out = find_gadget_embedding(&g, GadgetKind::A1, 0, 1, &VertexSet::new(), &opts).unwrap();
        let EmbedOutcome::Found { map } = out else { panic!("{out:?}") };
        let tpl = build_gadget_template(GadgetKind::A1);
        let mut distinct = map.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), 65);
        for e in &tpl.edges {
            assert!(g.has_edge(map[e[0]], map[e[1]], map[e[2]]));
        }
    }

    #[test]
    fn degenerate_and_failing_assemblies() {
        let g = Hypergraph3::complete(10);
        let asm = assemble_absorber(&g, &VertexSet::new(), &VertexSet::new(), &AbsorberParams::default()).unwrap();
        let p = absorb(&asm, &VertexSet::new()).unwrap();
        assert_eq!(p.len(), 1);
        let rep = verify_absorber(&g, &asm, &AbsorberCheck::Exhaustive).unwrap();
        assert!(rep.passed() && rep.tested == 1);

        let empty = Hypergraph3::empty(40);
        let r: VertexSet = (0..4).collect();
        let err = assemble_absorber(&empty, &r, &(30..40).collect(), &AbsorberParams::default()).unwrap_err();
        assert!(matches!(err, AbsorbError::Stage { stage: AssemblyStage::Gadget, .. }), "{err}");
    }

    #[test]
    fn small_absorber_round_trip() {
        let g = Hypergraph3::complete(70);
        let r: VertexSet = (0..6).collect();
        let w: VertexSet = (56..70).collect();
        let asm = assemble_absorber(&g, &r, &w, &AbsorberParams::default()).unwrap();
        assert_eq!(asm.gadgets.len(), 7);
        assert!(!asm.r.contains(asm.a) && !asm.r.contains(asm.b));
        let rep = verify_absorber(&g, &asm, &AbsorberCheck::Exhaustive).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.tested > 1);
        assert!(absorb(&asm, &r).is_err());
    }
}

//! Core 3-uniform hypergraph type, degree operators and loose path/cycle checks.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest vertex count the dense pair index supports.
pub const MAX_VERTICES: usize = 2048;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {0:?} repeats a vertex")]
    DegenerateEdge([usize; 3]),
    #[error("edge {0:?} listed twice")]
    DuplicateEdge([usize; 3]),
    #[error("vertex count {0} exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("degree order must be 1 or 2, got {0}")]
    BadOrder(usize),
    #[error("operation needs at least {need} vertices, graph has {n}")]
    TooFewVertices { need: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A subset of the vertex range of some host graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet {
    members: BTreeSet<usize>,
}

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn range(n: usize) -> Self {
        (0..n).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(&v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        self.members.insert(v)
    }

    pub fn remove(&mut self, v: usize) -> bool {
        self.members.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn max(&self) -> Option<usize> {
        self.members.last().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.members.union(&other.members).copied().collect()
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.members.difference(&other.members).copied().collect()
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.members.intersection(&other.members).copied().collect()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.members.is_disjoint(&other.members)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Membership mask of length `n`; members at or beyond `n` are ignored.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in self.iter().filter(|&v| v < n) {
            m[v] = true;
        }
        m
    }

    pub fn check_range(&self, n: usize) -> Result<(), GraphError> {
        match self.max() {
            Some(v) if v >= n => Err(GraphError::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet { members: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, usize>>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter().copied()
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

/// Seed of a neighbourhood query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Seed {
    Vertex(usize),
    Pair(usize, usize),
}

/// Loose path `v1, ..., v_{2l+1}`; edges are the windows starting at even offsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoosePath {
    pub vertices: Vec<usize>,
}

impl LoosePath {
    pub fn new(vertices: Vec<usize>) -> Self {
        LoosePath { vertices }
    }

    pub fn single(v: usize) -> Self {
        LoosePath { vertices: vec![v] }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1) / 2
    }

    /// No edges; a single vertex counts as an empty path.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().expect("empty path")
    }

    pub fn internal(&self) -> &[usize] {
        if self.vertices.len() < 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }

    pub fn edges(&self) -> Vec<[usize; 3]> {
        self.vertices
            .windows(3)
            .step_by(2)
            .map(|w| sorted3([w[0], w[1], w[2]]))
            .collect()
    }

    pub fn reversed(&self) -> LoosePath {
        let mut v = self.vertices.clone();
        v.reverse();
        LoosePath { vertices: v }
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().copied().collect()
    }
}

/// Cyclic loose sequence; window `i` is `(v_{2i}, v_{2i+1}, v_{2i+2})` with wrap-around.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LooseCycle {
    pub vertices: Vec<usize>,
}

impl LooseCycle {
    pub fn new(vertices: Vec<usize>) -> Self {
        LooseCycle { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> Vec<[usize; 3]> {
        let k = self.vertices.len();
        (0..k / 2)
            .map(|i| {
                sorted3([
                    self.vertices[2 * i],
                    self.vertices[2 * i + 1],
                    self.vertices[(2 * i + 2) % k],
                ])
            })
            .collect()
    }

    pub fn is_hamilton(&self, n: usize) -> bool {
        self.vertices.len() == n
    }
}

/// Why a sequence fails to be a loose path or cycle.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum LooseDefect {
    #[error("sequence is empty")]
    Empty,
    #[error("path needs an odd vertex count, got {count}")]
    EvenVertexCount { count: usize },
    #[error("cycle needs an even vertex count, got {count}")]
    OddVertexCount { count: usize },
    #[error("cycle needs at least 6 vertices, got {count}")]
    TooShort { count: usize },
    #[error("vertex {vertex} is out of range")]
    OutOfRange { vertex: usize },
    #[error("vertex {vertex} appears twice")]
    Repeated { vertex: usize },
    #[error("window {window} = {edge:?} is not an edge")]
    MissingEdge { window: usize, edge: [usize; 3] },
}

pub fn sorted3(mut e: [usize; 3]) -> [usize; 3] {
    e.sort_unstable();
    e
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 3]>,
}

/// Immutable 3-uniform hypergraph on vertices `0..n`.
#[derive(Clone, Debug)]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<[u32; 3]>,
    codeg: Vec<Vec<u32>>,
    incident: Vec<Vec<u32>>,
    masks: Option<Vec<u64>>,
}

impl PartialEq for Hypergraph3 {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Hypergraph3 {}

fn pair_slot(n: usize, u: usize, v: usize) -> usize {
    let (i, j) = if u < v { (u, v) } else { (v, u) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl Hypergraph3 {
    /// Builds a graph, rejecting out-of-range vertices, repeated vertices and duplicate edges.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = [usize; 3]>,
    {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut list = Vec::new();
        for e in edges {
            let s = sorted3(e);
            if let Some(&v) = s.iter().find(|&&v| v >= n) {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if s[0] == s[1] || s[1] == s[2] {
                return Err(GraphError::DegenerateEdge(e));
            }
            list.push(s);
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0]));
        }
        Ok(Self::from_sorted(n, list))
    }

    /// Like `new` but silently merges duplicate edges.
    pub fn from_edge_set<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = [usize; 3]>,
    {
        let set: BTreeSet<[usize; 3]> = edges.into_iter().map(sorted3).collect();
        Self::new(n, set)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let mut list = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    list.push([a, b, c]);
                }
            }
        }
        Self::from_sorted(n, list)
    }

    /// `list` must be sorted, deduplicated, in range, and each triple ascending.
    pub(crate) fn from_sorted(n: usize, list: Vec<[usize; 3]>) -> Self {
        assert!(n <= MAX_VERTICES, "vertex count {n} too large");
        let pairs = n * n.saturating_sub(1) / 2;
        let mut codeg: Vec<Vec<u32>> = vec![Vec::new(); pairs];
        let mut incident: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut masks = if n <= 64 { Some(vec![0u64; n * n]) } else { None };
        let mut edges = Vec::with_capacity(list.len());
        for (idx, &[a, b, c]) in list.iter().enumerate() {
            edges.push([a as u32, b as u32, c as u32]);
            codeg[pair_slot(n, a, b)].push(c as u32);
            codeg[pair_slot(n, a, c)].push(b as u32);
            codeg[pair_slot(n, b, c)].push(a as u32);
            for v in [a, b, c] {
                incident[v].push(idx as u32);
            }
            if let Some(m) = masks.as_mut() {
                for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
                    m[x * n + y] |= 1 << z;
                    m[y * n + x] |= 1 << z;
                }
            }
        }
        for l in &mut codeg {
            l.sort_unstable();
        }
        Hypergraph3 { n, edges, codeg, incident, masks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as ascending triples in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.edges.iter().map(|e| [e[0] as usize, e[1] as usize, e[2] as usize])
    }

    pub fn edge_list(&self) -> Vec<[usize; 3]> {
        self.edges().collect()
    }

    pub fn has_edge(&self, a: usize, b: usize, c: usize) -> bool {
        if a >= self.n || b >= self.n || c >= self.n || a == b || b == c || a == c {
            return false;
        }
        if let Some(m) = &self.masks {
            return m[a * self.n + b] >> c & 1 == 1;
        }
        self.codeg[pair_slot(self.n, a, b)].binary_search(&(c as u32)).is_ok()
    }

    /// Third vertices `w` with `uvw` an edge, ascending.
    pub fn common(&self, u: usize, v: usize) -> &[u32] {
        if u == v || u >= self.n || v >= self.n {
            return &[];
        }
        &self.codeg[pair_slot(self.n, u, v)]
    }

    /// Bitset of third vertices for the pair `uv`; only for graphs with at most 64 vertices.
    pub fn pair_mask(&self, u: usize, v: usize) -> Option<u64> {
        self.masks.as_ref().map(|m| m[u * self.n + v])
    }

    pub fn has_masks(&self) -> bool {
        self.masks.is_some()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn codegree(&self, u: usize, v: usize) -> usize {
        self.common(u, v).len()
    }

    /// Edges through `v`, each as the pair of other vertices (ascending).
    pub fn link(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.incident[v].iter().map(move |&i| {
            let e = self.edges[i as usize];
            let mut o = e.iter().map(|&x| x as usize).filter(|&x| x != v);
            (o.next().unwrap(), o.next().unwrap())
        })
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Number of edges containing `s` (|s| in {1,2}); with `within`, only edges whose
    /// remaining vertices all lie in `within`.
    pub fn deg_set(&self, s: &[usize], within: Option<&VertexSet>) -> Result<usize, GraphError> {
        for &v in s {
            self.check_vertex(v)?;
        }
        if let Some(w) = within {
            w.check_range(self.n)?;
        }
        match *s {
            [v] => Ok(match within {
                None => self.degree(v),
                Some(w) => self.link(v).filter(|&(a, b)| w.contains(a) && w.contains(b)).count(),
            }),
            [u, v] if u != v => Ok(match within {
                None => self.codegree(u, v),
                Some(w) => self.common(u, v).iter().filter(|&&z| w.contains(z as usize)).count(),
            }),
            _ => Err(GraphError::BadOrder(s.len())),
        }
    }

    /// Minimum d-degree over all d-sets.
    pub fn min_d_degree(&self, d: usize) -> Result<usize, GraphError> {
        if self.n < 3 {
            return Err(GraphError::TooFewVertices { need: 3, n: self.n });
        }
        match d {
            1 => Ok(self.incident.iter().map(Vec::len).min().unwrap_or(0)),
            2 => Ok(self.codeg.iter().map(Vec::len).min().unwrap_or(0)),
            _ => Err(GraphError::BadOrder(d)),
        }
    }

    /// All d-sets (ascending) whose degree is below `floor`.
    pub fn deficient_sets(&self, d: usize, floor: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        match d {
            1 => {
                for v in 0..self.n {
                    if self.degree(v) < floor {
                        out.push(vec![v]);
                    }
                }
            }
            _ => {
                for u in 0..self.n {
                    for v in u + 1..self.n {
                        if self.codegree(u, v) < floor {
                            out.push(vec![u, v]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Ordered triples of distinct vertices `(x,y,z)` in `X x Y x Z` forming an edge.
    pub fn e_triple(&self, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> usize {
        let (mx, my, mz) = (x.mask(self.n), y.mask(self.n), z.mask(self.n));
        let mut total = 0;
        for [a, b, c] in self.edges() {
            for (p, q, r) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                if mx[p] && my[q] && mz[r] {
                    total += 1;
                }
            }
        }
        total
    }

    /// Number of (pair, z) with the pair in `pairs`, z in `z`, and the triple an edge.
    /// Repeated pairs are counted once.
    pub fn e_pairs(&self, pairs: &[(usize, usize)], z: &VertexSet) -> usize {
        let set: BTreeSet<(usize, usize)> = pairs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        set.iter()
            .map(|&(a, b)| self.common(a, b).iter().filter(|&&w| z.contains(w as usize)).count())
            .sum()
    }

    pub fn neighborhood(&self, seed: Seed, within: &VertexSet) -> VertexSet {
        match seed {
            Seed::Vertex(v) => {
                if v >= self.n {
                    return VertexSet::new();
                }
                let mut out = VertexSet::new();
                for (a, b) in self.link(v) {
                    if within.contains(a) && within.contains(b) {
                        out.insert(a);
                        out.insert(b);
                    }
                }
                out
            }
            Seed::Pair(u, v) => self
                .common(u, v)
                .iter()
                .map(|&w| w as usize)
                .filter(|&w| within.contains(w))
                .collect(),
        }
    }

    /// Subgraph induced on `keep`, relabelled to `0..keep.len()`; returns the relabel map.
    pub fn induced(&self, keep: &VertexSet) -> (Hypergraph3, Vec<usize>) {
        let back: Vec<usize> = keep.iter().filter(|&v| v < self.n).collect();
        let mut fwd = vec![usize::MAX; self.n];
        for (i, &v) in back.iter().enumerate() {
            fwd[v] = i;
        }
        let mut list: Vec<[usize; 3]> = self
            .edges()
            .filter(|e| e.iter().all(|&v| fwd[v] != usize::MAX))
            .map(|e| sorted3([fwd[e[0]], fwd[e[1]], fwd[e[2]]]))
            .collect();
        list.sort_unstable();
        (Hypergraph3::from_sorted(back.len(), list), back)
    }

    /// Same vertex set, only the edges satisfying `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(&[usize; 3]) -> bool) -> Hypergraph3 {
        let list = self.edges().filter(|e| keep(e)).collect();
        Hypergraph3::from_sorted(self.n, list)
    }

    /// Same vertex set with extra edges merged in.
    pub fn with_edges(&self, extra: &[[usize; 3]]) -> Result<Hypergraph3, GraphError> {
        Hypergraph3::from_edge_set(self.n, self.edges().chain(extra.iter().copied()))
    }

    pub fn is_subgraph_of(&self, other: &Hypergraph3) -> bool {
        self.n == other.n && self.edges().all(|[a, b, c]| other.has_edge(a, b, c))
    }

    /// Any two edges share at most one vertex.
    pub fn is_linear(&self) -> bool {
        self.codeg.iter().all(|l| l.len() <= 1)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(12 * self.edges.len() + 16);
        writeln!(s, "n {}", self.n).unwrap();
        for [a, b, c] in self.edges() {
            writeln!(s, "{a} {b} {c}").unwrap();
        }
        s
    }

    /// Parses the text format; blank lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Hypergraph3, GraphError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| GraphError::Parse { line: i + 1, msg: msg.to_string() };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match n {
                None => {
                    if toks.len() != 2 || toks[0] != "n" {
                        return Err(bad("expected header `n <count>`"));
                    }
                    n = Some(toks[1].parse::<usize>().map_err(|_| bad("bad vertex count"))?);
                }
                Some(_) => {
                    if toks.len() != 3 {
                        return Err(bad("expected three vertex indices"));
                    }
                    let mut e = [0usize; 3];
                    for (slot, t) in e.iter_mut().zip(&toks) {
                        *slot = t.parse().map_err(|_| bad("bad vertex index"))?;
                    }
                    edges.push(e);
                }
            }
        }
        let n = n.ok_or(GraphError::Parse { line: 0, msg: "missing header".into() })?;
        Hypergraph3::new(n, edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson { n: self.n, edges: self.edge_list() }).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Hypergraph3, GraphError> {
        let g: GraphJson = serde_json::from_str(text)?;
        Hypergraph3::new(g.n, g.edges)
    }

    /// Reads either format, sniffing JSON by a leading `{`.
    pub fn from_any(text: &str) -> Result<Hypergraph3, GraphError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_text(text)
        }
    }
}

impl Serialize for Hypergraph3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson { n: self.n, edges: self.edge_list() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let g = GraphJson::deserialize(d)?;
        Hypergraph3::new(g.n, g.edges).map_err(serde::de::Error::custom)
    }
}

fn check_distinct(g: &Hypergraph3, vs: &[usize]) -> Result<(), LooseDefect> {
    let mut seen = vec![false; g.n()];
    for &v in vs {
        if v >= g.n() {
            return Err(LooseDefect::OutOfRange { vertex: v });
        }
        if seen[v] {
            return Err(LooseDefect::Repeated { vertex: v });
        }
        seen[v] = true;
    }
    Ok(())
}

pub fn validate_loose_path(g: &Hypergraph3, p: &LoosePath) -> Result<(), LooseDefect> {
    let vs = &p.vertices;
    if vs.is_empty() {
        return Err(LooseDefect::Empty);
    }
    if vs.len().is_multiple_of(2) {
        return Err(LooseDefect::EvenVertexCount { count: vs.len() });
    }
    check_distinct(g, vs)?;
    for (i, w) in vs.windows(3).step_by(2).enumerate() {
        if !g.has_edge(w[0], w[1], w[2]) {
            return Err(LooseDefect::MissingEdge { window: i, edge: [w[0], w[1], w[2]] });
        }
    }
    Ok(())
}

pub fn validate_loose_cycle(g: &Hypergraph3, c: &LooseCycle) -> Result<(), LooseDefect> {
    let vs = &c.vertices;
    let k = vs.len();
    if k == 0 {
        return Err(LooseDefect::Empty);
    }
    if k % 2 == 1 {
        return Err(LooseDefect::OddVertexCount { count: k });
    }
    if k < 6 {
        return Err(LooseDefect::TooShort { count: k });
    }
    check_distinct(g, vs)?;
    for i in 0..k / 2 {
        let e = [vs[2 * i], vs[2 * i + 1], vs[(2 * i + 2) % k]];
        if !g.has_edge(e[0], e[1], e[2]) {
            return Err(LooseDefect::MissingEdge { window: i, edge: e });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn degrees_of_complete_graphs() {
        let k5 = Hypergraph3::complete(5);
        assert_eq!(k5.deg_set(&[0], None).unwrap(), 6);
        assert_eq!(k5.deg_set(&[0, 1], None).unwrap(), 3);
        let k6 = Hypergraph3::complete(6);
        assert_eq!(k6.min_d_degree(1).unwrap(), 10);
        assert_eq!(k6.min_d_degree(2).unwrap(), 4);
        assert_eq!(Hypergraph3::empty(5).min_d_degree(1).unwrap(), 0);
    }

    #[test]
    fn restricted_degree() {
        let g = Hypergraph3::new(5, [[0, 1, 2]]).unwrap();
        assert_eq!(g.deg_set(&[0], Some(&set(&[3, 4]))).unwrap(), 0);
        assert_eq!(g.deg_set(&[0], Some(&set(&[1, 2]))).unwrap(), 1);
        assert!(matches!(g.deg_set(&[7], None), Err(GraphError::VertexOutOfRange { .. })));
        assert!(matches!(g.deg_set(&[0, 1, 2], None), Err(GraphError::BadOrder(3))));
    }

    #[test]
    fn triple_and_pair_counts() {
        let g = Hypergraph3::new(5, [[0, 1, 2]]).unwrap();
        assert_eq!(g.e_triple(&set(&[0]), &set(&[1]), &set(&[2])), 1);
        let all = set(&[0, 1, 2]);
        assert_eq!(g.e_triple(&all, &all, &all), 6);
        assert_eq!(g.e_triple(&set(&[3]), &all, &all), 0);
        assert_eq!(g.e_pairs(&[(0, 1)], &set(&[2])), 1);
        assert_eq!(g.e_pairs(&[(0, 1), (0, 2)], &set(&[1, 2])), 2);
        assert_eq!(g.e_pairs(&[], &set(&[1, 2])), 0);
    }

    #[test]
    fn neighborhoods() {
        let g = Hypergraph3::new(5, [[0, 1, 2]]).unwrap();
        assert_eq!(g.neighborhood(Seed::Vertex(0), &set(&[1, 2])), set(&[1, 2]));
        assert_eq!(g.neighborhood(Seed::Pair(0, 1), &set(&[2, 3])), set(&[2]));
        assert!(Hypergraph3::empty(5).neighborhood(Seed::Vertex(0), &set(&[1, 2])).is_empty());
    }

    #[test]
    fn path_and_cycle_validation() {
        let g = Hypergraph3::new(6, [[0, 1, 2], [2, 3, 4], [0, 4, 5]]).unwrap();
        assert!(validate_loose_path(&g, &LoosePath::new(vec![0, 1, 2, 3, 4])).is_ok());
        assert_eq!(
            validate_loose_path(&g, &LoosePath::new(vec![0, 1, 2, 3])),
            Err(LooseDefect::EvenVertexCount { count: 4 })
        );
        assert!(validate_loose_path(&g, &LoosePath::single(3)).is_ok());
        assert!(validate_loose_cycle(&g, &LooseCycle::new(vec![0, 1, 2, 3, 4, 5])).is_ok());
        assert!(matches!(
            validate_loose_cycle(&g, &LooseCycle::new(vec![0, 1, 2, 3, 5, 4])),
            Err(LooseDefect::MissingEdge { window: 1, .. })
        ));
        assert_eq!(
            validate_loose_path(&g, &LoosePath::new(vec![0, 1, 0])),
            Err(LooseDefect::Repeated { vertex: 0 })
        );
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(Hypergraph3::new(3, [[0, 1, 3]]), Err(GraphError::VertexOutOfRange { .. })));
        assert!(matches!(Hypergraph3::new(3, [[0, 1, 1]]), Err(GraphError::DegenerateEdge(_))));
        assert!(matches!(
            Hypergraph3::new(3, [[0, 1, 2], [2, 1, 0]]),
            Err(GraphError::DuplicateEdge(_))
        ));
    }

    #[test]
    fn text_and_json_round_trip() {
        let g = Hypergraph3::new(7, [[4, 5, 6], [0, 2, 1], [1, 3, 5]]).unwrap();
        let t = g.to_text();
        assert_eq!(t, "n 7\n0 1 2\n1 3 5\n4 5 6\n");
        assert_eq!(Hypergraph3::from_text(&t).unwrap().to_text(), t);
        let j = g.to_json();
        assert_eq!(j, r#"{"n":7,"edges":[[0,1,2],[1,3,5],[4,5,6]]}"#);
        assert_eq!(Hypergraph3::from_json(&j).unwrap().to_json(), j);
        assert_eq!(Hypergraph3::from_any("# note\nn 3\n0 1 2\n").unwrap().edge_count(), 1);
        assert!(Hypergraph3::from_text("x 3\n").is_err());
    }

    #[test]
    fn large_graphs_skip_masks() {
        let g = Hypergraph3::new(70, [[0, 1, 69]]).unwrap();
        assert!(!g.has_masks());
        assert!(g.has_edge(69, 0, 1));
        assert!(!g.has_edge(0, 1, 68));
    }
}

//! Random and extremal instances, adversarial pruning, and empirical checkers for the
//! edge-distribution properties of H³(n,p).

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hgraph::{GraphError, Hypergraph3, VertexSet};
use crate::rng::{derive_seed, rng_for, Rng};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot satisfy floor {floor}: d-set {set:?} reaches only {degree} even with every removed edge restored")]
    InfeasibleFloor { set: Vec<usize>, degree: usize, floor: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter(msg.into())
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

/// Stream used for the edge coin flips of `sample_h3np`.
pub const SAMPLE_STREAM: u64 = 0;

/// Each triple, in lexicographic order, is kept with probability `p`.
pub fn sample_h3np(params: &ModelParams) -> Result<Hypergraph3, ModelError> {
    let ModelParams { n, p, seed } = *params;
    if n < 3 {
        return Err(invalid(format!("n must be at least 3, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p must lie in [0, 1], got {p}")));
    }
    if p >= 1.0 {
        return Ok(Hypergraph3::complete(n));
    }
    let mut rng = rng_for(seed, SAMPLE_STREAM);
    let mut list = Vec::new();
    if p > 0.0 {
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if rng.gen::<f64>() < p {
                        list.push([a, b, c]);
                    }
                }
            }
        }
    }
    Ok(Hypergraph3::from_sorted(n, list))
}

/// The graph of all triples meeting a small set `special = {0, .., ceil(n/4) - 2}`.
#[derive(Clone, Debug)]
pub struct ExtremalInstance {
    pub graph: Hypergraph3,
    pub special: VertexSet,
}

pub fn extremal_set_size(n: usize) -> usize {
    n.div_ceil(4) - 1
}

fn extremal(n: usize) -> Result<ExtremalInstance, ModelError> {
    if n < 8 || n % 2 == 1 {
        return Err(invalid(format!("extremal constructions need even n >= 8, got {n}")));
    }
    let a = extremal_set_size(n);
    let graph = Hypergraph3::complete(n).filter_edges(|e| e[0] < a);
    Ok(ExtremalInstance { graph, special: (0..a).collect() })
}

/// Codegree extremal instance: min codegree equals the size of the special set.
pub fn extremal_codegree(n: usize) -> Result<ExtremalInstance, ModelError> {
    extremal(n)
}

/// Degree extremal instance: vertices outside the special set have degree
/// C(n-1,2) - C(n-1-|A|,2).
pub fn extremal_degree(n: usize) -> Result<ExtremalInstance, ModelError> {
    extremal(n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryKind {
    RandomThinning { removal_rate: f64 },
    ExtremalPattern,
    CustomMask { remove: Vec<[usize; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryStrategy {
    pub kind: AdversaryKind,
    pub d: usize,
    /// Floor as a fraction of `p * C(n-d, 3-d)`.
    pub target_fraction: f64,
    /// Edge probability of the host model; scales the floor.
    pub p: f64,
}

impl AdversaryStrategy {
    pub fn floor(&self, n: usize) -> usize {
        let full = binomial(n - self.d, 3 - self.d) as f64;
        (self.target_fraction * self.p * full - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Clone, Debug)]
pub struct PruneOutcome {
    pub graph: Hypergraph3,
    pub floor: usize,
    pub min_degree: usize,
    pub meets_floor: bool,
    pub removed: usize,
    pub restored: usize,
}

pub fn adversary_prune(
    h: &Hypergraph3,
    strategy: &AdversaryStrategy,
    seed: u64,
) -> Result<PruneOutcome, ModelError> {
    let n = h.n();
    if !(1..=2).contains(&strategy.d) {
        return Err(invalid(format!("d must be 1 or 2, got {}", strategy.d)));
    }
    if !(strategy.target_fraction > 0.0 && strategy.target_fraction <= 1.0) {
        return Err(invalid("target_fraction must lie in (0, 1]"));
    }
    if n < 3 {
        return Err(invalid("graph needs at least 3 vertices"));
    }
    let floor = strategy.floor(n);
    let d = strategy.d;
    let (graph, removed, restored) = match &strategy.kind {
        AdversaryKind::RandomThinning { removal_rate } => {
            if !(0.0..=1.0).contains(removal_rate) {
                return Err(invalid("removal_rate must lie in [0, 1]"));
            }
            thin_and_restore(h, *removal_rate, d, floor, seed)?
        }
        AdversaryKind::ExtremalPattern => {
            let a = extremal_set_size(n.max(4));
            let g = h.filter_edges(|e| e[0] < a);
            let removed = h.edge_count() - g.edge_count();
            (g, removed, 0)
        }
        AdversaryKind::CustomMask { remove } => {
            let mask: std::collections::HashSet<[usize; 3]> =
                remove.iter().map(|&e| crate::hgraph::sorted3(e)).collect();
            let g = h.filter_edges(|e| !mask.contains(e));
            let removed = h.edge_count() - g.edge_count();
            (g, removed, 0)
        }
    };
    let min_degree = graph.min_d_degree(d)?;
    Ok(PruneOutcome { meets_floor: min_degree >= floor, graph, floor, min_degree, removed, restored })
}

fn d_subsets(e: &[usize; 3], d: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        e.iter().map(|&v| vec![v]).collect()
    } else {
        vec![vec![e[0], e[1]], vec![e[0], e[2]], vec![e[1], e[2]]]
    }
}

fn thin_and_restore(
    h: &Hypergraph3,
    rate: f64,
    d: usize,
    floor: usize,
    seed: u64,
) -> Result<(Hypergraph3, usize, usize), ModelError> {
    use std::collections::BTreeMap;
    let mut rng = rng_for(seed, 1);
    let edges = h.edge_list();
    let mut kept = vec![true; edges.len()];
    for k in kept.iter_mut() {
        if rate > 0.0 && rng.gen::<f64>() < rate {
            *k = false;
        }
    }
    let removed = kept.iter().filter(|k| !**k).count();
    let mut degree: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut pending: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        for s in d_subsets(e, d) {
            if kept[i] {
                *degree.entry(s).or_default() += 1;
            } else {
                pending.entry(s).or_default().push(i);
            }
        }
    }
    for list in pending.values_mut() {
        list.shuffle(&mut rng);
    }
    let n = h.n();
    let all_sets: Vec<Vec<usize>> = if d == 1 {
        (0..n).map(|v| vec![v]).collect()
    } else {
        (0..n).flat_map(|u| (u + 1..n).map(move |v| vec![u, v])).collect()
    };
    let mut restored = 0;
    for s in all_sets {
        let have = degree.get(&s).copied().unwrap_or(0);
        if have >= floor {
            continue;
        }
        if let Some(cands) = pending.get(&s).cloned() {
            for i in cands {
                if degree.get(&s).copied().unwrap_or(0) >= floor {
                    break;
                }
                if kept[i] {
                    continue;
                }
                kept[i] = true;
                restored += 1;
                for t in d_subsets(&edges[i], d) {
                    *degree.entry(t).or_default() += 1;
                }
            }
        }
        let now = degree.get(&s).copied().unwrap_or(0);
        if now < floor {
            return Err(ModelError::InfeasibleFloor { set: s, degree: now, floor });
        }
    }
    let list = edges.iter().zip(&kept).filter(|(_, k)| **k).map(|(e, _)| *e).collect();
    Ok((Hypergraph3::from_sorted(n, list), removed, restored))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    VaryingSizeSets,
    OneEdge,
    TwoEdge,
    GeneralEdge,
    UpperUniform,
}

impl LemmaId {
    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::VaryingSizeSets => "varying_size_sets",
            LemmaId::OneEdge => "one_edge",
            LemmaId::TwoEdge => "two_edge",
            LemmaId::GeneralEdge => "general_edge",
            LemmaId::UpperUniform => "upper_uniform",
        }
    }
}

/// Which size regime of a two-part statement to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeRegime {
    /// Small sets, logarithmic bound.
    Small,
    /// Large sets, multiplicative `(1 + eps)` bound.
    Large,
}

/// How the large-set regimes pick their size threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scale {
    /// Asymptotic thresholds (`eps^-3 log n/(np)`, `eps^-3 log n/p`, `200 eps^-2 n`).
    Asymptotic,
    /// Sets are large enough that the expected count is at least `min_expected`.
    Desk { min_expected: f64 },
}

impl Scale {
    /// Expected count at which a Chernoff tail `exp(-eps^2 mu / 3)` drops below `tail`.
    pub fn chernoff(epsilon: f64, tail: f64) -> Scale {
        Scale::Desk { min_expected: 3.0 * (1.0 / tail).ln() / (epsilon * epsilon) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationConfig {
    pub lemma: LemmaId,
    pub regime: SizeRegime,
    pub epsilon: f64,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub scale: Scale,
    /// Varying-size-sets knobs.
    pub gamma: f64,
    pub size_ratio: f64,
    pub lambda: f64,
}

impl ConcentrationConfig {
    pub fn new(lemma: LemmaId, epsilon: f64, p: f64, trials: usize, seed: u64) -> Self {
        ConcentrationConfig {
            lemma,
            regime: SizeRegime::Large,
            epsilon,
            p,
            trials,
            seed,
            scale: Scale::Asymptotic,
            gamma: 0.5,
            size_ratio: 2.0,
            lambda: 0.0625,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub sizes: Vec<usize>,
    pub observed: u64,
    pub bound: f64,
    pub violated: bool,
    /// Sampled sets, kept only for violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub lemma_id: LemmaId,
    pub regime: Option<SizeRegime>,
    pub epsilon: f64,
    pub p: f64,
    pub seed: u64,
    pub trials: usize,
    pub violations: usize,
    /// Set when no set sizes satisfy the regime at this n.
    pub skipped: Option<String>,
    pub details: Vec<TrialRecord>,
}

impl ConcentrationReport {
    pub fn violation_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.violations as f64 / self.trials as f64
        }
    }

    fn label(&self) -> String {
        match self.regime {
            Some(SizeRegime::Small) => format!("{}:i", self.lemma_id.as_str()),
            Some(SizeRegime::Large) => format!("{}:ii", self.lemma_id.as_str()),
            None => self.lemma_id.as_str().to_string(),
        }
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["lemma_id", "trial", "size_1", "size_2", "size_3", "observed", "bound", "violated"];

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_HEADER)?;
        let label = self.label();
        for r in &self.details {
            let size = |i: usize| r.sizes.get(i).map(|s| s.to_string()).unwrap_or_default();
            w.write_record([
                label.clone(),
                r.trial.to_string(),
                size(0),
                size(1),
                size(2),
                r.observed.to_string(),
                format!("{:.3}", r.bound),
                r.violated.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    fn skipped(cfg: &ConcentrationConfig, regime: Option<SizeRegime>, why: String) -> Self {
        ConcentrationReport {
            lemma_id: cfg.lemma,
            regime,
            epsilon: cfg.epsilon,
            p: cfg.p,
            seed: cfg.seed,
            trials: 0,
            violations: 0,
            skipped: Some(why),
            details: Vec::new(),
        }
    }
}

fn random_subset(rng: &mut Rng, pool: &[usize], k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = pool.choose_multiple(rng, k).copied().collect();
    v.sort_unstable();
    v
}

/// Splits a random permutation of `0..n` into consecutive disjoint blocks.
fn disjoint_sets(rng: &mut Rng, n: usize, sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut out = Vec::new();
    let mut at = 0;
    for &s in sizes {
        let mut block = perm[at..at + s].to_vec();
        block.sort_unstable();
        out.push(block);
        at += s;
    }
    out
}

type Sampler<'a> = Box<dyn Fn(&mut Rng) -> Option<Vec<usize>> + Sync + 'a>;

/// Runs `trials` independent samples. `sizes` draws admissible sizes (None means it gave
/// up); `measure` returns (observed, bound, violated, witness sets).
fn run_trials<S, M>(cfg: &ConcentrationConfig, regime: Option<SizeRegime>, sizes: S, measure: M) -> ConcentrationReport
where
    S: Fn(&mut Rng) -> Option<Vec<usize>> + Sync,
    M: Fn(&mut Rng, &[usize]) -> (u64, f64, bool, Vec<Vec<usize>>) + Sync,
{
    let stream_base = derive_seed(cfg.seed, cfg.lemma as u64 * 2 + regime.map_or(0, |r| r as u64));
    let details: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_for(stream_base, trial as u64);
            let s = sizes(&mut rng).expect("size sampler must succeed when the regime is feasible");
            let (observed, bound, violated, sets) = measure(&mut rng, &s);
            TrialRecord { trial, sizes: s, observed, bound, violated, witness: violated.then_some(sets) }
        })
        .collect();
    let violations = details.iter().filter(|r| r.violated).count();
    ConcentrationReport {
        lemma_id: cfg.lemma,
        regime,
        epsilon: cfg.epsilon,
        p: cfg.p,
        seed: cfg.seed,
        trials: cfg.trials,
        violations,
        skipped: None,
        details,
    }
}

fn uniform(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo..=hi)
}

/// Samples set sizes in the regime named by `cfg`, counts edges, and records bound
/// violations. Reports a skip marker when the regime admits no sizes at this n.
pub fn check_concentration(h: &Hypergraph3, cfg: &ConcentrationConfig) -> Result<ConcentrationReport, ModelError> {
    let n = h.n();
    let eps = cfg.epsilon;
    let p = cfg.p;
    if !(eps > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p must lie in (0, 1]"));
    }
    if n < 6 {
        return Err(invalid("graph needs at least 6 vertices"));
    }
    let ln = (n as f64).ln();
    let nf = n as f64;
    let all: Vec<usize> = (0..n).collect();
    match cfg.lemma {
        LemmaId::UpperUniform => Err(invalid("use check_upper_uniform for upper uniformity")),
        LemmaId::VaryingSizeSets => {
            let amax = (cfg.lambda * nf).floor() as usize;
            if amax < 1 {
                return Ok(ConcentrationReport::skipped(cfg, None, format!("lambda*n = {} < 1", cfg.lambda * nf)));
            }
            let pairs_total = binomial(n - 1, 2) as f64;
            Ok(run_trials(
                cfg,
                None,
                |rng| {
                    let a = uniform(rng, 1, amax);
                    let bmax = ((cfg.size_ratio * a as f64).floor() as usize).min(n - a);
                    Some(vec![a, uniform(rng, 0, bmax)])
                },
                |rng, s| {
                    let sets = disjoint_sets(rng, n, s);
                    let (x, y) = (VertexSet::from(sets[0].clone()), VertexSet::from(sets[1].clone()));
                    let obs = h.e_triple(&x, &y, &VertexSet::range(n)) as u64;
                    let bound = cfg.gamma * s[0] as f64 * p * pairs_total;
                    (obs, bound, obs as f64 >= bound, sets)
                },
            ))
        }
        LemmaId::OneEdge => {
            let t = eps.powi(-3) * ln / (nf * p);
            let half = n / 2;
            match cfg.regime {
                SizeRegime::Small => {
                    let xmax = (t.floor() as usize).min(half);
                    if xmax < 1 {
                        return Ok(ConcentrationReport::skipped(cfg, Some(SizeRegime::Small), format!("threshold {t:.2} < 1")));
                    }
                    Ok(run_trials(
                        cfg,
                        Some(SizeRegime::Small),
                        |rng| {
                            let x = uniform(rng, 1, xmax);
                            Some(vec![x, uniform(rng, 1, x)])
                        },
                        |rng, s| {
                            let sets = disjoint_sets(rng, n, s);
                            let obs = h.e_triple(&sets[0].clone().into(), &sets[1].clone().into(), &VertexSet::range(n)) as u64;
                            let bound = eps.powi(-4) * s[0] as f64 * ln;
                            (obs, bound, obs as f64 > bound, sets)
                        },
                    ))
                }
                SizeRegime::Large => {
                    let sizes: Sampler = match cfg.scale {
                        Scale::Asymptotic => {
                            let lo = t.ceil().max(1.0) as usize;
                            if lo > half {
                                return Ok(ConcentrationReport::skipped(
                                    cfg,
                                    Some(SizeRegime::Large),
                                    format!("size threshold {t:.1} exceeds n/2 = {half}"),
                                ));
                            }
                            Box::new(move |rng| Some(vec![uniform(rng, lo, half), uniform(rng, lo, half)]))
                        }
                        Scale::Desk { min_expected } => {
                            if (half * half) as f64 * nf * p < min_expected {
                                return Ok(ConcentrationReport::skipped(
                                    cfg,
                                    Some(SizeRegime::Large),
                                    format!("expected count cannot reach {min_expected:.1}"),
                                ));
                            }
                            Box::new(move |rng| {
                                let x = uniform(rng, 1, half);
                                let ymin = (min_expected / (x as f64 * nf * p)).ceil().max(1.0) as usize;
                                if ymin > half {
                                    let x = half;
                                    let ymin = (min_expected / (x as f64 * nf * p)).ceil().max(1.0) as usize;
                                    return Some(vec![x, uniform(rng, ymin, half)]);
                                }
                                Some(vec![x, uniform(rng, ymin, half)])
                            })
                        }
                    };
                    Ok(run_trials(cfg, Some(SizeRegime::Large), sizes, |rng, s| {
                        let sets = disjoint_sets(rng, n, s);
                        let obs = h.e_triple(&sets[0].clone().into(), &sets[1].clone().into(), &VertexSet::range(n)) as u64;
                        let bound = (1.0 + eps) * (s[0] * s[1]) as f64 * nf * p;
                        (obs, bound, obs as f64 > bound, sets)
                    }))
                }
            }
        }
        LemmaId::TwoEdge => {
            let t = eps.powi(-3) * ln / p;
            let pairs_left = |w: usize| binomial(n - w, 2) as usize;
            let measure = |rng: &mut Rng, s: &[usize]| {
                let mut perm = all.clone();
                perm.shuffle(rng);
                let w: Vec<usize> = perm[..s[0]].to_vec();
                let rest = &perm[s[0]..];
                let mut pool = Vec::with_capacity(pairs_left(s[0]));
                for i in 0..rest.len() {
                    for j in i + 1..rest.len() {
                        pool.push((rest[i].min(rest[j]), rest[i].max(rest[j])));
                    }
                }
                let pairs: Vec<(usize, usize)> = pool.choose_multiple(rng, s[1]).copied().collect();
                let wset: VertexSet = w.iter().copied().collect();
                let obs = h.e_pairs(&pairs, &wset) as u64;
                let mut ws = w.clone();
                ws.sort_unstable();
                (obs, ws, pairs.iter().flat_map(|&(a, b)| [a, b]).collect::<Vec<_>>())
            };
            match cfg.regime {
                SizeRegime::Small => {
                    let pmax = (t.floor() as usize).min(pairs_left(1));
                    if pmax < 1 {
                        return Ok(ConcentrationReport::skipped(cfg, Some(SizeRegime::Small), format!("threshold {t:.2} < 1")));
                    }
                    Ok(run_trials(
                        cfg,
                        Some(SizeRegime::Small),
                        |rng| loop {
                            let np = uniform(rng, 1, pmax);
                            let w = uniform(rng, 1, np.min(n - 2));
                            if pairs_left(w) >= np {
                                return Some(vec![w, np]);
                            }
                        },
                        |rng, s| {
                            let (obs, w, flat) = measure(rng, s);
                            let bound = eps.powi(-4) * s[1] as f64 * ln;
                            (obs, bound, obs as f64 > bound, vec![w, flat])
                        },
                    ))
                }
                SizeRegime::Large => {
                    let sizes: Sampler = match cfg.scale {
                        Scale::Asymptotic => {
                            let lo = t.ceil().max(1.0) as usize;
                            let wmax = (1..=n - 2).rev().find(|&w| w >= lo && pairs_left(w) >= lo);
                            match wmax {
                                None => {
                                    return Ok(ConcentrationReport::skipped(
                                        cfg,
                                        Some(SizeRegime::Large),
                                        format!("size threshold {t:.1} unreachable with n = {n}"),
                                    ))
                                }
                                Some(wmax) => Box::new(move |rng| {
                                    let w = uniform(rng, lo, wmax);
                                    Some(vec![w, uniform(rng, lo, pairs_left(w))])
                                }),
                            }
                        }
                        Scale::Desk { min_expected } => {
                            let best = (1..=n - 2).map(|w| w as f64 * pairs_left(w) as f64 * p).fold(0.0, f64::max);
                            if best < min_expected {
                                return Ok(ConcentrationReport::skipped(
                                    cfg,
                                    Some(SizeRegime::Large),
                                    format!("expected count cannot reach {min_expected:.1}"),
                                ));
                            }
                            Box::new(move |rng| loop {
                                let w = uniform(rng, 1, n - 2);
                                let lo = (min_expected / (w as f64 * p)).ceil().max(1.0) as usize;
                                if lo <= pairs_left(w) {
                                    return Some(vec![w, uniform(rng, lo, pairs_left(w))]);
                                }
                            })
                        }
                    };
                    Ok(run_trials(cfg, Some(SizeRegime::Large), sizes, |rng, s| {
                        let (obs, w, flat) = measure(rng, s);
                        let bound = (1.0 + eps) * (s[0] * s[1]) as f64 * p;
                        (obs, bound, obs as f64 > bound, vec![w, flat])
                    }))
                }
            }
        }
        LemmaId::GeneralEdge => {
            let need = match cfg.scale {
                Scale::Asymptotic => 200.0 * eps.powi(-2) * nf,
                Scale::Desk { min_expected } => min_expected,
            };
            if nf * nf * nf * p < need {
                return Ok(ConcentrationReport::skipped(
                    cfg,
                    None,
                    format!("xyzp >= {need:.1} unreachable with n = {n}"),
                ));
            }
            Ok(run_trials(
                cfg,
                None,
                |rng| loop {
                    let x = uniform(rng, 1, n);
                    let y = uniform(rng, 1, n);
                    let zmin = (need / (x as f64 * y as f64 * p)).ceil().max(1.0) as usize;
                    if zmin <= n {
                        return Some(vec![x, y, uniform(rng, zmin, n)]);
                    }
                },
                |rng, s| {
                    let sets: Vec<Vec<usize>> = s.iter().map(|&k| random_subset(rng, &all, k)).collect();
                    let vs: Vec<VertexSet> = sets.iter().map(|v| v.iter().copied().collect()).collect();
                    let obs = h.e_triple(&vs[0], &vs[1], &vs[2]) as u64;
                    let bound = (1.0 + eps) * (s[0] * s[1] * s[2]) as f64 * p;
                    (obs, bound, obs as f64 > bound, sets)
                },
            ))
        }
    }
}

/// Samples disjoint triples of sets of size at least `eta*n` and tests that the density of
/// crossing edges stays at most `b*p`.
pub fn check_upper_uniform(
    h: &Hypergraph3,
    eta: f64,
    b: f64,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport, ModelError> {
    let n = h.n();
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta must lie in (0, 1)"));
    }
    if !(b > 1.0) {
        return Err(invalid("b must exceed 1"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p must lie in (0, 1]"));
    }
    if eta * (n as f64) < 1.0 {
        return Err(invalid(format!("eta*n = {} < 1", eta * n as f64)));
    }
    let mut cfg = ConcentrationConfig::new(LemmaId::UpperUniform, 0.0, p, trials, seed);
    cfg.scale = Scale::Asymptotic;
    let m = (eta * n as f64).ceil() as usize;
    if 3 * m > n {
        return Ok(ConcentrationReport::skipped(&cfg, None, format!("three sets of size {m} do not fit in n = {n}")));
    }
    let mut report = run_trials(
        &cfg,
        None,
        |rng| {
            let s1 = uniform(rng, m, n - 2 * m);
            let s2 = uniform(rng, m, n - s1 - m);
            let s3 = uniform(rng, m, n - s1 - s2);
            Some(vec![s1, s2, s3])
        },
        |rng, s| {
            let sets = disjoint_sets(rng, n, s);
            let vs: Vec<VertexSet> = sets.iter().map(|v| v.iter().copied().collect()).collect();
            let obs = h.e_triple(&vs[0], &vs[1], &vs[2]) as u64;
            let volume = (s[0] * s[1] * s[2]) as f64;
            let bound = b * p * volume;
            (obs, bound, obs as f64 > bound, sets)
        },
    );
    report.epsilon = b - 1.0;
    Ok(report)
}

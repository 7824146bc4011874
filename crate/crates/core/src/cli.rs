//! Command-line front end: instance generation, analytics, checkers, solvers and experiment sweeps.
//!
//! JSON is the canonical output; CSV is a flat projection where one is offered.
//! Exit codes: 0 completed, 1 usage or input error, 2 budget exhaustion.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::absorb::{
    assemble_absorber, build_gadget_template, build_template, m3_density, verify_absorber, verify_template,
    AbsorberCheck, AbsorberParams, GadgetKind, TemplateCheck, TemplateMode,
};
use crate::hgraph::{validate_loose_cycle, validate_loose_path, Hypergraph3, LooseCycle, LoosePath, VertexSet};
use crate::models::{
    adversary_prune, binomial, check_concentration, check_upper_uniform, extremal_codegree, extremal_degree,
    sample_h3np, AdversaryKind, AdversaryStrategy, ConcentrationConfig, LemmaId, ModelParams, Scale, SizeRegime,
};
use crate::oracle::{enumerate_loose_paths, find_loose_hc_pipeline, has_loose_hc_with_budget, Decision, PipelineConfig};
use crate::rng::{derive_seed, rng_for};

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_DIR_ENV: &str = "LHC_OUT_DIR";

/// Minimum relative degree thresholds for `d = 1` and `d = 2`.
pub const DELTA_1: f64 = 7.0 / 16.0;
pub const DELTA_2: f64 = 0.25;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    /// The report is still printed; only the exit code changes.
    #[error("budget exhausted: {reason}")]
    Budget { reason: String, report: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Budget { .. } => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "loose-hc", version, about = "Loose Hamilton cycles in random and pruned 3-graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a hypergraph file.
    Gen(GenArgs),
    /// Degree statistics of a hypergraph.
    Analyze(AnalyzeArgs),
    /// Verify densities, templates, absorbers, concentration and loose structures.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Search for loose Hamilton cycles and loose paths.
    #[command(subcommand)]
    Find(FindCmd),
    /// Batch experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; relative paths resolve against $LHC_OUT_DIR when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    H3np,
    ExtremalCodegree,
    ExtremalDegree,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Prune to `delta_d(G) >= (delta_d + gamma) p C(n-d, 3-d)` after sampling.
    #[arg(long)]
    pub prune_d: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub prune_gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub removal_rate: f64,
    /// `text` (default) or `json`.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GadgetArg {
    A2,
    A1,
    Backbone1,
    ContractedBackbone,
}

impl From<GadgetArg> for GadgetKind {
    fn from(g: GadgetArg) -> Self {
        match g {
            GadgetArg::A2 => GadgetKind::A2,
            GadgetArg::A1 => GadgetKind::A1,
            GadgetArg::Backbone1 => GadgetKind::Backbone1,
            GadgetArg::ContractedBackbone => GadgetKind::ContractedBackbone,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TemplateArg {
    ExactSmall,
    Random,
    Circulant,
    Compact,
}

#[derive(Args, Debug, Clone)]
pub struct TemplateOpts {
    #[arg(long = "template", value_enum, default_value_t = TemplateArg::Compact)]
    pub template: TemplateArg,
    /// Degree bound of the random template.
    #[arg(long, default_value_t = 10)]
    pub degree: usize,
    #[arg(long, default_value_t = 5)]
    pub retries: usize,
    /// Sampled verifications per random template.
    #[arg(long, default_value_t = 1000)]
    pub template_trials: usize,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub span: usize,
}

impl TemplateOpts {
    fn mode(&self, m: usize) -> TemplateMode {
        match self.template {
            TemplateArg::ExactSmall => TemplateMode::ExactSmall,
            TemplateArg::Random => TemplateMode::RandomBoundedDegree {
                degree: self.degree,
                retries: self.retries,
                trials: self.template_trials,
            },
            TemplateArg::Circulant => TemplateMode::Circulant { order: self.order.unwrap_or(m + 1), span: self.span },
            TemplateArg::Compact => TemplateMode::Compact,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyArg {
    Exhaustive,
    Sampled,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LemmaArg {
    VaryingSizeSets,
    OneEdge,
    TwoEdge,
    GeneralEdge,
}

impl From<LemmaArg> for LemmaId {
    fn from(l: LemmaArg) -> Self {
        match l {
            LemmaArg::VaryingSizeSets => LemmaId::VaryingSizeSets,
            LemmaArg::OneEdge => LemmaId::OneEdge,
            LemmaArg::TwoEdge => LemmaId::TwoEdge,
            LemmaArg::GeneralEdge => LemmaId::GeneralEdge,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Small,
    Large,
}

#[derive(Subcommand, Debug)]
pub enum CheckCmd {
    /// Exact 3-density of a gadget or of a hypergraph file.
    M3 {
        #[arg(long, value_enum, conflicts_with = "input")]
        gadget: Option<GadgetArg>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Include the densest subgraph.
        #[arg(long)]
        witness: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a template graph and verify its robust matching property.
    Template {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        template: TemplateOpts,
        #[arg(long, value_enum, default_value_t = VerifyArg::Exhaustive)]
        verify: VerifyArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Assemble an absorber and verify it.
    Absorber {
        #[arg(long, conflicts_with = "complete")]
        input: Option<PathBuf>,
        /// Use the complete 3-graph on this many vertices.
        #[arg(long)]
        complete: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        r: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        w: Vec<usize>,
        /// Random connector reservoir of this size, outside R.
        #[arg(long)]
        w_size: Option<usize>,
        #[arg(long, value_enum, default_value_t = GadgetArg::A2)]
        gadget: GadgetArg,
        #[command(flatten)]
        template: TemplateOpts,
        #[arg(long, value_enum, default_value_t = VerifyArg::Exhaustive)]
        verify: VerifyArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample edge-count concentration statements on a hypergraph.
    Concentration {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        lemma: LemmaArg,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RegimeArg::Large)]
        regime: RegimeArg,
        /// Size sets so a Chernoff tail is below this value instead of using asymptotic thresholds.
        #[arg(long)]
        desk_tail: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the upper-uniformity statement.
    UpperUniform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Validate a loose path or cycle given as a comma-separated vertex list.
    Loose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        vertices: Vec<usize>,
        #[arg(long)]
        cycle: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Oracle,
    Pipeline,
    /// Oracle up to 16 vertices, pipeline beyond.
    Auto,
}

#[derive(Args, Debug, Clone)]
pub struct PipelineOpts {
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    pub rho: f64,
    #[arg(long, default_value_t = 10)]
    pub retries: usize,
    #[arg(long, default_value_t = crate::oracle::ORACLE_BUDGET)]
    pub budget: u64,
}

impl PipelineOpts {
    fn config(&self, seed: u64) -> PipelineConfig {
        let mut cfg = PipelineConfig { alpha: self.alpha, retries: self.retries, seed, ..PipelineConfig::default() };
        cfg.cover.rho = self.rho;
        cfg
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(usage("--alpha must lie in (0, 1)"));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(usage("--rho must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
pub enum FindCmd {
    /// Search for a loose Hamilton cycle.
    Hc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Oracle)]
        mode: SolverArg,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        pipeline: PipelineOpts,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate loose paths between two vertices.
    Paths {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCmd {
    /// Success fraction of a solver on pruned random graphs, per gamma (and per C when sweeping p).
    Resilience(ResilienceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ResilienceArgs {
    #[arg(long)]
    pub n: usize,
    /// Edge probability; alternatively sweep `--c-grid`.
    #[arg(long, conflicts_with = "c_grid")]
    pub p: Option<f64>,
    /// `p = min(1, C log n max(n^-3/2, n^(d-3)))` for each C in the grid.
    #[arg(long)]
    pub c_grid: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// `start:end[:step]` (step defaults to 0.05) or a comma-separated list.
    #[arg(long, default_value = "0.05:0.30")]
    pub gamma_grid: String,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub removal_rate: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    /// Regenerate a single record `grid_index:trial`.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses and runs `args` (including the program name), writing the report to `stdout`
/// or the requested file. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    match run(&cli) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            if let CliError::Budget { report, .. } = &e {
                let _ = stdout.write_all(report.as_bytes());
            }
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command. Reports written to a file yield a short JSON notice instead.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => emit(&a.output, analyze(&load(&a.input)?), None),
        Command::Check(c) => cmd_check(c),
        Command::Find(f) => cmd_find(f),
        Command::Experiment(ExperimentCmd::Resilience(a)) => cmd_resilience(a),
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_out(out: Option<&PathBuf>, default_name: Option<String>, body: String) -> Result<String, CliError> {
    let target = match (out, default_name) {
        (Some(p), _) => Some(resolve_out(p)),
        (None, Some(name)) => std::env::var_os(OUT_DIR_ENV).map(|d| Path::new(&d).join(name)),
        (None, None) => None,
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, body)?;
            Ok(format!("{}\n", json!({ "schema_version": SCHEMA_VERSION, "written": path.display().to_string() })))
        }
        None => Ok(body),
    }
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    v
}

/// JSON by default, pretty-printed for `text`; `csv` needs a projection.
fn emit(o: &OutputArgs, v: Value, csv: Option<String>) -> Result<String, CliError> {
    let body = match o.format {
        Format::Json => format!("{}\n", serde_json::to_string(&with_schema(v)).expect("serializable")),
        Format::Text => format!("{}\n", serde_json::to_string_pretty(&with_schema(v)).expect("serializable")),
        Format::Csv => csv.ok_or_else(|| usage("this command has no CSV projection"))?,
    };
    write_out(o.out.as_ref(), None, body)
}

/// A non-exhaustive "no" is only a lower bound on the work needed.
fn oracle_verdict(r: &crate::oracle::OracleResult) -> &'static str {
    match (r.decision, r.exhaustive) {
        (Decision::Yes, _) => "yes",
        (Decision::No, true) => "no",
        (Decision::No, false) => "unknown",
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn load(path: &Path) -> Result<Hypergraph3, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Hypergraph3::from_any(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64, CliError> {
    seed.ok_or_else(|| usage(format!("{what} is randomized and needs --seed")))
}

fn cmd_gen(a: &GenArgs) -> Result<String, CliError> {
    let mut header = vec![format!("model {:?}", a.model).to_lowercase(), format!("n {}", a.n)];
    let (mut g, p) = match a.model {
        ModelArg::H3np => {
            let p = a.p.ok_or_else(|| usage("h3np needs --p"))?;
            let seed = need_seed(a.seed, "h3np")?;
            header.push(format!("p {p}"));
            header.push(format!("seed {seed}"));
            (sample_h3np(&ModelParams { n: a.n, p, seed }).map_err(usage)?, p)
        }
        ModelArg::ExtremalCodegree => (extremal_codegree(a.n).map_err(usage)?.graph, 1.0),
        ModelArg::ExtremalDegree => (extremal_degree(a.n).map_err(usage)?.graph, 1.0),
    };
    if let Some(d) = a.prune_d {
        let seed = need_seed(a.seed, "pruning")?;
        let strategy = AdversaryStrategy {
            kind: AdversaryKind::RandomThinning { removal_rate: a.removal_rate },
            d,
            target_fraction: delta(d)? + a.prune_gamma,
            p,
        };
        let out = adversary_prune(&g, &strategy, seed).map_err(usage)?;
        header.push(format!(
            "pruned d {d} gamma {} removal_rate {} floor {} min_degree {} meets_floor {}",
            a.prune_gamma, a.removal_rate, out.floor, out.min_degree, out.meets_floor
        ));
        g = out.graph;
    }
    let (body, ext) = match a.format {
        Format::Json => (format!("{}\n", g.to_json()), "json"),
        Format::Text => {
            let mut s: String = header.iter().map(|h| format!("# {h}\n")).collect();
            s.push_str(&g.to_text());
            (s, "txt")
        }
        Format::Csv => return Err(usage("gen writes text or json")),
    };
    let name = format!("{}_n{}_seed{}.{ext}", format!("{:?}", a.model).to_lowercase(), a.n, a.seed.unwrap_or(0));
    write_out(a.out.as_ref(), Some(name), body)
}

fn delta(d: usize) -> Result<f64, CliError> {
    match d {
        1 => Ok(DELTA_1),
        2 => Ok(DELTA_2),
        _ => Err(usage(format!("d must be 1 or 2, got {d}"))),
    }
}

pub fn analyze(g: &Hypergraph3) -> Value {
    let n = g.n();
    let d1 = if n >= 1 { g.min_d_degree(1).ok() } else { None };
    let d2 = if n >= 2 { g.min_d_degree(2).ok() } else { None };
    let rel = |v: Option<usize>, full: u64| v.filter(|_| full > 0).map(|v| v as f64 / full as f64);
    json!({
        "n": n,
        "edges": g.edge_count(),
        "density": if n >= 3 { g.edge_count() as f64 / binomial(n, 3) as f64 } else { 0.0 },
        "min_degree": d1,
        "min_codegree": d2,
        "relative_min_degree": rel(d1, if n >= 1 { binomial(n - 1, 2) } else { 0 }),
        "relative_min_codegree": rel(d2, n.saturating_sub(2) as u64),
        "linear": g.is_linear(),
        "even_order": n.is_multiple_of(2),
    })
}

fn cmd_check(c: &CheckCmd) -> Result<String, CliError> {
    match c {
        CheckCmd::M3 { gadget, input, witness, output } => {
            let h = match (gadget, input) {
                (Some(k), None) => build_gadget_template((*k).into()).hypergraph(),
                (None, Some(p)) => load(p)?,
                _ => return Err(usage("give exactly one of --gadget or --input")),
            };
            let m = m3_density(&h).map_err(usage)?;
            let mut v = json!({ "m3": m.fraction() });
            if *witness {
                v["witness"] = json!({ "edges": m.edges, "vertices": m.vertices });
            }
            if let Some(k) = gadget {
                v["gadget"] = to_value(&GadgetKind::from(*k));
            }
            emit(output, v, Some(format!("m3\n{}\n", m.fraction())))
        }
        CheckCmd::Template { m, template, verify, trials, seed, output } => {
            let randomized = template.template == TemplateArg::Random || *verify == VerifyArg::Sampled;
            let seed = &if randomized { need_seed(*seed, "a random or sampled template check")? } else { seed.unwrap_or(0) };
            let t = build_template(*m, &template.mode(*m), *seed).map_err(usage)?;
            let check = match verify {
                VerifyArg::Exhaustive => TemplateCheck::Exhaustive,
                VerifyArg::Sampled => TemplateCheck::Sampled { trials: *trials, seed: *seed },
            };
            let rep = verify_template(&t, &check).map_err(usage)?;
            let v = json!({
                "m": m,
                "order": t.order,
                "edges": t.edges.len(),
                "max_degree": t.max_degree,
                "has_room": t.has_room(),
                "passed": rep.passed(),
                "report": rep,
                "template": t,
            });
            let csv = format!(
                "m,order,edges,max_degree,tested,failures,passed\n{m},{},{},{},{},{},{}\n",
                t.order,
                t.edges.len(),
                t.max_degree,
                rep.tested,
                rep.failures.len(),
                rep.passed()
            );
            emit(output, v, Some(csv))
        }
        CheckCmd::Absorber { input, complete, r, w, w_size, gadget, template, verify, trials, seed, output } => {
            let seed = &need_seed(*seed, "absorber assembly")?;
            let g = match (input, complete) {
                (Some(p), None) => load(p)?,
                (None, Some(n)) => Hypergraph3::complete(*n),
                _ => return Err(usage("give exactly one of --input or --complete")),
            };
            let r: VertexSet = r.iter().copied().collect();
            let w: VertexSet = match w_size {
                Some(k) => {
                    use rand::seq::SliceRandom;
                    let pool = VertexSet::range(g.n()).difference(&r).to_vec();
                    pool.choose_multiple(&mut rng_for(*seed, 50), *k).copied().collect()
                }
                None => w.iter().copied().collect(),
            };
            let params = AbsorberParams {
                gadget: (*gadget).into(),
                template: template.mode(r.len()),
                seed: *seed,
                ..AbsorberParams::default()
            };
            let v = match assemble_absorber(&g, &r, &w, &params) {
                Ok(asm) => {
                    let check = match verify {
                        VerifyArg::Exhaustive => AbsorberCheck::Exhaustive,
                        VerifyArg::Sampled => AbsorberCheck::Sampled { trials: *trials, seed: *seed },
                    };
                    let rep = verify_absorber(&g, &asm, &check).map_err(usage)?;
                    json!({
                        "assembled": true,
                        "a": asm.a,
                        "b": asm.b,
                        "vertices": asm.vertex_count(),
                        "gadgets": asm.gadgets.len(),
                        "template_order": asm.template.order,
                        "passed": rep.passed(),
                        "report": rep,
                    })
                }
                Err(e) => json!({ "assembled": false, "error": e.to_string() }),
            };
            emit(output, v, None)
        }
        CheckCmd::Concentration { input, lemma, epsilon, p, trials, seed, regime, desk_tail, output } => {
            let g = load(input)?;
            let mut cfg = ConcentrationConfig::new((*lemma).into(), *epsilon, *p, *trials, *seed);
            cfg.regime = match regime {
                RegimeArg::Small => SizeRegime::Small,
                RegimeArg::Large => SizeRegime::Large,
            };
            if let Some(t) = desk_tail {
                cfg.scale = Scale::chernoff(*epsilon, *t);
            }
            let rep = check_concentration(&g, &cfg).map_err(usage)?;
            let csv = rep.to_csv().map_err(usage)?;
            emit(output, to_value(&rep), Some(csv))
        }
        CheckCmd::UpperUniform { input, eta, b, p, trials, seed, output } => {
            let g = load(input)?;
            let rep = check_upper_uniform(&g, *eta, *b, *p, *trials, *seed).map_err(usage)?;
            let csv = rep.to_csv().map_err(usage)?;
            emit(output, to_value(&rep), Some(csv))
        }
        CheckCmd::Loose { input, vertices, cycle, output } => {
            let g = load(input)?;
            let res = if *cycle {
                validate_loose_cycle(&g, &LooseCycle::new(vertices.clone()))
            } else {
                validate_loose_path(&g, &LoosePath::new(vertices.clone()))
            };
            let v = match res {
                Ok(()) => json!({ "valid": true }),
                Err(d) => json!({ "valid": false, "defect": d }),
            };
            emit(output, v, None)
        }
    }
}

fn cmd_find(f: &FindCmd) -> Result<String, CliError> {
    match f {
        FindCmd::Hc { input, mode, seed, pipeline, output } => {
            pipeline.validate()?;
            let g = load(input)?;
            let use_oracle = match mode {
                SolverArg::Oracle => true,
                SolverArg::Pipeline => false,
                SolverArg::Auto => g.n() <= crate::oracle::EXHAUSTIVE_MAX_N,
            };
            if use_oracle {
                let r = has_loose_hc_with_budget(&g, pipeline.budget).map_err(usage)?;
                let text = emit(output, json!({ "mode": "oracle", "decision": oracle_verdict(&r), "result": r }), None)?;
                if !r.exhaustive {
                    return Err(CliError::Budget { reason: "oracle node budget".into(), report: text });
                }
                Ok(text)
            } else {
                let seed = need_seed(*seed, "the pipeline solver")?;
                match find_loose_hc_pipeline(&g, &pipeline.config(seed)) {
                    Ok(s) => emit(
                        output,
                        json!({ "mode": "pipeline", "decision": Decision::Yes, "witness": s.cycle, "result": s }),
                        None,
                    ),
                    Err(fail) => {
                        let text = emit(
                            output,
                            json!({ "mode": "pipeline", "decision": "unknown", "failure": fail }),
                            None,
                        )?;
                        Err(CliError::Budget { reason: "pipeline retries".into(), report: text })
                    }
                }
            }
        }
        FindCmd::Paths { input, x, y, max_len, limit, output } => {
            let g = load(input)?;
            let e = enumerate_loose_paths(&g, *x, *y, *max_len, *limit).map_err(usage)?;
            let text = emit(output, json!({ "count": e.paths.len(), "truncated": e.truncated, "paths": e.paths }), None)?;
            if e.truncated {
                return Err(CliError::Budget { reason: "path limit".into(), report: text });
            }
            Ok(text)
        }
    }
}

/// `start:end[:step]` or `a,b,c`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number {t:?} in grid {s:?}")));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(usage(format!("grid {s:?} must be start:end[:step]")));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let step = if parts.len() == 3 { num(parts[2])? } else { 0.05 };
        if step <= 0.0 || b < a {
            return Err(usage(format!("grid {s:?} is empty")));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

/// `p = min(1, C log n max(n^-3/2, n^(d-3)))`.
pub fn threshold_p(c: f64, n: usize, d: usize) -> f64 {
    let n = n as f64;
    (c * n.ln() * n.powf(-1.5).max(n.powi(d as i32 - 3))).min(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResilienceRecord {
    pub grid_index: usize,
    pub trial: usize,
    pub gamma: f64,
    pub c: Option<f64>,
    pub p: f64,
    pub seed: u64,
    pub edges: usize,
    pub floor: usize,
    pub min_degree: usize,
    pub floor_met: bool,
    pub solver: &'static str,
    /// `yes`, `no`, or `unknown` (pipeline failure or oracle budget).
    pub decision: &'static str,
    pub work: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResilienceRow {
    pub gamma: f64,
    pub c: Option<f64>,
    pub p: f64,
    pub trials: usize,
    pub floor_met: usize,
    pub successes: usize,
    pub unknown: usize,
    pub success_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport<C: Serialize, R: Serialize, A: Serialize> {
    pub schema_version: u32,
    pub command: String,
    pub config: C,
    pub records: Vec<R>,
    pub aggregate: Vec<A>,
    pub wall_time_ms: u128,
    pub version: String,
}

pub const RESILIENCE_CSV_HEADER: [&str; 9] =
    ["schema_version", "gamma", "c", "p", "trials", "floor_met", "successes", "unknown", "success_fraction"];

fn resilience_trial(a: &ResilienceArgs, grid_index: usize, gamma: f64, c: Option<f64>, p: f64, trial: usize) -> Result<ResilienceRecord, CliError> {
    let seed = derive_seed(derive_seed(a.seed, grid_index as u64), trial as u64);
    let h = sample_h3np(&ModelParams { n: a.n, p, seed }).map_err(usage)?;
    let strategy = AdversaryStrategy {
        kind: AdversaryKind::RandomThinning { removal_rate: a.removal_rate },
        d: a.d,
        target_fraction: delta(a.d)? + gamma,
        p,
    };
    let pr = adversary_prune(&h, &strategy, derive_seed(seed, 1)).map_err(usage)?;
    let oracle = match a.solver {
        SolverArg::Oracle => true,
        SolverArg::Pipeline => false,
        SolverArg::Auto => a.n <= crate::oracle::EXHAUSTIVE_MAX_N,
    };
    let (solver, decision, work) = if oracle {
        let r = has_loose_hc_with_budget(&pr.graph, a.pipeline.budget).map_err(usage)?;
        ("oracle", oracle_verdict(&r), r.nodes_explored)
    } else {
        match find_loose_hc_pipeline(&pr.graph, &a.pipeline.config(derive_seed(seed, 2))) {
            Ok(s) => ("pipeline", "yes", s.attempts.len() as u64),
            Err(f) => ("pipeline", "unknown", f.attempts.len() as u64),
        }
    };
    Ok(ResilienceRecord {
        grid_index,
        trial,
        gamma,
        c,
        p,
        seed,
        edges: pr.graph.edge_count(),
        floor: pr.floor,
        min_degree: pr.min_degree,
        floor_met: pr.meets_floor,
        solver,
        decision,
        work,
    })
}

fn cmd_resilience(a: &ResilienceArgs) -> Result<String, CliError> {
    let started = Instant::now();
    a.pipeline.validate()?;
    delta(a.d)?;
    if a.n < 6 || a.n % 2 == 1 {
        return Err(usage("--n must be even and at least 6"));
    }
    let gammas = parse_grid(&a.gamma_grid)?;
    if gammas.iter().any(|&g| !(g > 0.0 && delta(a.d).unwrap() + g <= 1.0)) {
        return Err(usage("each gamma must be positive with delta_d + gamma <= 1"));
    }
    let ps: Vec<(Option<f64>, f64)> = match (&a.p, &a.c_grid) {
        (Some(p), None) if *p > 0.0 && *p <= 1.0 => vec![(None, *p)],
        (Some(_), None) => return Err(usage("--p must lie in (0, 1]")),
        (None, Some(cg)) => parse_grid(cg)?.into_iter().map(|c| (Some(c), threshold_p(c, a.n, a.d))).collect(),
        _ => return Err(usage("give --p or --c-grid")),
    };
    let grid: Vec<(f64, Option<f64>, f64)> =
        ps.iter().flat_map(|&(c, p)| gammas.iter().map(move |&g| (g, c, p))).collect();
    let jobs: Vec<(usize, usize)> = match &a.only {
        Some(s) => {
            let (gi, t) = s.split_once(':').ok_or_else(|| usage("--only takes grid_index:trial"))?;
            let gi: usize = gi.parse().map_err(usage)?;
            let t: usize = t.parse().map_err(usage)?;
            if gi >= grid.len() {
                return Err(usage(format!("grid index {gi} out of range")));
            }
            vec![(gi, t)]
        }
        None => (0..grid.len()).flat_map(|gi| (0..a.trials).map(move |t| (gi, t))).collect(),
    };
    let mut records: Vec<ResilienceRecord> = jobs
        .par_iter()
        .map(|&(gi, t)| {
            let (g, c, p) = grid[gi];
            resilience_trial(a, gi, g, c, p, t)
        })
        .collect::<Result<_, _>>()?;
    records.sort_by_key(|r| (r.grid_index, r.trial));
    let aggregate: Vec<ResilienceRow> = grid
        .iter()
        .enumerate()
        .filter_map(|(gi, &(gamma, c, p))| {
            let rs: Vec<&ResilienceRecord> = records.iter().filter(|r| r.grid_index == gi).collect();
            if rs.is_empty() {
                return None;
            }
            let successes = rs.iter().filter(|r| r.decision == "yes").count();
            Some(ResilienceRow {
                gamma,
                c,
                p,
                trials: rs.len(),
                floor_met: rs.iter().filter(|r| r.floor_met).count(),
                successes,
                unknown: rs.iter().filter(|r| r.decision == "unknown").count(),
                success_fraction: successes as f64 / rs.len() as f64,
            })
        })
        .collect();
    let body = match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(RESILIENCE_CSV_HEADER).map_err(usage)?;
            for r in &aggregate {
                w.write_record([
                    SCHEMA_VERSION.to_string(),
                    format!("{}", r.gamma),
                    r.c.map(|c| c.to_string()).unwrap_or_default(),
                    format!("{}", r.p),
                    r.trials.to_string(),
                    r.floor_met.to_string(),
                    r.successes.to_string(),
                    r.unknown.to_string(),
                    format!("{:.4}", r.success_fraction),
                ])
                .map_err(usage)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| usage(e.error()))?).expect("utf-8")
        }
        _ => {
            let report = RunReport {
                schema_version: SCHEMA_VERSION,
                command: "experiment resilience".into(),
                config: json!({
                    "n": a.n, "p": a.p, "c_grid": a.c_grid, "d": a.d, "gamma_grid": gammas,
                    "trials": a.trials, "seed": a.seed, "removal_rate": a.removal_rate,
                    "solver": format!("{:?}", a.solver).to_lowercase(),
                    "alpha": a.pipeline.alpha, "rho": a.pipeline.rho, "retries": a.pipeline.retries,
                    "budget": a.pipeline.budget,
                }),
                records,
                aggregate,
                wall_time_ms: started.elapsed().as_millis(),
                version: env!("CARGO_PKG_VERSION").into(),
            };
            format!("{}\n", serde_json::to_string(&report).expect("serializable"))
        }
    };
    write_out(a.out.as_ref(), None, body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["loose-hc"];
        full.extend_from_slice(args);
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.05:0.30").unwrap(), vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3]);
        assert_eq!(parse_grid("1,2").unwrap(), vec![1.0, 2.0]);
        assert_eq!(parse_grid("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0.3:0.1").is_err());
        assert!((threshold_p(1.0, 100, 2) - 100f64.ln() / 100.0).abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["gen"]).0, 1);
        assert_eq!(run_args(&["gen", "--model", "h3np", "--n", "10", "--p", "0.5"]).0, 1);
        assert_eq!(run_args(&["bogus"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn m3_report() {
        let (code, out, _) = run_args(&["check", "m3", "--gadget", "contracted-backbone"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["m3"], "2/3");
    }
}

//! `entgraph` command-line pipeline.
//!
//! Exit status is 0 on success, 1 for usage and configuration errors and 2
//! for errors in the data being processed.

pub mod config;
pub mod plot;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use anyhow::{anyhow, Context};
use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::json;

use entgraph_core::dataset::build_variant;
use entgraph_core::eval::{
    convert_raw_dataset, evaluate, graph_stats, load_dataset, Portion, PrCurve, ScoreColumn,
};
use entgraph_core::global::{globalize, transitivity_pass};
use entgraph_core::local::{build_graphs, EntailmentGraph};
use entgraph_core::relation::{read_triples, write_triples, TypeMap};
use entgraph_core::synth;
use entgraph_core::tagger::{tag_corpus, Lexicon};

use config::{validate_config, PipelineConfig, Stage, Transitivity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "entgraph",
    version,
    about = "Build and evaluate typed entailment graphs"
)]
pub struct Cli {
    /// Flat key = value configuration file; explicit flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for every stage; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Suppress progress messages on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tag relations in dependency parses with modality labels.
    Tag(TagArgs),
    /// Derive a corpus variant from tagged triples.
    BuildCorpus(BuildCorpusArgs),
    /// Learn local entailment graphs from a corpus.
    BuildGraphs(BuildGraphsArgs),
    /// Share scores across type pairs and optionally apply transitivity.
    Globalize(GlobalizeArgs),
    /// Score an entailment dataset and integrate its precision/recall curve.
    Eval(EvalArgs),
    /// Graph size and dataset predicate coverage.
    Stats(StatsArgs),
    /// Plot up to three precision/recall curves as SVG.
    PrPlot(PrPlotArgs),
    /// Write a synthetic parse corpus, type map and dataset.
    Synth(SynthArgs),
    /// Convert raw phrase pairs into a typed dataset.
    ConvertDataset(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct TagArgs {
    /// Dependency parses, one JSON sentence per line.
    #[arg(long)]
    pub parses: Option<PathBuf>,
    /// Lexicon TSV with lemma, POS pattern and tag columns.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Tagging statistics as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildCorpusArgs {
    /// Tagged triples.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// asserted, baseline-large or baseline-small.
    #[arg(long, default_value = "asserted")]
    pub variant: String,
    /// Sampling fraction for baseline-small.
    #[arg(long = "fraction", id = "sample_fraction", default_value_t = 0.85)]
    pub sample_fraction: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildGraphsArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Entity type map TSV.
    #[arg(long = "types", id = "type_map")]
    pub type_map: Option<PathBuf>,
    /// Output directory, one file per type pair.
    #[arg(long)]
    pub out: PathBuf,
    /// Minimum distinct argument pairs a predicate needs.
    #[arg(long, default_value_t = 4)]
    pub min_arg_pairs_per_pred: usize,
    /// Minimum distinct predicates an argument pair needs.
    #[arg(long, default_value_t = 4)]
    pub min_preds_per_arg_pair: usize,
    /// Edges scoring below this BInc are not stored.
    #[arg(long, default_value_t = 0.01)]
    pub score_floor: f64,
    /// Extra measures to store, e.g. binc,dirt,weeds.
    #[arg(long, default_value = "binc")]
    pub measures: String,
    /// Type of entities missing from the map.
    #[arg(long, default_value = "thing")]
    pub fallback_type: String,
    /// Build summary as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GlobalizeArgs {
    #[arg(long)]
    pub graphs: Option<PathBuf>,
    /// Weight of the local score against the cross-type-pair mean.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// off or one-pass.
    #[arg(long, default_value = "off")]
    pub transitivity: String,
    /// Floor for edges added by transitivity.
    #[arg(long, default_value_t = 0.01)]
    pub score_floor: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub graphs: Option<PathBuf>,
    /// Dataset TSV.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// all, directional or sports.
    #[arg(long, default_value = "all")]
    pub portion: String,
    /// Score column: binc, weeds_p, lin, dirt, weeds or global.
    #[arg(long, default_value = "binc")]
    pub score: String,
    /// Lower precision bound of the integrated region.
    #[arg(long, default_value_t = 0.5)]
    pub p_min: f64,
    /// JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Precision/recall curve CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub graphs: Option<PathBuf>,
    /// Dataset whose predicate coverage is reported.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// JSON output; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrPlotArgs {
    /// Curve CSV; repeat for up to three curves.
    #[arg(long = "curve", required = true)]
    pub curves: Vec<PathBuf>,
    /// Legend label per curve; defaults to the file stem.
    #[arg(long = "label")]
    pub labels: Vec<String>,
    #[arg(long, default_value = "Precision/recall")]
    pub title: String,
    /// Lower end of the precision axis.
    #[arg(long, default_value_t = 0.0)]
    pub y_min: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = synth::DEFAULT_SYNTH_RELATIONS)]
    pub relations: usize,
    #[arg(long, default_value_t = synth::DEFAULT_SYNTH_SEED)]
    pub seed: u64,
    /// Directory receiving parses.jsonl, types.tsv and dataset.tsv.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Raw `arg1,phrase,arg2` pairs.
    #[arg(long)]
    pub raw: PathBuf,
    #[arg(long)]
    pub types: PathBuf,
    #[arg(long, default_value = "thing")]
    pub fallback_type: String,
    /// Portion for rows without a portion column.
    #[arg(long, default_value = "all")]
    pub portion: String,
    #[arg(long)]
    pub out: PathBuf,
}

static QUIET: AtomicBool = AtomicBool::new(false);

macro_rules! progress {
    ($($arg:tt)*) => {
        if !QUIET.load(Ordering::Relaxed) {
            eprintln!($($arg)*);
        }
    };
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<entgraph_core::Error> for Failure {
    fn from(e: entgraph_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn explicit(m: &ArgMatches, id: &str) -> bool {
    m.value_source(id) == Some(ValueSource::CommandLine)
}

fn write_output(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn check(cfg: &PipelineConfig, stage: Stage) -> Outcome {
    let diags = validate_config(cfg, stage);
    if diags.is_empty() {
        Ok(())
    } else {
        let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
        Err(Failure::Usage(format!(
            "invalid configuration:\n  {}",
            lines.join("\n  ")
        )))
    }
}

fn path_of(p: &Option<PathBuf>) -> &Path {
    p.as_deref().expect("validated")
}

fn tag(cfg: &mut PipelineConfig, a: &TagArgs) -> Outcome {
    if a.parses.is_some() {
        cfg.parses = a.parses.clone();
    }
    if a.lexicon.is_some() {
        cfg.lexicon = a.lexicon.clone();
    }
    check(cfg, Stage::Tag)?;
    let lexicon = Lexicon::load(path_of(&cfg.lexicon))?;
    let parses = path_of(&cfg.parses);
    let text =
        fs::read_to_string(parses).with_context(|| format!("reading {}", parses.display()))?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let out = tag_corpus(&lines, &lexicon);
    write_triples(&a.out, &out.triples)?;
    if let Some(p) = &a.stats {
        write_output(p, &to_json(&out.stats))?;
    }
    for d in &out.stats.diagnostics {
        eprintln!("warning: {d}");
    }
    progress!(
        "tagged {} relations from {} sentences ({:.1}% removal-tagged)",
        out.stats.total_relations,
        out.stats.sentences,
        100.0 * out.stats.tagged_fraction
    );
    Ok(())
}

fn build_corpus(cfg: &mut PipelineConfig, a: &BuildCorpusArgs, m: &ArgMatches) -> Outcome {
    if a.input.is_some() {
        cfg.triples = a.input.clone();
    }
    if explicit(m, "variant") {
        cfg.variant = a.variant.clone();
    }
    if explicit(m, "sample_fraction") {
        cfg.sample_fraction = a.sample_fraction;
    }
    if explicit(m, "seed") {
        cfg.seed = a.seed;
    }
    check(cfg, Stage::BuildCorpus)?;
    let spec = cfg.variant_spec().expect("validated");
    let triples = read_triples(path_of(&cfg.triples))?;
    let (kept, report) = build_variant(triples, &spec)?;
    write_triples(&a.out, &kept)?;
    if let Some(p) = &a.report {
        write_output(p, &to_json(&report))?;
    }
    progress!(
        "{}: kept {} of {} relations",
        spec.variant,
        report.output_count,
        report.input_count
    );
    Ok(())
}

fn build_graphs_cmd(cfg: &mut PipelineConfig, a: &BuildGraphsArgs, m: &ArgMatches) -> Outcome {
    if a.corpus.is_some() {
        cfg.corpus = a.corpus.clone();
    }
    if a.type_map.is_some() {
        cfg.type_map = a.type_map.clone();
    }
    if explicit(m, "min_arg_pairs_per_pred") {
        cfg.min_arg_pairs_per_pred = a.min_arg_pairs_per_pred;
    }
    if explicit(m, "min_preds_per_arg_pair") {
        cfg.min_preds_per_arg_pair = a.min_preds_per_arg_pair;
    }
    if explicit(m, "score_floor") {
        cfg.score_floor = a.score_floor;
    }
    if explicit(m, "measures") {
        cfg.measures = a.measures.clone();
    }
    if explicit(m, "fallback_type") {
        cfg.fallback_type = a.fallback_type.clone();
    }
    check(cfg, Stage::BuildGraphs)?;
    let types = TypeMap::load(path_of(&cfg.type_map), &cfg.fallback_type)?;
    let triples = read_triples(path_of(&cfg.corpus))?;
    let (graph, summary) = build_graphs(&triples, &types, &cfg.graph_options());
    graph.write_dir(&a.out)?;
    if let Some(p) = &a.summary {
        write_output(p, &to_json(&summary))?;
    }
    progress!(
        "{} type pairs, {} nodes, {} edges",
        summary.type_pairs,
        summary.nodes,
        summary.edges
    );
    Ok(())
}

fn globalize_cmd(cfg: &mut PipelineConfig, a: &GlobalizeArgs, m: &ArgMatches) -> Outcome {
    if a.graphs.is_some() {
        cfg.graphs = a.graphs.clone();
    }
    if explicit(m, "lambda") {
        cfg.lambda = a.lambda;
    }
    if explicit(m, "transitivity") {
        cfg.transitivity = a.transitivity.clone();
    }
    if explicit(m, "score_floor") {
        cfg.score_floor = a.score_floor;
    }
    check(cfg, Stage::Globalize)?;
    let graph = EntailmentGraph::read_dir(path_of(&cfg.graphs))?;
    let mut table = globalize(&graph, cfg.lambda);
    if Transitivity::parse(&cfg.transitivity) == Some(Transitivity::OnePass) {
        table = transitivity_pass(&table, cfg.score_floor);
    }
    table.graph.write_dir(&a.out)?;
    progress!("globalized {} edges", table.graph.num_edges());
    Ok(())
}

fn eval_cmd(cfg: &mut PipelineConfig, a: &EvalArgs, m: &ArgMatches) -> Outcome {
    if a.graphs.is_some() {
        cfg.graphs = a.graphs.clone();
    }
    if a.dataset.is_some() {
        cfg.dataset = a.dataset.clone();
    }
    if explicit(m, "portion") {
        cfg.portion = a.portion.clone();
    }
    if explicit(m, "score") {
        cfg.score = a.score.clone();
    }
    if explicit(m, "p_min") {
        cfg.p_min = a.p_min;
    }
    check(cfg, Stage::Eval)?;
    let portion: Portion = cfg.portion.parse()?;
    let column: ScoreColumn = cfg.score.parse()?;
    let graph = EntailmentGraph::read_dir(path_of(&cfg.graphs))?;
    let examples = load_dataset(path_of(&cfg.dataset), portion)?;
    let (report, curve) = evaluate(&graph, &examples, portion, column, cfg.p_min)?;
    let json = to_json(&report);
    match &a.report {
        Some(p) => write_output(p, &json)?,
        None => print!("{json}"),
    }
    if let Some(p) = &a.curve {
        write_output(p, &curve.to_csv())?;
    }
    progress!(
        "{portion}: {} examples, AUC {:.4}",
        report.examples,
        report.auc
    );
    Ok(())
}

fn stats_cmd(cfg: &mut PipelineConfig, a: &StatsArgs) -> Outcome {
    if a.graphs.is_some() {
        cfg.graphs = a.graphs.clone();
    }
    if a.dataset.is_some() {
        cfg.dataset = a.dataset.clone();
    }
    check(cfg, Stage::Stats)?;
    let graph = EntailmentGraph::read_dir(path_of(&cfg.graphs))?;
    let examples = match &cfg.dataset {
        Some(p) => load_dataset(p, Portion::All)?,
        None => Vec::new(),
    };
    let stats = graph_stats(&graph, &examples);
    let per_pair: serde_json::Map<String, serde_json::Value> = graph
        .subgraphs
        .iter()
        .map(|(k, s)| {
            (
                k.to_string(),
                json!({"nodes": s.num_nodes(), "edges": s.num_edges()}),
            )
        })
        .collect();
    let out = json!({
        "nodes": stats.nodes,
        "edges": stats.edges,
        "dataset_pred_coverage": cfg.dataset.as_ref().map(|_| stats.dataset_pred_coverage),
        "type_pairs": per_pair,
    });
    let text = to_json(&out);
    match &a.out {
        Some(p) => write_output(p, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pr_plot(a: &PrPlotArgs) -> Outcome {
    if a.curves.len() > plot::MAX_CURVES {
        return Err(Failure::Usage(format!(
            "at most {} curves can be plotted",
            plot::MAX_CURVES
        )));
    }
    if !a.labels.is_empty() && a.labels.len() != a.curves.len() {
        return Err(Failure::Usage(format!(
            "{} labels given for {} curves",
            a.labels.len(),
            a.curves.len()
        )));
    }
    let mut curves = Vec::new();
    for (i, path) in a.curves.iter().enumerate() {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let curve =
            PrCurve::from_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
        let label = a.labels.get(i).cloned().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        curves.push((label, curve));
    }
    let svg = plot::render_svg(&curves, &a.title, a.y_min).map_err(Failure::Usage)?;
    write_output(&a.out, &svg)?;
    Ok(())
}

fn synth_cmd(a: &SynthArgs) -> Outcome {
    let corpus = synth::generate(a.relations, a.seed);
    write_output(&a.out_dir.join("parses.jsonl"), &corpus.parses_jsonl())?;
    write_output(&a.out_dir.join("types.tsv"), &corpus.type_map_tsv)?;
    write_output(&a.out_dir.join("dataset.tsv"), &corpus.dataset_tsv)?;
    progress!(
        "wrote {} sentences ({} removal-tagged) to {}",
        corpus.sentences.len(),
        corpus.removal_tagged(),
        a.out_dir.display()
    );
    Ok(())
}

fn convert_cmd(a: &ConvertArgs) -> Outcome {
    let portion: Portion = a
        .portion
        .parse()
        .map_err(|e: entgraph_core::Error| Failure::Usage(e.to_string()))?;
    let types = TypeMap::load(&a.types, &a.fallback_type)?;
    let text =
        fs::read_to_string(&a.raw).with_context(|| format!("reading {}", a.raw.display()))?;
    let (tsv, errors) = convert_raw_dataset(&text, &types, portion);
    for e in &errors {
        eprintln!("warning: {}: {e}", a.raw.display());
    }
    write_output(&a.out, &tsv)?;
    Ok(())
}

fn dispatch(cli: &Cli, matches: &ArgMatches, cfg: &mut PipelineConfig) -> Outcome {
    let sub = matches
        .subcommand()
        .map(|(_, m)| m)
        .expect("subcommand is required");
    match &cli.command {
        Command::Tag(a) => tag(cfg, a),
        Command::BuildCorpus(a) => build_corpus(cfg, a, sub),
        Command::BuildGraphs(a) => build_graphs_cmd(cfg, a, sub),
        Command::Globalize(a) => globalize_cmd(cfg, a, sub),
        Command::Eval(a) => eval_cmd(cfg, a, sub),
        Command::Stats(a) => stats_cmd(cfg, a),
        Command::PrPlot(a) => pr_plot(a),
        Command::Synth(a) => synth_cmd(a),
        Command::ConvertDataset(a) => convert_cmd(a),
    }
}

fn run_inner(matches: &ArgMatches) -> Outcome {
    let cli = Cli::from_arg_matches(matches).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p).map_err(|diags| {
            let lines: Vec<String> = diags.iter().map(ToString::to_string).collect();
            Failure::Usage(format!(
                "invalid configuration file:\n  {}",
                lines.join("\n  ")
            ))
        })?,
        None => PipelineConfig::default(),
    };
    QUIET.store(cli.quiet, Ordering::Relaxed);
    if explicit(matches, "workers") {
        cfg.workers = cli.workers;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Failure::Data(anyhow!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(&cli, matches, &mut cfg))
}

/// Runs the command line `argv` (program name first) and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_inner(&matches) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}

//! Flat `key = value` pipeline configuration.
//!
//! ```text
//! # comments start with '#'
//! lexicon = data/lexicon.tsv
//! min_arg_pairs_per_pred = 4
//! sample_fraction = 0.85
//! ```
//!
//! Every key is optional; absent keys keep their defaults. Command-line
//! flags given explicitly take precedence over the file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use entgraph_core::dataset::{Variant, VariantSpec};
use entgraph_core::eval::{Portion, ScoreColumn, DEFAULT_P_MIN};
use entgraph_core::global::DEFAULT_LAMBDA;
use entgraph_core::local::{GraphOptions, Measures};
use entgraph_core::relation::{is_valid_type, DEFAULT_FALLBACK_TYPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transitivity {
    Off,
    OnePass,
}

impl Transitivity {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "off" => Some(Transitivity::Off),
            "one-pass" => Some(Transitivity::OnePass),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Transitivity::Off => "off",
            Transitivity::OnePass => "one-pass",
        }
    }
}

/// Pipeline stage a configuration is validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Tag,
    BuildCorpus,
    BuildGraphs,
    Globalize,
    Eval,
    Stats,
    Any,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub parses: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub type_map: Option<PathBuf>,
    pub triples: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub graphs: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub min_arg_pairs_per_pred: usize,
    pub min_preds_per_arg_pair: usize,
    pub score_floor: f64,
    pub measures: String,
    pub fallback_type: String,
    pub variant: String,
    pub sample_fraction: f64,
    pub seed: u64,
    pub lambda: f64,
    pub transitivity: String,
    pub portion: String,
    pub score: String,
    pub p_min: f64,
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let g = GraphOptions::default();
        let v = VariantSpec::new(Variant::Asserted);
        PipelineConfig {
            parses: None,
            lexicon: None,
            type_map: None,
            triples: None,
            corpus: None,
            graphs: None,
            dataset: None,
            min_arg_pairs_per_pred: g.min_arg_pairs_per_pred,
            min_preds_per_arg_pair: g.min_preds_per_arg_pair,
            score_floor: g.score_floor,
            measures: g.measures.as_list(),
            fallback_type: DEFAULT_FALLBACK_TYPE.to_string(),
            variant: v.variant.to_string(),
            sample_fraction: v.sample_fraction,
            seed: v.seed,
            lambda: DEFAULT_LAMBDA,
            transitivity: Transitivity::Off.as_str().to_string(),
            portion: Portion::All.to_string(),
            score: "binc".to_string(),
            p_min: DEFAULT_P_MIN,
            workers: 0,
        }
    }
}

/// A problem with one configuration key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub key: String,
    pub message: String,
}

impl Diagnostic {
    fn new(key: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, slot: &mut T) -> Result<(), Diagnostic> {
    *slot = value
        .parse()
        .map_err(|_| Diagnostic::new(key, format!("cannot parse `{value}`")))?;
    Ok(())
}

impl PipelineConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Diagnostic> {
        let path = || Some(PathBuf::from(value));
        match key {
            "parses" => self.parses = path(),
            "lexicon" => self.lexicon = path(),
            "type_map" => self.type_map = path(),
            "triples" => self.triples = path(),
            "corpus" => self.corpus = path(),
            "graphs" => self.graphs = path(),
            "dataset" => self.dataset = path(),
            "min_arg_pairs_per_pred" => parse_num(key, value, &mut self.min_arg_pairs_per_pred)?,
            "min_preds_per_arg_pair" => parse_num(key, value, &mut self.min_preds_per_arg_pair)?,
            "score_floor" => parse_num(key, value, &mut self.score_floor)?,
            "sample_fraction" => parse_num(key, value, &mut self.sample_fraction)?,
            "seed" => parse_num(key, value, &mut self.seed)?,
            "lambda" => parse_num(key, value, &mut self.lambda)?,
            "p_min" => parse_num(key, value, &mut self.p_min)?,
            "workers" => parse_num(key, value, &mut self.workers)?,
            "measures" => self.measures = value.to_string(),
            "fallback_type" => self.fallback_type = value.to_string(),
            "variant" => self.variant = value.to_string(),
            "transitivity" => self.transitivity = value.to_string(),
            "portion" => self.portion = value.to_string(),
            "score" => self.score = value.to_string(),
            _ => return Err(Diagnostic::new(key, "unknown key")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        let mut cfg = PipelineConfig::default();
        let mut errors = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(Diagnostic::new(
                    &format!("line {}", i + 1),
                    format!("expected `key = value`, found `{line}`"),
                ));
                continue;
            };
            if let Err(d) = cfg.set(key.trim(), value.trim()) {
                errors.push(d);
            }
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(errors)
        }
    }

    pub fn load(path: &Path) -> Result<Self, Vec<Diagnostic>> {
        let text = fs::read_to_string(path).map_err(|e| {
            vec![Diagnostic::new(
                "config",
                format!("{}: {e}", path.display()),
            )]
        })?;
        Self::parse(&text)
    }

    /// Serializes every key, paths included when set, in a stable order.
    pub fn to_text(&self) -> String {
        let mut lines = Vec::new();
        let paths = [
            ("parses", &self.parses),
            ("lexicon", &self.lexicon),
            ("type_map", &self.type_map),
            ("triples", &self.triples),
            ("corpus", &self.corpus),
            ("graphs", &self.graphs),
            ("dataset", &self.dataset),
        ];
        for (k, v) in paths {
            if let Some(p) = v {
                lines.push(format!("{k} = {}", p.display()));
            }
        }
        lines.push(format!(
            "min_arg_pairs_per_pred = {}",
            self.min_arg_pairs_per_pred
        ));
        lines.push(format!(
            "min_preds_per_arg_pair = {}",
            self.min_preds_per_arg_pair
        ));
        lines.push(format!("score_floor = {}", self.score_floor));
        lines.push(format!("measures = {}", self.measures));
        lines.push(format!("fallback_type = {}", self.fallback_type));
        lines.push(format!("variant = {}", self.variant));
        lines.push(format!("sample_fraction = {}", self.sample_fraction));
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!("lambda = {}", self.lambda));
        lines.push(format!("transitivity = {}", self.transitivity));
        lines.push(format!("portion = {}", self.portion));
        lines.push(format!("score = {}", self.score));
        lines.push(format!("p_min = {}", self.p_min));
        lines.push(format!("workers = {}", self.workers));
        lines.join("\n") + "\n"
    }

    pub fn graph_options(&self) -> GraphOptions {
        GraphOptions {
            min_arg_pairs_per_pred: self.min_arg_pairs_per_pred,
            min_preds_per_arg_pair: self.min_preds_per_arg_pair,
            score_floor: self.score_floor,
            measures: Measures::parse(&self.measures).unwrap_or_default(),
        }
    }

    pub fn variant_spec(&self) -> Option<VariantSpec> {
        let variant: Variant = self.variant.parse().ok()?;
        Some(
            VariantSpec::new(variant)
                .with_fraction(self.sample_fraction)
                .with_seed(self.seed),
        )
    }
}

fn require(diags: &mut Vec<Diagnostic>, key: &str, value: &Option<PathBuf>) {
    match value {
        None => diags.push(Diagnostic::new(key, "path is required for this stage")),
        Some(p) if p.as_os_str().is_empty() => diags.push(Diagnostic::new(key, "path is empty")),
        Some(_) => {}
    }
}

fn unit_range(diags: &mut Vec<Diagnostic>, key: &str, v: f64) {
    if !(0.0..=1.0).contains(&v) {
        diags.push(Diagnostic::new(key, format!("{v} is outside [0, 1]")));
    }
}

/// Checks a configuration for `stage`; an empty list means it can run.
/// Parameter ranges are always checked, input paths only for stages that
/// read them.
pub fn validate_config(cfg: &PipelineConfig, stage: Stage) -> Vec<Diagnostic> {
    let mut d = Vec::new();

    if cfg.min_arg_pairs_per_pred == 0 {
        d.push(Diagnostic::new(
            "min_arg_pairs_per_pred",
            "must be at least 1",
        ));
    }
    if cfg.min_preds_per_arg_pair == 0 {
        d.push(Diagnostic::new(
            "min_preds_per_arg_pair",
            "must be at least 1",
        ));
    }
    unit_range(&mut d, "score_floor", cfg.score_floor);
    if let Err(e) = Measures::parse(&cfg.measures) {
        d.push(Diagnostic::new("measures", e));
    }
    if !is_valid_type(&cfg.fallback_type) {
        d.push(Diagnostic::new(
            "fallback_type",
            format!("`{}` is not a valid type name", cfg.fallback_type),
        ));
    }
    if cfg.variant.parse::<Variant>().is_err() {
        d.push(Diagnostic::new(
            "variant",
            format!(
                "`{}` is not one of baseline-large, baseline-small, asserted",
                cfg.variant
            ),
        ));
    }
    if !(cfg.sample_fraction > 0.0 && cfg.sample_fraction <= 1.0) {
        d.push(Diagnostic::new(
            "sample_fraction",
            format!("{} is outside (0, 1]", cfg.sample_fraction),
        ));
    }
    unit_range(&mut d, "lambda", cfg.lambda);
    if Transitivity::parse(&cfg.transitivity).is_none() {
        d.push(Diagnostic::new(
            "transitivity",
            format!("`{}` is not off or one-pass", cfg.transitivity),
        ));
    }
    if cfg.portion.parse::<Portion>().is_err() {
        d.push(Diagnostic::new(
            "portion",
            format!("`{}` is not all, directional or sports", cfg.portion),
        ));
    }
    if cfg.score.parse::<ScoreColumn>().is_err() {
        d.push(Diagnostic::new(
            "score",
            format!("unknown score column `{}`", cfg.score),
        ));
    }
    unit_range(&mut d, "p_min", cfg.p_min);

    match stage {
        Stage::Tag => {
            require(&mut d, "parses", &cfg.parses);
            require(&mut d, "lexicon", &cfg.lexicon);
        }
        Stage::BuildCorpus => require(&mut d, "triples", &cfg.triples),
        Stage::BuildGraphs => {
            require(&mut d, "corpus", &cfg.corpus);
            require(&mut d, "type_map", &cfg.type_map);
        }
        Stage::Globalize | Stage::Stats => require(&mut d, "graphs", &cfg.graphs),
        Stage::Eval => {
            require(&mut d, "graphs", &cfg.graphs);
            require(&mut d, "dataset", &cfg.dataset);
        }
        Stage::Any => {}
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(d: &[Diagnostic]) -> Vec<&str> {
        d.iter().map(|d| d.key.as_str()).collect()
    }

    #[test]
    fn defaults_are_valid() {
        assert!(validate_config(&PipelineConfig::default(), Stage::Any).is_empty());
        let cfg = PipelineConfig::default();
        assert_eq!(
            (cfg.min_arg_pairs_per_pred, cfg.min_preds_per_arg_pair),
            (4, 4)
        );
        assert_eq!(cfg.sample_fraction, 0.85);
    }

    #[test]
    fn fraction_out_of_range() {
        let cfg = PipelineConfig {
            sample_fraction: 1.5,
            ..PipelineConfig::default()
        };
        assert_eq!(
            keys(&validate_config(&cfg, Stage::Any)),
            vec!["sample_fraction"]
        );
    }

    #[test]
    fn tag_needs_lexicon() {
        let cfg = PipelineConfig {
            parses: Some("p.jsonl".into()),
            ..PipelineConfig::default()
        };
        assert_eq!(keys(&validate_config(&cfg, Stage::Tag)), vec!["lexicon"]);
    }

    #[test]
    fn parse_and_roundtrip() {
        let text =
            "# run\nlexicon = data/lexicon.tsv\nseed=7\nmeasures = binc,dirt\n\nlambda = 0.25\n";
        let cfg = PipelineConfig::parse(text).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.lambda, 0.25);
        assert_eq!(cfg.lexicon.as_deref(), Some(Path::new("data/lexicon.tsv")));
        assert!(cfg.graph_options().measures.dirt);
        assert_eq!(PipelineConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn parse_errors_name_keys() {
        let errs = PipelineConfig::parse("seed = x\nbogus = 1\nnot a pair\n").unwrap_err();
        assert_eq!(keys(&errs), vec!["seed", "bogus", "line 3"]);
    }

    #[test]
    fn every_range_is_checked() {
        let cfg = PipelineConfig {
            min_arg_pairs_per_pred: 0,
            score_floor: -0.1,
            measures: "binc,cosine".into(),
            fallback_type: "Thing".into(),
            variant: "small".into(),
            lambda: 2.0,
            transitivity: "full".into(),
            portion: "dev".into(),
            score: "cosine".into(),
            p_min: 1.5,
            ..PipelineConfig::default()
        };
        assert_eq!(
            keys(&validate_config(&cfg, Stage::Any)),
            vec![
                "min_arg_pairs_per_pred",
                "score_floor",
                "measures",
                "fallback_type",
                "variant",
                "lambda",
                "transitivity",
                "portion",
                "score",
                "p_min"
            ]
        );
    }
}

//! Scoring entailment datasets against a graph.
//!
//! Dataset rows are tab-separated:
//!
//! ```text
//! premise_pred  hyp_pred  typeA  typeB  label  portion
//! ```
//!
//! `portion` is one of `all`, `directional` or `sports`. Directional rows
//! also belong to the full dataset.

mod convert;
mod curve;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

pub use convert::{convert_raw_dataset, RawPairFormatError};
pub use curve::{auc_range, pr_sweep, PrCurve, PrPoint};

use crate::error::{Error, Result};
use crate::local::{EdgeScores, EntailmentGraph};
use crate::relation::{is_valid_type, toggle_reversal, TypePairKey, TypedPredicate};

pub const DEFAULT_P_MIN: f64 = 0.5;
pub const SPORTS_TYPE: &str = "organization";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Portion {
    All,
    Directional,
    Sports,
}

impl Portion {
    pub fn as_str(self) -> &'static str {
        match self {
            Portion::All => "all",
            Portion::Directional => "directional",
            Portion::Sports => "sports",
        }
    }
}

impl fmt::Display for Portion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Portion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Portion::All),
            "directional" => Ok(Portion::Directional),
            "sports" => Ok(Portion::Sports),
            other => Err(Error::InvalidInput(format!("unknown portion `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvalExample {
    pub premise: TypedPredicate,
    pub hypothesis: TypedPredicate,
    pub label: bool,
    pub portion: Portion,
}

impl EvalExample {
    pub fn key(&self) -> TypePairKey {
        self.premise.key()
    }
}

fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

fn parse_row(line: &str) -> Result<EvalExample> {
    let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
    let [prem, hyp, ta, tb, label, portion] = cols[..] else {
        return Err(Error::MalformedRow(format!("expected 6 columns: `{line}`")));
    };
    if prem.is_empty() || hyp.is_empty() {
        return Err(Error::MalformedRow(format!("empty predicate: `{line}`")));
    }
    for t in [ta, tb] {
        if !is_valid_type(t) {
            return Err(Error::InvalidType(t.to_string()));
        }
    }
    let label =
        parse_label(label).ok_or_else(|| Error::MalformedRow(format!("bad label `{label}`")))?;
    let portion: Portion = portion
        .parse()
        .map_err(|_| Error::MalformedRow(format!("bad portion `{portion}`")))?;
    // rows listed in non-canonical type order flip both predicates
    let (prem, hyp, ta, tb) = if ta <= tb {
        (prem.to_string(), hyp.to_string(), ta, tb)
    } else {
        (toggle_reversal(prem), toggle_reversal(hyp), tb, ta)
    };
    let typed = |p: String| TypedPredicate {
        predicate: p,
        type1: ta.to_string(),
        type2: tb.to_string(),
    };
    Ok(EvalExample {
        premise: typed(prem),
        hypothesis: typed(hyp),
        label,
        portion,
    })
}

/// Parses dataset rows and keeps those of the requested portion. Lines that
/// are blank or start with `#` are skipped.
pub fn parse_dataset(text: &str, portion: Portion) -> Result<Vec<EvalExample>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let ex = parse_row(line).map_err(|e| e.at_line("dataset", i + 1))?;
        let keep = match portion {
            Portion::All => matches!(ex.portion, Portion::All | Portion::Directional),
            p => ex.portion == p,
        };
        if keep {
            out.push(ex);
        }
    }
    match portion {
        Portion::Directional => check_directional(&out)?,
        Portion::Sports => {
            if let Some(bad) = out
                .iter()
                .find(|e| e.premise.type1 != SPORTS_TYPE || e.premise.type2 != SPORTS_TYPE)
            {
                return Err(Error::PortionMismatch(format!(
                    "sports example {} -> {} is typed {}, not {SPORTS_TYPE}#{SPORTS_TYPE}",
                    bad.premise.predicate,
                    bad.hypothesis.predicate,
                    bad.key()
                )));
            }
        }
        Portion::All => {}
    }
    Ok(out)
}

fn check_directional(examples: &[EvalExample]) -> Result<()> {
    let mut seen: HashMap<(&TypedPredicate, &TypedPredicate), Vec<bool>> = HashMap::new();
    for e in examples {
        seen.entry((&e.premise, &e.hypothesis))
            .or_default()
            .push(e.label);
    }
    for e in examples {
        let reverse = seen.get(&(&e.hypothesis, &e.premise));
        if !reverse.is_some_and(|labels| labels.contains(&!e.label)) {
            return Err(Error::PortionMismatch(format!(
                "directional pair {} -> {} lacks its reverse with the opposite label",
                e.premise, e.hypothesis
            )));
        }
    }
    Ok(())
}

pub fn load_dataset(path: &Path, portion: Portion) -> Result<Vec<EvalExample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, portion)
}

/// Which stored score an evaluation reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreColumn {
    Binc,
    WeedsP,
    Lin,
    Dirt,
    Weeds,
    Global,
}

impl ScoreColumn {
    pub fn pick(self, s: &EdgeScores) -> f64 {
        match self {
            ScoreColumn::Binc => s.binc,
            ScoreColumn::WeedsP => s.weeds_p,
            ScoreColumn::Lin => s.lin,
            ScoreColumn::Dirt => s.dirt.unwrap_or(0.0),
            ScoreColumn::Weeds => s.weeds.unwrap_or(0.0),
            ScoreColumn::Global => s.global.unwrap_or(0.0),
        }
    }
}

impl FromStr for ScoreColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binc" | "local" => Ok(ScoreColumn::Binc),
            "weeds_p" => Ok(ScoreColumn::WeedsP),
            "lin" => Ok(ScoreColumn::Lin),
            "dirt" => Ok(ScoreColumn::Dirt),
            "weeds" => Ok(ScoreColumn::Weeds),
            "global" => Ok(ScoreColumn::Global),
            other => Err(Error::InvalidInput(format!(
                "unknown score column `{other}`"
            ))),
        }
    }
}

/// Edge score premise → hypothesis: 1 for identical predicates, 0 when a
/// predicate or the edge is missing.
pub fn score_example(graph: &EntailmentGraph, example: &EvalExample, column: ScoreColumn) -> f64 {
    if example.premise == example.hypothesis {
        return 1.0;
    }
    graph
        .get(&example.key())
        .and_then(|sub| sub.edge(&example.premise.predicate, &example.hypothesis.predicate))
        .map_or(0.0, |s| column.pick(s))
}

pub fn score_examples(
    graph: &EntailmentGraph,
    examples: &[EvalExample],
    column: ScoreColumn,
) -> Vec<f64> {
    examples
        .par_iter()
        .map(|e| score_example(graph, e, column))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    /// Percentage of distinct dataset predicates present as graph nodes.
    pub dataset_pred_coverage: f64,
}

pub fn graph_stats(graph: &EntailmentGraph, examples: &[EvalExample]) -> GraphStats {
    let preds: BTreeSet<&TypedPredicate> = examples
        .iter()
        .flat_map(|e| [&e.premise, &e.hypothesis])
        .collect();
    let found = preds
        .iter()
        .filter(|p| {
            graph
                .get(&p.key())
                .is_some_and(|sub| sub.node_index(&p.predicate).is_some())
        })
        .count();
    GraphStats {
        nodes: graph.num_nodes(),
        edges: graph.num_edges(),
        dataset_pred_coverage: if preds.is_empty() {
            0.0
        } else {
            100.0 * found as f64 / preds.len() as f64
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub portion: Portion,
    pub score_column: ScoreColumn,
    pub p_min: f64,
    pub examples: usize,
    pub positives: usize,
    pub base_rate: f64,
    pub auc: f64,
    pub curve_points: usize,
    pub stats: GraphStats,
}

/// Scores, sweeps and integrates one dataset portion.
pub fn evaluate(
    graph: &EntailmentGraph,
    examples: &[EvalExample],
    portion: Portion,
    column: ScoreColumn,
    p_min: f64,
) -> Result<(EvalReport, PrCurve)> {
    let scores = score_examples(graph, examples, column);
    let labels: Vec<bool> = examples.iter().map(|e| e.label).collect();
    let curve = pr_sweep(&scores, &labels)?;
    let report = EvalReport {
        portion,
        score_column: column,
        p_min,
        examples: examples.len(),
        positives: labels.iter().filter(|&&l| l).count(),
        base_rate: curve.base_rate,
        auc: auc_range(&curve, p_min),
        curve_points: curve.points.len(),
        stats: graph_stats(graph, examples),
    };
    Ok((report, curve))
}

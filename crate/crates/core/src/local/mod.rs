//! Local (per type pair) entailment graph learning.

mod counts;
mod graph;
mod similarity;
mod subgraph;
mod weights;

use rayon::prelude::*;
use serde::Serialize;

pub use counts::{
    accumulate_counts, accumulate_counts_par, apply_thresholds, CountAccumulator, CountTable,
};
pub use graph::{format_subgraph, parse_subgraph, EntailmentGraph, GRAPH_FILE_SUFFIX};
pub use similarity::{binc_rows, lin_rows, weeds_precision_rows, weeds_similarity_rows};
pub use subgraph::{build_subgraph, EdgeScores, LocalSubgraph, Measures, DEFAULT_SCORE_FLOOR};
pub use weights::{compute_weights, SlotWeights, SparseRows, WeightTable};

use crate::relation::{filter_named_entity, type_relation, RelationTriple, TypeMap, TypedRelation};

pub const DEFAULT_MIN_ARG_PAIRS_PER_PRED: usize = 4;
pub const DEFAULT_MIN_PREDS_PER_ARG_PAIR: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOptions {
    pub min_arg_pairs_per_pred: usize,
    pub min_preds_per_arg_pair: usize,
    pub score_floor: f64,
    pub measures: Measures,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            min_arg_pairs_per_pred: DEFAULT_MIN_ARG_PAIRS_PER_PRED,
            min_preds_per_arg_pair: DEFAULT_MIN_PREDS_PER_ARG_PAIR,
            score_floor: DEFAULT_SCORE_FLOOR,
            measures: Measures::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BuildSummary {
    pub relations_in: usize,
    pub relations_with_named_entity: usize,
    pub type_pairs: usize,
    pub nodes: usize,
    pub edges: usize,
}

/// Types the named-entity relations of a corpus.
pub fn type_corpus(triples: &[RelationTriple], type_map: &TypeMap) -> Vec<TypedRelation> {
    triples
        .par_iter()
        .filter(|t| filter_named_entity(t))
        .map(|t| type_relation(t, type_map))
        .collect()
}

/// Local learning over a whole corpus: count, threshold, weight and score
/// every observed type pair. Type pairs whose tables empty out under the
/// thresholds are kept as node-less subgraphs.
pub fn build_graphs(
    triples: &[RelationTriple],
    type_map: &TypeMap,
    opts: &GraphOptions,
) -> (EntailmentGraph, BuildSummary) {
    let typed = type_corpus(triples, type_map);
    let tables = accumulate_counts_par(&typed);
    let subgraphs: Vec<LocalSubgraph> = tables
        .into_par_iter()
        .map(|(key, table)| {
            let table = apply_thresholds(
                &table,
                opts.min_arg_pairs_per_pred,
                opts.min_preds_per_arg_pair,
            );
            match compute_weights(&table) {
                Ok(w) => {
                    let w = if opts.measures.dirt {
                        w.with_slot_weights(&table)
                    } else {
                        w
                    };
                    build_subgraph(&w, opts.score_floor, opts.measures)
                }
                Err(_) => LocalSubgraph::empty(key),
            }
        })
        .collect();
    let mut graph = EntailmentGraph::default();
    for sub in subgraphs {
        graph.insert(sub);
    }
    let summary = BuildSummary {
        relations_in: triples.len(),
        relations_with_named_entity: typed.len(),
        type_pairs: graph.subgraphs.len(),
        nodes: graph.num_nodes(),
        edges: graph.num_edges(),
    };
    (graph, summary)
}

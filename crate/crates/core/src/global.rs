//! Cross-type-pair score sharing and a single soft-transitivity pass.
//!
//! This is an approximation of globalization, not a reproduction of any
//! particular optimization objective: each edge score is interpolated with
//! the mean local score of the same untyped predicate pair across every
//! subgraph holding both predicates, and an optional pass raises `p → r`
//! to the strongest two-step path `p → q → r`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::local::{EdgeScores, EntailmentGraph, LocalSubgraph};
use crate::relation::{toggle_reversal, REVERSED_MARKER};

pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Locally scored graph with a `global` score on every retained edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalScoreTable {
    pub lambda: f64,
    pub graph: EntailmentGraph,
}

impl GlobalScoreTable {
    pub fn score(&self, key: &crate::relation::TypePairKey, p: &str, q: &str) -> Option<f64> {
        self.graph.get(key)?.edge(p, q).and_then(|s| s.global)
    }
}

/// Untyped pair in a fixed orientation: the premise never carries the
/// reversal marker, so `(p#rev, q#rev)` in one subgraph and `(p, q)` in
/// another name the same inference.
fn oriented(p: &str, q: &str) -> (String, String) {
    if p.ends_with(REVERSED_MARKER) {
        (toggle_reversal(p), toggle_reversal(q))
    } else {
        (p.to_string(), q.to_string())
    }
}

fn cross_scores(graph: &EntailmentGraph) -> HashMap<(String, String), f64> {
    // where each oriented predicate occurs, and its reversed-ness there
    let mut occurrences: HashMap<String, Vec<(&LocalSubgraph, bool)>> = HashMap::new();
    for sub in graph.subgraphs.values() {
        for node in &sub.nodes {
            let reversed = node.ends_with(REVERSED_MARKER);
            let base = if reversed {
                toggle_reversal(node)
            } else {
                node.clone()
            };
            occurrences.entry(base).or_default().push((sub, reversed));
        }
    }

    let mut sums: BTreeMap<(String, String), f64> = BTreeMap::new();
    for sub in graph.subgraphs.values() {
        for (p, q, s) in sub.iter_edges() {
            *sums
                .entry(oriented(&sub.nodes[p], &sub.nodes[q]))
                .or_default() += s.binc;
        }
    }

    sums.into_iter()
        .map(|((p, q), sum)| {
            let holders = occurrences
                .get(&p)
                .map(|subs| {
                    subs.iter()
                        .filter(|(sub, reversed)| {
                            let q_here = if *reversed {
                                toggle_reversal(&q)
                            } else {
                                q.clone()
                            };
                            sub.node_index(&q_here).is_some()
                        })
                        .count()
                })
                .unwrap_or(0)
                .max(1);
            ((p, q), sum / holders as f64)
        })
        .collect()
}

pub fn globalize(graph: &EntailmentGraph, lambda: f64) -> GlobalScoreTable {
    let lambda = lambda.clamp(0.0, 1.0);
    let cross = cross_scores(graph);
    let mut by_premise: HashMap<&str, Vec<(&str, f64)>> = HashMap::new();
    for ((p, q), &c) in &cross {
        by_premise
            .entry(p.as_str())
            .or_default()
            .push((q.as_str(), c));
    }

    let subs: Vec<LocalSubgraph> = graph
        .subgraphs
        .par_iter()
        .map(|(_, sub)| {
            let mut edges: Vec<Vec<(u32, EdgeScores)>> = Vec::with_capacity(sub.nodes.len());
            for (pi, p) in sub.nodes.iter().enumerate() {
                let mut row: BTreeMap<u32, EdgeScores> =
                    sub.edges[pi].iter().map(|&(q, s)| (q, s)).collect();
                let reversed = p.ends_with(REVERSED_MARKER);
                let base = if reversed {
                    toggle_reversal(p)
                } else {
                    p.clone()
                };
                for &(q_base, _) in by_premise.get(base.as_str()).into_iter().flatten() {
                    let q = if reversed {
                        toggle_reversal(q_base)
                    } else {
                        q_base.to_string()
                    };
                    if let Some(qi) = sub.node_index(&q) {
                        if qi != pi {
                            row.entry(qi as u32)
                                .or_insert_with(|| EdgeScores::local(0.0));
                        }
                    }
                }
                let mut out = Vec::with_capacity(row.len());
                for (qi, mut scores) in row {
                    let c = cross
                        .get(&oriented(p, &sub.nodes[qi as usize]))
                        .copied()
                        .unwrap_or(0.0);
                    let local = scores.binc;
                    let g = (local + (1.0 - lambda) * (c - local)).clamp(0.0, 1.0);
                    let is_local = sub.edges[pi].binary_search_by_key(&qi, |&(t, _)| t).is_ok();
                    if is_local || g > 0.0 {
                        scores.global = Some(g);
                        out.push((qi, scores));
                    }
                }
                edges.push(out);
            }
            LocalSubgraph {
                key: sub.key.clone(),
                nodes: sub.nodes.clone(),
                edges,
            }
        })
        .collect();

    let mut out = EntailmentGraph::default();
    for sub in subs {
        out.insert(sub);
    }
    GlobalScoreTable { lambda, graph: out }
}

fn effective(s: &EdgeScores) -> f64 {
    s.global.unwrap_or(s.binc)
}

/// One synchronous pass of max-min composition: each `p → r` is raised to
/// `max_q min(s(p,q), s(q,r))` when that is higher, reading only the scores
/// from before the pass. Scores never decrease. Newly implied edges are
/// added when they reach `floor`.
pub fn transitivity_pass(table: &GlobalScoreTable, floor: f64) -> GlobalScoreTable {
    let subs: Vec<LocalSubgraph> = table
        .graph
        .subgraphs
        .par_iter()
        .map(|(_, sub)| {
            let mut edges = Vec::with_capacity(sub.nodes.len());
            for (pi, row) in sub.edges.iter().enumerate() {
                let mut best: BTreeMap<u32, f64> = BTreeMap::new();
                for &(q, ref s_pq) in row {
                    let first = effective(s_pq);
                    for &(r, ref s_qr) in &sub.edges[q as usize] {
                        if r as usize == pi {
                            continue;
                        }
                        let via = first.min(effective(s_qr));
                        let slot = best.entry(r).or_insert(0.0);
                        if via > *slot {
                            *slot = via;
                        }
                    }
                }
                let mut merged: BTreeMap<u32, EdgeScores> =
                    row.iter().map(|&(q, s)| (q, s)).collect();
                for (r, via) in best {
                    match merged.get_mut(&r) {
                        Some(s) => {
                            if via > effective(s) {
                                s.global = Some(via);
                            } else if s.global.is_none() {
                                s.global = Some(s.binc);
                            }
                        }
                        None if via >= floor && via > 0.0 => {
                            let mut s = EdgeScores::local(0.0);
                            s.global = Some(via);
                            merged.insert(r, s);
                        }
                        None => {}
                    }
                }
                for s in merged.values_mut() {
                    if s.global.is_none() {
                        s.global = Some(s.binc);
                    }
                }
                edges.push(merged.into_iter().collect());
            }
            LocalSubgraph {
                key: sub.key.clone(),
                nodes: sub.nodes.clone(),
                edges,
            }
        })
        .collect();

    let mut graph = EntailmentGraph::default();
    for sub in subs {
        graph.insert(sub);
    }
    GlobalScoreTable {
        lambda: table.lambda,
        graph,
    }
}

use rayon::prelude::*;

use super::weights::WeightTable;
use crate::relation::{TypePairKey, TypedPredicate};

pub const DEFAULT_SCORE_FLOOR: f64 = 0.01;

/// Optional measures computed next to BInc.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Measures {
    pub dirt: bool,
    pub weeds: bool,
}

impl Measures {
    /// Parses a comma-separated list such as `binc,dirt,weeds`. BInc,
    /// Weeds precision and Lin are always on.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut m = Measures::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "binc" | "weeds_p" | "lin" => {}
                "dirt" => m.dirt = true,
                "weeds" => m.weeds = true,
                other => return Err(format!("unknown measure `{other}`")),
            }
        }
        Ok(m)
    }

    pub fn as_list(&self) -> String {
        let mut parts = vec!["binc"];
        if self.dirt {
            parts.push("dirt");
        }
        if self.weeds {
            parts.push("weeds");
        }
        parts.join(",")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeScores {
    pub binc: f64,
    pub weeds_p: f64,
    pub lin: f64,
    pub dirt: Option<f64>,
    pub weeds: Option<f64>,
    /// Set by the globalizer.
    pub global: Option<f64>,
}

impl EdgeScores {
    pub fn local(binc: f64) -> Self {
        EdgeScores {
            binc,
            weeds_p: 0.0,
            lin: 0.0,
            dirt: None,
            weeds: None,
            global: None,
        }
    }
}

/// Directed scored edges among the predicates of one type pair.
///
/// Nodes are sorted; `edges[i]` lists `(target, scores)` for source `i`,
/// sorted by target. Self-edges are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSubgraph {
    pub key: TypePairKey,
    pub nodes: Vec<String>,
    pub edges: Vec<Vec<(u32, EdgeScores)>>,
}

impl LocalSubgraph {
    pub fn empty(key: TypePairKey) -> Self {
        LocalSubgraph {
            key,
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn node_index(&self, predicate: &str) -> Option<usize> {
        self.nodes
            .binary_search_by(|n| n.as_str().cmp(predicate))
            .ok()
    }

    pub fn typed_node(&self, i: usize) -> TypedPredicate {
        TypedPredicate {
            predicate: self.nodes[i].clone(),
            type1: self.key.type_a().to_string(),
            type2: self.key.type_b().to_string(),
        }
    }

    pub fn edge(&self, premise: &str, hypothesis: &str) -> Option<&EdgeScores> {
        let p = self.node_index(premise)?;
        let q = self.node_index(hypothesis)? as u32;
        let row = &self.edges[p];
        row.binary_search_by_key(&q, |&(t, _)| t)
            .ok()
            .map(|i| &row[i].1)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn iter_edges(&self) -> impl Iterator<Item = (usize, usize, &EdgeScores)> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(p, row)| row.iter().map(move |(q, s)| (p, *q as usize, s)))
    }
}

/// Scores every ordered predicate pair and keeps edges with BInc at or above
/// `score_floor`. With a positive floor only pairs sharing a feature are
/// visited, which is exact because BInc is zero without overlap.
pub fn build_subgraph(
    weights: &WeightTable,
    score_floor: f64,
    measures: Measures,
) -> LocalSubgraph {
    let n = weights.num_predicates();
    let mut by_feature: Vec<Vec<u32>> = Vec::new();
    if score_floor > 0.0 {
        for p in 0..n {
            for &(f, _) in weights.row(p) {
                let f = f as usize;
                if by_feature.len() <= f {
                    by_feature.resize_with(f + 1, Vec::new);
                }
                by_feature[f].push(p as u32);
            }
        }
    }

    let edges: Vec<Vec<(u32, EdgeScores)>> = (0..n)
        .into_par_iter()
        .map(|p| {
            let candidates: Vec<u32> = if score_floor > 0.0 {
                let mut c: Vec<u32> = weights
                    .row(p)
                    .iter()
                    .flat_map(|&(f, _)| by_feature[f as usize].iter().copied())
                    .filter(|&q| q as usize != p)
                    .collect();
                c.sort_unstable();
                c.dedup();
                c
            } else {
                (0..n as u32).filter(|&q| q as usize != p).collect()
            };
            candidates
                .into_iter()
                .filter_map(|q| {
                    let qi = q as usize;
                    let binc = weights.binc(p, qi);
                    if binc < score_floor {
                        return None;
                    }
                    Some((
                        q,
                        EdgeScores {
                            binc,
                            weeds_p: weights.weeds_precision(p, qi),
                            lin: weights.lin_similarity(p, qi),
                            dirt: if measures.dirt {
                                weights.dirt(p, qi)
                            } else {
                                None
                            },
                            weeds: measures.weeds.then(|| weights.weeds_similarity(p, qi)),
                            global: None,
                        },
                    ))
                })
                .collect()
        })
        .collect();

    LocalSubgraph {
        key: weights.key().clone(),
        nodes: weights.predicates().to_vec(),
        edges,
    }
}

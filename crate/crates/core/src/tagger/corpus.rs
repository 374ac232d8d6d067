use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{tag_relation, DepGraph, Lexicon};
use crate::error::Result;
use crate::relation::{ModalityTag, RelationTriple};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TagCount {
    pub count: u64,
    pub fraction: f64,
}

/// Corpus-level tagging statistics.
///
/// `tagged_relations` counts relations carrying at least one removal-set
/// tag, each relation once. `per_tag` counts a relation once for every tag
/// it carries, so per-tag fractions can sum past the tagged fraction when
/// triggers co-occur.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TagStats {
    pub sentences: u64,
    pub skipped_sentences: u64,
    pub total_relations: u64,
    pub tagged_relations: u64,
    pub tagged_fraction: f64,
    pub per_tag: BTreeMap<ModalityTag, TagCount>,
    pub diagnostics: Vec<String>,
}

impl TagStats {
    fn observe(&mut self, triple: &RelationTriple) {
        self.total_relations += 1;
        if triple.is_modal() {
            self.tagged_relations += 1;
        }
        for tag in &triple.tags {
            self.per_tag.entry(*tag).or_default().count += 1;
        }
    }

    fn finish(&mut self) {
        let total = self.total_relations;
        let frac = |n: u64| {
            if total == 0 {
                0.0
            } else {
                n as f64 / total as f64
            }
        };
        for tag in ModalityTag::ALL {
            let entry = self.per_tag.entry(tag).or_default();
            entry.fraction = frac(entry.count);
        }
        self.tagged_fraction = frac(self.tagged_relations);
    }
}

#[derive(Debug, Clone, Default)]
pub struct TagOutput {
    pub triples: Vec<RelationTriple>,
    pub stats: TagStats,
}

fn is_proper_noun(pos: &str) -> bool {
    pos.starts_with("NNP") || pos == "PROPN"
}

/// Emits one tagged triple per relation node of the sentence.
pub fn tag_graph(graph: &DepGraph, lexicon: &Lexicon) -> Result<Vec<RelationTriple>> {
    graph.validate()?;
    let mut out = Vec::with_capacity(graph.relations.len());
    for rel in &graph.relations {
        let decision = tag_relation(graph, rel.node, lexicon)?;
        let pred_tok = &graph.tokens[rel.node];
        let predicate = rel.pred.clone().unwrap_or_else(|| {
            let lemma = pred_tok.lemma.to_lowercase();
            format!("{lemma}.1,{lemma}.2")
        });
        let arg1 = rel
            .arg1_text
            .clone()
            .unwrap_or_else(|| graph.tokens[rel.arg1].form.clone());
        let arg2 = rel
            .arg2_text
            .clone()
            .unwrap_or_else(|| graph.tokens[rel.arg2].form.clone());
        let ne = rel.ne.unwrap_or_else(|| {
            is_proper_noun(&graph.tokens[rel.arg1].pos)
                || is_proper_noun(&graph.tokens[rel.arg2].pos)
        });
        let mut triple = RelationTriple::new(predicate, arg1, arg2)?
            .with_tags(decision.tags)
            .with_named_entity(ne);
        triple.doc_id = graph.doc.clone();
        triple.date = graph.date.clone();
        out.push(triple);
    }
    Ok(out)
}

/// Tags every sentence of a parse file. Unparseable or invalid sentences are
/// skipped and reported in the stats diagnostics; output order follows input
/// order regardless of how the work is scheduled.
pub fn tag_corpus<S: AsRef<str> + Sync>(lines: &[S], lexicon: &Lexicon) -> TagOutput {
    let per_sentence: Vec<(usize, Result<Vec<RelationTriple>>)> = lines
        .par_iter()
        .enumerate()
        .filter(|(_, l)| !l.as_ref().trim().is_empty())
        .map(|(i, l)| {
            (
                i,
                DepGraph::parse_line(l.as_ref()).and_then(|g| tag_graph(&g, lexicon)),
            )
        })
        .collect();

    let mut out = TagOutput::default();
    for (i, result) in per_sentence {
        out.stats.sentences += 1;
        match result {
            Ok(triples) => {
                for t in &triples {
                    out.stats.observe(t);
                }
                out.triples.extend(triples);
            }
            Err(e) => {
                out.stats.skipped_sentences += 1;
                out.stats.diagnostics.push(format!("line {}: {e}", i + 1));
            }
        }
    }
    out.stats.finish();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> Lexicon {
        Lexicon::parse_tsv("may\tMD\tMOD\nsay\tV*\tATT_SAY\n").unwrap()
    }

    fn sentence(modal: bool) -> String {
        let mut rows = vec![("Acme", "acme", "NNP", Some(2), "nsubj")];
        if modal {
            rows.push(("may", "may", "MD", Some(2), "aux"));
        } else {
            rows.push(("quickly", "quickly", "RB", Some(2), "advmod"));
        }
        rows.push(("buy", "buy", "VB", None, "root"));
        rows.push(("Beta", "beta", "NNP", Some(2), "obj"));
        DepGraph::from_rows(&rows)
            .with_relation(2, 0, 3)
            .to_json_line()
    }

    #[test]
    fn empty_stream() {
        let out = tag_corpus::<String>(&[], &lexicon());
        assert!(out.triples.is_empty());
        assert_eq!(out.stats.total_relations, 0);
        assert_eq!(out.stats.tagged_fraction, 0.0);
        assert!(out
            .stats
            .per_tag
            .values()
            .all(|c| c.count == 0 && c.fraction == 0.0));
    }

    #[test]
    fn synthetic_fraction() {
        let lines: Vec<String> = (0..100).map(|i| sentence(i % 7 == 0 && i < 98)).collect();
        let expected_tagged = (0..98).filter(|i| i % 7 == 0).count();
        assert_eq!(expected_tagged, 14);
        let out = tag_corpus(&lines, &lexicon());
        assert_eq!(out.stats.total_relations, 100);
        assert_eq!(out.stats.tagged_relations, 14);
        assert!((out.stats.tagged_fraction - 0.14).abs() < 1e-12);
        assert_eq!(out.stats.per_tag[&ModalityTag::Mod].count, 14);
        assert_eq!(out.triples[0].predicate, "buy.1,buy.2");
        assert!(out.triples[0].has_named_entity);
    }

    #[test]
    fn bad_lines_are_skipped() {
        let lines = vec![sentence(false), "{oops".to_string(), sentence(true)];
        let out = tag_corpus(&lines, &lexicon());
        assert_eq!(out.stats.sentences, 3);
        assert_eq!(out.stats.skipped_sentences, 1);
        assert_eq!(out.triples.len(), 2);
        assert!(out.stats.diagnostics[0].starts_with("line 2:"));
    }
}

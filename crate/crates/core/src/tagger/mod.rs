//! Lexicon- and rule-based modality tagging over dependency parses.
//!
//! A relation is tagged with `T` when a lexicon entry with tag `T` is found
//! along its governing path: on the chain of head links from the relation
//! node up to the root, or as a direct auxiliary, modifier or complementizer
//! dependent of a node on that chain. Conditionals and counterfactuals are
//! recognized by fixed rules instead of the lexicon.

mod corpus;
mod depgraph;
mod lexicon;

use std::collections::{BTreeMap, BTreeSet};

pub use corpus::{tag_corpus, tag_graph, TagCount, TagOutput, TagStats};
pub use depgraph::{DepGraph, RelationNode, Token};
pub use lexicon::{Lexicon, LexiconEntry, PosPattern, BUNDLED_LEXICON};

use crate::error::{Error, Result};
use crate::relation::ModalityTag;

/// Dependency labels whose dependents may act as triggers for the node they attach to.
pub const TRIGGER_LABELS: &[&str] = &[
    "aux",
    "aux:pass",
    "auxpass",
    "advmod",
    "mark",
    "neg",
    "discourse",
];

const CONDITIONAL_MARKERS: &[&str] = &["if", "unless"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagDecision {
    pub tags: BTreeSet<ModalityTag>,
    /// Token paths from the relation node to each trigger, per tag.
    pub trigger_paths: BTreeMap<ModalityTag, Vec<Vec<usize>>>,
}

impl TagDecision {
    fn record(&mut self, tag: ModalityTag, path: Vec<usize>) {
        self.tags.insert(tag);
        let paths = self.trigger_paths.entry(tag).or_default();
        if !paths.contains(&path) {
            paths.push(path);
        }
    }

    pub fn is_asserted(&self) -> bool {
        !self.tags.iter().any(|t| t.is_removal())
    }
}

/// The relation node followed by its ancestors, nearest first.
fn governing_chain(graph: &DepGraph, node: usize) -> Vec<usize> {
    let mut chain = vec![node];
    chain.extend(graph.ancestors(node));
    chain
}

fn check_node(graph: &DepGraph, node: usize) -> Result<()> {
    if node >= graph.len() {
        return Err(Error::InvalidNode {
            node,
            len: graph.len(),
        });
    }
    Ok(())
}

pub fn tag_relation(
    graph: &DepGraph,
    relation_node: usize,
    lexicon: &Lexicon,
) -> Result<TagDecision> {
    check_node(graph, relation_node)?;
    let chain = governing_chain(graph, relation_node);
    let mut decision = TagDecision::default();

    for (depth, &c) in chain.iter().enumerate() {
        let path = &chain[..=depth];
        let tok = &graph.tokens[c];
        if c != relation_node {
            for tag in lexicon.lookup(&tok.lemma, &tok.pos) {
                decision.record(tag, path.to_vec());
            }
        }
        let below = if depth > 0 {
            Some(chain[depth - 1])
        } else {
            None
        };
        for d in graph.dependents(c) {
            if Some(d) == below {
                continue;
            }
            let dep = &graph.tokens[d];
            if !TRIGGER_LABELS.contains(&dep.deprel.as_str()) {
                continue;
            }
            let mut dep_path = path.to_vec();
            dep_path.push(d);
            for tag in lexicon.lookup(&dep.lemma, &dep.pos) {
                decision.record(tag, dep_path.clone());
            }
            if dep.deprel == "mark"
                && CONDITIONAL_MARKERS.contains(&dep.lemma.to_lowercase().as_str())
            {
                decision.record(ModalityTag::Cond, dep_path);
            }
        }
    }

    if let Some(path) = counterfactual_path(graph, relation_node) {
        decision.record(ModalityTag::Count, path);
    }
    Ok(decision)
}

/// True when one of the counterfactual patterns governs the relation:
/// clause-initial inverted "had" over a past participle, an "if"-clause
/// with perfect "had" over a past participle, or a governing "wish" /
/// "if only".
pub fn tag_counterfactual(graph: &DepGraph, relation_node: usize) -> bool {
    relation_node < graph.len() && counterfactual_path(graph, relation_node).is_some()
}

fn lemma_is(tok: &Token, lemma: &str) -> bool {
    tok.lemma.eq_ignore_ascii_case(lemma)
}

fn is_past_participle(tok: &Token) -> bool {
    tok.pos == "VBN"
}

fn counterfactual_path(graph: &DepGraph, relation_node: usize) -> Option<Vec<usize>> {
    let chain = governing_chain(graph, relation_node);
    for (depth, &c) in chain.iter().enumerate() {
        let path = &chain[..=depth];
        let head_tok = &graph.tokens[c];

        if c != relation_node && lemma_is(head_tok, "wish") {
            return Some(path.to_vec());
        }

        let deps: Vec<usize> = graph.dependents(c).collect();
        let had_aux = deps.iter().copied().find(|&d| {
            let t = &graph.tokens[d];
            t.deprel.starts_with("aux") && t.form.eq_ignore_ascii_case("had")
        });
        let if_marker = deps.iter().copied().find(|&d| {
            let t = &graph.tokens[d];
            t.deprel == "mark" && lemma_is(t, "if")
        });
        let subject = deps
            .iter()
            .copied()
            .find(|&d| graph.tokens[d].deprel.starts_with("nsubj"));
        let is_question = deps
            .iter()
            .any(|&d| graph.tokens[d].deprel == "punct" && graph.tokens[d].form == "?");

        if let Some(had) = had_aux {
            if is_past_participle(head_tok) {
                // (b) "if X had attacked"
                if if_marker.is_some() {
                    return Some([path, &[had]].concat());
                }
                // (a) "Had X attacked"
                if let Some(subj) = subject {
                    if had < subj && !is_question {
                        return Some([path, &[had]].concat());
                    }
                }
            }
        }

        // (c) "if only"
        if let Some(mark) = if_marker {
            let only_follows = graph
                .tokens
                .get(mark + 1)
                .is_some_and(|t| lemma_is(t, "only"));
            let only_attached = deps
                .iter()
                .chain(graph.dependents(mark).collect::<Vec<_>>().iter())
                .any(|&d| lemma_is(&graph.tokens[d], "only"));
            if only_follows || only_attached {
                return Some([path, &[mark]].concat());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use ModalityTag::*;

    fn lexicon() -> Lexicon {
        Lexicon::parse_tsv(
            "may\tMD\tMOD\nprobably\tRB\tMOD\nneed\tV*\tMOD\nsay\tV*\tATT_SAY\nthink\tV*\tATT_THINK\nnot\tRB\tLNEG\n",
        )
        .unwrap()
    }

    fn tags(g: &DepGraph, node: usize) -> Vec<ModalityTag> {
        tag_relation(g, node, &lexicon())
            .unwrap()
            .tags
            .into_iter()
            .collect()
    }

    fn plain() -> DepGraph {
        DepGraph::from_rows(&[
            ("Protesters", "protester", "NNS", Some(1), "nsubj"),
            ("attacked", "attack", "VBD", None, "root"),
            ("the", "the", "DT", Some(3), "det"),
            ("police", "police", "NN", Some(1), "obj"),
        ])
    }

    #[test]
    fn asserted_sentence_has_no_tags() {
        assert!(tags(&plain(), 1).is_empty());
        assert!(!tag_counterfactual(&plain(), 1));
    }

    #[test]
    fn modal_auxiliary() {
        let g = DepGraph::from_rows(&[
            ("Protesters", "protester", "NNS", Some(3), "nsubj"),
            ("may", "may", "MD", Some(3), "aux"),
            ("have", "have", "VB", Some(3), "aux"),
            ("attacked", "attack", "VBN", None, "root"),
            ("the", "the", "DT", Some(5), "det"),
            ("police", "police", "NN", Some(3), "obj"),
        ]);
        let d = tag_relation(&g, 3, &lexicon()).unwrap();
        assert_eq!(d.tags.iter().copied().collect::<Vec<_>>(), vec![Mod]);
        assert_eq!(d.trigger_paths[&Mod], vec![vec![3, 1]]);
        // have + VBN without inversion is not counterfactual
        assert!(!tag_counterfactual(&g, 3));
    }

    #[test]
    fn conditional_marker() {
        let g = DepGraph::from_rows(&[
            ("If", "if", "IN", Some(2), "mark"),
            ("protesters", "protester", "NNS", Some(2), "nsubj"),
            ("attack", "attack", "VBP", None, "root"),
            ("the", "the", "DT", Some(4), "det"),
            ("police", "police", "NN", Some(2), "obj"),
        ]);
        assert_eq!(tags(&g, 2), vec![Cond]);
        let g = DepGraph::from_rows(&[
            ("unless", "unless", "IN", Some(2), "mark"),
            ("protesters", "protester", "NNS", Some(2), "nsubj"),
            ("attack", "attack", "VBP", None, "root"),
        ]);
        assert_eq!(tags(&g, 2), vec![Cond]);
    }

    #[test]
    fn inverted_had_is_counterfactual() {
        let g = DepGraph::from_rows(&[
            ("Had", "have", "VBD", Some(2), "aux"),
            ("protesters", "protester", "NNS", Some(2), "nsubj"),
            ("attacked", "attack", "VBN", None, "root"),
            ("the", "the", "DT", Some(4), "det"),
            ("police", "police", "NN", Some(2), "obj"),
        ]);
        assert!(tag_counterfactual(&g, 2));
        let d = tag_relation(&g, 2, &lexicon()).unwrap();
        assert_eq!(d.tags.iter().copied().collect::<Vec<_>>(), vec![Count]);
        assert_eq!(d.trigger_paths[&Count], vec![vec![2, 0]]);
    }

    #[test]
    fn plain_pluperfect_is_not_counterfactual() {
        let g = DepGraph::from_rows(&[
            ("Protesters", "protester", "NNS", Some(2), "nsubj"),
            ("had", "have", "VBD", Some(2), "aux"),
            ("attacked", "attack", "VBN", None, "root"),
        ]);
        assert!(!tag_counterfactual(&g, 2));
        let q = DepGraph::from_rows(&[
            ("Had", "have", "VBD", Some(2), "aux"),
            ("protesters", "protester", "NNS", Some(2), "nsubj"),
            ("attacked", "attack", "VBN", None, "root"),
            ("?", "?", ".", Some(2), "punct"),
        ]);
        assert!(!tag_counterfactual(&q, 2));
    }

    #[test]
    fn if_had_is_conditional_and_counterfactual() {
        let g = DepGraph::from_rows(&[
            ("If", "if", "IN", Some(3), "mark"),
            ("X", "x", "NNP", Some(3), "nsubj"),
            ("had", "have", "VBD", Some(3), "aux"),
            ("attacked", "attack", "VBN", None, "root"),
            ("Y", "y", "NNP", Some(3), "obj"),
        ]);
        assert!(tag_counterfactual(&g, 3));
        assert_eq!(tags(&g, 3), vec![Cond, Count]);
    }

    #[test]
    fn wish_and_if_only() {
        let g = DepGraph::from_rows(&[
            ("Officials", "official", "NNS", Some(1), "nsubj"),
            ("wish", "wish", "VBP", None, "root"),
            ("protesters", "protester", "NNS", Some(5), "nsubj"),
            ("had", "have", "VBD", Some(5), "aux"),
            ("not", "not", "RB", Some(5), "advmod"),
            ("attacked", "attack", "VBN", Some(1), "ccomp"),
        ]);
        assert!(tag_counterfactual(&g, 5));
        assert_eq!(tags(&g, 5), vec![Count, Lneg]);

        let g = DepGraph::from_rows(&[
            ("If", "if", "IN", Some(3), "mark"),
            ("only", "only", "RB", Some(0), "advmod"),
            ("they", "they", "PRP", Some(3), "nsubj"),
            ("won", "win", "VBD", None, "root"),
        ]);
        assert!(tag_counterfactual(&g, 3));
    }

    #[test]
    fn attitude_verb_on_chain() {
        let g = DepGraph::from_rows(&[
            ("Journalists", "journalist", "NNS", Some(1), "nsubj"),
            ("said", "say", "VBD", None, "root"),
            ("that", "that", "IN", Some(4), "mark"),
            ("protesters", "protester", "NNS", Some(4), "nsubj"),
            ("attacked", "attack", "VBD", Some(1), "ccomp"),
            ("the", "the", "DT", Some(6), "det"),
            ("police", "police", "NN", Some(4), "obj"),
        ]);
        let d = tag_relation(&g, 4, &lexicon()).unwrap();
        assert_eq!(d.tags.iter().copied().collect::<Vec<_>>(), vec![AttSay]);
        assert_eq!(d.trigger_paths[&AttSay], vec![vec![4, 1]]);
        // the attitude verb itself is not tagged by its own lemma
        assert!(tag_relation(&g, 1, &lexicon()).unwrap().tags.is_empty());
    }

    #[test]
    fn invalid_node() {
        assert!(matches!(
            tag_relation(&plain(), 9, &lexicon()),
            Err(Error::InvalidNode { node: 9, len: 4 })
        ));
        assert!(!tag_counterfactual(&plain(), 9));
    }

    #[test]
    fn deterministic_and_witnessed() {
        let g = DepGraph::from_rows(&[
            ("Officials", "official", "NNS", Some(1), "nsubj"),
            ("think", "think", "VBP", None, "root"),
            ("protesters", "protester", "NNS", Some(4), "nsubj"),
            ("probably", "probably", "RB", Some(4), "advmod"),
            ("attacked", "attack", "VBD", Some(1), "ccomp"),
        ]);
        let a = tag_relation(&g, 4, &lexicon()).unwrap();
        let b = tag_relation(&g, 4, &lexicon()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.tags.iter().copied().collect::<Vec<_>>(),
            vec![Mod, AttThink]
        );
        for tag in &a.tags {
            let paths = &a.trigger_paths[tag];
            assert!(!paths.is_empty());
            for p in paths {
                assert_eq!(p[0], 4);
            }
        }
    }

    #[test]
    fn lexicon_monotone() {
        let g = DepGraph::from_rows(&[
            ("Protesters", "protester", "NNS", Some(2), "nsubj"),
            ("might", "might", "MD", Some(2), "aux"),
            ("attack", "attack", "VB", None, "root"),
        ]);
        let small = lexicon();
        let before = tag_relation(&g, 2, &small).unwrap().tags;
        let mut big = small.clone();
        big.insert("might", "MD", Mod).unwrap();
        let after = tag_relation(&g, 2, &big).unwrap().tags;
        assert!(before.is_subset(&after));
        assert!(after.contains(&Mod));
    }
}

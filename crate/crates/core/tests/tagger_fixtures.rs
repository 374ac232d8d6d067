use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use entgraph_core::dataset::{build_variant, Variant, VariantSpec};
use entgraph_core::relation::ModalityTag;
use entgraph_core::tagger::{tag_corpus, tag_graph, DepGraph, Lexicon};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn gold() -> BTreeMap<String, BTreeSet<ModalityTag>> {
    let text = std::fs::read_to_string(data("fixtures/tagger_gold.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (id, tags) = l.split_once('\t').unwrap();
            let tags = if tags == "-" {
                BTreeSet::new()
            } else {
                tags.split(',').map(|t| t.parse().unwrap()).collect()
            };
            (id.to_string(), tags)
        })
        .collect()
}

fn fixtures() -> Vec<DepGraph> {
    std::fs::read_to_string(data("fixtures/tagger_fixtures.jsonl"))
        .unwrap()
        .lines()
        .map(|l| DepGraph::parse_line(l).unwrap())
        .collect()
}

#[test]
fn fixtures_match_gold() {
    let lexicon = Lexicon::load(&data("lexicon.tsv")).unwrap();
    let gold = gold();
    let graphs = fixtures();
    assert_eq!(graphs.len(), gold.len());
    for g in &graphs {
        let id = g.id.as_deref().unwrap();
        let triples = tag_graph(g, &lexicon).unwrap();
        assert_eq!(triples.len(), 1);
        assert_eq!(&triples[0].tags, &gold[id], "{id}");
    }
}

#[test]
fn fixtures_cover_every_tag_and_two_multi_trigger_sentences() {
    let gold = gold();
    let seen: BTreeSet<ModalityTag> = gold.values().flatten().copied().collect();
    assert_eq!(seen.len(), ModalityTag::ALL.len());
    assert!(gold.values().filter(|t| t.len() > 1).count() >= 2);
    assert!(gold.values().any(BTreeSet::is_empty));
}

#[test]
fn bundled_lexicon_is_the_data_file() {
    let from_file = Lexicon::load(&data("lexicon.tsv")).unwrap();
    assert_eq!(from_file.len(), Lexicon::bundled().len());
}

#[test]
fn negation_only_survives_asserted_filter() {
    let lexicon = Lexicon::bundled();
    let lines: Vec<String> = fixtures().iter().map(DepGraph::to_json_line).collect();
    let out = tag_corpus(&lines, &lexicon);
    let (kept, report) =
        build_variant(out.triples.clone(), &VariantSpec::new(Variant::Asserted)).unwrap();
    assert_eq!(kept.len(), 2);
    assert!(kept
        .iter()
        .any(|t| t.tags == BTreeSet::from([ModalityTag::Lneg])));
    assert!(kept.iter().any(|t| t.tags.is_empty()));
    assert_eq!(report.input_count as usize, out.triples.len());
    assert_eq!(out.stats.tagged_relations, 8);
}

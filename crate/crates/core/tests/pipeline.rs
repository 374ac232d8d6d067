use entgraph_core::dataset::{build_variant, Variant, VariantSpec};
use entgraph_core::eval::{parse_dataset, score_example, Portion, ScoreColumn};
use entgraph_core::global::{globalize, transitivity_pass};
use entgraph_core::local::{build_graphs, EntailmentGraph, GraphOptions};
use entgraph_core::relation::{TypeMap, TypePairKey};
use entgraph_core::synth;
use entgraph_core::tagger::{tag_corpus, Lexicon};

fn tagged(
    n: usize,
) -> (
    Vec<entgraph_core::relation::RelationTriple>,
    synth::SynthCorpus,
) {
    let corpus = synth::generate(n, 11);
    let lines: Vec<String> = corpus.sentences.iter().map(|s| s.to_json_line()).collect();
    let out = tag_corpus(&lines, &Lexicon::bundled());
    assert!(out.stats.diagnostics.is_empty());
    (out.triples, corpus)
}

#[test]
fn graphs_survive_a_disk_roundtrip_bit_for_bit() {
    let (triples, corpus) = tagged(4_000);
    let types = TypeMap::parse_tsv(&corpus.type_map_tsv, "thing").unwrap();
    let (graph, summary) = build_graphs(&triples, &types, &GraphOptions::default());
    assert!(summary.edges > 0);

    let dir = tempfile::tempdir().unwrap();
    graph.write_dir(dir.path()).unwrap();
    let back = EntailmentGraph::read_dir(dir.path()).unwrap();
    assert_eq!(back, graph);

    let examples = parse_dataset(&corpus.dataset_tsv, Portion::All).unwrap();
    for e in &examples {
        assert_eq!(
            score_example(&graph, e, ScoreColumn::Binc).to_bits(),
            score_example(&back, e, ScoreColumn::Binc).to_bits()
        );
        assert!(score_example(&graph, e, ScoreColumn::Binc) <= 1.0);
    }

    let global = transitivity_pass(&globalize(&graph, 0.5), 0.01);
    let dir2 = tempfile::tempdir().unwrap();
    global.graph.write_dir(dir2.path()).unwrap();
    assert_eq!(
        EntailmentGraph::read_dir(dir2.path()).unwrap(),
        global.graph
    );
}

#[test]
fn asserted_nodes_are_a_subset_of_baseline_nodes() {
    let (triples, corpus) = tagged(6_000);
    let types = TypeMap::parse_tsv(&corpus.type_map_tsv, "thing").unwrap();
    let opts = GraphOptions::default();
    let (large, _) =
        build_variant(triples.clone(), &VariantSpec::new(Variant::BaselineLarge)).unwrap();
    let (asserted, _) = build_variant(triples, &VariantSpec::new(Variant::Asserted)).unwrap();
    let (gl, _) = build_graphs(&large, &types, &opts);
    let (ga, _) = build_graphs(&asserted, &types, &opts);
    for (key, sub) in &ga.subgraphs {
        let big = gl.get(key).expect("type pair present in the larger corpus");
        for node in &sub.nodes {
            assert!(big.node_index(node).is_some(), "{key}: {node}");
        }
    }
}

#[test]
fn elect_entails_run_for_more_than_the_reverse() {
    let (triples, corpus) = tagged(synth::DEFAULT_SYNTH_RELATIONS);
    let types = TypeMap::parse_tsv(&corpus.type_map_tsv, "thing").unwrap();
    let (graph, _) = build_graphs(&triples, &types, &GraphOptions::default());
    let sub = graph.get(&TypePairKey::new("person", "location")).unwrap();
    let fwd = sub
        .edge("elect.1,elect.2#rev", "run_for.1,run_for.2#rev")
        .unwrap()
        .binc;
    let back = sub
        .edge("run_for.1,run_for.2#rev", "elect.1,elect.2#rev")
        .map_or(0.0, |s| s.binc);
    assert!(fwd > back, "{fwd} <= {back}");
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use entgraph_cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entgraph"))
}

fn lexicon() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/lexicon.tsv")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn run_args(args: &[&str]) -> i32 {
    run(["entgraph", "--quiet"]
        .into_iter()
        .chain(args.iter().copied()))
}

#[test]
fn help_lists_defaults() {
    let out = bin().args(["build-graphs", "--help"]).output().unwrap();
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--min-arg-pairs-per-pred <MIN_ARG_PAIRS_PER_PRED>",
        "[default: 4]",
        "--score-floor",
        "[default: 0.01]",
        "--measures",
        "[default: binc]",
        "--fallback-type",
        "[default: thing]",
        "--workers",
        "[default: 0]",
    ] {
        assert!(help.contains(flag), "missing {flag} in\n{help}");
    }
    let out = bin().args(["build-corpus", "--help"]).output().unwrap();
    let help = String::from_utf8(out.stdout).unwrap();
    assert!(help.contains("[default: 0.85]") && help.contains("[default: 42]"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run_args(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(run_args(&[]), EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    // no lexicon anywhere
    assert_eq!(
        run_args(&["tag", "--parses", "p.jsonl", "--out", s(&out)]),
        EXIT_USAGE
    );
    assert_eq!(
        run_args(&[
            "build-corpus",
            "--in",
            "x",
            "--fraction",
            "1.5",
            "--out",
            s(&out)
        ]),
        EXIT_USAGE
    );
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "sample_fraction = 0.5\nunknown_key = 3\n").unwrap();
    assert_eq!(
        run_args(&[
            "--config",
            s(&cfg),
            "build-corpus",
            "--in",
            "x",
            "--out",
            s(&out)
        ]),
        EXIT_USAGE
    );
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.jsonl");
    let missing = dir.path().join("missing.jsonl");
    assert_eq!(
        run_args(&["build-corpus", "--in", s(&missing), "--out", s(&out)]),
        EXIT_DATA
    );

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"pred\": \"x\"}\n").unwrap();
    assert_eq!(
        run_args(&["build-corpus", "--in", s(&bad), "--out", s(&out)]),
        EXIT_DATA
    );

    let graphs = dir.path().join("graphs");
    fs::create_dir(&graphs).unwrap();
    let dataset = dir.path().join("d.tsv");
    fs::write(&dataset, "a\tb\tx\ty\t0\tall\n").unwrap();
    // a dataset without positives cannot be swept
    assert_eq!(
        run_args(&["eval", "--graphs", s(&graphs), "--dataset", s(&dataset)]),
        EXIT_DATA
    );
}

fn small_pipeline(dir: &Path) -> PathBuf {
    let input = dir.join("in");
    assert_eq!(
        run_args(&["synth", "--relations", "3000", "--out-dir", s(&input)]),
        EXIT_OK
    );
    let tagged = dir.join("tagged.jsonl");
    assert_eq!(
        run_args(&[
            "tag",
            "--parses",
            s(&input.join("parses.jsonl")),
            "--lexicon",
            s(&lexicon()),
            "--out",
            s(&tagged),
        ]),
        EXIT_OK
    );
    tagged
}

#[test]
fn config_file_and_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    let tagged = small_pipeline(dir.path());
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "triples = {}\nvariant = baseline-small\nsample_fraction = 0.5\n",
            tagged.display()
        ),
    )
    .unwrap();

    let count = |p: &Path| fs::read_to_string(p).unwrap().lines().count();
    let from_cfg = dir.path().join("cfg.jsonl");
    assert_eq!(
        run_args(&["--config", s(&cfg), "build-corpus", "--out", s(&from_cfg)]),
        EXIT_OK
    );
    let n = count(&from_cfg);
    assert!((1300..1700).contains(&n), "{n}");

    // an explicit flag wins even when it equals the built-in default
    let overridden = dir.path().join("flag.jsonl");
    assert_eq!(
        run_args(&[
            "--config",
            s(&cfg),
            "build-corpus",
            "--fraction",
            "0.85",
            "--out",
            s(&overridden)
        ]),
        EXIT_OK
    );
    assert!(count(&overridden) > 2300);
}

#[test]
fn build_graphs_writes_one_file_per_type_pair_and_eval_reports_auc() {
    let dir = tempfile::tempdir().unwrap();
    let tagged = small_pipeline(dir.path());
    let graphs = dir.path().join("graphs");
    assert_eq!(
        run_args(&[
            "build-graphs",
            "--corpus",
            s(&tagged),
            "--types",
            s(&dir.path().join("in/types.tsv")),
            "--out",
            s(&graphs),
        ]),
        EXIT_OK
    );
    let mut names: Vec<String> = fs::read_dir(&graphs)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec![
            "location#person_sim.txt",
            "organization#organization_sim.txt",
            "organization#person_sim.txt"
        ]
    );

    let report = dir.path().join("r.json");
    let curve = dir.path().join("c.csv");
    assert_eq!(
        run_args(&[
            "eval",
            "--graphs",
            s(&graphs),
            "--dataset",
            s(&dir.path().join("in/dataset.tsv")),
            "--portion",
            "all",
            "--report",
            s(&report),
            "--curve",
            s(&curve),
        ]),
        EXIT_OK
    );
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r["auc"].as_f64().unwrap() > 0.0);
    assert!(fs::read_to_string(&curve)
        .unwrap()
        .starts_with("threshold,precision,recall\n"));

    let stats = bin()
        .args([
            "stats",
            "--graphs",
            s(&graphs),
            "--dataset",
            s(&dir.path().join("in/dataset.tsv")),
        ])
        .output()
        .unwrap();
    assert!(stats.status.success());
    let v: serde_json::Value = serde_json::from_slice(&stats.stdout).unwrap();
    let cov = v["dataset_pred_coverage"].as_f64().unwrap();
    assert!(cov > 0.0 && cov < 100.0, "{cov}");

    let svg = dir.path().join("pr.svg");
    assert_eq!(
        run_args(&["pr-plot", "--curve", s(&curve), "--out", s(&svg)]),
        EXIT_OK
    );
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
    let four: Vec<&str> = ["pr-plot"]
        .into_iter()
        .chain(std::iter::repeat_n(["--curve", s(&curve)], 4).flatten())
        .chain(["--out", s(&svg)])
        .collect();
    assert_eq!(run_args(&four), EXIT_USAGE);
}

#[test]
fn convert_dataset_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.tsv");
    let types = dir.path().join("types.tsv");
    let out = dir.path().join("dataset.tsv");
    fs::write(
        &raw,
        "Obama,was elected in,Chicago\tObama,ran for office in,Chicago\t1\n",
    )
    .unwrap();
    fs::write(&types, "Obama\tperson\nChicago\tlocation\n").unwrap();
    assert_eq!(
        run_args(&[
            "convert-dataset",
            "--raw",
            s(&raw),
            "--types",
            s(&types),
            "--out",
            s(&out)
        ]),
        EXIT_OK
    );
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "was_elected_in\tran_for_office_in\tperson\tlocation\t1\tall\n"
    );
}

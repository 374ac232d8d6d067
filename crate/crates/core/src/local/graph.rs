//! Entailment graph collections and their on-disk text format.
//!
//! One file per type pair, named `<typeA>#<typeB>_sim.txt`:
//!
//! ```text
//! types: location#person, num_preds: 2
//!
//! predicate: elect.1,elect.2#rev#location#person
//! run_for.1,run_for.2#rev#location#person 0.894 1 0.8
//!
//! predicate: run_for.1,run_for.2#rev#location#person
//! ```
//!
//! Edge lines carry BInc, Weeds precision and Lin, followed by optional
//! `dirt:`, `weeds:` and `global:` columns. Scores are written in shortest
//! round-trip form, so a reloaded graph scores bit-for-bit identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::subgraph::{EdgeScores, LocalSubgraph};
use crate::error::{Error, Result};
use crate::relation::TypePairKey;

pub const GRAPH_FILE_SUFFIX: &str = "_sim.txt";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntailmentGraph {
    pub subgraphs: BTreeMap<TypePairKey, LocalSubgraph>,
}

impl EntailmentGraph {
    pub fn insert(&mut self, subgraph: LocalSubgraph) {
        self.subgraphs.insert(subgraph.key.clone(), subgraph);
    }

    pub fn get(&self, key: &TypePairKey) -> Option<&LocalSubgraph> {
        self.subgraphs.get(key)
    }

    pub fn num_nodes(&self) -> usize {
        self.subgraphs.values().map(LocalSubgraph::num_nodes).sum()
    }

    pub fn num_edges(&self) -> usize {
        self.subgraphs.values().map(LocalSubgraph::num_edges).sum()
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (key, sub) in &self.subgraphs {
            let path = dir.join(format!("{}{GRAPH_FILE_SUFFIX}", key.file_stem()));
            fs::write(&path, format_subgraph(sub)).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(GRAPH_FILE_SUFFIX))
            })
            .collect();
        paths.sort();
        let mut graph = EntailmentGraph::default();
        for path in paths {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let sub = parse_subgraph(&text).map_err(|e| match e {
                Error::AtLine { line, source, .. } => Error::AtLine {
                    context: path.display().to_string(),
                    line,
                    source,
                },
                other => other,
            })?;
            graph.insert(sub);
        }
        Ok(graph)
    }
}

fn push_score_line(out: &mut String, name: &str, s: &EdgeScores) {
    let _ = write!(out, "{name} {} {} {}", s.binc, s.weeds_p, s.lin);
    if let Some(d) = s.dirt {
        let _ = write!(out, " dirt:{d}");
    }
    if let Some(w) = s.weeds {
        let _ = write!(out, " weeds:{w}");
    }
    if let Some(g) = s.global {
        let _ = write!(out, " global:{g}");
    }
    out.push('\n');
}

pub fn format_subgraph(sub: &LocalSubgraph) -> String {
    let suffix = format!("#{}#{}", sub.key.type_a(), sub.key.type_b());
    let mut out = format!("types: {}, num_preds: {}\n", sub.key, sub.num_nodes());
    for (p, node) in sub.nodes.iter().enumerate() {
        let _ = write!(out, "\npredicate: {node}{suffix}\n");
        for (q, scores) in &sub.edges[p] {
            let name = format!("{}{suffix}", sub.nodes[*q as usize]);
            push_score_line(&mut out, &name, scores);
        }
    }
    out
}

fn parse_score(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::MalformedRow(format!("bad score `{tok}`")).at_line("graph", line))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::MalformedRow(format!("score {v} outside [0, 1]")).at_line("graph", line));
    }
    Ok(v)
}

pub fn parse_subgraph(text: &str) -> Result<LocalSubgraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::MalformedRow("empty graph file".into()).at_line("graph", 1))?;
    let bad_header = || Error::MalformedRow(format!("bad header `{header}`")).at_line("graph", 1);
    let rest = header.strip_prefix("types: ").ok_or_else(bad_header)?;
    let (types, count) = rest.split_once(", num_preds: ").ok_or_else(bad_header)?;
    let key = TypePairKey::parse(types).map_err(|e| e.at_line("graph", 1))?;
    let declared: usize = count.trim().parse().map_err(|_| bad_header())?;
    let suffix = format!("#{}#{}", key.type_a(), key.type_b());
    let strip = |name: &str, line: usize| -> Result<String> {
        name.strip_suffix(&suffix)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .ok_or_else(|| {
                Error::MalformedRow(format!("predicate `{name}` lacks `{suffix}`"))
                    .at_line("graph", line)
            })
    };

    let mut blocks: Vec<(String, Vec<(String, EdgeScores)>)> = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix("predicate: ") {
            blocks.push((strip(name.trim(), lineno)?, Vec::new()));
            continue;
        }
        let Some((_, edges)) = blocks.last_mut() else {
            return Err(
                Error::MalformedRow("edge before first predicate".into()).at_line("graph", lineno)
            );
        };
        let mut toks = line.split_whitespace();
        let target = strip(toks.next().unwrap_or_default(), lineno)?;
        let mut numeric = Vec::new();
        let mut scores = EdgeScores::local(0.0);
        for tok in toks {
            match tok.split_once(':') {
                Some(("dirt", v)) => scores.dirt = Some(parse_score(v, lineno)?),
                Some(("weeds", v)) => scores.weeds = Some(parse_score(v, lineno)?),
                Some(("global", v)) => scores.global = Some(parse_score(v, lineno)?),
                Some(_) => {
                    return Err(Error::MalformedRow(format!("unknown column `{tok}`"))
                        .at_line("graph", lineno))
                }
                None => numeric.push(parse_score(tok, lineno)?),
            }
        }
        match numeric[..] {
            [b] => scores.binc = b,
            [b, w, l] => {
                scores.binc = b;
                scores.weeds_p = w;
                scores.lin = l;
            }
            _ => {
                return Err(
                    Error::MalformedRow(format!("expected 1 or 3 scores: `{line}`"))
                        .at_line("graph", lineno),
                )
            }
        }
        edges.push((target, scores));
    }

    if blocks.len() != declared {
        return Err(Error::MalformedRow(format!(
            "header declares {declared} predicates, found {}",
            blocks.len()
        ))
        .at_line("graph", 1));
    }
    let mut nodes: Vec<String> = blocks.iter().map(|(n, _)| n.clone()).collect();
    nodes.sort();
    nodes.dedup();
    if nodes.len() != blocks.len() {
        return Err(Error::MalformedRow("duplicate predicate block".into()).at_line("graph", 1));
    }
    let mut sub = LocalSubgraph {
        key,
        edges: vec![Vec::new(); nodes.len()],
        nodes,
    };
    for (src, edges) in blocks {
        let p = sub.node_index(&src).expect("node collected above");
        for (dst, scores) in edges {
            let q = sub.node_index(&dst).ok_or_else(|| {
                Error::MalformedRow(format!("edge target `{dst}` is not a node"))
                    .at_line("graph", 1)
            })?;
            if q == p {
                continue;
            }
            sub.edges[p].push((q as u32, scores));
        }
        sub.edges[p].sort_by_key(|&(q, _)| q);
        sub.edges[p].dedup_by_key(|(q, _)| *q);
    }
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LocalSubgraph {
        LocalSubgraph {
            key: TypePairKey::new("person", "location"),
            nodes: vec!["elect#rev".into(), "run_for#rev".into(), "visit#rev".into()],
            edges: vec![
                vec![(
                    1,
                    EdgeScores {
                        binc: 0.8944271909999159,
                        weeds_p: 1.0,
                        lin: 0.8,
                        dirt: None,
                        weeds: None,
                        global: None,
                    },
                )],
                vec![(
                    0,
                    EdgeScores {
                        binc: 0.1 + 0.2,
                        weeds_p: 0.5,
                        lin: 1.0 / 3.0,
                        dirt: Some(0.25),
                        weeds: Some(0.7),
                        global: Some(0.45),
                    },
                )],
                vec![],
            ],
        }
    }

    #[test]
    fn format_shape() {
        let text = format_subgraph(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "types: location#person, num_preds: 3");
        assert_eq!(lines[1], "");
        assert_eq!(lines[2], "predicate: elect#rev#location#person");
        assert_eq!(
            lines[3],
            "run_for#rev#location#person 0.8944271909999159 1 0.8"
        );
        assert!(lines[6].ends_with("dirt:0.25 weeds:0.7 global:0.45"));
        assert_eq!(
            lines.last().unwrap(),
            &"predicate: visit#rev#location#person"
        );
    }

    #[test]
    fn reload_is_exact() {
        let sub = sample();
        let back = parse_subgraph(&format_subgraph(&sub)).unwrap();
        assert_eq!(back, sub);
        assert_eq!(
            back.edge("run_for#rev", "elect#rev").unwrap().binc,
            0.1 + 0.2
        );
    }

    #[test]
    fn single_score_column_accepted() {
        let text = "types: a#b, num_preds: 2\n\npredicate: p#a#b\nq#a#b 0.5\n\npredicate: q#a#b\n";
        let g = parse_subgraph(text).unwrap();
        assert_eq!(g.edge("p", "q").unwrap().binc, 0.5);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "",
            "types: a#b\n",
            "types: a#b, num_preds: 1\n\npredicate: p#a#c\n",
            "types: a#b, num_preds: 2\n\npredicate: p#a#b\n",
            "types: a#b, num_preds: 1\n\npredicate: p#a#b\nq#a#b 0.5\n",
            "types: a#b, num_preds: 2\n\npredicate: p#a#b\nq#a#b 1.5\n\npredicate: q#a#b\n",
            "types: a#b, num_preds: 2\n\npredicate: p#a#b\nq#a#b 0.5 0.1\n\npredicate: q#a#b\n",
        ] {
            assert!(parse_subgraph(text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn directory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = EntailmentGraph::default();
        g.insert(sample());
        g.insert(LocalSubgraph::empty(TypePairKey::new("thing", "thing")));
        g.write_dir(dir.path()).unwrap();
        assert!(dir.path().join("location#person_sim.txt").exists());
        let back = EntailmentGraph::read_dir(dir.path()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.num_nodes(), 3);
        assert_eq!(back.num_edges(), 2);
    }
}

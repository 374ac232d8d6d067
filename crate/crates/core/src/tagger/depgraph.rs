use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Token {
    pub form: String,
    pub lemma: String,
    pub pos: String,
    /// Zero-based index of the head token; `None` for the root.
    pub head: Option<usize>,
    pub deprel: String,
}

/// One extracted binary relation anchored on its predicate head token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationNode {
    pub node: usize,
    pub arg1: usize,
    pub arg2: usize,
    /// Normalized predicate; defaults to `<lemma>.1,<lemma>.2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred: Option<String>,
    /// Full argument strings when an argument spans several tokens.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg1_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg2_text: Option<String>,
    /// Named-entity flag; derived from proper-noun POS tags when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ne: Option<bool>,
}

/// A dependency-parsed sentence, one JSON object per line of a parse file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepGraph {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub relations: Vec<RelationNode>,
}

impl DepGraph {
    pub fn parse_line(line: &str) -> Result<Self> {
        let graph: DepGraph =
            serde_json::from_str(line).map_err(|e| Error::InvalidParse(e.to_string()))?;
        graph.validate()?;
        Ok(graph)
    }

    /// Builds a sentence from `(form, lemma, pos, head, deprel)` rows.
    pub fn from_rows(rows: &[(&str, &str, &str, Option<usize>, &str)]) -> Self {
        DepGraph {
            id: None,
            doc: None,
            date: None,
            tokens: rows
                .iter()
                .map(|&(form, lemma, pos, head, deprel)| Token {
                    form: form.into(),
                    lemma: lemma.into(),
                    pos: pos.into(),
                    head,
                    deprel: deprel.into(),
                })
                .collect(),
            relations: Vec::new(),
        }
    }

    pub fn with_relation(mut self, node: usize, arg1: usize, arg2: usize) -> Self {
        self.relations.push(RelationNode {
            node,
            arg1,
            arg2,
            pred: None,
            arg1_text: None,
            arg2_text: None,
            ne: None,
        });
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("parse serialization cannot fail")
    }

    /// Checks for a single root, in-range heads and an acyclic head chain.
    pub fn validate(&self) -> Result<()> {
        let n = self.tokens.len();
        if n == 0 {
            return Err(Error::InvalidParse("sentence has no tokens".into()));
        }
        let roots = self.tokens.iter().filter(|t| t.head.is_none()).count();
        if roots != 1 {
            return Err(Error::InvalidParse(format!(
                "expected one root, found {roots}"
            )));
        }
        for (i, tok) in self.tokens.iter().enumerate() {
            if let Some(h) = tok.head {
                if h >= n || h == i {
                    return Err(Error::InvalidParse(format!("token {i} has bad head {h}")));
                }
            }
        }
        for start in 0..n {
            let mut steps = 0;
            let mut cur = start;
            while let Some(h) = self.tokens[cur].head {
                cur = h;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidParse(format!("cycle through token {start}")));
                }
            }
        }
        for rel in &self.relations {
            for idx in [rel.node, rel.arg1, rel.arg2] {
                if idx >= n {
                    return Err(Error::InvalidNode { node: idx, len: n });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn head(&self, i: usize) -> Option<usize> {
        self.tokens[i].head
    }

    /// Tokens from `node`'s head up to the root, nearest first.
    pub fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(h) = self.tokens[cur].head {
            out.push(h);
            cur = h;
            if out.len() > self.tokens.len() {
                break;
            }
        }
        out
    }

    pub fn dependents(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.tokens
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.head == Some(node))
            .map(|(i, _)| i)
    }
}

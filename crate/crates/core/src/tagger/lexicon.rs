use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::relation::ModalityTag;

pub const BUNDLED_LEXICON: &str = include_str!("../../../../data/lexicon.tsv");

/// POS constraint of a lexicon entry: `*`, a prefix such as `V*`, or an exact tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosPattern {
    Any,
    Prefix(String),
    Exact(String),
}

impl PosPattern {
    pub fn parse(s: &str) -> Self {
        match s {
            "*" | "" => PosPattern::Any,
            _ => match s.strip_suffix('*') {
                Some(prefix) => PosPattern::Prefix(prefix.to_string()),
                None => PosPattern::Exact(s.to_string()),
            },
        }
    }

    pub fn matches(&self, pos: &str) -> bool {
        match self {
            PosPattern::Any => true,
            PosPattern::Prefix(p) => pos.starts_with(p.as_str()),
            PosPattern::Exact(p) => pos == p,
        }
    }

    pub fn as_string(&self) -> String {
        match self {
            PosPattern::Any => "*".into(),
            PosPattern::Prefix(p) => format!("{p}*"),
            PosPattern::Exact(p) => p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub lemma: String,
    pub pos: PosPattern,
    pub tag: ModalityTag,
}

/// Modality trigger lexicon, keyed by (lowercased lemma, POS pattern).
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<(PosPattern, ModalityTag)>>,
}

impl Lexicon {
    pub fn insert(&mut self, lemma: &str, pos: &str, tag: ModalityTag) -> Result<()> {
        if tag == ModalityTag::Count {
            // counterfactuals come from the hand-written rules only
            return Err(Error::UnknownTag("COUNT is not a lexicon tag".into()));
        }
        let lemma = lemma.trim().to_lowercase();
        if lemma.is_empty() {
            return Err(Error::MalformedRow("empty lemma".into()));
        }
        let pos = PosPattern::parse(pos.trim());
        let slot = self.entries.entry(lemma.clone()).or_default();
        if slot.iter().any(|(p, _)| *p == pos) {
            return Err(Error::DuplicateEntry {
                lemma,
                pos: pos.as_string(),
            });
        }
        slot.push((pos, tag));
        slot.sort();
        Ok(())
    }

    /// Parses `lemma<TAB>POS<TAB>TAG` rows. Blank lines and `#` comments are skipped.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut lex = Lexicon::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::MalformedRow(format!("expected 3 columns: `{line}`"))
                    .at_line("lexicon", i + 1));
            }
            let tag: ModalityTag = cols[2]
                .trim()
                .parse()
                .map_err(|e: Error| e.at_line("lexicon", i + 1))?;
            lex.insert(cols[0], cols[1], tag)
                .map_err(|e| e.at_line("lexicon", i + 1))?;
        }
        Ok(lex)
    }

    /// The lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse_tsv(BUNDLED_LEXICON).expect("bundled lexicon is well formed")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text)
    }

    /// Tags of every entry matching the token, in entry order.
    pub fn lookup<'a>(
        &'a self,
        lemma: &str,
        pos: &'a str,
    ) -> impl Iterator<Item = ModalityTag> + 'a {
        self.entries
            .get(&lemma.to_lowercase())
            .into_iter()
            .flatten()
            .filter(move |(p, _)| p.matches(pos))
            .map(|(_, t)| *t)
    }

    pub fn entries(&self) -> impl Iterator<Item = LexiconEntry> + '_ {
        self.entries.iter().flat_map(|(lemma, v)| {
            v.iter().map(move |(pos, tag)| LexiconEntry {
                lemma: lemma.clone(),
                pos: pos.clone(),
                tag: *tag,
            })
        })
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

//! Relation triples, modality tags and typed predicates.
//!
//! Triples travel between stages as JSON lines:
//!
//! ```text
//! {"pred":"beat.1,beat.2","arg1":"Falcons","arg2":"Seahawks","tags":[],"ne":true}
//! ```
//!
//! `doc` and `date` are optional and omitted from the canonical form when
//! absent. Typing binds each argument to a type from a user-supplied
//! entity map and files the relation under a canonically ordered
//! [`TypePairKey`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Suffix marking a predicate whose argument slots were swapped to keep
/// its type pair in canonical order.
pub const REVERSED_MARKER: &str = "#rev";

pub const DEFAULT_FALLBACK_TYPE: &str = "thing";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModalityTag {
    Mod,
    AttSay,
    AttThink,
    Cond,
    Count,
    Lneg,
}

impl ModalityTag {
    pub const ALL: [ModalityTag; 6] = [
        ModalityTag::Mod,
        ModalityTag::AttSay,
        ModalityTag::AttThink,
        ModalityTag::Cond,
        ModalityTag::Count,
        ModalityTag::Lneg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModalityTag::Mod => "MOD",
            ModalityTag::AttSay => "ATT_SAY",
            ModalityTag::AttThink => "ATT_THINK",
            ModalityTag::Cond => "COND",
            ModalityTag::Count => "COUNT",
            ModalityTag::Lneg => "LNEG",
        }
    }

    /// Whether a relation carrying this tag is dropped from the asserted
    /// corpus. Lexical negation is tagged but never filtered on.
    pub fn is_removal(self) -> bool {
        !matches!(self, ModalityTag::Lneg)
    }
}

impl fmt::Display for ModalityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModalityTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MOD" => Ok(ModalityTag::Mod),
            // REP_* is the reporting-verb spelling used in some extractor
            // outputs; it names the same categories.
            "ATT_SAY" | "REP_SAY" => Ok(ModalityTag::AttSay),
            "ATT_THINK" | "REP_THINK" => Ok(ModalityTag::AttThink),
            "COND" => Ok(ModalityTag::Cond),
            "COUNT" => Ok(ModalityTag::Count),
            "LNEG" => Ok(ModalityTag::Lneg),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

impl Serialize for ModalityTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ModalityTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationTriple {
    pub predicate: String,
    pub arg1: String,
    pub arg2: String,
    pub tags: BTreeSet<ModalityTag>,
    pub doc_id: Option<String>,
    pub date: Option<String>,
    pub has_named_entity: bool,
}

impl RelationTriple {
    pub fn new(
        predicate: impl Into<String>,
        arg1: impl Into<String>,
        arg2: impl Into<String>,
    ) -> Result<Self> {
        let triple = RelationTriple {
            predicate: predicate.into().trim().to_string(),
            arg1: arg1.into().trim().to_string(),
            arg2: arg2.into().trim().to_string(),
            tags: BTreeSet::new(),
            doc_id: None,
            date: None,
            has_named_entity: true,
        };
        triple.validate()?;
        Ok(triple)
    }

    pub fn with_tags(mut self, tags: impl IntoIterator<Item = ModalityTag>) -> Self {
        self.tags = tags.into_iter().collect();
        self
    }

    pub fn with_named_entity(mut self, ne: bool) -> Self {
        self.has_named_entity = ne;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.predicate.is_empty() {
            return Err(Error::MalformedLine("empty predicate".into()));
        }
        if self.predicate.chars().any(char::is_whitespace) {
            return Err(Error::MalformedLine(format!(
                "predicate `{}` contains whitespace",
                self.predicate
            )));
        }
        if self.arg1.is_empty() || self.arg2.is_empty() {
            return Err(Error::MalformedLine("empty argument".into()));
        }
        if let Some(date) = &self.date {
            if !is_iso_date(date) {
                return Err(Error::MalformedLine(format!("bad date `{date}`")));
            }
        }
        Ok(())
    }

    /// True when any tag falls in the removal set.
    pub fn is_modal(&self) -> bool {
        self.tags.iter().any(|t| t.is_removal())
    }

    pub fn to_json_line(&self) -> String {
        let wire = WireTripleOut {
            pred: &self.predicate,
            arg1: &self.arg1,
            arg2: &self.arg2,
            tags: self.tags.iter().map(|t| t.as_str()).collect(),
            ne: self.has_named_entity,
            doc: self.doc_id.as_deref(),
            date: self.date.as_deref(),
        };
        serde_json::to_string(&wire).expect("triple serialization cannot fail")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTripleIn {
    pred: String,
    arg1: String,
    arg2: String,
    tags: Vec<String>,
    ne: bool,
    #[serde(default)]
    doc: Option<String>,
    #[serde(default)]
    date: Option<String>,
}

#[derive(Serialize)]
struct WireTripleOut<'a> {
    pred: &'a str,
    arg1: &'a str,
    arg2: &'a str,
    tags: Vec<&'static str>,
    ne: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    doc: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    date: Option<&'a str>,
}

pub fn parse_relation_line(line: &str) -> Result<RelationTriple> {
    let wire: WireTripleIn =
        serde_json::from_str(line.trim()).map_err(|e| Error::MalformedLine(e.to_string()))?;
    let tags = wire
        .tags
        .iter()
        .map(|t| t.parse())
        .collect::<Result<BTreeSet<_>>>()?;
    let triple = RelationTriple {
        predicate: wire.pred.trim().to_string(),
        arg1: wire.arg1.trim().to_string(),
        arg2: wire.arg2.trim().to_string(),
        tags,
        doc_id: wire.doc,
        date: wire.date,
        has_named_entity: wire.ne,
    };
    triple.validate()?;
    Ok(triple)
}

/// Reads a whole triple file, failing on the first bad line.
pub fn read_triples(path: &Path) -> Result<Vec<RelationTriple>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_relation_line(l).map_err(|e| e.at_line(path.display().to_string(), i + 1))
        })
        .collect()
}

pub fn write_triples<'a>(
    path: &Path,
    triples: impl IntoIterator<Item = &'a RelationTriple>,
) -> Result<()> {
    let mut out = String::new();
    for t in triples {
        out.push_str(&t.to_json_line());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return false;
    }
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    if !(digits(0..4) && digits(5..7) && digits(8..10)) {
        return false;
    }
    let month: u32 = s[5..7].parse().unwrap_or(0);
    let day: u32 = s[8..10].parse().unwrap_or(0);
    (1..=12).contains(&month) && (1..=31).contains(&day)
}

pub fn is_valid_type(t: &str) -> bool {
    let mut chars = t.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Ordered pair of argument types identifying one subgraph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypePairKey {
    type_a: String,
    type_b: String,
}

impl TypePairKey {
    /// Builds the canonical key; the argument order does not matter.
    pub fn new(t1: impl Into<String>, t2: impl Into<String>) -> Self {
        let (t1, t2) = (t1.into(), t2.into());
        if t1 <= t2 {
            TypePairKey {
                type_a: t1,
                type_b: t2,
            }
        } else {
            TypePairKey {
                type_a: t2,
                type_b: t1,
            }
        }
    }

    pub fn type_a(&self) -> &str {
        &self.type_a
    }

    pub fn type_b(&self) -> &str {
        &self.type_b
    }

    /// Parses `typeA#typeB`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('#')
            .ok_or_else(|| Error::InvalidInput(format!("type pair `{s}` lacks `#`")))?;
        for t in [a, b] {
            if !is_valid_type(t) {
                return Err(Error::InvalidType(t.to_string()));
            }
        }
        Ok(TypePairKey::new(a, b))
    }

    /// File-name-safe stem, also the header form.
    pub fn file_stem(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TypePairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.type_a, self.type_b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedPredicate {
    pub predicate: String,
    pub type1: String,
    pub type2: String,
}

impl TypedPredicate {
    pub fn key(&self) -> TypePairKey {
        TypePairKey::new(self.type1.clone(), self.type2.clone())
    }

    pub fn is_reversed(&self) -> bool {
        self.predicate.ends_with(REVERSED_MARKER)
    }
}

impl fmt::Display for TypedPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}#{}", self.predicate, self.type1, self.type2)
    }
}

/// Adds the reversal marker, or removes it when already present.
pub fn toggle_reversal(predicate: &str) -> String {
    match predicate.strip_suffix(REVERSED_MARKER) {
        Some(base) => base.to_string(),
        None => format!("{predicate}{REVERSED_MARKER}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentPair {
    pub arg_a: String,
    pub arg_b: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedRelation {
    pub predicate: TypedPredicate,
    pub args: ArgumentPair,
    pub key: TypePairKey,
}

/// Entity to type lookup with a fallback for unlinked entities.
#[derive(Debug, Clone)]
pub struct TypeMap {
    types: HashMap<String, String>,
    fallback: String,
}

impl Default for TypeMap {
    fn default() -> Self {
        TypeMap {
            types: HashMap::new(),
            fallback: DEFAULT_FALLBACK_TYPE.to_string(),
        }
    }
}

impl TypeMap {
    pub fn new(fallback: impl Into<String>) -> Result<Self> {
        let fallback = fallback.into();
        if !is_valid_type(&fallback) {
            return Err(Error::InvalidType(fallback));
        }
        Ok(TypeMap {
            types: HashMap::new(),
            fallback,
        })
    }

    pub fn insert(&mut self, entity: &str, ty: &str) -> Result<()> {
        if !is_valid_type(ty) {
            return Err(Error::InvalidType(ty.to_string()));
        }
        let entity = entity.trim();
        if entity.is_empty() {
            return Err(Error::MalformedRow("empty entity".into()));
        }
        match self.types.get(entity) {
            Some(existing) if existing != ty => Err(Error::MalformedRow(format!(
                "entity `{entity}` typed both `{existing}` and `{ty}`"
            ))),
            _ => {
                self.types.insert(entity.to_string(), ty.to_string());
                Ok(())
            }
        }
    }

    /// Parses `entity<TAB>type` rows; blank lines and `#` comments are skipped.
    pub fn parse_tsv(text: &str, fallback: &str) -> Result<Self> {
        let mut map = TypeMap::new(fallback)?;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(entity), Some(ty), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::MalformedRow(format!("expected 2 columns: `{line}`"))
                    .at_line("type map", i + 1));
            };
            map.insert(entity, ty.trim())
                .map_err(|e| e.at_line("type map", i + 1))?;
        }
        Ok(map)
    }

    pub fn load(path: &Path, fallback: &str) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, fallback)
    }

    pub fn type_of(&self, entity: &str) -> &str {
        self.types
            .get(entity.trim())
            .map(String::as_str)
            .unwrap_or(&self.fallback)
    }

    pub fn fallback(&self) -> &str {
        &self.fallback
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

pub fn type_relation(triple: &RelationTriple, type_map: &TypeMap) -> TypedRelation {
    let t1 = type_map.type_of(&triple.arg1).to_string();
    let t2 = type_map.type_of(&triple.arg2).to_string();
    if t1 <= t2 {
        TypedRelation {
            key: TypePairKey::new(t1.clone(), t2.clone()),
            predicate: TypedPredicate {
                predicate: triple.predicate.clone(),
                type1: t1,
                type2: t2,
            },
            args: ArgumentPair {
                arg_a: triple.arg1.clone(),
                arg_b: triple.arg2.clone(),
            },
        }
    } else {
        TypedRelation {
            key: TypePairKey::new(t2.clone(), t1.clone()),
            predicate: TypedPredicate {
                predicate: format!("{}{REVERSED_MARKER}", triple.predicate),
                type1: t2,
                type2: t1,
            },
            args: ArgumentPair {
                arg_a: triple.arg2.clone(),
                arg_b: triple.arg1.clone(),
            },
        }
    }
}

pub fn filter_named_entity(triple: &RelationTriple) -> bool {
    triple.has_named_entity
}

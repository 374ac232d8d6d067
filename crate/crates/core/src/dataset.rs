//! Corpus variants for the modality ablation.
//!
//! * `BaselineLarge`: every relation, tags cleared.
//! * `BaselineSmall`: a seeded Bernoulli sample of relation instances, tags cleared.
//! * `Asserted`: only relations without a removal-set tag (LNEG-only relations stay).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::{ModalityTag, RelationTriple};

pub const DEFAULT_SAMPLE_FRACTION: f64 = 0.85;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    BaselineLarge,
    BaselineSmall,
    Asserted,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::BaselineLarge => "baseline-large",
            Variant::BaselineSmall => "baseline-small",
            Variant::Asserted => "asserted",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "baseline-large" => Ok(Variant::BaselineLarge),
            "baseline-small" => Ok(Variant::BaselineSmall),
            "asserted" => Ok(Variant::Asserted),
            _ => Err(Error::InvalidInput(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantSpec {
    pub variant: Variant,
    pub sample_fraction: f64,
    pub seed: u64,
}

impl VariantSpec {
    pub fn new(variant: Variant) -> Self {
        VariantSpec {
            variant,
            sample_fraction: DEFAULT_SAMPLE_FRACTION,
            seed: DEFAULT_SEED,
        }
    }

    pub fn with_fraction(mut self, fraction: f64) -> Self {
        self.sample_fraction = fraction;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "sample fraction {} outside (0, 1]",
                self.sample_fraction
            )));
        }
        Ok(())
    }
}

/// Uniform draw in [0, 1) for record `index`, independent of every other record.
///
/// The ChaCha keystream is addressed directly at the record's word offset, so
/// the draw depends only on `(seed, index)` and not on evaluation order.
pub fn record_draw(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(u128::from(index) * 2);
    rng.gen::<f64>()
}

/// Decides whether the record at `index` (zero-based position in the input
/// stream) belongs to the variant.
pub fn keep_record(spec: &VariantSpec, index: u64, triple: &RelationTriple) -> bool {
    match spec.variant {
        Variant::BaselineLarge => true,
        Variant::Asserted => !triple.is_modal(),
        Variant::BaselineSmall => {
            spec.sample_fraction >= 1.0 || record_draw(spec.seed, index) < spec.sample_fraction
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: Option<Variant>,
    pub input_count: u64,
    pub output_count: u64,
    pub retention: f64,
    /// Dropped relations per tag they carried; a relation with several tags
    /// counts under each.
    pub per_tag_removed: BTreeMap<ModalityTag, u64>,
}

pub fn variant_report(
    input_count: u64,
    output_count: u64,
    per_tag_removed: BTreeMap<ModalityTag, u64>,
) -> VariantReport {
    let retention = if input_count == 0 {
        0.0
    } else {
        output_count as f64 / input_count as f64
    };
    VariantReport {
        variant: None,
        input_count,
        output_count,
        retention,
        per_tag_removed,
    }
}

/// Builds one corpus variant. Baseline outputs have their tags cleared so
/// nothing downstream can condition on modality.
pub fn build_variant(
    triples: impl IntoIterator<Item = RelationTriple>,
    spec: &VariantSpec,
) -> Result<(Vec<RelationTriple>, VariantReport)> {
    spec.validate()?;
    let mut kept = Vec::new();
    let mut removed: BTreeMap<ModalityTag, u64> = BTreeMap::new();
    let mut input = 0u64;
    for (i, mut triple) in triples.into_iter().enumerate() {
        input += 1;
        if keep_record(spec, i as u64, &triple) {
            if spec.variant != Variant::Asserted {
                triple.tags.clear();
            }
            kept.push(triple);
        } else {
            for tag in &triple.tags {
                *removed.entry(*tag).or_default() += 1;
            }
        }
    }
    let mut report = variant_report(input, kept.len() as u64, removed);
    report.variant = Some(spec.variant);
    Ok((kept, report))
}

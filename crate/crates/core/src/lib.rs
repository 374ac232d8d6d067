//! Typed entailment graph mining from modality-tagged relation triples.
//!
//! The pipeline runs in stages: [`tagger`] assigns modality tags to parsed
//! relations, [`dataset`] derives the corpus variants, [`local`] counts
//! argument pairs per typed predicate and scores directional edges,
//! [`global`] optionally shares evidence across type pairs, and [`eval`]
//! sweeps precision/recall over entailment datasets.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod global;
pub mod local;
pub mod relation;
pub mod synth;
pub mod tagger;

pub use error::{Error, Result};

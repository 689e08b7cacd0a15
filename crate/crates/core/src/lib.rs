//! Extraction of spacecraft launch, failure and decommissioning events
//! from dependency-parsed news text.
//!
//! The crate covers the whole pipeline: loading parsed documents,
//! pooling near-duplicate articles into leak-free splits, gazetteer NER,
//! a trigger-plus-dependency-path rule language with an inverted index
//! for candidate retrieval, shortlisting for annotation, and span-level
//! evaluation of any tagger's output.

pub mod dedup;
pub mod document;
pub mod error;
pub mod eval;
pub mod ner;
pub mod pipeline;
pub mod rules;

pub use error::{Error, Result};

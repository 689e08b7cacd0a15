//! Annotation handling and evaluation: BIO coding, multi-annotator
//! consensus, slot scoring, corpus statistics and error buckets.
//!
//! Gold and predicted annotations share one JSON-lines format:
//!
//! ```text
//! {"sentence_id":"s1","event_type":"LAUNCH","spans":[{"start":2,"end":4,"label":"SatelliteName"}]}
//! ```
//!
//! Records may also carry `tokens` (a count or the token list) and
//! `split`, which [`corpus_stats`] needs.

mod bio;
mod consensus;
mod errors;
mod score;
mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::document::Split;
use crate::error::{Error, Result};
use crate::pipeline::schema::EventType;

pub use bio::{bio_to_spans, spans_to_bio, BioTag};
pub use consensus::{agreement, consensus, Agreement, AnnotationLayer};
pub use errors::{classify_errors, ErrorBucket, ErrorCase, ErrorReport};
pub use score::{micro_average, score_slots, slot_counts, Counts, EvalReport, SlotCounts, SlotScore, MICRO_LABEL};
pub use stats::{corpus_stats, CorpusStats, StatsRow};

/// A labeled token span `[start, end)` within one sentence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabeledSpan {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

impl LabeledSpan {
    pub fn new(start: usize, end: usize, label: impl Into<String>) -> Self {
        LabeledSpan {
            start,
            end,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &LabeledSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn same_bounds(&self, other: &LabeledSpan) -> bool {
        self.start == other.start && self.end == other.end
    }
}

impl fmt::Display for LabeledSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.start, self.end, self.label)
    }
}

/// First overlapping pair in a span list, if any.
pub(crate) fn find_overlap(spans: &[LabeledSpan]) -> Option<(&LabeledSpan, &LabeledSpan)> {
    let mut sorted: Vec<&LabeledSpan> = spans.iter().collect();
    sorted.sort();
    sorted.windows(2).find(|w| w[0].overlaps(w[1])).map(|w| (w[0], w[1]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TokenInfo {
    Count(usize),
    List(Vec<String>),
}

impl TokenInfo {
    pub fn len(&self) -> usize {
        match self {
            TokenInfo::Count(n) => *n,
            TokenInfo::List(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Annotation of one sentence for one event type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub sentence_id: String,
    pub event_type: EventType,
    pub spans: Vec<LabeledSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<TokenInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

impl SpanRecord {
    pub fn new(sentence_id: impl Into<String>, event_type: EventType, spans: Vec<LabeledSpan>) -> Self {
        SpanRecord {
            sentence_id: sentence_id.into(),
            event_type,
            spans,
            tokens: None,
            split: None,
        }
    }

    pub fn key(&self) -> (&str, EventType) {
        (&self.sentence_id, self.event_type)
    }
}

pub fn parse_span_records<R: BufRead>(input: R) -> Result<Vec<SpanRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(&line);
        let record: SpanRecord = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            line: i + 1,
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        if let Some(bad) = record.spans.iter().find(|s| s.is_empty()) {
            return Err(Error::Schema {
                line: i + 1,
                path: "spans".into(),
                message: format!("empty span {bad}"),
            });
        }
        if let Some(t) = &record.tokens {
            if let Some(bad) = record.spans.iter().find(|s| s.end > t.len()) {
                return Err(Error::Schema {
                    line: i + 1,
                    path: "spans".into(),
                    message: format!("span {bad} exceeds sentence length {}", t.len()),
                });
            }
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_span_records(records: &[SpanRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Distinct spans per (sentence, event type). Repeated records for one
/// key are merged; a span annotated twice counts once.
pub(crate) type SpanSets<'a> = BTreeMap<(&'a str, EventType), BTreeSet<&'a LabeledSpan>>;

pub(crate) fn span_sets(records: &[SpanRecord]) -> SpanSets<'_> {
    let mut sets: SpanSets<'_> = BTreeMap::new();
    for r in records {
        sets.entry(r.key()).or_default().extend(r.spans.iter());
    }
    sets
}

//! Event validation, shortlisting for annotation, and task export.

pub mod schema;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dedup::round_count;
use crate::document::{Document, Sentence};
use crate::error::{Error, Result};
use crate::eval::LabeledSpan;
use crate::rules::EventMention;
use schema::{EventSchema, EventType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvalidReason {
    UnknownSlot(String),
    /// None of these slots is filled.
    MissingMandatory(Vec<&'static str>),
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::UnknownSlot(s) => write!(f, "unknown slot {s}"),
            InvalidReason::MissingMandatory(slots) => write!(f, "missing {}", slots.join(" or ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Mechanical filter: launches and decommissionings need a satellite,
/// failures a satellite or a launch vehicle.
pub fn validate_event(event: &EventMention, schema: &EventSchema) -> Result<Validity> {
    if event.event_type != schema.event_type {
        return Err(Error::invalid(format!(
            "{} event checked against the {} schema",
            event.event_type, schema.event_type
        )));
    }
    if let Some(unknown) = event.slots.keys().find(|s| !schema.has_slot(s)) {
        return Ok(Validity::Invalid(InvalidReason::UnknownSlot(unknown.clone())));
    }
    if schema.mandatory_any.iter().any(|s| event.is_filled(s)) {
        Ok(Validity::Valid)
    } else {
        Ok(Validity::Invalid(InvalidReason::MissingMandatory(
            schema.mandatory_any.to_vec(),
        )))
    }
}

/// A sentence proposed for annotation under one event type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSentence {
    pub doc_id: String,
    pub sentence_id: String,
    pub event_type: EventType,
    pub sampled: bool,
    pub events: Vec<EventMention>,
}

/// Per-event-type sentence sampling fractions; missing types keep 1.0.
pub type SampleFractions = BTreeMap<EventType, f64>;

fn type_seed(seed: u64, event_type: EventType) -> u64 {
    let ordinal = EventType::ALL
        .iter()
        .position(|t| *t == event_type)
        .expect("known type") as u64;
    seed ^ (ordinal + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Group valid events by (sentence, event type) and sample sentences.
///
/// Candidates keep the order in which their first event appears. For
/// each event type, `round_half_up(n * fraction)` of its n candidate
/// sentences are marked `sampled`, chosen by a ChaCha8 generator seeded
/// from `seed` and the type.
pub fn shortlist(events: &[EventMention], sample: &SampleFractions, seed: u64) -> Result<Vec<CandidateSentence>> {
    for (t, f) in sample {
        if !(*f > 0.0 && *f <= 1.0) {
            return Err(Error::invalid(format!(
                "sample fraction for {t} must be in (0, 1], got {f}"
            )));
        }
    }
    let mut candidates: Vec<CandidateSentence> = Vec::new();
    let mut slot: HashMap<(&str, &str, EventType), usize> = HashMap::new();
    for e in events {
        if !validate_event(e, e.event_type.schema())?.is_valid() {
            continue;
        }
        let key = (e.doc_id.as_str(), e.sentence_id.as_str(), e.event_type);
        let i = *slot.entry(key).or_insert_with(|| {
            candidates.push(CandidateSentence {
                doc_id: e.doc_id.clone(),
                sentence_id: e.sentence_id.clone(),
                event_type: e.event_type,
                sampled: false,
                events: Vec::new(),
            });
            candidates.len() - 1
        });
        candidates[i].events.push(e.clone());
    }

    for t in EventType::ALL {
        let positions: Vec<usize> = candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.event_type == t)
            .map(|(i, _)| i)
            .collect();
        let fraction = sample.get(&t).copied().unwrap_or(1.0);
        let keep = round_count(positions.len(), fraction);
        let mut rng = ChaCha8Rng::seed_from_u64(type_seed(seed, t));
        for chosen in rand::seq::index::sample(&mut rng, positions.len(), keep) {
            candidates[positions[chosen]].sampled = true;
        }
    }
    Ok(candidates)
}

#[derive(Serialize)]
struct TaskHeader {
    format: &'static str,
    version: u32,
    records: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationTask {
    pub doc_id: String,
    pub sentence_id: String,
    pub event_type: EventType,
    pub text: String,
    pub tokens: Vec<String>,
    /// Slot spans proposed by the rules; not gold labels.
    pub suggestions: Vec<LabeledSpan>,
}

pub const TASK_FORMAT: &str = "ssa-annotation-task";

/// Task records for every sampled candidate.
pub fn annotation_tasks(shortlist: &[CandidateSentence], docs: &[Document]) -> Result<Vec<AnnotationTask>> {
    let sentences: HashMap<(&str, &str), &Sentence> = docs
        .iter()
        .flat_map(|d| d.sentences.iter().map(move |s| ((d.id.as_str(), s.id.as_str()), s)))
        .collect();
    let mut tasks = Vec::new();
    for c in shortlist.iter().filter(|c| c.sampled) {
        let sentence = sentences
            .get(&(c.doc_id.as_str(), c.sentence_id.as_str()))
            .ok_or_else(|| Error::invalid(format!("sentence {}/{} not in corpus", c.doc_id, c.sentence_id)))?;
        let suggestions: BTreeSet<LabeledSpan> = c
            .events
            .iter()
            .flat_map(|e| {
                e.slots.iter().flat_map(|(label, fills)| {
                    fills
                        .iter()
                        .map(move |f| LabeledSpan::new(f.start, f.end, label.clone()))
                })
            })
            .collect();
        tasks.push(AnnotationTask {
            doc_id: c.doc_id.clone(),
            sentence_id: c.sentence_id.clone(),
            event_type: c.event_type,
            text: sentence.text(),
            tokens: sentence.tokens.iter().map(|t| t.surface.clone()).collect(),
            suggestions: suggestions.into_iter().collect(),
        });
    }
    Ok(tasks)
}

/// JSON lines: a header object, then one task per sampled candidate.
pub fn export_for_annotation(shortlist: &[CandidateSentence], docs: &[Document]) -> Result<String> {
    let tasks = annotation_tasks(shortlist, docs)?;
    let header = TaskHeader {
        format: TASK_FORMAT,
        version: 1,
        records: tasks.len(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for t in &tasks {
        out.push_str(&serde_json::to_string(t).expect("tasks serialize"));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_candidates_jsonl(candidates: &[CandidateSentence]) -> String {
    let mut out = String::new();
    for c in candidates {
        out.push_str(&serde_json::to_string(c).expect("candidates serialize"));
        out.push('\n');
    }
    out
}

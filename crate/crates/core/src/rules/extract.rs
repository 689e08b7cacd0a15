use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::{candidate_sentences, SentenceRef};
use super::matcher::{match_rule, trigger_matches};
use super::{InvertedIndex, Rule, Tier};
use crate::document::Document;
use crate::error::Result;
use crate::ner::NerTagger;
use crate::pipeline::schema::EventType;

/// How a slot filler was obtained.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FillerKind {
    /// A typed entity mention.
    Entity(String),
    /// An NP chunk (back-off rules).
    Chunk,
    /// Read back from the JSON-lines event format, which records spans only.
    Unspecified,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotFill {
    pub start: usize,
    pub end: usize,
    pub kind: FillerKind,
}

/// One extracted event. Serializes to the event JSON-lines format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "EventRecord", from = "EventRecord")]
pub struct EventMention {
    pub doc_id: String,
    pub sentence_id: String,
    pub event_type: EventType,
    pub rule: String,
    pub tier: Tier,
    /// Trigger token span `[start, end)`.
    pub trigger: (usize, usize),
    /// Filled slots only; each list sorted and duplicate-free.
    pub slots: BTreeMap<String, Vec<SlotFill>>,
}

impl EventMention {
    pub fn is_filled(&self, slot: &str) -> bool {
        self.slots.get(slot).is_some_and(|f| !f.is_empty())
    }

    fn sort_key(&self) -> (&str, &str, &str, (usize, usize)) {
        (&self.doc_id, &self.sentence_id, &self.rule, self.trigger)
    }
}

#[derive(Serialize, Deserialize)]
struct EventRecord {
    doc_id: String,
    sentence_id: String,
    event_type: EventType,
    rule: String,
    tier: Tier,
    trigger: [usize; 2],
    slots: BTreeMap<String, Vec<[usize; 2]>>,
}

impl From<EventMention> for EventRecord {
    fn from(e: EventMention) -> Self {
        EventRecord {
            doc_id: e.doc_id,
            sentence_id: e.sentence_id,
            event_type: e.event_type,
            rule: e.rule,
            tier: e.tier,
            trigger: [e.trigger.0, e.trigger.1],
            slots: e
                .slots
                .into_iter()
                .map(|(k, v)| (k, v.into_iter().map(|f| [f.start, f.end]).collect()))
                .collect(),
        }
    }
}

impl From<EventRecord> for EventMention {
    fn from(r: EventRecord) -> Self {
        EventMention {
            doc_id: r.doc_id,
            sentence_id: r.sentence_id,
            event_type: r.event_type,
            rule: r.rule,
            tier: r.tier,
            trigger: (r.trigger[0], r.trigger[1]),
            slots: r
                .slots
                .into_iter()
                .map(|(k, v)| {
                    let fills = v
                        .into_iter()
                        .map(|[start, end]| SlotFill {
                            start,
                            end,
                            kind: FillerKind::Unspecified,
                        })
                        .collect();
                    (k, fills)
                })
                .collect(),
        }
    }
}

/// Run every rule over the corpus.
///
/// With an index, each rule only visits its candidate sentences;
/// without one, every sentence is scanned. Both routes produce the same
/// events. Within a sentence, a back-off event is dropped when a
/// high-tier event of the same type has the same trigger span. Output is
/// ordered by (doc id, sentence id, rule name, trigger).
pub fn extract_events(
    docs: &[Document],
    rules: &[Rule],
    index: Option<&InvertedIndex>,
    ner: &NerTagger,
) -> Result<Vec<EventMention>> {
    if rules.is_empty() {
        return Ok(Vec::new());
    }
    let work: Vec<(SentenceRef, Vec<usize>)> = match index {
        Some(index) => {
            index.check_corpus(docs)?;
            let mut by_sentence: BTreeMap<SentenceRef, Vec<usize>> = BTreeMap::new();
            for (ri, rule) in rules.iter().enumerate() {
                for at in candidate_sentences(index, rule) {
                    by_sentence.entry(at).or_default().push(ri);
                }
            }
            by_sentence.into_iter().collect()
        }
        None => {
            let all: Vec<usize> = (0..rules.len()).collect();
            docs.iter()
                .enumerate()
                .flat_map(|(di, d)| {
                    (0..d.sentences.len()).map(move |si| SentenceRef {
                        doc: di as u32,
                        sentence: si as u32,
                    })
                })
                .map(|at| (at, all.clone()))
                .collect()
        }
    };

    let mut events: Vec<EventMention> = work
        .par_iter()
        .flat_map_iter(|(at, rule_ids)| {
            let doc = &docs[at.doc as usize];
            let sentence = &doc.sentences[at.sentence as usize];
            let firing: Vec<&Rule> = rule_ids
                .iter()
                .map(|&ri| &rules[ri])
                .filter(|r| !trigger_matches(&r.trigger, sentence).is_empty())
                .collect();
            let mut found = Vec::new();
            if !firing.is_empty() {
                let mentions = ner.mentions(sentence);
                for rule in firing {
                    found.extend(match_rule(rule, &doc.id, sentence, &mentions));
                }
            }
            apply_tier_precedence(found)
        })
        .collect();
    events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.slots.cmp(&b.slots)));
    Ok(events)
}

/// Events of one sentence, with back-off events shadowed by a high-tier
/// event of the same type and trigger span removed.
fn apply_tier_precedence(events: Vec<EventMention>) -> Vec<EventMention> {
    let high: HashSet<(EventType, (usize, usize))> = events
        .iter()
        .filter(|e| e.tier == Tier::High)
        .map(|e| (e.event_type, e.trigger))
        .collect();
    events
        .into_iter()
        .filter(|e| e.tier == Tier::High || !high.contains(&(e.event_type, e.trigger)))
        .collect()
}

pub fn write_events_jsonl(events: &[EventMention]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::tests::{edge, tok};
    use crate::document::{Sentence, Split};
    use crate::ner::{compile_gazetteer, EntityType, GazetteerEntry};
    use crate::rules::{build_index, parse_rules};

    const RULES: &str = r#"
rule launch_high {
  event: LAUNCH
  tier: high
  trigger: [lemma=launch]
  slot SatelliteName required { path: >dobj  filler: entity(SPACECRAFT) }
}
rule launch_backoff {
  event: LAUNCH
  tier: backoff
  trigger: [lemma=launch]
  slot SatelliteName required { path: >dobj  filler: chunk }
}
"#;

    fn corpus() -> Vec<Document> {
        let s = |id: &str, sat: &str| Sentence {
            id: id.into(),
            tokens: vec![
                tok(0, "NASA", "NASA", "NNP"),
                tok(1, "launched", "launch", "VBD"),
                tok(2, sat, sat, "NNP"),
            ],
            edges: vec![
                edge(Some(1), 0, "nsubj"),
                edge(None, 1, "root"),
                edge(Some(1), 2, "dobj"),
            ],
        };
        vec![Document {
            id: "d".into(),
            source: None,
            collected_at: None,
            split: Split::Unassigned,
            sentences: vec![s("s1", "Telkom-3"), s("s2", "Widget")],
        }]
    }

    fn tagger() -> NerTagger {
        NerTagger::new(Some(
            compile_gazetteer(&[GazetteerEntry::new(EntityType::Spacecraft, "Telkom-3")]).unwrap(),
        ))
    }

    #[test]
    fn high_tier_shadows_backoff_on_same_trigger() {
        let docs = corpus();
        let rules = parse_rules(RULES).unwrap();
        let events = extract_events(&docs, &rules, None, &tagger()).unwrap();
        let summary: Vec<_> = events
            .iter()
            .map(|e| (e.sentence_id.as_str(), e.rule.as_str()))
            .collect();
        // s1: high fires and shadows backoff; s2: only the chunk rule fires.
        assert_eq!(summary, vec![("s1", "launch_high"), ("s2", "launch_backoff")]);
    }

    #[test]
    fn indexed_equals_scan() {
        let docs = corpus();
        let rules = parse_rules(RULES).unwrap();
        let idx = build_index(&docs);
        let a = extract_events(&docs, &rules, None, &tagger()).unwrap();
        let b = extract_events(&docs, &rules, Some(&idx), &tagger()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_ruleset() {
        assert!(extract_events(&corpus(), &[], None, &tagger()).unwrap().is_empty());
    }

    #[test]
    fn wire_format() {
        let docs = corpus();
        let rules = parse_rules(RULES).unwrap();
        let events = extract_events(&docs, &rules, None, &tagger()).unwrap();
        let text = write_events_jsonl(&events[..1]);
        assert_eq!(
            text,
            "{\"doc_id\":\"d\",\"sentence_id\":\"s1\",\"event_type\":\"LAUNCH\",\"rule\":\"launch_high\",\"tier\":\"high\",\"trigger\":[1,2],\"slots\":{\"SatelliteName\":[[2,3]]}}\n"
        );
        let back: EventMention = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(back.slots["SatelliteName"][0].kind, FillerKind::Unspecified);
        assert_eq!(serde_json::to_string(&back).unwrap(), text.trim());
    }
}

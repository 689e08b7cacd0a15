use std::collections::{BTreeMap, BTreeSet};

use super::extract::{EventMention, FillerKind, SlotFill};
use super::{DepPathStep, Direction, Filler, Rule, TokenPattern};
use crate::document::Sentence;
use crate::ner::Mention;

/// Adjacency view of a sentence's dependency edges.
pub(crate) struct DepGraph<'s> {
    sentence: &'s Sentence,
    /// Edge indices by head token.
    children: Vec<Vec<usize>>,
    /// Edge index by dependent token.
    parent: Vec<Option<usize>>,
}

impl<'s> DepGraph<'s> {
    pub(crate) fn new(sentence: &'s Sentence) -> Self {
        let n = sentence.len();
        let mut children = vec![Vec::new(); n];
        let mut parent = vec![None; n];
        for (ei, e) in sentence.edges.iter().enumerate() {
            if e.dependent >= n {
                continue;
            }
            if let Some(h) = e.head.filter(|&h| h < n) {
                children[h].push(ei);
                parent[e.dependent].get_or_insert(ei);
            }
        }
        Self {
            sentence,
            children,
            parent,
        }
    }

    fn step(
        &self,
        token: usize,
        came_from: Option<usize>,
        step: &DepPathStep,
        out: &mut BTreeSet<(usize, Option<usize>)>,
    ) {
        let edges = &self.sentence.edges;
        match step.direction {
            Direction::Outgoing => {
                for &ei in &self.children[token] {
                    let e = &edges[ei];
                    if Some(e.dependent) != came_from && step.accepts(&e.label) {
                        out.insert((e.dependent, Some(token)));
                    }
                }
            }
            Direction::Incoming => {
                if let Some(ei) = self.parent[token] {
                    let e = &edges[ei];
                    let head = e.head.expect("parent edges have heads");
                    if Some(head) != came_from && step.accepts(&e.label) {
                        out.insert((head, Some(token)));
                    }
                }
            }
        }
    }

    /// Frontier expansion along `path`. A walk never immediately
    /// re-traverses the edge it just arrived by, which on a tree means
    /// every walk is a simple path; the start token can only survive
    /// through skipped optional steps.
    pub(crate) fn traverse(&self, start: usize, path: &[DepPathStep]) -> BTreeSet<usize> {
        if start >= self.sentence.len() {
            return BTreeSet::new();
        }
        let mut frontier: BTreeSet<(usize, Option<usize>)> = BTreeSet::from([(start, None)]);
        for step in path {
            let mut next = BTreeSet::new();
            for &(token, came_from) in &frontier {
                self.step(token, came_from, step, &mut next);
            }
            if step.optional {
                next.extend(frontier.iter().copied());
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        frontier.into_iter().map(|(t, _)| t).collect()
    }

    /// The trigger token whose head lies outside the span (first one if
    /// several do).
    fn span_head(&self, start: usize, end: usize) -> usize {
        (start..end)
            .find(|&i| match self.parent[i] {
                None => true,
                Some(ei) => {
                    let h = self.sentence.edges[ei].head.expect("parent edges have heads");
                    h < start || h >= end
                }
            })
            .unwrap_or(start)
    }
}

/// Tokens reached from `start` by following `path`; see the rule-language
/// documentation for the step semantics.
pub fn traverse_path(sentence: &Sentence, start: usize, path: &[DepPathStep]) -> BTreeSet<usize> {
    DepGraph::new(sentence).traverse(start, path)
}

/// Start and end of every contiguous token run matching the trigger.
pub fn trigger_matches(trigger: &[TokenPattern], sentence: &Sentence) -> Vec<(usize, usize)> {
    let k = trigger.len();
    if k == 0 || sentence.len() < k {
        return Vec::new();
    }
    (0..=sentence.len() - k)
        .filter(|&i| {
            trigger
                .iter()
                .zip(&sentence.tokens[i..i + k])
                .all(|(p, t)| p.matches(t))
        })
        .map(|i| (i, i + k))
        .collect()
}

const NP_TAGS: &[&str] = &[
    "DT", "PDT", "JJ", "JJR", "JJS", "NN", "NNS", "NNP", "NNPS", "CD", "HYPH", "DET", "ADJ", "NOUN", "PROPN", "NUM",
];

fn chunk_label(tag: &str) -> Option<(bool, &str)> {
    if let Some(l) = tag.strip_prefix("B-") {
        Some((true, l))
    } else if let Some(l) = tag.strip_prefix("I-") {
        Some((false, l))
    } else if tag == "O" || tag.is_empty() {
        None
    } else {
        Some((true, tag))
    }
}

/// Maximal NP chunks as `[start, end)` spans.
///
/// Uses the sentence's chunk layer when any token carries one (`B-NP`
/// opens a chunk, `I-NP` continues it, an orphan `I-NP` opens one).
/// Otherwise chunks are maximal runs of determiner, adjective, noun,
/// number and hyphen tokens.
pub fn noun_phrase_chunks(sentence: &Sentence) -> Vec<(usize, usize)> {
    let mut chunks: Vec<(usize, usize)> = Vec::new();
    let has_layer = sentence.tokens.iter().any(|t| t.chunk.is_some());
    let mut open = false;
    for (i, tok) in sentence.tokens.iter().enumerate() {
        let (in_np, begins) = if has_layer {
            match tok.chunk.as_deref().and_then(chunk_label) {
                Some((begin, "NP")) => (true, begin),
                _ => (false, false),
            }
        } else {
            (NP_TAGS.contains(&tok.pos.as_str()), false)
        };
        if in_np {
            if open && !begins {
                chunks.last_mut().expect("open chunk").1 = i + 1;
            } else {
                chunks.push((i, i + 1));
            }
        }
        open = in_np;
    }
    chunks
}

/// Events produced by one rule on one sentence.
///
/// `mentions` is the merged NER layer for the sentence. Each trigger
/// match yields at most one event; it is dropped if a required slot has
/// no filler.
pub fn match_rule(rule: &Rule, doc_id: &str, sentence: &Sentence, mentions: &[Mention]) -> Vec<EventMention> {
    let matches = trigger_matches(&rule.trigger, sentence);
    if matches.is_empty() {
        return Vec::new();
    }
    let graph = DepGraph::new(sentence);
    let needs_chunks = rule.slots.iter().any(|s| s.filler == Filler::NpChunk);
    let chunks = if needs_chunks {
        noun_phrase_chunks(sentence)
    } else {
        Vec::new()
    };

    let mut events = Vec::new();
    'triggers: for (start, end) in matches {
        let anchor = graph.span_head(start, end);
        let mut slots = BTreeMap::new();
        for slot in &rule.slots {
            let targets = graph.traverse(anchor, &slot.path);
            let mut fills: BTreeSet<SlotFill> = BTreeSet::new();
            for t in targets {
                match &slot.filler {
                    Filler::EntityTypes(types) => {
                        if let Some(m) = mentions.iter().find(|m| m.contains(t)) {
                            if types.contains(&m.entity_type) {
                                fills.insert(SlotFill {
                                    start: m.start,
                                    end: m.end,
                                    kind: FillerKind::Entity(m.entity_type.clone()),
                                });
                            }
                        }
                    }
                    Filler::NpChunk => {
                        if let Some(&(s, e)) = chunks.iter().find(|(s, e)| *s <= t && t < *e) {
                            fills.insert(SlotFill {
                                start: s,
                                end: e,
                                kind: FillerKind::Chunk,
                            });
                        }
                    }
                }
            }
            if fills.is_empty() {
                if slot.required {
                    continue 'triggers;
                }
                continue;
            }
            slots.insert(slot.slot.clone(), fills.into_iter().collect());
        }
        events.push(EventMention {
            doc_id: doc_id.to_string(),
            sentence_id: sentence.id.clone(),
            event_type: rule.event_type,
            rule: rule.name.clone(),
            tier: rule.tier,
            trigger: (start, end),
            slots,
        });
    }
    events
}

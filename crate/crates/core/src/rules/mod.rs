//! Trigger-plus-dependency-path extraction rules.
//!
//! A rule anchors on a contiguous trigger (one token pattern per token)
//! and fills each slot by walking labeled dependency edges away from the
//! trigger's syntactic head. Path targets expand to the whole entity
//! mention or NP chunk that contains them.
//!
//! ```text
//! rule launch_dobj {
//!   event: LAUNCH
//!   tier: high
//!   trigger: [lemma=launch & pos=VBD|VBN]
//!   slot SatelliteName required {
//!     path: >dobj
//!     filler: entity(SPACECRAFT)
//!   }
//!   slot LaunchSite optional {
//!     path: >nmod|obl >case?
//!     filler: entity(LAUNCH_SITE)
//!   }
//! }
//! ```

mod extract;
mod index;
mod matcher;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::document::Token;
use crate::pipeline::schema::EventType;

pub use extract::{extract_events, write_events_jsonl, EventMention, FillerKind, SlotFill};
pub use index::{build_index, candidate_sentences, InvertedIndex, SentenceRef, INDEX_FORMAT_VERSION};
pub use matcher::{match_rule, noun_phrase_chunks, traverse_path, trigger_matches};
pub use parser::parse_rules;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Surface,
    Lemma,
    Pos,
    Ner,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Surface => "surface",
            Field::Lemma => "lemma",
            Field::Pos => "pos",
            Field::Ner => "ner",
        }
    }

    /// Surface and lemma atoms map onto index terms.
    pub fn is_indexed(self) -> bool {
        matches!(self, Field::Surface | Field::Lemma)
    }
}

/// `field=v1|v2`, optionally negated. Surface and lemma values are stored
/// lowercased and compared case-insensitively; POS and NER are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub field: Field,
    pub values: Vec<String>,
    pub negated: bool,
}

impl Atom {
    pub fn matches(&self, token: &Token) -> bool {
        let hit = match self.field {
            Field::Surface => self.values.iter().any(|v| eq_folded(&token.surface, v)),
            Field::Lemma => self.values.iter().any(|v| eq_folded(&token.lemma, v)),
            Field::Pos => self.values.contains(&token.pos),
            Field::Ner => token
                .generic_ner
                .as_deref()
                .is_some_and(|n| self.values.iter().any(|v| v == n)),
        };
        hit != self.negated
    }
}

/// Compare `text` against an already-lowercased literal.
pub(crate) fn eq_folded(text: &str, lowered: &str) -> bool {
    if text.is_ascii() {
        text.eq_ignore_ascii_case(lowered)
    } else {
        text.to_lowercase() == lowered
    }
}

/// A single-token constraint in disjunctive normal form: the token
/// matches if every atom of at least one alternative matches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenPattern {
    pub alternatives: Vec<Vec<Atom>>,
}

impl TokenPattern {
    pub fn matches(&self, token: &Token) -> bool {
        self.alternatives
            .iter()
            .any(|conj| conj.iter().all(|a| a.matches(token)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Head to dependent (`>label`).
    Outgoing,
    /// Dependent to head (`<label`).
    Incoming,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepPathStep {
    pub direction: Direction,
    pub labels: Vec<String>,
    pub optional: bool,
}

impl DepPathStep {
    pub fn accepts(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filler {
    EntityTypes(BTreeSet<String>),
    NpChunk,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPattern {
    pub slot: String,
    pub path: Vec<DepPathStep>,
    pub filler: Filler,
    pub required: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    High,
    Backoff,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::High => "high",
            Tier::Backoff => "backoff",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub event_type: EventType,
    pub tier: Tier,
    /// One pattern per contiguous trigger token.
    pub trigger: Vec<TokenPattern>,
    pub slots: Vec<SlotPattern>,
}

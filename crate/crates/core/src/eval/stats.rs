use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::SpanRecord;
use crate::document::Split;
use crate::error::{Error, Result};
use crate::pipeline::schema::EventType;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StatsRow {
    pub sentences: usize,
    /// Tokens under at least one span (B or I in BIO terms).
    pub tagged_tokens: usize,
    pub total_tokens: usize,
}

impl std::ops::AddAssign for StatsRow {
    fn add_assign(&mut self, o: StatsRow) {
        self.sentences += o.sentences;
        self.tagged_tokens += o.tagged_tokens;
        self.total_tokens += o.total_tokens;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub rows: BTreeMap<(EventType, Split), StatsRow>,
    /// Sentence ids counted once however many event types annotate them.
    pub distinct_sentences: usize,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    event_type: &'a str,
    split: &'a str,
    #[serde(flatten)]
    row: StatsRow,
}

impl CorpusStats {
    pub fn get(&self, event: EventType, split: Split) -> StatsRow {
        self.rows.get(&(event, split)).copied().unwrap_or_default()
    }

    pub fn event_total(&self, event: EventType) -> StatsRow {
        let mut t = StatsRow::default();
        for ((e, _), r) in &self.rows {
            if *e == event {
                t += *r;
            }
        }
        t
    }

    /// Sum over all rows; a sentence annotated for two event types counts twice.
    pub fn total(&self) -> StatsRow {
        let mut t = StatsRow::default();
        for r in self.rows.values() {
            t += *r;
        }
        t
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<16} {:<10} {:>9} {:>8} {:>8}",
            "Event", "Split", "Sentences", "Tagged", "Total"
        )
        .unwrap();
        for ((e, s), r) in &self.rows {
            writeln!(
                out,
                "{:<16} {:<10} {:>9} {:>8} {:>8}",
                e.title(),
                s.as_str(),
                r.sentences,
                r.tagged_tokens,
                r.total_tokens
            )
            .unwrap();
        }
        let t = self.total();
        writeln!(
            out,
            "{:<16} {:<10} {:>9} {:>8} {:>8}",
            "Total", "", t.sentences, t.tagged_tokens, t.total_tokens
        )
        .unwrap();
        writeln!(out, "Distinct sentences: {}", self.distinct_sentences).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<JsonRow<'_>> = self
            .rows
            .iter()
            .map(|((e, s), r)| JsonRow {
                event_type: e.as_str(),
                split: s.as_str(),
                row: *r,
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("stats serialize") + "\n"
    }
}

struct Merged<'a> {
    length: usize,
    split: Split,
    covered: BTreeSet<usize>,
    first: &'a SpanRecord,
}

/// Sentence and token counts per (event type, split).
///
/// Records need `tokens`; a missing `split` counts as unassigned.
/// Repeated records for one (sentence, event type) are merged.
pub fn corpus_stats(records: &[SpanRecord]) -> Result<CorpusStats> {
    let mut merged: BTreeMap<(&str, EventType), Merged<'_>> = BTreeMap::new();
    for r in records {
        let length = r
            .tokens
            .as_ref()
            .ok_or_else(|| Error::invalid(format!("record {}/{} has no token count", r.sentence_id, r.event_type)))?
            .len();
        let split = r.split.unwrap_or_default();
        let m = merged.entry(r.key()).or_insert_with(|| Merged {
            length,
            split,
            covered: BTreeSet::new(),
            first: r,
        });
        if m.length != length || m.split != split {
            return Err(Error::invalid(format!(
                "records for {}/{} disagree on length or split ({} {} vs {} {})",
                r.sentence_id,
                r.event_type,
                m.first.tokens.as_ref().map_or(0, |t| t.len()),
                m.split,
                length,
                split
            )));
        }
        for s in &r.spans {
            if s.end > length || s.is_empty() {
                return Err(Error::invalid(format!(
                    "{}/{}: span {s} out of range",
                    r.sentence_id, r.event_type
                )));
            }
            m.covered.extend(s.start..s.end);
        }
    }

    let mut stats = CorpusStats {
        distinct_sentences: merged.keys().map(|(sid, _)| *sid).collect::<BTreeSet<_>>().len(),
        ..CorpusStats::default()
    };
    for ((_, event), m) in merged {
        let row = stats.rows.entry((event, m.split)).or_default();
        row.sentences += 1;
        row.tagged_tokens += m.covered.len();
        row.total_tokens += m.length;
    }
    Ok(stats)
}

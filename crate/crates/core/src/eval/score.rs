use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::AddAssign;

use serde::Serialize;

use super::{span_sets, SpanRecord};
use crate::error::{Error, Result};
use crate::pipeline::schema::{EventType, GENERIC_SLOTS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

impl Counts {
    /// Percent; 0 when nothing was predicted.
    pub fn precision(&self) -> f64 {
        percent(self.tp, self.tp + self.fp)
    }

    /// Percent; 0 when there is no gold.
    pub fn recall(&self) -> f64 {
        percent(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        // 2PR/(P+R) reduces to 2TP/(2TP+FP+FN) on counts.
        percent(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }

    pub fn n_gold(&self) -> usize {
        self.tp + self.fn_
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlotScore {
    /// Event type name, or [`MICRO_LABEL`] for pooled generic rows.
    pub event: String,
    pub slot: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub n_gold: usize,
    pub counts: Counts,
}

pub const MICRO_LABEL: &str = "ALL";

impl SlotScore {
    fn new(event: &str, slot: &str, counts: Counts) -> Self {
        SlotScore {
            event: event.to_string(),
            slot: slot.to_string(),
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            n_gold: counts.n_gold(),
            counts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    /// Every schema slot of every event type, in schema order.
    pub slots: Vec<SlotScore>,
    /// Generic slots pooled across event types.
    pub micro: Vec<SlotScore>,
}

impl EvalReport {
    pub fn get(&self, event: EventType, slot: &str) -> Option<&SlotScore> {
        self.slots.iter().find(|s| s.event == event.as_str() && s.slot == slot)
    }

    pub fn micro(&self, slot: &str) -> Option<&SlotScore> {
        self.micro.iter().find(|s| s.slot == slot)
    }

    /// Plain-text table with integer percentages. Event-specific slots
    /// are listed per event; generic slots appear once, pooled.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<16} {:<14} {:>4} {:>4} {:>4} {:>6}",
            "Event", "Slot", "Pr", "Re", "F1", "N"
        )
        .unwrap();
        let row = |out: &mut String, event: &str, s: &SlotScore| {
            writeln!(
                out,
                "{:<16} {:<14} {:>4.0} {:>4.0} {:>4.0} {:>6}",
                event, s.slot, s.precision, s.recall, s.f1, s.n_gold
            )
            .unwrap();
        };
        for t in EventType::ALL {
            for s in self
                .slots
                .iter()
                .filter(|s| s.event == t.as_str() && !GENERIC_SLOTS.contains(&s.slot.as_str()))
            {
                row(&mut out, t.title(), s);
            }
        }
        for s in &self.micro {
            row(&mut out, "All events", s);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub type SlotCounts = BTreeMap<(EventType, String), Counts>;

/// Exact (start, end, label) matching per sentence and event type.
///
/// Gold and prediction must cover the same (sentence, event type)
/// records; labels must be slots of the record's event schema.
pub fn score_slots(gold: &[SpanRecord], pred: &[SpanRecord]) -> Result<EvalReport> {
    let counts = slot_counts(gold, pred)?;
    let mut slots = Vec::new();
    for t in EventType::ALL {
        for name in t.schema().slot_names() {
            let c = counts.get(&(t, name.to_string())).copied().unwrap_or_default();
            slots.push(SlotScore::new(t.as_str(), name, c));
        }
    }
    Ok(EvalReport {
        slots,
        micro: micro_average(&counts, &GENERIC_SLOTS),
    })
}

pub fn slot_counts(gold: &[SpanRecord], pred: &[SpanRecord]) -> Result<SlotCounts> {
    let g = span_sets(gold);
    let p = span_sets(pred);
    let missing_pred: Vec<String> = g
        .keys()
        .filter(|k| !p.contains_key(*k))
        .map(|(s, t)| format!("{s}/{t}"))
        .collect();
    let missing_gold: Vec<String> = p
        .keys()
        .filter(|k| !g.contains_key(*k))
        .map(|(s, t)| format!("{s}/{t}"))
        .collect();
    if !missing_pred.is_empty() || !missing_gold.is_empty() {
        return Err(Error::invalid(format!(
            "gold and prediction cover different sentences; missing from prediction: [{}]; missing from gold: [{}]",
            missing_pred.join(", "),
            missing_gold.join(", ")
        )));
    }
    for (side, sets) in [("gold", &g), ("prediction", &p)] {
        for ((sid, t), spans) in sets {
            if let Some(bad) = spans.iter().find(|s| !t.schema().has_slot(&s.label)) {
                return Err(Error::invalid(format!(
                    "{side} {sid}/{t}: {} is not a {t} slot",
                    bad.label
                )));
            }
        }
    }

    let mut counts = SlotCounts::new();
    for (key, gs) in &g {
        let ps = &p[key];
        for s in gs.intersection(ps) {
            counts.entry((key.1, s.label.clone())).or_default().tp += 1;
        }
        for s in gs.difference(ps) {
            counts.entry((key.1, s.label.clone())).or_default().fn_ += 1;
        }
        for s in ps.difference(gs) {
            counts.entry((key.1, s.label.clone())).or_default().fp += 1;
        }
    }
    Ok(counts)
}

/// Pool TP/FP/FN of each slot across event types, then score.
pub fn micro_average(counts: &SlotCounts, slots: &[&str]) -> Vec<SlotScore> {
    let wanted: BTreeSet<&str> = slots.iter().copied().collect();
    let mut pooled: BTreeMap<&str, Counts> = slots.iter().map(|s| (*s, Counts::default())).collect();
    for ((_, slot), c) in counts {
        if wanted.contains(slot.as_str()) {
            *pooled.get_mut(slot.as_str()).expect("wanted slot") += *c;
        }
    }
    slots
        .iter()
        .map(|s| SlotScore::new(MICRO_LABEL, s, pooled[s]))
        .collect()
}

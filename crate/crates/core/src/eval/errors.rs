use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::{span_sets, LabeledSpan, SpanRecord};
use crate::pipeline::schema::EventType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorBucket {
    Exact,
    /// Same label, overlapping but different boundaries.
    SpanError,
    /// Overlaps gold only under a different label.
    LabelConfusion,
    /// Overlaps no gold span.
    Spurious,
    /// Gold span overlapped by no prediction.
    Missed,
}

impl ErrorBucket {
    pub const ALL: [ErrorBucket; 5] = [
        ErrorBucket::Exact,
        ErrorBucket::SpanError,
        ErrorBucket::LabelConfusion,
        ErrorBucket::Spurious,
        ErrorBucket::Missed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorBucket::Exact => "exact",
            ErrorBucket::SpanError => "span_error",
            ErrorBucket::LabelConfusion => "label_confusion",
            ErrorBucket::Spurious => "spurious",
            ErrorBucket::Missed => "missed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorCase {
    pub sentence_id: String,
    pub event_type: EventType,
    pub bucket: ErrorBucket,
    /// The gold span the prediction was compared with, if any.
    pub gold: Option<LabeledSpan>,
    pub pred: Option<LabeledSpan>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErrorReport {
    pub cases: Vec<ErrorCase>,
}

impl ErrorReport {
    pub fn count(&self, bucket: ErrorBucket) -> usize {
        self.cases.iter().filter(|c| c.bucket == bucket).count()
    }

    /// Number of non-exact cases.
    pub fn error_count(&self) -> usize {
        self.cases.iter().filter(|c| c.bucket != ErrorBucket::Exact).count()
    }

    /// Share of all errors (exact matches excluded); 0 for `Exact`.
    pub fn proportion(&self, bucket: ErrorBucket) -> f64 {
        let total = self.error_count();
        if bucket == ErrorBucket::Exact || total == 0 {
            0.0
        } else {
            self.count(bucket) as f64 / total as f64
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:<16} {:>6} {:>7}", "Bucket", "Count", "Share").unwrap();
        for b in ErrorBucket::ALL {
            let share = if b == ErrorBucket::Exact {
                "-".to_string()
            } else {
                format!("{:.1}%", 100.0 * self.proportion(b))
            };
            writeln!(out, "{:<16} {:>6} {:>7}", b.as_str(), self.count(b), share).unwrap();
        }
        out
    }

    pub fn cases_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&serde_json::to_string(c).expect("cases serialize"));
            out.push('\n');
        }
        out
    }
}

/// Sort each predicted span into exact, span error, label confusion or
/// spurious, and each gold span no prediction touches into missed.
///
/// A prediction overlapping several gold spans is compared with the one
/// that best explains it: same label first, then largest overlap, then
/// leftmost. Keys present on only one side are treated as empty there.
pub fn classify_errors(gold: &[SpanRecord], pred: &[SpanRecord]) -> ErrorReport {
    let g = span_sets(gold);
    let p = span_sets(pred);
    let keys: BTreeSet<_> = g.keys().chain(p.keys()).copied().collect();
    let empty = BTreeSet::new();
    let mut cases = Vec::new();
    for key in keys {
        let gs = g.get(&key).unwrap_or(&empty);
        let ps = p.get(&key).unwrap_or(&empty);
        let case = |bucket, gold: Option<&LabeledSpan>, pred: Option<&LabeledSpan>| ErrorCase {
            sentence_id: key.0.to_string(),
            event_type: key.1,
            bucket,
            gold: gold.cloned(),
            pred: pred.cloned(),
        };
        for s in ps {
            if gs.contains(s) {
                cases.push(case(ErrorBucket::Exact, Some(s), Some(s)));
                continue;
            }
            let best = gs
                .iter()
                .filter(|g| g.overlaps(s))
                .min_by_key(|g| (g.label != s.label, std::cmp::Reverse(overlap(g, s)), g.start));
            let bucket = match best {
                None => ErrorBucket::Spurious,
                Some(g) if g.label == s.label => ErrorBucket::SpanError,
                Some(_) => ErrorBucket::LabelConfusion,
            };
            cases.push(case(bucket, best.copied(), Some(s)));
        }
        for g in gs {
            if !ps.iter().any(|s| s.overlaps(g)) {
                cases.push(case(ErrorBucket::Missed, Some(g), None));
            }
        }
    }
    ErrorReport { cases }
}

fn overlap(a: &LabeledSpan, b: &LabeledSpan) -> usize {
    a.end.min(b.end).saturating_sub(a.start.max(b.start))
}

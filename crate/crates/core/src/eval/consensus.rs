use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::score::Counts;
use super::{find_overlap, LabeledSpan};
use crate::error::{Error, Result};

/// One annotator's spans, keyed by sentence id.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AnnotationLayer {
    pub annotator_id: String,
    pub sentences: BTreeMap<String, Vec<LabeledSpan>>,
}

impl AnnotationLayer {
    pub fn new(annotator_id: impl Into<String>, sentences: BTreeMap<String, Vec<LabeledSpan>>) -> Result<Self> {
        let annotator_id = annotator_id.into();
        for (sid, spans) in &sentences {
            if let Some((a, b)) = find_overlap(spans) {
                return Err(Error::invalid(format!(
                    "annotator {annotator_id}, sentence {sid}: overlapping spans {a} and {b}"
                )));
            }
        }
        Ok(AnnotationLayer {
            annotator_id,
            sentences,
        })
    }

    fn span_set(&self) -> BTreeSet<(&str, &LabeledSpan)> {
        self.sentences
            .iter()
            .flat_map(|(sid, spans)| spans.iter().map(move |s| (sid.as_str(), s)))
            .collect()
    }
}

/// Strict-majority consensus over k ≥ 2 layers.
///
/// Majority spans that overlap are resolved greedily: more votes first,
/// then the longer span, then the leftmost.
pub fn consensus(layers: &[AnnotationLayer]) -> Result<BTreeMap<String, Vec<LabeledSpan>>> {
    let k = layers.len();
    if k < 2 {
        return Err(Error::invalid(format!("consensus needs at least two layers, got {k}")));
    }
    let mut votes: BTreeMap<(&str, &LabeledSpan), usize> = BTreeMap::new();
    for layer in layers {
        for key in layer.span_set() {
            *votes.entry(key).or_default() += 1;
        }
    }
    let mut majority: Vec<((&str, &LabeledSpan), usize)> = votes.into_iter().filter(|(_, v)| 2 * v > k).collect();
    majority
        .sort_by(|((sa, a), va), ((sb, b), vb)| sa.cmp(sb).then(vb.cmp(va)).then(b.len().cmp(&a.len())).then(a.cmp(b)));

    let mut out: BTreeMap<String, Vec<LabeledSpan>> = BTreeMap::new();
    for layer in layers {
        for sid in layer.sentences.keys() {
            out.entry(sid.clone()).or_default();
        }
    }
    for ((sid, span), _) in majority {
        let kept = out.get_mut(sid).expect("sentence registered");
        if kept.iter().all(|s| !s.overlaps(span)) {
            kept.push(span.clone());
        }
    }
    for spans in out.values_mut() {
        spans.sort();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Agreement {
    pub precision: f64,
    pub recall: f64,
    pub counts: Counts,
}

/// Exact-match precision and recall (percent) of a layer against the consensus.
pub fn agreement(layer: &AnnotationLayer, consensus: &BTreeMap<String, Vec<LabeledSpan>>) -> Agreement {
    let mine = layer.span_set();
    let gold: BTreeSet<(&str, &LabeledSpan)> = consensus
        .iter()
        .flat_map(|(sid, spans)| spans.iter().map(move |s| (sid.as_str(), s)))
        .collect();
    let tp = mine.intersection(&gold).count();
    let counts = Counts {
        tp,
        fp: mine.len() - tp,
        fn_: gold.len() - tp,
    };
    Agreement {
        precision: counts.precision(),
        recall: counts.recall(),
        counts,
    }
}

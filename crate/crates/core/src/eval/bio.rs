use std::fmt;
use std::str::FromStr;

use super::{find_overlap, LabeledSpan};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BioTag {
    O,
    B(String),
    I(String),
}

impl BioTag {
    pub fn label(&self) -> Option<&str> {
        match self {
            BioTag::O => None,
            BioTag::B(l) | BioTag::I(l) => Some(l),
        }
    }
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioTag::O => f.write_str("O"),
            BioTag::B(l) => write!(f, "B-{l}"),
            BioTag::I(l) => write!(f, "I-{l}"),
        }
    }
}

impl FromStr for BioTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('-') {
            _ if s == "O" => Ok(BioTag::O),
            Some(("B", l)) if !l.is_empty() => Ok(BioTag::B(l.to_string())),
            Some(("I", l)) if !l.is_empty() => Ok(BioTag::I(l.to_string())),
            _ => Err(Error::invalid(format!("bad BIO tag {s:?}"))),
        }
    }
}

pub fn spans_to_bio(sentence_length: usize, spans: &[LabeledSpan]) -> Result<Vec<BioTag>> {
    if let Some(s) = spans.iter().find(|s| s.is_empty() || s.end > sentence_length) {
        return Err(Error::invalid(format!(
            "span {s} out of range for a sentence of {sentence_length} tokens"
        )));
    }
    if let Some((a, b)) = find_overlap(spans) {
        return Err(Error::invalid(format!("overlapping spans {a} and {b}")));
    }
    let mut tags = vec![BioTag::O; sentence_length];
    for s in spans {
        tags[s.start] = BioTag::B(s.label.clone());
        for t in &mut tags[s.start + 1..s.end] {
            *t = BioTag::I(s.label.clone());
        }
    }
    Ok(tags)
}

/// Decode maximal runs. An `I-X` that does not continue an `X` span
/// opens a new span, as if it were `B-X`.
pub fn bio_to_spans(tags: &[BioTag]) -> Vec<LabeledSpan> {
    let mut spans: Vec<LabeledSpan> = Vec::new();
    let mut open = false;
    for (i, tag) in tags.iter().enumerate() {
        match tag {
            BioTag::O => open = false,
            BioTag::I(l) if open && spans.last().is_some_and(|s| &s.label == l) => {
                spans.last_mut().expect("open span").end = i + 1;
            }
            BioTag::B(l) | BioTag::I(l) => {
                spans.push(LabeledSpan::new(i, i + 1, l.clone()));
                open = true;
            }
        }
    }
    spans
}

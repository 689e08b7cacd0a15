//! Dependency-parsed documents: the substrate every other module reads.
//!
//! Documents are produced upstream (tagging, lemmatization, parsing) and
//! loaded here from CoNLL-U or JSON lines. Loading validates that every
//! sentence's edges form a tree and normalizes edge order so that
//! `edges[i].dependent == i`.

mod conllu;
mod jsonl;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use conllu::{parse_conllu, write_conllu};
pub use jsonl::{parse_jsonl_documents, write_jsonl_documents};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub pos: String,
    /// Per-token generic entity label (DATE, ORGANIZATION, ...).
    pub generic_ner: Option<String>,
    /// BIO-style chunk tag such as `B-NP`.
    pub chunk: Option<String>,
}

/// A labeled dependency. `head == None` is the ROOT attachment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepEdge {
    pub head: Option<usize>,
    pub dependent: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
    pub edges: Vec<DepEdge>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
    Unseen,
    #[default]
    Unassigned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub source: Option<String>,
    /// ISO-8601 date text; compared lexicographically.
    pub collected_at: Option<String>,
    pub split: Split,
    pub sentences: Vec<Sentence>,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
            Split::Unseen => "unseen",
            Split::Unassigned => "unassigned",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            "unseen" => Ok(Split::Unseen),
            "unassigned" => Ok(Split::Unassigned),
            other => Err(Error::invalid(format!("unknown split `{other}`"))),
        }
    }
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Surface forms joined by single spaces.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&t.surface);
        }
        out
    }

    /// Head of token `i`, if `edges` is normalized (one edge per token, in
    /// dependent order).
    pub fn head_of(&self, i: usize) -> Option<usize> {
        self.edges.get(i).and_then(|e| e.head)
    }

    /// Sort edges by dependent, the order every loader produces.
    pub(crate) fn normalize_edges(&mut self) {
        self.edges.sort_by_key(|e| e.dependent);
    }

    /// Every tree-property violation in this sentence. Empty iff the
    /// token indices are dense and the edges form a single rooted tree.
    pub fn tree_problems(&self) -> Vec<(IssueKind, String)> {
        let n = self.tokens.len();
        let mut problems = Vec::new();
        for (pos, tok) in self.tokens.iter().enumerate() {
            if tok.index != pos {
                problems.push((
                    IssueKind::IndexGap,
                    format!("token at position {pos} has index {}", tok.index),
                ));
            }
            if tok.surface.is_empty() {
                problems.push((IssueKind::EmptySurface, format!("token {pos} has empty surface")));
            }
        }

        let mut heads_per_token = vec![0usize; n];
        let mut roots = 0usize;
        let mut in_range = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let head_ok = e.head.is_none_or(|h| h < n);
            if e.dependent >= n || !head_ok {
                problems.push((
                    IssueKind::OutOfRange,
                    format!(
                        "edge {}->{} ({}) out of range for {n} tokens",
                        e.head.map_or("ROOT".to_string(), |h| h.to_string()),
                        e.dependent,
                        e.label
                    ),
                ));
                continue;
            }
            heads_per_token[e.dependent] += 1;
            if e.head.is_none() {
                roots += 1;
            }
            in_range.push(e);
        }
        for (i, count) in heads_per_token.iter().enumerate() {
            match count {
                0 => problems.push((IssueKind::OrphanToken, format!("token {i} has no head"))),
                1 => {}
                c => problems.push((IssueKind::MultipleHeads, format!("token {i} has {c} heads"))),
            }
        }
        if n > 0 && roots != 1 {
            problems.push((IssueKind::RootCount, format!("{roots} root edges, expected 1")));
        }

        let mut sets = DisjointSets::new(n);
        for e in in_range {
            if let Some(h) = e.head {
                if !sets.union(h, e.dependent) {
                    problems.push((
                        IssueKind::Cycle,
                        format!("edge {h}->{} ({}) closes a cycle", e.dependent, e.label),
                    ));
                }
            }
        }
        problems
    }

    pub(crate) fn check_tree(&self) -> Result<()> {
        match self.tree_problems().into_iter().next() {
            None => Ok(()),
            Some((_, message)) => Err(Error::Structure {
                sentence_id: self.id.clone(),
                message,
            }),
        }
    }
}

/// Minimal union-find with path halving.
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IssueKind {
    DuplicateDocument,
    DuplicateSentence,
    IndexGap,
    EmptySurface,
    OutOfRange,
    OrphanToken,
    MultipleHeads,
    RootCount,
    Cycle,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IssueKind::DuplicateDocument => "duplicate-document",
            IssueKind::DuplicateSentence => "duplicate-sentence",
            IssueKind::IndexGap => "index-gap",
            IssueKind::EmptySurface => "empty-surface",
            IssueKind::OutOfRange => "out-of-range",
            IssueKind::OrphanToken => "orphan-token",
            IssueKind::MultipleHeads => "multiple-heads",
            IssueKind::RootCount => "root-count",
            IssueKind::Cycle => "cycle",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub doc_id: String,
    pub sentence_id: Option<String>,
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.sentence_id {
            Some(s) => write!(f, "{}/{}: {}: {}", self.doc_id, s, self.kind, self.message),
            None => write!(f, "{}: {}: {}", self.doc_id, self.kind, self.message),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Report every invariant violation in a corpus without modifying it.
pub fn validate_corpus(docs: &[Document]) -> ValidationReport {
    let mut issues = Vec::new();
    let mut doc_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for d in docs {
        *doc_counts.entry(d.id.as_str()).or_default() += 1;
    }
    for (id, count) in &doc_counts {
        if *count > 1 {
            issues.push(Issue {
                doc_id: id.to_string(),
                sentence_id: None,
                kind: IssueKind::DuplicateDocument,
                message: format!("document id `{id}` used {count} times"),
            });
        }
    }
    for d in docs {
        let mut seen = HashSet::new();
        for s in &d.sentences {
            if !seen.insert(s.id.as_str()) {
                issues.push(Issue {
                    doc_id: d.id.clone(),
                    sentence_id: Some(s.id.clone()),
                    kind: IssueKind::DuplicateSentence,
                    message: format!("sentence id `{}` repeated", s.id),
                });
            }
            for (kind, message) in s.tree_problems() {
                issues.push(Issue {
                    doc_id: d.id.clone(),
                    sentence_id: Some(s.id.clone()),
                    kind,
                    message,
                });
            }
        }
    }
    ValidationReport { issues }
}

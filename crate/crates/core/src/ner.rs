//! Gazetteer tagging of domain entities and its merge with generic NER.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::document::Sentence;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Spacecraft,
    LaunchVehicle,
    LaunchSite,
    Organization,
}

impl EntityType {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Spacecraft => "SPACECRAFT",
            EntityType::LaunchVehicle => "LAUNCH_VEHICLE",
            EntityType::LaunchSite => "LAUNCH_SITE",
            EntityType::Organization => "ORGANIZATION",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SPACECRAFT" => Ok(EntityType::Spacecraft),
            "LAUNCH_VEHICLE" => Ok(EntityType::LaunchVehicle),
            "LAUNCH_SITE" => Ok(EntityType::LaunchSite),
            "ORGANIZATION" => Ok(EntityType::Organization),
            other => Err(Error::Gazetteer(format!("unknown entity type `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GazetteerEntry {
    pub entity_type: EntityType,
    pub canonical: String,
    pub alternates: Vec<String>,
}

impl GazetteerEntry {
    pub fn new(entity_type: EntityType, canonical: impl Into<String>) -> Self {
        Self {
            entity_type,
            canonical: canonical.into(),
            alternates: Vec::new(),
        }
    }

    pub fn with_alternates<I, S>(mut self, alternates: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.alternates = alternates.into_iter().map(Into::into).collect();
        self
    }
}

/// Read a gazetteer TSV: `type<TAB>canonical[<TAB>alt1|alt2|...]`.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_gazetteer_tsv<R: BufRead>(input: R) -> Result<Vec<GazetteerEntry>> {
    let mut entries = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').collect();
        if !(2..=3).contains(&cols.len()) {
            return Err(Error::Gazetteer(format!(
                "line {line_no}: expected 2 or 3 tab-separated columns, found {}",
                cols.len()
            )));
        }
        let entity_type: EntityType = cols[0]
            .trim()
            .parse()
            .map_err(|e: Error| Error::Gazetteer(format!("line {line_no}: {e}")))?;
        let canonical = cols[1].trim().to_string();
        if canonical.is_empty() {
            return Err(Error::Gazetteer(format!("line {line_no}: empty canonical name")));
        }
        let mut alternates = Vec::new();
        if let Some(alts) = cols.get(2) {
            for alt in alts.split('|').map(str::trim).filter(|a| !a.is_empty()) {
                if alt == canonical {
                    return Err(Error::Gazetteer(format!(
                        "line {line_no}: alternate `{alt}` repeats the canonical name"
                    )));
                }
                alternates.push(alt.to_string());
            }
        }
        entries.push(GazetteerEntry {
            entity_type,
            canonical,
            alternates,
        });
    }
    Ok(entries)
}

/// All-uppercase acronyms of at most five characters match case-sensitively.
fn is_acronym(form: &str) -> bool {
    form.chars().count() <= 5
        && form.chars().any(char::is_alphabetic)
        && form.chars().all(|c| !c.is_whitespace() && !c.is_lowercase())
}

#[derive(Debug)]
struct Terminal {
    entity_type: EntityType,
    /// Exact token surfaces, checked only for case-sensitive forms.
    exact: Option<Vec<String>>,
}

#[derive(Debug, Default)]
struct TrieNode {
    children: HashMap<String, usize>,
    terminals: Vec<Terminal>,
}

/// Token-level trie over lowercased gazetteer forms.
#[derive(Debug)]
pub struct GazetteerMatcher {
    nodes: Vec<TrieNode>,
    forms: usize,
}

/// Compile entries into a leftmost-longest matcher.
///
/// Forms are split on whitespace. When two entries share a form the one
/// listed first wins.
pub fn compile_gazetteer(entries: &[GazetteerEntry]) -> Result<GazetteerMatcher> {
    if entries.is_empty() {
        return Err(Error::Gazetteer("no gazetteer entries".into()));
    }
    let mut matcher = GazetteerMatcher {
        nodes: vec![TrieNode::default()],
        forms: 0,
    };
    for entry in entries {
        for form in std::iter::once(&entry.canonical).chain(&entry.alternates) {
            let tokens: Vec<&str> = form.split_whitespace().collect();
            if tokens.is_empty() {
                return Err(Error::Gazetteer(format!(
                    "{} entry `{form}` has no tokens",
                    entry.entity_type
                )));
            }
            let mut node = 0;
            for tok in &tokens {
                let key = tok.to_lowercase();
                node = match matcher.nodes[node].children.get(&key) {
                    Some(&next) => next,
                    None => {
                        matcher.nodes.push(TrieNode::default());
                        let next = matcher.nodes.len() - 1;
                        matcher.nodes[node].children.insert(key, next);
                        next
                    }
                };
            }
            let exact = is_acronym(form).then(|| tokens.iter().map(|t| t.to_string()).collect());
            matcher.nodes[node].terminals.push(Terminal {
                entity_type: entry.entity_type,
                exact,
            });
            matcher.forms += 1;
        }
    }
    Ok(matcher)
}

impl GazetteerMatcher {
    /// Number of surface forms (canonical names plus alternates).
    pub fn form_count(&self) -> usize {
        self.forms
    }

    /// Longest match starting at `start`, as (end, type).
    fn longest_at(&self, surfaces: &[&str], lowered: &[String], start: usize) -> Option<(usize, EntityType)> {
        let mut node = 0;
        let mut best = None;
        for j in start..surfaces.len() {
            match self.nodes[node].children.get(&lowered[j]) {
                Some(&next) => node = next,
                None => break,
            }
            let accepted = self.nodes[node].terminals.iter().find(|t| match &t.exact {
                None => true,
                Some(exact) => exact.iter().map(String::as_str).eq(surfaces[start..=j].iter().copied()),
            });
            if let Some(t) = accepted {
                best = Some((j + 1, t.entity_type));
            }
        }
        best
    }

    /// Leftmost-longest, non-overlapping domain mentions in a sentence.
    pub fn tag_sentence(&self, sentence: &Sentence) -> Vec<Mention> {
        let surfaces: Vec<&str> = sentence.tokens.iter().map(|t| t.surface.as_str()).collect();
        let lowered: Vec<String> = surfaces.iter().map(|s| s.to_lowercase()).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < surfaces.len() {
            match self.longest_at(&surfaces, &lowered, i) {
                Some((end, entity_type)) => {
                    out.push(Mention {
                        sentence_id: sentence.id.clone(),
                        start: i,
                        end,
                        entity_type: entity_type.as_str().to_string(),
                        origin: Origin::Domain,
                    });
                    i = end;
                }
                None => i += 1,
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Domain,
    Generic,
}

/// A typed entity span `[start, end)` within one sentence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub sentence_id: String,
    pub start: usize,
    pub end: usize,
    pub entity_type: String,
    pub origin: Origin,
}

impl Mention {
    pub fn overlaps(&self, other: &Mention) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, token: usize) -> bool {
        self.start <= token && token < self.end
    }
}

/// Coalesce per-token generic labels into maximal same-label runs.
/// Tokens labeled `O` count as unlabeled.
pub fn generic_mentions(sentence: &Sentence) -> Vec<Mention> {
    let mut out: Vec<Mention> = Vec::new();
    let mut prev: Option<&str> = None;
    for (i, tok) in sentence.tokens.iter().enumerate() {
        let label = tok.generic_ner.as_deref().filter(|l| !l.is_empty() && *l != "O");
        match label {
            Some(l) if prev == Some(l) => out.last_mut().expect("run in progress").end = i + 1,
            Some(l) => out.push(Mention {
                sentence_id: sentence.id.clone(),
                start: i,
                end: i + 1,
                entity_type: l.to_string(),
                origin: Origin::Generic,
            }),
            None => {}
        }
        prev = label;
    }
    out
}

/// Domain mentions win every overlap; generic mentions survive only where
/// no domain mention touches them. Output is sorted by position.
pub fn merge_ner(domain: &[Mention], generic: &[Mention]) -> Vec<Mention> {
    let mut out: Vec<Mention> = domain.to_vec();
    out.extend(
        generic
            .iter()
            .filter(|g| !domain.iter().any(|d| d.overlaps(g)))
            .cloned(),
    );
    out.sort_by_key(|m| (m.start, m.end));
    out
}

/// Produces the merged mention layer for a sentence.
#[derive(Debug, Default)]
pub struct NerTagger {
    matcher: Option<GazetteerMatcher>,
}

impl NerTagger {
    pub fn new(matcher: Option<GazetteerMatcher>) -> Self {
        Self { matcher }
    }

    pub fn matcher(&self) -> Option<&GazetteerMatcher> {
        self.matcher.as_ref()
    }

    pub fn mentions(&self, sentence: &Sentence) -> Vec<Mention> {
        let domain = match &self.matcher {
            Some(m) => m.tag_sentence(sentence),
            None => Vec::new(),
        };
        merge_ner(&domain, &generic_mentions(sentence))
    }
}

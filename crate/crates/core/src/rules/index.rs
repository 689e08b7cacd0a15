//! Inverted index from surface and lemma terms to sentences.
//!
//! # On-disk format
//!
//! All integers are little-endian `u32`; strings are a `u32` byte length
//! followed by UTF-8 bytes.
//!
//! ```text
//! magic      8 bytes  "SSAIDX\0\0"
//! version    u32      INDEX_FORMAT_VERSION
//! n_docs     u32
//!   per document, in corpus order:
//!   doc id       string
//!   n_sentences  u32
//!   sentence ids string * n_sentences
//! n_terms    u32
//!   per term, in byte-wise ascending order:
//!   term         string   "surface:<lowercased>" or "lemma:<lowercased>"
//!   n_postings   u32
//!   postings     (doc ordinal u32, sentence ordinal u32) * n_postings, ascending
//! ```
//!
//! The same corpus always produces the same bytes.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use rayon::prelude::*;

use super::{Field, Rule, TokenPattern};
use crate::document::Document;
use crate::error::{Error, Result};

pub const INDEX_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"SSAIDX\0\0";

/// Position of a sentence in the indexed corpus: document ordinal and
/// sentence ordinal within it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SentenceRef {
    pub doc: u32,
    pub sentence: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertedIndex {
    /// Document id and its sentence ids, in corpus order.
    layout: Vec<(String, Vec<String>)>,
    postings: HashMap<String, Vec<SentenceRef>>,
}

pub(crate) fn term(field: Field, value: &str) -> String {
    format!("{}:{}", field.as_str(), value)
}

/// Index the lowercased surface and lemma of every token.
pub fn build_index(docs: &[Document]) -> InvertedIndex {
    let per_doc: Vec<Vec<(String, SentenceRef)>> = docs
        .par_iter()
        .enumerate()
        .map(|(di, doc)| {
            let mut out = Vec::new();
            for (si, s) in doc.sentences.iter().enumerate() {
                let at = SentenceRef {
                    doc: di as u32,
                    sentence: si as u32,
                };
                let mut terms: Vec<String> = s
                    .tokens
                    .iter()
                    .flat_map(|t| {
                        [
                            term(Field::Surface, &t.surface.to_lowercase()),
                            term(Field::Lemma, &t.lemma.to_lowercase()),
                        ]
                    })
                    .collect();
                terms.sort_unstable();
                terms.dedup();
                out.extend(terms.into_iter().map(|t| (t, at)));
            }
            out
        })
        .collect();

    // Documents are merged in corpus order, so every postings list comes
    // out sorted without a final sort.
    let mut postings: HashMap<String, Vec<SentenceRef>> = HashMap::new();
    for (term, at) in per_doc.into_iter().flatten() {
        postings.entry(term).or_default().push(at);
    }
    let layout = docs
        .iter()
        .map(|d| (d.id.clone(), d.sentences.iter().map(|s| s.id.clone()).collect()))
        .collect();
    InvertedIndex { layout, postings }
}

fn union(a: &[SentenceRef], b: &[SentenceRef]) -> Vec<SentenceRef> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn intersect(a: &[SentenceRef], b: &[SentenceRef]) -> Vec<SentenceRef> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl InvertedIndex {
    pub fn postings(&self, field: Field, value: &str) -> &[SentenceRef] {
        self.postings
            .get(&term(field, &value.to_lowercase()))
            .map_or(&[], Vec::as_slice)
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    pub fn doc_count(&self) -> usize {
        self.layout.len()
    }

    pub fn sentence_count(&self) -> usize {
        self.layout.iter().map(|(_, s)| s.len()).sum()
    }

    /// Document id and sentence id for a reference.
    pub fn resolve(&self, at: SentenceRef) -> Option<(&str, &str)> {
        let (doc, sentences) = self.layout.get(at.doc as usize)?;
        let sent = sentences.get(at.sentence as usize)?;
        Some((doc.as_str(), sent.as_str()))
    }

    /// Fails if the index was not built from a corpus with exactly these
    /// documents and sentences, in this order.
    pub fn check_corpus(&self, docs: &[Document]) -> Result<()> {
        if self.layout.len() != docs.len() {
            return Err(Error::Index(format!(
                "index covers {} documents, corpus has {}",
                self.layout.len(),
                docs.len()
            )));
        }
        for ((id, sentences), doc) in self.layout.iter().zip(docs) {
            let same = *id == doc.id
                && sentences.len() == doc.sentences.len()
                && sentences.iter().zip(&doc.sentences).all(|(a, b)| *a == b.id);
            if !same {
                return Err(Error::Index(format!(
                    "index is stale: document `{}` does not match",
                    doc.id
                )));
            }
        }
        Ok(())
    }

    /// Sentences that can contain a match of this token pattern.
    fn pattern_candidates(&self, pattern: &TokenPattern) -> Vec<SentenceRef> {
        let mut out: Vec<SentenceRef> = Vec::new();
        for conj in &pattern.alternatives {
            let mut acc: Option<Vec<SentenceRef>> = None;
            for atom in conj.iter().filter(|a| !a.negated && a.field.is_indexed()) {
                let mut hits: Vec<SentenceRef> = Vec::new();
                for v in &atom.values {
                    hits = union(&hits, self.postings(atom.field, v));
                }
                acc = Some(match acc {
                    None => hits,
                    Some(prev) => intersect(&prev, &hits),
                });
            }
            // The parser guarantees an indexable atom in every alternative.
            out = union(&out, &acc.unwrap_or_default());
        }
        out
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        write_u32(w, INDEX_FORMAT_VERSION)?;
        write_u32(w, len_u32(self.layout.len())?)?;
        for (doc, sentences) in &self.layout {
            write_str(w, doc)?;
            write_u32(w, len_u32(sentences.len())?)?;
            for s in sentences {
                write_str(w, s)?;
            }
        }
        let sorted: BTreeMap<&String, &Vec<SentenceRef>> = self.postings.iter().collect();
        write_u32(w, len_u32(sorted.len())?)?;
        for (term, refs) in sorted {
            write_str(w, term)?;
            write_u32(w, len_u32(refs.len())?)?;
            for r in refs.iter() {
                write_u32(w, r.doc)?;
                write_u32(w, r.sentence)?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        read_exact(r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Index("not an index file (bad magic)".into()));
        }
        let version = read_u32(r)?;
        if version != INDEX_FORMAT_VERSION {
            return Err(Error::Index(format!(
                "unsupported index version {version}, expected {INDEX_FORMAT_VERSION}"
            )));
        }
        let n_docs = read_u32(r)?;
        let mut layout = Vec::new();
        for _ in 0..n_docs {
            let doc = read_str(r)?;
            let n = read_u32(r)?;
            let sentences = (0..n).map(|_| read_str(r)).collect::<Result<Vec<_>>>()?;
            layout.push((doc, sentences));
        }
        let n_terms = read_u32(r)?;
        let mut postings = HashMap::new();
        for _ in 0..n_terms {
            let term = read_str(r)?;
            let n = read_u32(r)?;
            let mut refs = Vec::new();
            for _ in 0..n {
                let doc = read_u32(r)?;
                let sentence = read_u32(r)?;
                let valid = layout
                    .get(doc as usize)
                    .is_some_and(|(_, s)| (sentence as usize) < s.len());
                if !valid {
                    return Err(Error::Index(format!(
                        "posting ({doc}, {sentence}) for `{term}` out of range"
                    )));
                }
                refs.push(SentenceRef { doc, sentence });
            }
            if refs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Index(format!(
                    "postings for `{term}` are not strictly ascending"
                )));
            }
            if postings.insert(term.clone(), refs).is_some() {
                return Err(Error::Index(format!("duplicate term `{term}`")));
            }
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Index("trailing bytes after index".into()));
        }
        Ok(InvertedIndex { layout, postings })
    }
}

/// Sentences that may match the rule's trigger: for each trigger
/// position, the union over alternatives of the intersection of that
/// alternative's positive surface/lemma postings; positions intersected.
/// Always a superset of the sentences where the rule fires.
pub fn candidate_sentences(index: &InvertedIndex, rule: &Rule) -> Vec<SentenceRef> {
    let mut acc: Option<Vec<SentenceRef>> = None;
    for pattern in &rule.trigger {
        let hits = index.pattern_candidates(pattern);
        acc = Some(match acc {
            None => hits,
            Some(prev) => intersect(&prev, &hits),
        });
        if acc.as_ref().is_some_and(Vec::is_empty) {
            break;
        }
    }
    acc.unwrap_or_default()
}

fn len_u32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Index(format!("{n} exceeds the u32 range of the index format")))
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    write_u32(w, len_u32(s.len())?)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Index("truncated index file".into()),
        _ => Error::Io(e),
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut buf = Vec::new();
    r.by_ref().take(len as u64).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(Error::Index("truncated index file".into()));
    }
    String::from_utf8(buf).map_err(|_| Error::Index("invalid UTF-8 in index".into()))
}

//! Near-duplicate pooling by unigram cosine similarity, and leak-free
//! assignment of pools to train/dev/test.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::document::{DisjointSets, Document, Split};
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.90;
/// 19.8k unseen of 48.5k documents.
pub const DEFAULT_UNSEEN_FRACTION: f64 = 0.41;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermVector {
    pub doc_id: String,
    pub counts: BTreeMap<String, u32>,
}

impl TermVector {
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    fn squared_norm(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c) * u64::from(c)).sum()
    }
}

/// A token with no alphanumeric character is punctuation.
fn is_punctuation(surface: &str) -> bool {
    !surface.chars().any(char::is_alphanumeric)
}

/// Raw frequencies of lowercased surfaces, punctuation excluded.
pub fn unigram_vector(doc: &Document) -> Result<TermVector> {
    if doc.token_count() == 0 {
        return Err(Error::invalid(format!("document `{}` has no tokens", doc.id)));
    }
    let mut counts = BTreeMap::new();
    for tok in doc.sentences.iter().flat_map(|s| &s.tokens) {
        if is_punctuation(&tok.surface) {
            continue;
        }
        *counts.entry(tok.surface.to_lowercase()).or_insert(0) += 1;
    }
    Ok(TermVector {
        doc_id: doc.id.clone(),
        counts,
    })
}

fn cosine_from_parts(dot: u64, norm_a: u64, norm_b: u64) -> f64 {
    // sqrt of the exact product keeps sim(a, a) at exactly 1.0
    let sim = dot as f64 / ((u128::from(norm_a) * u128::from(norm_b)) as f64).sqrt();
    sim.clamp(0.0, 1.0)
}

/// Cosine similarity over raw counts. Dot products are computed in
/// integers so every code path produces the same float for a pair.
pub fn cosine_similarity(a: &TermVector, b: &TermVector) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("cosine similarity of an empty term vector"));
    }
    let (small, large) = if a.counts.len() <= b.counts.len() {
        (a, b)
    } else {
        (b, a)
    };
    let dot: u64 = small
        .counts
        .iter()
        .filter_map(|(t, &c)| large.counts.get(t).map(|&d| u64::from(c) * u64::from(d)))
        .sum();
    Ok(cosine_from_parts(dot, a.squared_norm(), b.squared_norm()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoolAssignment {
    /// Document id to pool id (the lowest member document id).
    pub pool_of: BTreeMap<String, String>,
    pub split_of: BTreeMap<String, Split>,
    pub threshold: f64,
}

impl PoolAssignment {
    /// Pool id to sorted member ids.
    pub fn pools(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut pools: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (doc, pool) in &self.pool_of {
            pools.entry(pool.as_str()).or_default().push(doc.as_str());
        }
        pools
    }

    pub fn split_of_doc(&self, doc_id: &str) -> Option<Split> {
        self.pool_of.get(doc_id).and_then(|p| self.split_of.get(p)).copied()
    }

    /// JSON lines `{"doc_id","pool_id","split"}` in document-id order.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            doc_id: &'a str,
            pool_id: &'a str,
            split: Split,
        }
        let mut out = String::new();
        for (doc, pool) in &self.pool_of {
            let row = Row {
                doc_id: doc,
                pool_id: pool,
                split: self.split_of.get(pool).copied().unwrap_or_default(),
            };
            out.push_str(&serde_json::to_string(&row).expect("rows serialize"));
            out.push('\n');
        }
        out
    }
}

/// Every pair `(i, j)`, `i < j`, whose similarity strictly exceeds the
/// threshold. Pairs sharing no term are never scored.
pub fn similar_pairs(vectors: &[TermVector], threshold: f64) -> Vec<(usize, usize)> {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let encoded: Vec<Vec<(u32, u32)>> = vectors
        .iter()
        .map(|v| {
            v.counts
                .iter()
                .map(|(t, &c)| {
                    let next = ids.len() as u32;
                    (*ids.entry(t.as_str()).or_insert(next), c)
                })
                .collect()
        })
        .collect();
    let mut postings: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ids.len()];
    for (doc, terms) in encoded.iter().enumerate() {
        for &(term, count) in terms {
            postings[term as usize].push((doc as u32, count));
        }
    }
    let norms: Vec<u64> = vectors.iter().map(TermVector::squared_norm).collect();

    let mut pairs: Vec<(usize, usize)> = encoded
        .par_iter()
        .enumerate()
        .filter(|(i, _)| norms[*i] > 0)
        .flat_map_iter(|(i, terms)| {
            let mut dots: HashMap<u32, u64> = HashMap::new();
            for &(term, count) in terms {
                for &(other, other_count) in &postings[term as usize] {
                    if other as usize > i {
                        *dots.entry(other).or_insert(0) += u64::from(count) * u64::from(other_count);
                    }
                }
            }
            let norms = &norms;
            dots.into_iter()
                .filter(move |&(j, dot)| cosine_from_parts(dot, norms[i], norms[j as usize]) > threshold)
                .map(move |(j, _)| (i, j as usize))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Connected components of the above-threshold similarity graph. Documents
/// without tokens are never similar to anything and form singleton pools.
pub fn pool_duplicates(docs: &[Document], threshold: f64) -> PoolAssignment {
    let vectors: Vec<TermVector> = docs
        .iter()
        .map(|d| {
            unigram_vector(d).unwrap_or_else(|_| TermVector {
                doc_id: d.id.clone(),
                counts: BTreeMap::new(),
            })
        })
        .collect();
    pool_vectors(&vectors, threshold)
}

pub fn pool_vectors(vectors: &[TermVector], threshold: f64) -> PoolAssignment {
    let mut sets = DisjointSets::new(vectors.len());
    for (i, j) in similar_pairs(vectors, threshold) {
        sets.union(i, j);
    }
    let mut pool_id: HashMap<usize, &str> = HashMap::new();
    for (i, v) in vectors.iter().enumerate() {
        let root = sets.find(i);
        let entry = pool_id.entry(root).or_insert(v.doc_id.as_str());
        if v.doc_id.as_str() < *entry {
            *entry = v.doc_id.as_str();
        }
    }
    let pool_of = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (v.doc_id.clone(), pool_id[&sets.find(i)].to_string()))
        .collect();
    PoolAssignment {
        pool_of,
        split_of: BTreeMap::new(),
        threshold,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitConfig {
    /// Fraction of pools, newest first, held out as unseen (dev + test).
    pub unseen_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            unseen_fraction: DEFAULT_UNSEEN_FRACTION,
        }
    }
}

/// Round half up.
pub(crate) fn round_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction + 0.5).floor() as usize).min(n)
}

/// Order pools by their newest member and hold out the newest fraction.
///
/// A document's ordering key is `(collected_at, doc id)`, with undated
/// documents ordered before dated ones. `round(pools * fraction)` newest
/// pools become unseen and alternate dev, test, dev, ... in key order;
/// the rest are train.
pub fn assign_splits(pools: &PoolAssignment, docs: &[Document], config: SplitConfig) -> PoolAssignment {
    let dates: HashMap<&str, Option<&str>> = docs
        .iter()
        .map(|d| (d.id.as_str(), d.collected_at.as_deref()))
        .collect();
    let mut newest: BTreeMap<&str, (Option<&str>, &str)> = BTreeMap::new();
    for (doc, pool) in &pools.pool_of {
        let key = (dates.get(doc.as_str()).copied().flatten(), doc.as_str());
        let slot = newest.entry(pool.as_str()).or_insert(key);
        if key > *slot {
            *slot = key;
        }
    }
    let mut ordered: Vec<(&str, (Option<&str>, &str))> = newest.into_iter().collect();
    ordered.sort_by(|a, b| a.1.cmp(&b.1));

    let n_unseen = round_count(ordered.len(), config.unseen_fraction);
    let n_train = ordered.len() - n_unseen;
    let split_of = ordered
        .iter()
        .enumerate()
        .map(|(rank, (pool, _))| {
            let split = if rank < n_train {
                Split::Train
            } else if (rank - n_train).is_multiple_of(2) {
                Split::Dev
            } else {
                Split::Test
            };
            (pool.to_string(), split)
        })
        .collect();
    PoolAssignment {
        pool_of: pools.pool_of.clone(),
        split_of,
        threshold: pools.threshold,
    }
}

/// Copy assigned splits onto the documents.
pub fn apply_splits(docs: &mut [Document], assignment: &PoolAssignment) {
    for doc in docs {
        if let Some(split) = assignment.split_of_doc(&doc.id) {
            doc.split = split;
        }
    }
}

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{DepEdge, Document, Sentence, Split, Token};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct DocRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    collected_at: Option<String>,
    #[serde(default)]
    split: Split,
    sentences: Vec<SentenceRecord>,
}

#[derive(Serialize, Deserialize)]
struct SentenceRecord {
    id: String,
    tokens: Vec<TokenRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
struct TokenRecord {
    surface: String,
    lemma: String,
    pos: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chunk: Option<String>,
}

/// `head == -1` is ROOT.
#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    head: i64,
    dep: usize,
    label: String,
}

/// Read one JSON document per line. Blank lines are skipped.
pub fn parse_jsonl_documents<R: BufRead>(input: R) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        docs.push(parse_line(i + 1, &line)?);
    }
    Ok(docs)
}

fn parse_line(line_no: usize, line: &str) -> Result<Document> {
    let de = &mut serde_json::Deserializer::from_str(line);
    let record: DocRecord = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        line: line_no,
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;

    let mut sentences = Vec::with_capacity(record.sentences.len());
    for (si, s) in record.sentences.into_iter().enumerate() {
        let tokens = s
            .tokens
            .into_iter()
            .enumerate()
            .map(|(index, t)| Token {
                index,
                surface: t.surface,
                lemma: t.lemma,
                pos: t.pos,
                generic_ner: t.ner,
                chunk: t.chunk,
            })
            .collect();
        let mut edges = Vec::with_capacity(s.edges.len());
        for (ei, e) in s.edges.into_iter().enumerate() {
            let head = match e.head {
                -1 => None,
                h if h >= 0 => Some(h as usize),
                h => {
                    return Err(Error::Schema {
                        line: line_no,
                        path: format!("sentences[{si}].edges[{ei}].head"),
                        message: format!("head must be -1 (ROOT) or a token index, got {h}"),
                    })
                }
            };
            edges.push(DepEdge {
                head,
                dependent: e.dep,
                label: e.label,
            });
        }
        let mut sentence = Sentence {
            id: s.id,
            tokens,
            edges,
        };
        sentence.normalize_edges();
        sentence.check_tree()?;
        sentences.push(sentence);
    }

    Ok(Document {
        id: record.id,
        source: record.source,
        collected_at: record.collected_at,
        split: record.split,
        sentences,
    })
}

/// Serialize documents one per line, the inverse of [`parse_jsonl_documents`].
pub fn write_jsonl_documents(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        let record = DocRecord {
            id: doc.id.clone(),
            source: doc.source.clone(),
            collected_at: doc.collected_at.clone(),
            split: doc.split,
            sentences: doc
                .sentences
                .iter()
                .map(|s| SentenceRecord {
                    id: s.id.clone(),
                    tokens: s
                        .tokens
                        .iter()
                        .map(|t| TokenRecord {
                            surface: t.surface.clone(),
                            lemma: t.lemma.clone(),
                            pos: t.pos.clone(),
                            ner: t.generic_ner.clone(),
                            chunk: t.chunk.clone(),
                        })
                        .collect(),
                    edges: s
                        .edges
                        .iter()
                        .map(|e| EdgeRecord {
                            head: e.head.map_or(-1, |h| h as i64),
                            dep: e.dependent,
                            label: e.label.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&record).expect("document records always serialize"));
        out.push('\n');
    }
    out
}

use std::fmt::Write as _;
use std::io::BufRead;

use super::{DepEdge, Document, Sentence, Split, Token};
use crate::error::{Error, Result};

const COLUMNS: usize = 10;

/// Read CoNLL-U text into documents.
///
/// Documents start at `# newdoc id = ...`; `# split`, `# source` and
/// `# collected_at` comments set document fields. Generic NER and chunk
/// layers travel in the MISC column as `Ner=` and `Chunk=` pairs.
/// Multiword-token ranges and empty nodes are rejected.
pub fn parse_conllu<R: BufRead>(input: R) -> Result<Vec<Document>> {
    let mut parser = Parser::default();
    for (i, line) in input.lines().enumerate() {
        parser.line(i + 1, &line?)?;
    }
    parser.finish()
}

#[derive(Default)]
struct Parser {
    docs: Vec<Document>,
    sent_id: Option<String>,
    tokens: Vec<Token>,
    edges: Vec<DepEdge>,
    block_start: usize,
    first_token_line: usize,
}

impl Parser {
    fn line(&mut self, lineno: usize, line: &str) -> Result<()> {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            return self.end_sentence(lineno);
        }
        if self.block_start == 0 {
            self.block_start = lineno;
        }
        if let Some(comment) = line.strip_prefix('#') {
            return self.comment(lineno, comment.trim());
        }
        self.token_line(lineno, line)
    }

    fn comment(&mut self, lineno: usize, comment: &str) -> Result<()> {
        let Some((key, value)) = comment.split_once('=') else {
            return Ok(());
        };
        let (key, value) = (key.trim(), value.trim().to_string());
        match key {
            "newdoc id" => {
                if !self.tokens.is_empty() {
                    return Err(parse_err(lineno, "`# newdoc id` inside a sentence"));
                }
                self.docs.push(Document {
                    id: value,
                    source: None,
                    collected_at: None,
                    split: Split::Unassigned,
                    sentences: Vec::new(),
                });
            }
            "sent_id" => self.sent_id = Some(value),
            "split" | "source" | "collected_at" => {
                let doc = self
                    .docs
                    .last_mut()
                    .ok_or_else(|| parse_err(lineno, format!("`# {key}` before `# newdoc id`")))?;
                match key {
                    "split" => doc.split = value.parse().map_err(|e: Error| parse_err(lineno, e.to_string()))?,
                    "source" => doc.source = Some(value),
                    _ => doc.collected_at = Some(value),
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn token_line(&mut self, lineno: usize, line: &str) -> Result<()> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(parse_err(
                lineno,
                format!("expected {COLUMNS} tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        if id.contains('-') {
            return Err(parse_err(
                lineno,
                format!("multiword token range `{id}` is not supported"),
            ));
        }
        if id.contains('.') {
            return Err(parse_err(lineno, format!("empty node `{id}` is not supported")));
        }
        let id: usize = id
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid token id `{id}`")))?;
        let index = self.tokens.len();
        if index == 0 {
            self.first_token_line = lineno;
        }
        if id != index + 1 {
            return Err(parse_err(
                lineno,
                format!("token id {id} out of sequence, expected {}", index + 1),
            ));
        }
        let surface = cols[1];
        if surface.is_empty() {
            return Err(parse_err(lineno, "empty token form"));
        }
        let pos = if cols[3] != "_" { cols[3] } else { cols[4] };
        let head: usize = cols[6]
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid head `{}`", cols[6])))?;
        if cols[7].is_empty() || cols[7] == "_" {
            return Err(parse_err(lineno, "missing dependency relation"));
        }
        let (mut generic_ner, mut chunk) = (None, None);
        if cols[9] != "_" {
            for pair in cols[9].split('|') {
                match pair.split_once('=') {
                    Some(("Ner", v)) => generic_ner = Some(v.to_string()),
                    Some(("Chunk", v)) => chunk = Some(v.to_string()),
                    _ => {}
                }
            }
        }
        self.tokens.push(Token {
            index,
            surface: surface.to_string(),
            lemma: cols[2].to_string(),
            pos: pos.to_string(),
            generic_ner,
            chunk,
        });
        self.edges.push(DepEdge {
            head: head.checked_sub(1),
            dependent: index,
            label: cols[7].to_string(),
        });
        Ok(())
    }

    fn end_sentence(&mut self, lineno: usize) -> Result<()> {
        let block_start = std::mem::take(&mut self.block_start);
        let first_token_line = std::mem::take(&mut self.first_token_line);
        if self.tokens.is_empty() {
            // A comment-only block (document header) carries no sentence.
            self.sent_id = None;
            return Ok(());
        }
        let id = self
            .sent_id
            .take()
            .ok_or_else(|| parse_err(first_token_line, "sentence without `# sent_id`"))?;
        let mut sentence = Sentence {
            id,
            tokens: std::mem::take(&mut self.tokens),
            edges: std::mem::take(&mut self.edges),
        };
        sentence.normalize_edges();
        sentence.check_tree()?;
        let doc = self
            .docs
            .last_mut()
            .ok_or_else(|| parse_err(lineno.max(block_start), "sentence before any `# newdoc id`"))?;
        doc.sentences.push(sentence);
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<Document>> {
        self.end_sentence(0)?;
        Ok(self.docs)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Serialize documents as CoNLL-U, the inverse of [`parse_conllu`].
pub fn write_conllu(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        let _ = writeln!(out, "# newdoc id = {}", doc.id);
        if let Some(source) = &doc.source {
            let _ = writeln!(out, "# source = {source}");
        }
        if let Some(date) = &doc.collected_at {
            let _ = writeln!(out, "# collected_at = {date}");
        }
        if doc.split != Split::Unassigned {
            let _ = writeln!(out, "# split = {}", doc.split);
        }
        if doc.sentences.is_empty() {
            out.push('\n');
        }
        for s in &doc.sentences {
            let _ = writeln!(out, "# sent_id = {}", s.id);
            let _ = writeln!(out, "# text = {}", s.text());
            for t in &s.tokens {
                let head = s.head_of(t.index).map_or(0, |h| h + 1);
                let label = s.edges.get(t.index).map_or("_", |e| e.label.as_str());
                let mut misc = Vec::new();
                if let Some(ner) = &t.generic_ner {
                    misc.push(format!("Ner={ner}"));
                }
                if let Some(chunk) = &t.chunk {
                    misc.push(format!("Chunk={chunk}"));
                }
                let misc = if misc.is_empty() {
                    "_".to_string()
                } else {
                    misc.join("|")
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t{}",
                    t.index + 1,
                    t.surface,
                    t.lemma,
                    t.pos,
                    head,
                    label,
                    misc
                );
            }
            out.push('\n');
        }
    }
    out
}

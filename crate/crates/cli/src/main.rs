//! `ssa`: command-line driver for space-event extraction.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use ssa_core::dedup::{self, SplitConfig};
use ssa_core::document::{self, Document};
use ssa_core::eval;
use ssa_core::ner::{self, Mention, NerTagger};
use ssa_core::pipeline::schema::EventType;
use ssa_core::pipeline::{self, CandidateSentence, SampleFractions};
use ssa_core::rules::{self, EventMention, InvertedIndex};
use ssa_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ssa",
    version,
    about = "Rule-based extraction of space events from parsed news text"
)]
struct Cli {
    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a corpus, then re-emit it.
    Ingest(IngestArgs),
    /// Report corpus invariant violations.
    Validate(CorpusArgs),
    /// Pool near-duplicate documents and assign splits.
    Dedup(DedupArgs),
    /// Tag entity mentions.
    Ner(NerArgs),
    /// Build the inverted sentence index.
    Index(IndexArgs),
    /// Run extraction rules over a corpus.
    Extract(ExtractArgs),
    /// Filter events and sample sentences for annotation.
    Shortlist(ShortlistArgs),
    /// Write annotation tasks for sampled sentences.
    ExportAnnotation(ExportArgs),
    /// Score predicted slot spans against gold.
    Score(ScoreArgs),
    /// Sentence and token counts per event type and split.
    Stats(StatsArgs),
    /// Bucket prediction errors.
    Errors(ErrorsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Conllu,
    Jsonl,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Output format.
    #[arg(long, value_enum, default_value = "jsonl")]
    to: Format,
}

#[derive(Args)]
struct DedupArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value_t = dedup::DEFAULT_THRESHOLD, value_parser = fraction)]
    threshold: f64,
    #[arg(long, default_value_t = dedup::DEFAULT_UNSEEN_FRACTION, value_parser = fraction)]
    unseen_fraction: f64,
    /// Also write the corpus with splits applied, in the input format.
    #[arg(long)]
    write_corpus: Option<PathBuf>,
}

#[derive(Args)]
struct NerArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Index file to write.
    #[arg(long)]
    index: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    /// Prebuilt index; without it every sentence is scanned.
    #[arg(long)]
    index: Option<PathBuf>,
}

#[derive(Args)]
struct ShortlistArgs {
    /// Events from `extract`.
    #[arg(long)]
    events: PathBuf,
    /// Per-type sentence sampling fraction, e.g. `launch=0.30`. Repeatable.
    #[arg(long, value_parser = sample_spec)]
    sample: Vec<(EventType, f64)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Candidates from `shortlist`.
    #[arg(long)]
    shortlist: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Emit JSON instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Annotation records with `tokens` and `split`.
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ErrorsArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// List every case as JSON lines instead of the summary table.
    #[arg(long)]
    cases: bool,
}

fn fraction(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1]"))
    }
}

fn sample_spec(s: &str) -> std::result::Result<(EventType, f64), String> {
    let (t, f) = s
        .split_once('=')
        .ok_or_else(|| format!("expected TYPE=FRACTION, got `{s}`"))?;
    let t: EventType = t.parse().map_err(|e: Error| e.to_string())?;
    Ok((t, fraction(f)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn read_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Invalid(m) => Error::Invalid(format!("{}: {m}", path.display())),
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        Error::Schema { line, path: p, message } => Error::Schema {
            line,
            path: p,
            message: format!("{} ({})", message, path.display()),
        },
        other => other,
    })
}

fn corpus_format(args: &CorpusArgs) -> Result<Format> {
    if let Some(f) = args.format {
        return Ok(f);
    }
    match args.corpus.extension().and_then(|e| e.to_str()) {
        Some("conllu" | "conll") => Ok(Format::Conllu),
        Some("jsonl" | "json") => Ok(Format::Jsonl),
        _ => Err(Error::Invalid(format!(
            "{}: cannot infer the corpus format; pass --format conllu|jsonl",
            args.corpus.display()
        ))),
    }
}

fn read_corpus(args: &CorpusArgs) -> Result<Vec<Document>> {
    let reader = open(&args.corpus)?;
    let docs = match corpus_format(args)? {
        Format::Conllu => document::parse_conllu(reader),
        Format::Jsonl => document::parse_jsonl_documents(reader),
    };
    in_file(&args.corpus, docs)
}

fn write_corpus(docs: &[Document], format: Format) -> String {
    match format {
        Format::Conllu => document::write_conllu(docs),
        Format::Jsonl => document::write_jsonl_documents(docs),
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(&line);
        out.push(serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            line: i + 1,
            path: e.path().to_string(),
            message: format!("{} ({})", e.inner(), path.display()),
        })?);
    }
    Ok(out)
}

fn read_spans(path: &Path) -> Result<Vec<eval::SpanRecord>> {
    in_file(path, eval::parse_span_records(open(path)?))
}

fn tagger(gazetteer: Option<&Path>) -> Result<NerTagger> {
    let matcher = match gazetteer {
        Some(path) => {
            let entries = in_file(path, ner::parse_gazetteer_tsv(open(path)?))?;
            Some(ner::compile_gazetteer(&entries)?)
        }
        None => None,
    };
    Ok(NerTagger::new(matcher))
}

fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MentionRecord<'a> {
    doc_id: &'a str,
    #[serde(flatten)]
    mention: &'a Mention,
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => {
            let docs = read_corpus(&a.corpus)?;
            check_corpus(&docs)?;
            emit(&write_corpus(&docs, a.to))
        }
        Command::Validate(a) => {
            let docs = read_corpus(&a)?;
            check_corpus(&docs)?;
            let sentences: usize = docs.iter().map(|d| d.sentences.len()).sum();
            eprintln!("ok: {} documents, {sentences} sentences", docs.len());
            Ok(())
        }
        Command::Dedup(a) => {
            let mut docs = read_corpus(&a.corpus)?;
            let pools = dedup::pool_duplicates(&docs, a.threshold);
            let assignment = dedup::assign_splits(
                &pools,
                &docs,
                SplitConfig {
                    unseen_fraction: a.unseen_fraction,
                },
            );
            if let Some(path) = &a.write_corpus {
                dedup::apply_splits(&mut docs, &assignment);
                std::fs::write(path, write_corpus(&docs, corpus_format(&a.corpus)?))
                    .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            }
            eprintln!("{} documents in {} pools", docs.len(), assignment.pools().len());
            emit(&assignment.to_jsonl())
        }
        Command::Ner(a) => {
            let docs = read_corpus(&a.corpus)?;
            let tagger = tagger(a.gazetteer.as_deref())?;
            let mut out = String::new();
            for d in &docs {
                for s in &d.sentences {
                    for m in tagger.mentions(s) {
                        let rec = MentionRecord {
                            doc_id: &d.id,
                            mention: &m,
                        };
                        out.push_str(&serde_json::to_string(&rec).expect("mentions serialize"));
                        out.push('\n');
                    }
                }
            }
            emit(&out)
        }
        Command::Index(a) => {
            let docs = read_corpus(&a.corpus)?;
            let index = rules::build_index(&docs);
            std::fs::write(&a.index, index.to_bytes())
                .map_err(|e| Error::Invalid(format!("{}: {e}", a.index.display())))?;
            eprintln!(
                "indexed {} sentences, {} terms",
                index.sentence_count(),
                index.term_count()
            );
            Ok(())
        }
        Command::Extract(a) => {
            let docs = read_corpus(&a.corpus)?;
            let rule_set = in_file(&a.rules, rules::parse_rules(&read_string(&a.rules)?))?;
            let tagger = tagger(a.gazetteer.as_deref())?;
            let index = match &a.index {
                Some(path) => Some(in_file(path, InvertedIndex::read_from(&mut open(path)?))?),
                None => None,
            };
            let events = rules::extract_events(&docs, &rule_set, index.as_ref(), &tagger)?;
            emit(&rules::write_events_jsonl(&events))
        }
        Command::Shortlist(a) => {
            let events: Vec<EventMention> = read_jsonl(&a.events)?;
            let sample: SampleFractions = a.sample.into_iter().collect();
            let candidates = pipeline::shortlist(&events, &sample, a.seed)?;
            let sampled = candidates.iter().filter(|c| c.sampled).count();
            eprintln!("{} candidate sentences, {sampled} sampled", candidates.len());
            emit(&pipeline::write_candidates_jsonl(&candidates))
        }
        Command::ExportAnnotation(a) => {
            let docs = read_corpus(&a.corpus)?;
            let candidates: Vec<CandidateSentence> = read_jsonl(&a.shortlist)?;
            emit(&pipeline::export_for_annotation(&candidates, &docs)?)
        }
        Command::Score(a) => {
            let report = eval::score_slots(&read_spans(&a.gold)?, &read_spans(&a.pred)?)?;
            emit(&if a.json { report.to_json() } else { report.to_table() })
        }
        Command::Stats(a) => {
            let stats = eval::corpus_stats(&read_spans(&a.annotations)?)?;
            emit(&if a.json { stats.to_json() } else { stats.to_table() })
        }
        Command::Errors(a) => {
            let report = eval::classify_errors(&read_spans(&a.gold)?, &read_spans(&a.pred)?);
            emit(&if a.cases {
                report.cases_jsonl()
            } else {
                report.to_table()
            })
        }
    }
}

fn check_corpus(docs: &[Document]) -> Result<()> {
    let report = document::validate_corpus(docs);
    if report.is_empty() {
        return Ok(());
    }
    for issue in &report.issues {
        eprintln!("{issue}");
    }
    Err(Error::Invalid(format!("{} validation issue(s)", report.issues.len())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_input_error() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Synthetic corpora, rules and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssa_core::document::{DepEdge, Document, Sentence, Split, Token};
use ssa_core::eval::{AnnotationLayer, LabeledSpan};
use ssa_core::ner::{compile_gazetteer, EntityType, GazetteerEntry, GazetteerMatcher, NerTagger};
use ssa_core::pipeline::schema::{self, EventType};
use ssa_core::pipeline::{InvalidReason, Validity};
use ssa_core::rules::{parse_rules, Atom, EventMention, Field, FillerKind, Rule, SlotFill, Tier};

pub const REFERENCE_RULES: &str = include_str!("../../data/space_events.rules");
pub const REFERENCE_GAZETTEER: &str = include_str!("../../data/space_events.gazetteer.tsv");

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn reference_rules() -> Vec<Rule> {
    parse_rules(REFERENCE_RULES).expect("reference rules parse")
}

/// One token: surface, lemma, pos, head (0-based, None = root), label, generic NER.
pub type Spec<'a> = (&'a str, &'a str, &'a str, Option<usize>, &'a str, Option<&'a str>);

pub fn sentence(id: &str, spec: &[Spec<'_>]) -> Sentence {
    let tokens = spec
        .iter()
        .enumerate()
        .map(|(index, (s, l, p, _, _, n))| Token {
            index,
            surface: s.to_string(),
            lemma: l.to_string(),
            pos: p.to_string(),
            generic_ner: n.map(str::to_string),
            chunk: None,
        })
        .collect();
    let edges = spec
        .iter()
        .enumerate()
        .map(|(dependent, (_, _, _, h, label, _))| DepEdge {
            head: *h,
            dependent,
            label: label.to_string(),
        })
        .collect();
    Sentence {
        id: id.to_string(),
        tokens,
        edges,
    }
}

pub fn document(id: &str, sentences: Vec<Sentence>) -> Document {
    Document {
        id: id.to_string(),
        source: None,
        collected_at: None,
        split: Split::Unassigned,
        sentences,
    }
}

/// Random rooted tree: heads[i] is None for the root.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut heads = vec![None; n];
    for k in 1..n {
        heads[order[k]] = Some(order[rng.gen_range(0..k)]);
    }
    heads
}

const NOISE_POS: &[&str] = &["NOUN", "VERB", "ADJ", "DET", "ADP", "PROPN", "ADV"];
const NOISE_LABELS: &[&str] = &[
    "nsubj", "obj", "obl", "nmod", "case", "det", "amod", "compound", "advmod",
];

pub fn noise_word(k: usize) -> String {
    format!("w{k}")
}

/// Sentence of vocabulary words `w0..w{vocab}` over a random tree.
pub fn noise_sentence<R: Rng>(rng: &mut R, id: &str, len: usize, vocab: usize) -> Sentence {
    let heads = random_tree(rng, len);
    let tokens = (0..len)
        .map(|index| {
            let w = noise_word(rng.gen_range(0..vocab));
            Token {
                index,
                surface: if rng.gen_bool(0.1) { w.to_uppercase() } else { w.clone() },
                lemma: w,
                pos: NOISE_POS.choose(rng).unwrap().to_string(),
                generic_ner: None,
                chunk: None,
            }
        })
        .collect();
    let edges = heads
        .iter()
        .enumerate()
        .map(|(dependent, head)| DepEdge {
            head: *head,
            dependent,
            label: if head.is_none() {
                "root".into()
            } else {
                NOISE_LABELS.choose(rng).unwrap().to_string()
            },
        })
        .collect();
    Sentence {
        id: id.to_string(),
        tokens,
        edges,
    }
}

/// surface, lemma, pos, head, label, ner
type OwnedSpec = (String, String, String, Option<usize>, String, Option<String>);

/// Builds a sentence token by token; heads are patched afterwards.
struct Builder {
    toks: Vec<OwnedSpec>,
}

impl Builder {
    fn new() -> Self {
        Builder { toks: Vec::new() }
    }

    fn push(&mut self, surface: &str, lemma: &str, pos: &str, label: &str) -> usize {
        self.toks
            .push((surface.into(), lemma.into(), pos.into(), None, label.into(), None));
        self.toks.len() - 1
    }

    fn name(&mut self, name: &str, label: &str) -> usize {
        self.push(name, name, "PROPN", label)
    }

    fn ner(&mut self, i: usize, tag: &str) {
        self.toks[i].5 = Some(tag.into());
    }

    fn head(&mut self, i: usize, h: usize) {
        self.toks[i].3 = Some(h);
    }

    fn build(self, id: &str) -> Sentence {
        let spec: Vec<Spec<'_>> = self
            .toks
            .iter()
            .map(|(s, l, p, h, lab, n)| (s.as_str(), l.as_str(), p.as_str(), *h, lab.as_str(), n.as_deref()))
            .collect();
        sentence(id, &spec)
    }

    /// `name` split on spaces; the last token heads the others.
    fn phrase(&mut self, name: &str, pos: &str, label: &str, head: usize) -> usize {
        let parts: Vec<&str> = name.split(' ').collect();
        let first = self.toks.len();
        for p in &parts {
            self.push(p, p, pos, "compound");
        }
        let last = self.toks.len() - 1;
        for i in first..last {
            self.head(i, last);
        }
        self.toks[last].4 = label.into();
        self.head(last, head);
        last
    }
}

pub fn satellite(k: usize) -> String {
    format!("Sat-{k}")
}
pub fn vehicle(k: usize) -> String {
    format!("Rocket-{k}")
}
pub fn site(k: usize) -> String {
    format!("Site {k}")
}
pub fn agency(k: usize) -> String {
    format!("Agency{k}")
}

pub const ENTITY_POOL: usize = 50;

pub fn synthetic_gazetteer() -> GazetteerMatcher {
    let mut entries = Vec::new();
    for k in 0..ENTITY_POOL {
        entries.push(GazetteerEntry::new(EntityType::Spacecraft, satellite(k)));
        entries.push(GazetteerEntry::new(EntityType::LaunchVehicle, vehicle(k)));
        entries.push(GazetteerEntry::new(EntityType::LaunchSite, site(k)));
        entries.push(GazetteerEntry::new(EntityType::Organization, agency(k)));
    }
    compile_gazetteer(&entries).expect("synthetic gazetteer compiles")
}

pub fn synthetic_tagger() -> NerTagger {
    NerTagger::new(Some(synthetic_gazetteer()))
}

/// A sentence built around one of the reference-rule constructions,
/// with random optional arguments and noise modifiers.
pub fn event_sentence<R: Rng>(rng: &mut R, id: &str) -> Sentence {
    let mut b = Builder::new();
    let k = || 0..ENTITY_POOL;
    match rng.gen_range(0..7) {
        0 => {
            // AGENCY launched SAT aboard VEHICLE from SITE on DATE .
            let org = if rng.gen_bool(0.5) {
                Some(b.name(&agency(rng.gen_range(k())), "nsubj"))
            } else {
                None
            };
            let v = b.push("launched", "launch", "VERB", "root");
            if let Some(o) = org {
                b.head(o, v);
            }
            if rng.gen_bool(0.8) {
                b.phrase(&satellite(rng.gen_range(k())), "PROPN", "obj", v);
            } else {
                let d = b.push("the", "the", "DET", "det");
                let n = b.push("probe", "probe", "NOUN", "obj");
                b.head(d, n);
                b.head(n, v);
            }
            if rng.gen_bool(0.5) {
                let c = b.push("aboard", "aboard", "ADP", "case");
                let x = b.phrase(&vehicle(rng.gen_range(k())), "PROPN", "obl", v);
                b.head(c, x);
            }
            if rng.gen_bool(0.5) {
                let c = b.push("from", "from", "ADP", "case");
                let x = b.phrase(&site(rng.gen_range(k())), "PROPN", "obl", v);
                b.head(c, x);
            }
            if rng.gen_bool(0.5) {
                let c = b.push("on", "on", "ADP", "case");
                let d = b.push("Monday", "Monday", "PROPN", "obl");
                b.ner(d, "DATE");
                b.head(c, d);
                b.head(d, v);
            }
            let p = b.push(".", ".", "PUNCT", "punct");
            b.head(p, v);
        }
        1 => {
            // SAT was launched by AGENCY .
            let s = b.phrase(&satellite(rng.gen_range(k())), "PROPN", "nsubj:pass", 0);
            let a = b.push("was", "be", "AUX", "aux:pass");
            let v = b.push("launched", "launch", "VERB", "root");
            b.head(s, v);
            b.head(a, v);
            if rng.gen_bool(0.6) {
                let c = b.push("by", "by", "ADP", "case");
                let o = b.name(&agency(rng.gen_range(k())), "obl:agent");
                b.head(c, o);
                b.head(o, v);
            }
        }
        2 => {
            // VEHICLE|SAT failed .
            let name = if rng.gen_bool(0.5) {
                vehicle(rng.gen_range(k()))
            } else {
                satellite(rng.gen_range(k()))
            };
            let s = b.phrase(&name, "PROPN", "nsubj", 0);
            let lemma = ["fail", "malfunction", "explode"][rng.gen_range(0..3)];
            let v = b.push(&format!("{lemma}ed"), lemma, "VERB", "root");
            b.head(s, v);
        }
        3 => {
            // AGENCY retired SAT .
            let o = b.name(&agency(rng.gen_range(k())), "nsubj");
            let v = b.push("retired", "retire", "VERB", "root");
            b.head(o, v);
            if rng.gen_bool(0.7) {
                b.phrase(&satellite(rng.gen_range(k())), "PROPN", "obj", v);
            } else {
                let n = b.push("telescope", "telescope", "NOUN", "obj");
                b.head(n, v);
            }
        }
        4 => {
            // Controllers lost contact with SAT .
            let n = b.push("Controllers", "controller", "NOUN", "nsubj");
            let v = b.push("lost", "lose", "VERB", "root");
            let c = b.push("contact", "contact", "NOUN", "obj");
            let w = b.push("with", "with", "ADP", "case");
            b.head(n, v);
            b.head(c, v);
            let s = b.phrase(&satellite(rng.gen_range(k())), "PROPN", "obl", v);
            b.head(w, s);
        }
        5 => {
            // The SAT launch ...  (nominal trigger)
            let d = b.push("The", "the", "DET", "det");
            let s = b.phrase(&satellite(rng.gen_range(k())), "PROPN", "compound", 0);
            let n = b.push("launch", "launch", "NOUN", "root");
            b.head(d, n);
            b.head(s, n);
        }
        _ => {
            // VEHICLE suffered an engine anomaly .
            let s = b.phrase(&vehicle(rng.gen_range(k())), "PROPN", "nsubj", 0);
            let v = b.push("suffered", "suffer", "VERB", "root");
            b.head(s, v);
            let d = b.push("an", "a", "DET", "det");
            let m = b.push("engine", "engine", "NOUN", "compound");
            let n = b.push("anomaly", "anomaly", "NOUN", "obj");
            b.head(d, n);
            b.head(m, n);
            b.head(n, v);
        }
    }
    // Point any unattached non-root token at the root.
    let root = b.toks.iter().position(|t| t.4 == "root").expect("root");
    for i in 0..b.toks.len() {
        if i != root && b.toks[i].3.is_none() {
            b.head(i, root);
        }
    }
    if let Some(r) = b.toks.get_mut(root) {
        r.3 = None;
    }
    b.build(id)
}

/// `n_docs` documents of `per_doc` sentences; each sentence is an event
/// construction with probability `density`, noise otherwise.
pub fn event_corpus(seed: u64, n_docs: usize, per_doc: usize, density: f64) -> Vec<Document> {
    let mut r = rng(seed);
    (0..n_docs)
        .map(|d| {
            let sentences = (0..per_doc)
                .map(|s| {
                    let id = format!("d{d}-s{s}");
                    if r.gen_bool(density) {
                        event_sentence(&mut r, &id)
                    } else {
                        let len = r.gen_range(8..=16);
                        noise_sentence(&mut r, &id, len, 2000)
                    }
                })
                .collect();
            document(&format!("d{d}"), sentences)
        })
        .collect()
}

/// `n` documents over a `vocab`-word vocabulary with lengths in
/// `len_range`. Roughly a third are light edits of an earlier document,
/// so some pairs land above typical thresholds.
pub fn dedup_corpus(seed: u64, n: usize, vocab: usize, min_len: usize, max_len: usize) -> Vec<Document> {
    let mut r = rng(seed);
    let mut docs: Vec<Document> = Vec::with_capacity(n);
    for i in 0..n {
        let words: Vec<String> = if i > 0 && r.gen_bool(0.35) {
            let src = &docs[r.gen_range(0..i)].sentences[0];
            let mut w: Vec<String> = src.tokens.iter().map(|t| t.surface.clone()).collect();
            let edits = r.gen_range(0..=w.len() / 8);
            for _ in 0..edits {
                let at = r.gen_range(0..w.len());
                w[at] = noise_word(r.gen_range(0..vocab));
            }
            w
        } else {
            let len = r.gen_range(min_len..=max_len);
            (0..len)
                .map(|_| {
                    if r.gen_bool(0.05) {
                        ",".to_string()
                    } else {
                        noise_word(r.gen_range(0..vocab))
                    }
                })
                .collect()
        };
        let spec: Vec<Spec<'_>> = words
            .iter()
            .enumerate()
            .map(|(j, w)| {
                (
                    w.as_str(),
                    w.as_str(),
                    "X",
                    if j == 0 { None } else { Some(0) },
                    if j == 0 { "root" } else { "dep" },
                    None,
                )
            })
            .collect();
        let mut doc = document(&format!("doc{i:04}"), vec![sentence("s0", &spec)]);
        doc.collected_at = Some(format!("2015-{:02}-{:02}", r.gen_range(1..=12), r.gen_range(1..=28)));
        docs.push(doc);
    }
    docs
}

/// Lowercased counts of tokens that contain an alphanumeric character.
pub fn oracle_counts(doc: &Document) -> HashMap<String, u64> {
    let mut m = HashMap::new();
    for s in &doc.sentences {
        for t in &s.tokens {
            if t.surface.chars().any(char::is_alphanumeric) {
                *m.entry(t.surface.to_lowercase()).or_insert(0) += 1;
            }
        }
    }
    m
}

pub fn oracle_cosine(a: &HashMap<String, u64>, b: &HashMap<String, u64>) -> f64 {
    let dot: u64 = a.iter().map(|(k, v)| v * b.get(k).copied().unwrap_or(0)).sum();
    let na: u64 = a.values().map(|v| v * v).sum();
    let nb: u64 = b.values().map(|v| v * v).sum();
    if na == 0 || nb == 0 {
        return 0.0;
    }
    (dot as f64 / ((na as u128 * nb as u128) as f64).sqrt()).min(1.0)
}

/// All-pairs similarity, then connected components by breadth-first
/// search. Pool id is the smallest member id.
pub fn oracle_pools(docs: &[Document], threshold: f64) -> BTreeMap<String, String> {
    let vecs: Vec<_> = docs.iter().map(oracle_counts).collect();
    let n = docs.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if oracle_cosine(&vecs[i], &vecs[j]) > threshold {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = BTreeMap::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut q = std::collections::VecDeque::from([start]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                    q.push_back(y);
                }
            }
        }
        let id = comp.iter().map(|&i| docs[i].id.clone()).min().unwrap();
        for i in comp {
            out.insert(docs[i].id.clone(), id.clone());
        }
    }
    out
}

const TRIGGER_LEMMAS: &[&str] = &["launch", "fail", "retire", "lose", "contact", "suffer", "the", "be"];

fn random_value<R: Rng>(rng: &mut R) -> String {
    if rng.gen_bool(0.4) {
        TRIGGER_LEMMAS.choose(rng).unwrap().to_string()
    } else {
        noise_word(rng.gen_range(0..300))
    }
}

fn random_atom_text<R: Rng>(rng: &mut R, indexed: bool) -> String {
    let field = if indexed {
        ["surface", "lemma"][rng.gen_range(0..2)]
    } else {
        ["surface", "lemma", "pos", "ner"][rng.gen_range(0..4)]
    };
    let n = rng.gen_range(1..=3);
    let values: Vec<String> = (0..n)
        .map(|_| match field {
            "pos" => NOISE_POS.choose(rng).unwrap().to_string(),
            "ner" => "DATE".to_string(),
            _ => {
                let v = random_value(rng);
                if rng.gen_bool(0.2) {
                    v.to_uppercase()
                } else {
                    v
                }
            }
        })
        .collect();
    format!("{field}={}", values.join("|"))
}

/// Random back-off rule text with a 1-3 token trigger.
pub fn random_rule_text<R: Rng>(rng: &mut R, name: &str) -> String {
    let patterns: Vec<String> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let alts: Vec<String> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let mut atoms = vec![random_atom_text(rng, true)];
                    for _ in 0..rng.gen_range(0..=2) {
                        let neg = if rng.gen_bool(0.3) { "!" } else { "" };
                        atoms.push(format!("{neg}{}", random_atom_text(rng, false)));
                    }
                    atoms.join(" & ")
                })
                .collect();
            format!("[{}]", alts.join(" | "))
        })
        .collect();
    format!(
        "rule {name} {{\n  event: LAUNCH\n  tier: backoff\n  trigger: {}\n  slot SatelliteName optional {{ path: >obj  filler: chunk }}\n}}\n",
        patterns.join(" ")
    )
}

fn oracle_atom(a: &Atom, t: &Token) -> bool {
    let hit = match a.field {
        Field::Surface => a.values.iter().any(|v| t.surface.to_lowercase() == v.to_lowercase()),
        Field::Lemma => a.values.iter().any(|v| t.lemma.to_lowercase() == v.to_lowercase()),
        Field::Pos => a.values.iter().any(|v| &t.pos == v),
        Field::Ner => t.generic_ner.as_ref().is_some_and(|n| a.values.contains(n)),
    };
    hit != a.negated
}

/// Start positions where the rule's trigger matches, by direct
/// interpretation of the pattern tree.
pub fn oracle_trigger_starts(rule: &Rule, s: &Sentence) -> BTreeSet<usize> {
    let k = rule.trigger.len();
    (0..s.tokens.len().saturating_sub(k - 1))
        .filter(|&start| {
            rule.trigger.iter().enumerate().all(|(j, p)| {
                p.alternatives
                    .iter()
                    .any(|alt| alt.iter().all(|a| oracle_atom(a, &s.tokens[start + j])))
            })
        })
        .collect()
}

pub fn event(t: EventType, sentence: &str, slots: &[(&str, usize, usize)]) -> EventMention {
    let mut map: BTreeMap<String, Vec<SlotFill>> = BTreeMap::new();
    for (name, start, end) in slots {
        map.entry(name.to_string()).or_default().push(SlotFill {
            start: *start,
            end: *end,
            kind: FillerKind::Unspecified,
        });
    }
    EventMention {
        doc_id: "d".into(),
        sentence_id: sentence.into(),
        event_type: t,
        rule: "r".into(),
        tier: Tier::Backoff,
        trigger: (0, 1),
        slots: map,
    }
}

/// Three validation cases per event type with their expected outcome.
pub fn validation_cases() -> Vec<(EventMention, Validity)> {
    use schema::*;
    let missing = |slots: &[&'static str]| Validity::Invalid(InvalidReason::MissingMandatory(slots.to_vec()));
    let unknown = |slot: &str| Validity::Invalid(InvalidReason::UnknownSlot(slot.into()));
    vec![
        (
            event(EventType::Launch, "l1", &[(SATELLITE_NAME, 2, 3), (DATE, 5, 6)]),
            Validity::Valid,
        ),
        (
            event(EventType::Launch, "l2", &[(LAUNCH_VEHICLE, 2, 3), (ORGANIZATION, 0, 1)]),
            missing(&[SATELLITE_NAME]),
        ),
        (
            event(EventType::Launch, "l3", &[(SATELLITE_NAME, 2, 3), (FAILURE_TYPE, 4, 6)]),
            unknown(FAILURE_TYPE),
        ),
        (
            event(EventType::Failure, "f1", &[(LAUNCH_VEHICLE, 1, 2)]),
            Validity::Valid,
        ),
        (
            event(
                EventType::Failure,
                "f2",
                &[(SATELLITE_NAME, 1, 2), (FAILURE_TYPE, 3, 5)],
            ),
            Validity::Valid,
        ),
        (
            event(EventType::Failure, "f3", &[(FAILURE_TYPE, 3, 5), (DATE, 6, 7)]),
            missing(&[SATELLITE_NAME, LAUNCH_VEHICLE]),
        ),
        (
            event(EventType::Decommissioning, "x1", &[(SATELLITE_NAME, 2, 3)]),
            Validity::Valid,
        ),
        (
            event(EventType::Decommissioning, "x2", &[(ORGANIZATION, 0, 1), (DATE, 4, 5)]),
            missing(&[SATELLITE_NAME]),
        ),
        (
            event(
                EventType::Decommissioning,
                "x3",
                &[(SATELLITE_NAME, 2, 3), (LAUNCH_SITE, 5, 7)],
            ),
            unknown(LAUNCH_SITE),
        ),
    ]
}

pub const GOLD: &str = include_str!("../fixtures/gold.jsonl");
pub const PRED: &str = include_str!("../fixtures/pred.jsonl");
pub const ANNOTATIONS: &str = include_str!("../fixtures/annotations.jsonl");
pub const ANNOTATORS: &str = include_str!("../fixtures/annotators.jsonl");

/// Hand-counted (event, slot, tp, fp, fn) for the gold/pred fixture.
pub const FIXTURE_COUNTS: &[(EventType, &str, usize, usize, usize)] = &[
    (EventType::Launch, "SatelliteName", 1, 1, 1),
    (EventType::Launch, "LaunchVehicle", 0, 1, 1),
    (EventType::Launch, "LaunchSite", 1, 0, 0),
    (EventType::Launch, "TargetOrbit", 0, 0, 0),
    (EventType::Launch, "Organization", 1, 1, 0),
    (EventType::Launch, "Date", 1, 0, 1),
    (EventType::Failure, "SatelliteName", 0, 1, 0),
    (EventType::Failure, "LaunchVehicle", 1, 0, 0),
    (EventType::Failure, "FailureType", 0, 0, 1),
    (EventType::Failure, "Organization", 0, 0, 0),
    (EventType::Failure, "Date", 0, 0, 0),
    (EventType::Decommissioning, "SatelliteName", 1, 0, 0),
    (EventType::Decommissioning, "Organization", 1, 0, 0),
    (EventType::Decommissioning, "Date", 1, 0, 0),
];

/// Hand-computed (slot, precision, recall, f1, n) pooled across events.
pub const FIXTURE_MICRO: &[(&str, f64, f64, f64, usize)] = &[
    ("Organization", 200.0 / 3.0, 100.0, 80.0, 2),
    ("Date", 100.0, 200.0 / 3.0, 80.0, 3),
];

/// Hand-counted (event, split, sentences, tagged, total) for the stats fixture.
pub const FIXTURE_STATS: &[(EventType, Split, usize, usize, usize)] = &[
    (EventType::Launch, Split::Train, 2, 9, 18),
    (EventType::Launch, Split::Dev, 1, 4, 12),
    (EventType::Failure, Split::Train, 1, 4, 10),
    (EventType::Failure, Split::Test, 1, 0, 7),
    (EventType::Decommissioning, Split::Test, 1, 2, 5),
];
pub const FIXTURE_DISTINCT_SENTENCES: usize = 5;

pub fn annotator_layers() -> Vec<AnnotationLayer> {
    #[derive(serde::Deserialize)]
    struct Line {
        annotator: String,
        sentence_id: String,
        spans: Vec<LabeledSpan>,
    }
    let mut by: BTreeMap<String, BTreeMap<String, Vec<LabeledSpan>>> = BTreeMap::new();
    for l in ANNOTATORS.lines() {
        let l: Line = serde_json::from_str(l).unwrap();
        by.entry(l.annotator).or_default().insert(l.sentence_id, l.spans);
    }
    by.into_iter()
        .map(|(id, s)| AnnotationLayer::new(id, s).unwrap())
        .collect()
}

/// Spans holding a strict majority (2 of 3) in the annotator fixture.
pub fn fixture_consensus() -> BTreeMap<String, Vec<LabeledSpan>> {
    let s = |a, b, l: &str| LabeledSpan::new(a, b, l);
    BTreeMap::from([
        ("a".to_string(), vec![s(0, 2, "SatelliteName"), s(3, 4, "Date")]),
        ("b".to_string(), vec![s(1, 2, "LaunchVehicle"), s(4, 5, "LaunchSite")]),
        ("c".to_string(), vec![s(0, 1, "Organization"), s(2, 3, "SatelliteName")]),
    ])
}

/// Hand-counted (annotator, tp, fp, fn) against the fixture consensus.
pub const FIXTURE_AGREEMENT: &[(&str, usize, usize, usize)] = &[("A1", 4, 1, 2), ("A2", 5, 0, 1), ("A3", 3, 1, 3)];

const LAYOUT_LABELS: &[&str] = &["SatelliteName", "LaunchVehicle", "Date", "X"];

/// A sentence length and a sorted, non-overlapping span layout over it.
pub fn random_layout<R: Rng>(rng: &mut R) -> (usize, Vec<LabeledSpan>) {
    let len = rng.gen_range(0..40);
    let mut spans = Vec::new();
    let mut i = 0;
    while i < len {
        if rng.gen_bool(0.35) {
            let end = rng.gen_range(i + 1..=len.min(i + 5));
            spans.push(LabeledSpan::new(i, end, *LAYOUT_LABELS.choose(rng).unwrap()));
            i = end;
        } else {
            i += 1;
        }
    }
    (len, spans)
}

/// (tags, expected spans) for ill-formed BIO sequences.
pub fn lenient_bio_cases() -> Vec<(&'static str, Vec<LabeledSpan>)> {
    let s = |a, b, l: &str| LabeledSpan::new(a, b, l);
    vec![
        ("O I-X I-X", vec![s(1, 3, "X")]),
        ("I-X", vec![s(0, 1, "X")]),
        ("B-X I-Y I-Y", vec![s(0, 1, "X"), s(1, 3, "Y")]),
        ("B-X O I-X", vec![s(0, 1, "X"), s(2, 3, "X")]),
        ("B-X B-X I-X", vec![s(0, 1, "X"), s(1, 3, "X")]),
    ]
}

mod common;

use ssa_core::document::parse_conllu;
use ssa_core::ner::{compile_gazetteer, parse_gazetteer_tsv, NerTagger};
use ssa_core::pipeline::schema::{EventType, GENERIC_SLOTS, SATELLITE_NAME};
use ssa_core::pipeline::{
    annotation_tasks, export_for_annotation, shortlist, validate_event, AnnotationTask, SampleFractions, TASK_FORMAT,
};
use ssa_core::rules::extract_events;

#[test]
fn schema_inventory() {
    let counts: Vec<(EventType, usize, usize)> = EventType::ALL
        .iter()
        .map(|t| {
            let s = t.schema();
            (*t, s.slots.len(), s.slots.iter().filter(|x| x.generic).count())
        })
        .collect();
    assert_eq!(
        counts,
        [
            (EventType::Launch, 6, 2),
            (EventType::Failure, 5, 2),
            (EventType::Decommissioning, 3, 2)
        ]
    );
    for t in EventType::ALL {
        for g in GENERIC_SLOTS {
            assert!(t.schema().has_slot(g));
        }
    }
}

#[test]
fn nine_validation_cases() {
    let cases = common::validation_cases();
    assert_eq!(cases.len(), 9);
    for (event, expected) in &cases {
        assert_eq!(
            &validate_event(event, event.event_type.schema()).unwrap(),
            expected,
            "{}",
            event.sentence_id
        );
    }
}

#[test]
fn sampled_counts_round_half_up_per_type() {
    let mut events = Vec::new();
    for i in 0..45 {
        events.push(common::event(
            EventType::Launch,
            &format!("l{i}"),
            &[(SATELLITE_NAME, 1, 2)],
        ));
    }
    for i in 0..7 {
        events.push(common::event(
            EventType::Decommissioning,
            &format!("x{i}"),
            &[(SATELLITE_NAME, 1, 2)],
        ));
    }
    let sample = SampleFractions::from([(EventType::Launch, 0.3), (EventType::Decommissioning, 0.5)]);
    for seed in 0..20 {
        let sl = shortlist(&events, &sample, seed).unwrap();
        let sampled = |t: EventType| sl.iter().filter(|c| c.event_type == t && c.sampled).count();
        // 13.5 -> 14, 3.5 -> 4
        assert_eq!(sampled(EventType::Launch), 14);
        assert_eq!(sampled(EventType::Decommissioning), 4);
    }
}

#[test]
fn news_fixture_end_to_end_export() {
    let docs = parse_conllu(include_str!("fixtures/news.conllu").as_bytes()).unwrap();
    let entries = parse_gazetteer_tsv(common::REFERENCE_GAZETTEER.as_bytes()).unwrap();
    let tagger = NerTagger::new(Some(compile_gazetteer(&entries).unwrap()));
    let events = extract_events(&docs, &common::reference_rules(), None, &tagger).unwrap();
    let sl = shortlist(&events, &SampleFractions::new(), 3).unwrap();
    assert!(sl.iter().all(|c| c.sampled));
    assert_eq!(sl.len(), 8);

    let text = export_for_annotation(&sl, &docs).unwrap();
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["format"], TASK_FORMAT);
    assert_eq!(header["version"], 1);
    assert_eq!(header["records"], sl.len());
    let tasks: Vec<AnnotationTask> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(tasks, annotation_tasks(&sl, &docs).unwrap());
    let first = &tasks[0];
    assert_eq!(first.sentence_id, "d1-s1");
    assert_eq!(first.tokens[2], "Telkom-3");
    assert!(first
        .suggestions
        .iter()
        .any(|s| s.label == SATELLITE_NAME && (s.start, s.end) == (2, 3)));
}

#[test]
fn export_rejects_unknown_sentence() {
    let events = vec![common::event(EventType::Launch, "nowhere", &[(SATELLITE_NAME, 0, 1)])];
    let sl = shortlist(&events, &SampleFractions::new(), 0).unwrap();
    assert!(export_for_annotation(&sl, &[]).is_err());
}

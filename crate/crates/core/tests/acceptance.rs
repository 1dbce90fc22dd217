//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines always show; exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use muse_anno::cq::{answer_cq, oracle_cq, Cell};
use muse_anno::iri::Iri;
use muse_anno::jams::{lower_document, parse_jams, LoweringOptions};
use muse_anno::model::{Modality, Model, MusicObservation, ObservationValue, ObservationValueKind, TimeValueType};
use muse_anno::rdf::{emit_graph, parse_turtle, serialize_turtle, GraphView};
use muse_anno::validate::{validate_graph, validate_model, Code};
use muse_anno::vocab::ma;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

fn lowered(text: &str, modality: Modality, key: &str) -> Model {
    let mut opts = LoweringOptions::new(modality, "http://example.org/");
    opts.document_key = Some(key.into());
    lower_document(&parse_jams(text).unwrap(), &opts).unwrap()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn listing_fidelity() {
    let started = Instant::now();
    let doc = parse_jams(BOHEMIAN).unwrap();
    let fm = &doc.file_metadata;
    assert_eq!(fm.title, "01 Bohemian Rhapsody");
    assert_eq!(fm.artist, "Queen");
    assert_eq!(fm.duration.unwrap().to_string(), "358.293");
    assert_eq!(fm.jams_version, "0.2.0");
    assert_eq!(doc.annotations.len(), 1);
    let block = &doc.annotations[0];
    assert_eq!(block.namespace, "chord");
    assert_eq!(block.annotation_metadata.curator_name.as_deref(), Some("Matthias Mauch"));
    assert_eq!(block.annotation_metadata.corpus.as_deref(), Some("Isophonics"));
    let text = |f: &dyn Fn(&muse_anno::jams::JamsObservationRow) -> String| block.data.iter().map(f).collect::<Vec<_>>();
    assert_eq!(text(&|r| r.value.clone()), ["N", "Bb:maj6", "C:7"]);
    assert_eq!(text(&|r| r.time.to_string()), ["0.0", "0.459", "4.122"]);
    assert_eq!(text(&|r| r.duration.to_string()), ["0.459", "3.663", "0.789"]);
    assert_eq!(text(&|r| r.confidence.unwrap().to_string()), ["1.0", "1.0", "1.0"]);
    assert!(started.elapsed() < Duration::from_secs(1));
}

fn golden_bytes() {
    let mozart = serialize_turtle(&emit_graph(&mozart_model()).unwrap());
    assert_eq!(mozart, MOZART_GOLDEN, "mozart golden");
    let michelle = serialize_turtle(&emit_graph(&michelle_model()).unwrap());
    assert_eq!(michelle, MICHELLE_GOLDEN, "michelle golden");
}

fn violation_injection() {
    let mut passed = 0;
    for code in ERROR_CODES {
        let from_graph = error_codes(&validate_graph(&graph_injection(code)));
        let from_model = model_injection(code).map(|m| error_codes(&validate_model(&m)));
        let ok = from_graph == [code] && from_model.as_ref().is_none_or(|c| c == &[code]);
        if ok {
            passed += 1;
        } else {
            eprintln!("  {code}: graph {from_graph:?}, model {from_model:?}");
        }
    }
    assert_eq!(passed, 10, "{passed}/10 injections isolated");
}

fn round_trip() {
    runner(256)
        .run(&valid_model(), |m| {
            let graph = emit_graph(&m).unwrap();
            let text = serialize_turtle(&graph);
            assert_eq!(text, serialize_turtle(&emit_graph(&m).unwrap()));
            let back = parse_turtle(&text).unwrap();
            assert!(back.same_triples(&graph));
            Ok(())
        })
        .unwrap();
}

fn property_chain() {
    runner(256)
        .run(&valid_model(), |m| {
            let graph = emit_graph(&m).unwrap();
            let view = GraphView::new(&graph);
            let annotator_column = |subject: &Iri| -> Vec<Cell> {
                answer_cq(8, &graph, Some(subject)).unwrap().rows.into_iter().map(|r| r[1].clone()).collect()
            };
            for a in &m.annotations {
                let of_annotation = annotator_column(&a.id);
                assert_eq!(of_annotation, [Cell::Iri(a.annotator.id.clone())]);
                for o in &a.observations {
                    assert_eq!(view.object_iris(&o.id, &ma::has_annotator()), [&a.annotator.id]);
                    assert_eq!(annotator_column(&o.id), of_annotation);
                }
            }
            Ok(())
        })
        .unwrap();
}

/// Every CQ with every admissible subject, graph against model.
fn assert_cq_equivalence(m: &Model) {
    let graph = emit_graph(m).unwrap();
    let annotations: Vec<&Iri> = m.annotations.iter().map(|a| &a.id).collect();
    let observations: Vec<&Iri> = m.observations().map(|(_, o)| &o.id).collect();
    let objects: Vec<&Iri> = m.objects.iter().map(|o| &o.id).collect();
    for cq in 1..=10u8 {
        let mut subjects: Vec<Option<&Iri>> = Vec::new();
        let (required, pool): (bool, Vec<&Iri>) = match cq {
            1 => (false, [&objects[..], &annotations, &observations].concat()),
            2 | 4 => (false, annotations.clone()),
            3 => (true, annotations.clone()),
            5 | 6 | 7 | 9 => (true, observations.clone()),
            8 => (false, [&annotations[..], &observations].concat()),
            _ => (false, [&annotations[..], &objects].concat()),
        };
        if !required {
            subjects.push(None);
        }
        subjects.extend(pool.into_iter().map(Some));
        for s in subjects {
            assert_eq!(answer_cq(cq, &graph, s), oracle_cq(cq, m, s), "CQ{cq} subject {s:?}");
        }
    }
}

fn cq_oracle_equivalence() {
    for m in [
        mozart_model(),
        michelle_model(),
        lowered(BOHEMIAN, Modality::Audio, "bohemian"),
        lowered(MICHELLE, Modality::Audio, "michelle"),
        lowered(MOZART, Modality::Score, "mozart"),
    ] {
        assert_cq_equivalence(&m);
    }
    let mut runner = runner(50);
    let strategy = valid_model();
    for _ in 0..50 {
        let m = strategy.new_tree(&mut runner).unwrap().current();
        assert_cq_equivalence(&m);
    }
}

fn modality_shape() {
    let mut runner = runner(128);
    runner
        .run(&valid_model_of(Modality::Audio, 20), |m| {
            assert!(!validate_model(&m).iter().any(|v| v.code == Code::V5));
            for (a, o) in m.observations() {
                for interval in [&a.interval, &o.interval] {
                    let types: Vec<_> = interval.index.components.iter().map(|c| c.value_type).collect();
                    assert_eq!(types, [TimeValueType::Seconds]);
                }
            }
            Ok(())
        })
        .unwrap();
    runner
        .run(&valid_model_of(Modality::Score, 20), |m| {
            assert!(!validate_model(&m).iter().any(|v| v.code == Code::V6));
            for (a, o) in m.observations() {
                for interval in [&a.interval, &o.interval] {
                    let types: Vec<_> = interval.index.components.iter().map(|c| c.value_type).collect();
                    assert_eq!(types, [TimeValueType::Measure, TimeValueType::Beat]);
                }
            }
            Ok(())
        })
        .unwrap();

    let cross = (modality(), 0usize..3).prop_flat_map(|(modality, at)| {
        let other = match modality {
            Modality::Audio => Modality::Score,
            Modality::Score => Modality::Audio,
        };
        (valid_model_of(modality, 20), interval(other)).prop_map(move |(m, i)| (m, other, i, at))
    });
    runner
        .run(&cross, |(mut m, other, interval, at)| {
            let a = at % m.annotations.len();
            let id = Iri::new(format!("{}-foreign", m.annotations[a].id)).unwrap();
            let value = ObservationValue::new(id.derive("-value"), ObservationValueKind::Chord, "X").unwrap();
            m.annotations[a].observations.push(MusicObservation::new(id, other, interval, value, None));
            assert!(validate_model(&m).iter().any(|v| v.code == Code::V4));
            assert!(validate_graph(&muse_anno::rdf::emit_graph_unchecked(&m)).iter().any(|v| v.code == Code::V4));
            Ok(())
        })
        .unwrap();
}

fn end_time_arithmetic() {
    let m = lowered(BOHEMIAN, Modality::Audio, "bohemian");
    let observations = &m.annotations[0].observations;
    let end = observations[1].interval.end().unwrap();
    assert_eq!(end.value.to_string(), "4.122");
    assert_eq!(end.value_type, TimeValueType::Seconds);
    assert_eq!(end.value, observations[2].interval.index.components[0].value);
}

fn main() {
    let criteria: [(&str, fn()); 8] = [
        ("listing fidelity", listing_fidelity),
        ("usage-example goldens", golden_bytes),
        ("violation injection", violation_injection),
        ("round-trip and determinism", round_trip),
        ("property chain", property_chain),
        ("CQ oracle equivalence", cq_oracle_equivalence),
        ("modality shape", modality_shape),
        ("end-time arithmetic", end_time_arithmetic),
    ];
    panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let ok = panic::catch_unwind(AssertUnwindSafe(check)).is_ok();
        failed += usize::from(!ok);
        println!("criterion {} {name}: {} ({:.2?})", n + 1, if ok { "PASS" } else { "FAIL" }, started.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

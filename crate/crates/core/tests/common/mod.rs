#![allow(dead_code)]

use std::str::FromStr;

use muse_anno::iri::Iri;
use muse_anno::model::{
    make_audio_index, make_score_index, Annotator, AnnotatorType, Modality, Model, MusicAnnotation,
    MusicObservation, MusicTimeDuration, MusicTimeIndex, MusicTimeIndexComponent, MusicTimeInterval,
    MusicalObjectKind, MusicalObjectRef, ObservationValue, ObservationValueKind, TimeValueType,
};
use muse_anno::rdf::{emit_graph, emit_graph_unchecked, RdfGraph, Triple};
use muse_anno::validate::{Code, Severity, Violation};
use muse_anno::vocab::ma;
use proptest::prelude::*;
use rust_decimal::Decimal;

pub const BOHEMIAN: &str = include_str!("../fixtures/jams/bohemian.jams");
pub const MICHELLE: &str = include_str!("../fixtures/jams/michelle.jams");
pub const MOZART: &str = include_str!("../fixtures/score/mozart.jams");
pub const MOZART_GOLDEN: &str = include_str!("../fixtures/golden/mozart.ttl");
pub const MICHELLE_GOLDEN: &str = include_str!("../fixtures/golden/michelle.ttl");

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn ex(local: &str) -> Iri {
    Iri::new(format!("http://example.org/{local}")).unwrap()
}

pub fn dec(text: &str) -> Decimal {
    Decimal::from_str(text).unwrap()
}

fn interval_audio(start: &str, duration: &str) -> MusicTimeInterval {
    MusicTimeInterval::new(
        make_audio_index(dec(start)).unwrap(),
        MusicTimeDuration::new(dec(duration), TimeValueType::Seconds).unwrap(),
    )
}

fn interval_score(measure: i64, beat: &str, beats: &str) -> MusicTimeInterval {
    MusicTimeInterval::new(
        make_score_index(measure, dec(beat)).unwrap(),
        MusicTimeDuration::new(dec(beats), TimeValueType::Beat).unwrap(),
    )
}

/// Chord annotation of a score: two observations, a human annotator, no
/// confidence.
pub fn mozart_model() -> Model {
    let score = ex("MozartPianoSonataScore");
    let annotator = Annotator { id: ex("MozartAnnotator"), name: None, annotator_type: AnnotatorType::Human };
    let observation = |n: u8, measure: i64, value: &str, label: &str| {
        MusicObservation::new(
            ex(&format!("ChordObservation{n}")),
            Modality::Score,
            interval_score(measure, "1", "4"),
            ObservationValue::new(ex(value), ObservationValueKind::Chord, label).unwrap(),
            None,
        )
    };
    let annotation = MusicAnnotation::new(
        ex("ScoreAnnotation"),
        Modality::Score,
        score.clone(),
        annotator,
        interval_score(1, "1", "8"),
        ObservationValueKind::Chord,
    )
    .attach_observation(observation(1, 1, "CMajor", "C:maj"))
    .unwrap()
    .attach_observation(observation(2, 2, "GDominantSeventh", "G:7"))
    .unwrap();
    Model {
        objects: vec![MusicalObjectRef {
            id: score,
            kind: MusicalObjectKind::Score,
            title: "Piano Sonata no. 1 in C major (Allegro)".into(),
            artist: Some("Wolfgang Amadeus Mozart".into()),
            duration: None,
        }],
        annotations: vec![annotation],
    }
}

/// Segment annotation of a track: Silence then Intro, in seconds.
pub fn michelle_model() -> Model {
    let track = ex("BeatlesMichelleTrack");
    let annotator = Annotator { id: ex("MichelleAnnotator"), name: None, annotator_type: AnnotatorType::Human };
    let observation = |n: u8, start: &str, duration: &str, value: &str| {
        MusicObservation::new(
            ex(&format!("SegmentObservation{n}")),
            Modality::Audio,
            interval_audio(start, duration),
            ObservationValue::new(ex(value), ObservationValueKind::Segment, value).unwrap(),
            None,
        )
    };
    let annotation = MusicAnnotation::new(
        ex("AudioMusicAnnotation"),
        Modality::Audio,
        track.clone(),
        annotator,
        interval_audio("0.0", "9.520"),
        ObservationValueKind::Segment,
    )
    .attach_observation(observation(1, "0.0", "0.418", "Silence"))
    .unwrap()
    .attach_observation(observation(2, "0.418", "9.102", "Intro"))
    .unwrap();
    Model {
        objects: vec![MusicalObjectRef {
            id: track,
            kind: MusicalObjectKind::Track,
            title: "Michelle".into(),
            artist: Some("The Beatles".into()),
            duration: Some(dec("160.0")),
        }],
        annotations: vec![annotation],
    }
}

// Generators.

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z0-9 :#/]{1,12}",
        "[ -~]{1,10}",
        Just("say \"hi\"\n\tbye\\".to_owned()),
        Just("Dvořák – Ⅳ".to_owned()),
    ]
}

fn annotator_type() -> impl Strategy<Value = AnnotatorType> {
    prop_oneof![
        Just(AnnotatorType::Human),
        Just(AnnotatorType::Machine),
        Just(AnnotatorType::Crowdsourcing),
        "[A-Za-z][a-z ]{0,8}".prop_map(AnnotatorType::Other),
    ]
}

fn value_kind() -> impl Strategy<Value = ObservationValueKind> {
    prop_oneof![
        Just(ObservationValueKind::Chord),
        Just(ObservationValueKind::Segment),
        "[a-z_]{1,10}".prop_map(ObservationValueKind::Generic),
    ]
}

/// Start and duration for one interval of the given modality.
pub fn interval(modality: Modality) -> BoxedStrategy<MusicTimeInterval> {
    match modality {
        Modality::Audio => (0u32..600_000, 0u32..60_000, 0u32..4)
            .prop_map(|(start, duration, scale)| {
                MusicTimeInterval::new(
                    make_audio_index(Decimal::new(start as i64, scale)).unwrap(),
                    MusicTimeDuration::new(Decimal::new(duration as i64, 3), TimeValueType::Seconds).unwrap(),
                )
            })
            .boxed(),
        Modality::Score => (1i64..300, 10i64..=49, 0i64..=160)
            .prop_map(|(measure, beat, beats)| {
                MusicTimeInterval::new(
                    make_score_index(measure, Decimal::new(beat, 1)).unwrap(),
                    MusicTimeDuration::new(Decimal::new(beats, 1), TimeValueType::Beat).unwrap(),
                )
            })
            .boxed(),
    }
}

fn observation(modality: Modality, a: usize, j: usize) -> impl Strategy<Value = MusicObservation> {
    (interval(modality), value_kind(), text(), proptest::option::of(0i64..=1000)).prop_map(
        move |(interval, kind, label, confidence)| {
            MusicObservation::new(
                ex(&format!("gen/obs-{a}-{j}")),
                modality,
                interval,
                ObservationValue::new(ex(&format!("gen/val-{a}-{j}")), kind, label).unwrap(),
                confidence.map(|c| Decimal::new(c, 3)),
            )
        },
    )
}

fn annotation(modality: Modality, a: usize, max_obs: usize) -> impl Strategy<Value = MusicAnnotation> {
    let observations = (0..=max_obs).prop_flat_map(move |n| (0..n).map(|j| observation(modality, a, j)).collect::<Vec<_>>());
    (interval(modality), value_kind(), proptest::option::of(text()), annotator_type(), observations).prop_map(
        move |(interval, kind, name, annotator_type, observations)| {
            let annotator = Annotator { id: ex(&format!("gen/annotator-{a}")), name, annotator_type };
            observations.into_iter().fold(
                MusicAnnotation::new(ex(&format!("gen/ann-{a}")), modality, ex("gen/object"), annotator, interval, kind),
                |ann, o| ann.attach_observation(o).unwrap(),
            )
        },
    )
}

/// Valid models of one modality: one object and one to three annotations
/// holding at most `max_obs` observations between them.
pub fn valid_model_of(modality: Modality, max_obs: usize) -> impl Strategy<Value = Model> {
    let kind = match modality {
        Modality::Audio => MusicalObjectKind::Track,
        Modality::Score => MusicalObjectKind::Score,
    };
    let annotations =
        (1usize..=3).prop_flat_map(move |n| (0..n).map(|a| annotation(modality, a, max_obs / n)).collect::<Vec<_>>());
    (text(), proptest::option::of(text()), annotations).prop_map(move |(title, artist, annotations)| Model {
        objects: vec![MusicalObjectRef { id: ex("gen/object"), kind, title, artist, duration: None }],
        annotations,
    })
}

pub fn valid_model() -> impl Strategy<Value = Model> {
    prop_oneof![valid_model_of(Modality::Audio, 20), valid_model_of(Modality::Score, 20)]
}

pub fn modality() -> impl Strategy<Value = Modality> {
    prop_oneof![Just(Modality::Audio), Just(Modality::Score)]
}

// Single-rule violations.

fn first_observation(model: &mut Model) -> &mut MusicObservation {
    &mut model.annotations[0].observations[0]
}

/// A model breaking only `code`, for the codes a model can express.
pub fn model_injection(code: Code) -> Option<Model> {
    let mut m = michelle_model();
    match code {
        Code::V2 => first_observation(&mut m).interval.index = MusicTimeIndex { components: vec![] },
        Code::V3 => first_observation(&mut m).interval.index.components[0].value = dec("-0.5"),
        Code::V4 => {
            let o = &mut m.annotations[0].observations[1];
            o.modality = Modality::Score;
            o.interval = MusicTimeInterval::new(
                make_score_index(1, dec("1")).unwrap(),
                MusicTimeDuration::new(dec("2"), TimeValueType::Beat).unwrap(),
            );
        }
        Code::V5 => first_observation(&mut m)
            .interval
            .index
            .components
            .push(MusicTimeIndexComponent::new(dec("0"), TimeValueType::Milliseconds)),
        Code::V6 => {
            m = mozart_model();
            first_observation(&mut m).interval.index.components.reverse();
        }
        Code::V8 => m.annotations[0].annotator.annotator_type = AnnotatorType::Other(String::new()),
        Code::V9 => first_observation(&mut m).value.id = m.annotations[0].annotator.id.clone(),
        Code::V10 => first_observation(&mut m).confidence = Some(dec("1.5")),
        _ => return None,
    }
    Some(m)
}

/// A graph breaking only `code`.
pub fn graph_injection(code: Code) -> RdfGraph {
    let triple = |s: &str, p: Iri, o: &str| Triple::new(ex(s), p, ex(o));
    match code {
        Code::V1 => {
            let mut g = emit_graph(&michelle_model()).unwrap();
            assert!(g.remove(&triple(
                "SegmentObservation1-interval",
                ma::has_music_time_duration(),
                "SegmentObservation1-duration"
            )));
            g
        }
        Code::V6 => {
            let mut g = emit_graph(&mozart_model()).unwrap();
            assert!(g.remove(&triple(
                "ChordObservation1-index",
                ma::has_music_time_index_component(),
                "ChordObservation1-index-1"
            )));
            g
        }
        Code::V7 => {
            let mut g = emit_graph(&michelle_model()).unwrap();
            g.insert(triple("AudioMusicAnnotation", ma::has_annotator(), "SecondAnnotator"));
            g
        }
        other => emit_graph_unchecked(&model_injection(other).expect("model fixture")),
    }
}

pub const ERROR_CODES: [Code; 10] =
    [Code::V1, Code::V2, Code::V3, Code::V4, Code::V5, Code::V6, Code::V7, Code::V8, Code::V9, Code::V10];

/// Distinct error codes in a report.
pub fn error_codes(violations: &[Violation]) -> Vec<Code> {
    let mut codes: Vec<Code> = violations.iter().filter(|v| v.severity == Severity::Error).map(|v| v.code).collect();
    codes.dedup();
    codes
}

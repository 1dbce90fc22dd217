//! Namespaces and terms used in emitted graphs.
//!
//! Pattern terms live under the published pattern namespace. `hasMusicAnnotation`
//! and `hasMusicObservationValue` are coined here; the pattern leaves those
//! two properties unnamed. Terms under [`MUSE`] are this toolkit's own
//! extension for value kinds.

use crate::iri::Iri;

pub const PATTERN: &str = "https://purl.org/andreapoltronieri/music-annotation-pattern#";
pub const MUSE: &str = "https://w3id.org/muse-anno/vocab#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";
pub const EX: &str = "http://example.org/";

/// Prefixes every emitted graph declares.
pub const DEFAULT_PREFIXES: [(&str, &str); 7] = [
    ("dcterms", DCTERMS),
    ("ex", EX),
    ("ma", PATTERN),
    ("muse", MUSE),
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("xsd", XSD),
];

macro_rules! terms {
    ($ns:expr; $($name:ident = $local:literal),* $(,)?) => {
        $(
            pub fn $name() -> Iri {
                Iri::from_static(concat!($ns, $local))
            }
        )*
    };
}

pub mod rdf {
    use super::*;
    terms!("http://www.w3.org/1999/02/22-rdf-syntax-ns#"; type_ = "type");
}

pub mod rdfs {
    use super::*;
    terms!("http://www.w3.org/2000/01/rdf-schema#"; label = "label");
}

pub mod xsd {
    use super::*;
    terms!("http://www.w3.org/2001/XMLSchema#";
        string = "string",
        decimal = "decimal",
        integer = "integer",
        double = "double",
        boolean = "boolean",
    );
}

pub mod dcterms {
    use super::*;
    terms!("http://purl.org/dc/terms/"; title = "title", creator = "creator");
}

pub mod muse {
    use super::*;
    terms!("https://w3id.org/muse-anno/vocab#";
        value_kind = "valueKind",
        jams_namespace = "jamsNamespace",
        chord = "Chord",
        segment = "Segment",
        generic = "Generic",
    );
}

/// Classes, individuals and properties of the music annotation pattern.
pub mod ma {
    use super::*;
    terms!("https://purl.org/andreapoltronieri/music-annotation-pattern#";
        track = "Track",
        score = "Score",
        audio_annotation = "AudioMusicAnnotation",
        score_annotation = "ScoreMusicAnnotation",
        audio_observation = "AudioMusicObservation",
        score_observation = "ScoreMusicObservation",
        observation_value = "MusicObservationValue",
        annotator = "Annotator",
        annotator_type = "AnnotatorType",
        time_interval = "MusicTimeInterval",
        time_index = "MusicTimeIndex",
        time_index_component = "MusicTimeIndexComponent",
        time_duration = "MusicTimeDuration",
        time_value_type = "MusicTimeValueType",

        human = "Human",
        machine = "Machine",
        crowdsourcing = "Crowdsourcing",
        seconds = "Seconds",
        milliseconds = "Milliseconds",
        minutes = "Minutes",
        measure = "Measure",
        beat = "Beat",

        has_music_annotation = "hasMusicAnnotation",
        includes_music_observation = "includesMusicObservation",
        has_annotator = "hasAnnotator",
        is_annotator_of = "isAnnotatorOf",
        has_annotator_type = "hasAnnotatorType",
        has_music_time_interval = "hasMusicTimeInterval",
        has_music_time_index = "hasMusicTimeIndex",
        has_music_time_duration = "hasMusicTimeDuration",
        has_music_time_index_component = "hasMusicTimeIndexComponent",
        has_music_time_value_type = "hasMusicTimeValueType",
        has_time_value = "hasTimeValue",
        has_confidence = "hasConfidence",
        has_music_observation_value = "hasMusicObservationValue",
    );
}

/// The classes whose instances must be pairwise distinct nodes.
pub fn entity_classes() -> Vec<Iri> {
    vec![
        ma::track(),
        ma::score(),
        ma::audio_annotation(),
        ma::score_annotation(),
        ma::audio_observation(),
        ma::score_observation(),
        ma::observation_value(),
        ma::time_interval(),
        ma::annotator(),
        ma::annotator_type(),
        ma::time_index(),
        ma::time_index_component(),
        ma::time_duration(),
        ma::time_value_type(),
    ]
}

//! Constraint checks for models and graphs.
//!
//! Errors (V1–V10) come from the pattern's axioms. Warnings (W1, W2) are
//! heuristics. Reports are sorted by code, then subject, then message.
//!
//! Some rules cannot be broken in a [`Model`] because the Rust types
//! already enforce them (an interval always has one index and one duration;
//! an annotation always has one annotator). [`validate_graph`] checks those
//! on triples, where anything goes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::Serialize;

use crate::iri::Iri;
use crate::model::{AnnotatorType, IntervalNodes, Modality, Model, MusicTimeInterval, TimeValueType};
use crate::rdf::{GraphView, Literal, RdfGraph};
use crate::vocab::{self, ma, rdfs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    V7,
    V8,
    V9,
    V10,
    W1,
    W2,
}

impl Code {
    pub const ALL: [Code; 12] = [
        Code::V1,
        Code::V2,
        Code::V3,
        Code::V4,
        Code::V5,
        Code::V6,
        Code::V7,
        Code::V8,
        Code::V9,
        Code::V10,
        Code::W1,
        Code::W2,
    ];

    pub fn severity(self) -> Severity {
        match self {
            Code::W1 | Code::W2 => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Code {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::ALL.into_iter().find(|c| c.to_string() == s).ok_or_else(|| UnknownCode(s.to_owned()))
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown violation code `{0}`")]
pub struct UnknownCode(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub code: Code,
    pub subject: Iri,
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    fn new(code: Code, subject: &Iri, message: impl Into<String>) -> Self {
        Self { code, subject: subject.clone(), severity: code.severity(), message: message.into() }
    }

    /// `{"code":..,"subject":..,"severity":..,"message":..}`
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("violations serialize")
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{} {severity} <{}>: {}", self.code, self.subject, self.message)
    }
}

/// Rule text for a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub code: Code,
    pub rule: &'static str,
    pub axiom: &'static str,
    pub hint: &'static str,
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.code, self.rule)?;
        writeln!(f, "  axiom: {}", self.axiom)?;
        write!(f, "  fix: {}", self.hint)
    }
}

pub fn explain(code: &str) -> Result<Explanation, UnknownCode> {
    let code: Code = code.parse()?;
    let (rule, axiom, hint) = match code {
        Code::V1 => (
            "a time interval has exactly one start index and exactly one duration",
            "MusicTimeInterval SubClassOf hasMusicTimeIndex exactly 1 MusicTimeIndex, hasMusicTimeDuration exactly 1 MusicTimeDuration",
            "give the interval a single hasMusicTimeIndex and a single hasMusicTimeDuration",
        ),
        Code::V2 => (
            "a time index has at least one component",
            "MusicTimeIndex SubClassOf hasMusicTimeIndexComponent min 1 MusicTimeIndexComponent",
            "add the start time as a MusicTimeIndexComponent",
        ),
        Code::V3 => (
            "every index component and duration has exactly one time value and one value type from the closed set; values are non-negative, measures are integers >= 1 and start beats are >= 1",
            "MusicTimeIndexComponent SubClassOf hasTimeValue exactly 1 rdfs:Literal, hasMusicTimeValueType exactly 1 MusicTimeValueType",
            "keep one decimal hasTimeValue and one of Seconds, Milliseconds, Minutes, Measure or Beat",
        ),
        Code::V4 => (
            "a score annotation contains score observations and an audio annotation contains audio observations",
            "ScoreMusicAnnotation includes only ScoreMusicObservation; AudioMusicAnnotation includes only AudioMusicObservation",
            "move the observation to an annotation of the same modality",
        ),
        Code::V5 => (
            "an audio start time is a single index component in seconds, milliseconds or minutes",
            "AudioMusicAnnotation/AudioMusicObservation: index has exactly 1 clock-time MusicTimeIndexComponent",
            "express the start as one Seconds component",
        ),
        Code::V6 => (
            "a score start time uses two index components, the measure first and the beat within the measure second",
            "ScoreMusicAnnotation/ScoreMusicObservation: index has a Measure component followed by a Beat component",
            "give the index exactly a Measure and a Beat component, in that order",
        ),
        Code::V7 => (
            "an annotation has one and only one annotator, and its observations share it",
            "hasAnnotator SubPropertyChain: isAnnotatorOf o includesMusicObservation",
            "keep a single hasAnnotator on the annotation and repeat it on each observation",
        ),
        Code::V8 => (
            "an annotator has exactly one annotator type",
            "Annotator SubClassOf hasAnnotatorType exactly 1 AnnotatorType",
            "classify the annotator as Human, Machine, Crowdsourcing or one named custom type",
        ),
        Code::V9 => (
            "musical objects, annotations, observations, observation values, time intervals, annotators and annotator types are disjoint",
            "DisjointClasses: MusicalObject, MusicAnnotation, MusicObservation, MusicObservationValue, MusicTimeInterval, Annotator, AnnotatorType",
            "mint a separate IRI for each entity",
        ),
        Code::V10 => (
            "a confidence is a single decimal between 0 and 1 inclusive",
            "hasConfidence value in [0, 1]",
            "rescale the confidence into [0, 1] or drop it",
        ),
        Code::W1 => (
            "an observation ends after the end of the annotated track",
            "observation end <= musical object duration",
            "check the observation times against the file duration",
        ),
        Code::W2 => (
            "an annotation contains no observations",
            "MusicAnnotation includesMusicObservation some MusicObservation",
            "drop the empty annotation or add its observations",
        ),
    };
    Ok(Explanation { code, rule, axiom, hint })
}

#[derive(Default)]
struct Report(BTreeSet<Violation>);

impl Report {
    fn push(&mut self, code: Code, subject: &Iri, message: impl Into<String>) {
        self.0.insert(Violation::new(code, subject, message));
    }

    fn finish(self) -> Vec<Violation> {
        self.0.into_iter().collect()
    }
}

/// Value-domain problem with a start component, if any.
fn component_domain(value: Decimal, value_type: TimeValueType) -> Option<String> {
    if value.is_sign_negative() && !value.is_zero() {
        return Some(format!("time value {value} is negative"));
    }
    match value_type {
        TimeValueType::Measure if !value.fract().is_zero() || value < Decimal::ONE => {
            Some(format!("measure {value} is not an integer >= 1"))
        }
        TimeValueType::Beat if value < Decimal::ONE => Some(format!("start beat {value} is below 1")),
        _ => None,
    }
}

/// Index shape for a modality, given the component types in order.
fn shape_check(modality: Modality, types: &[TimeValueType], ordered: bool) -> Option<(Code, String)> {
    match modality {
        Modality::Audio => {
            let ok = types.len() == 1 && types[0].is_clock();
            (!ok).then(|| (Code::V5, format!("audio index must be one clock-time component, found {types:?}")))
        }
        Modality::Score => {
            let ok = if ordered {
                types == [TimeValueType::Measure, TimeValueType::Beat]
            } else {
                types.len() == 2 && types.contains(&TimeValueType::Measure) && types.contains(&TimeValueType::Beat)
            };
            (!ok).then(|| (Code::V6, format!("score index must be [Measure, Beat], found {types:?}")))
        }
    }
}

fn check_confidence(report: &mut Report, subject: &Iri, confidence: Decimal) {
    if confidence < Decimal::ZERO || confidence > Decimal::ONE {
        report.push(Code::V10, subject, format!("confidence {confidence} is outside [0, 1]"));
    }
}

pub fn validate_model(model: &Model) -> Vec<Violation> {
    let mut report = Report::default();
    let mut classes: BTreeMap<Iri, BTreeSet<&'static str>> = BTreeMap::new();
    let mut note = |iri: Iri, class: &'static str| {
        classes.entry(iri).or_default().insert(class);
    };

    for object in &model.objects {
        note(object.id.clone(), "MusicalObject");
    }

    for a in &model.annotations {
        note(a.id.clone(), "MusicAnnotation");
        note(a.annotator.id.clone(), "Annotator");
        note(a.annotator.annotator_type.iri(&a.annotator.id), "AnnotatorType");
        if matches!(&a.annotator.annotator_type, AnnotatorType::Other(name) if name.trim().is_empty()) {
            report.push(Code::V8, &a.annotator.id, "custom annotator type has no name");
        }
        let nodes = a.interval_nodes();
        note_interval(&mut note, &nodes, &a.interval);
        check_interval(&mut report, &a.id, a.modality, &nodes, &a.interval);
        if a.observations.is_empty() {
            report.push(Code::W2, &a.id, "annotation has no observations");
        }

        let duration = model.object(&a.subject).and_then(|o| o.duration);
        for o in &a.observations {
            note(o.id.clone(), "MusicObservation");
            note(o.value.id.clone(), "MusicObservationValue");
            if o.modality != a.modality {
                report.push(
                    Code::V4,
                    &o.id,
                    format!("{} observation inside {} annotation <{}>", o.modality, a.modality, a.id),
                );
            }
            let nodes = o.interval_nodes();
            note_interval(&mut note, &nodes, &o.interval);
            check_interval(&mut report, &o.id, o.modality, &nodes, &o.interval);
            if let Some(c) = o.confidence {
                check_confidence(&mut report, &o.id, c);
            }
            if let (Some(limit), Ok(end)) = (duration, o.interval.end()) {
                if let Some(end) = end.value_type.to_seconds(end.value) {
                    if end > limit {
                        report.push(Code::W1, &o.id, format!("ends at {end}s, past the {limit}s duration"));
                    }
                }
            }
        }
    }

    for (iri, found) in classes {
        if found.len() > 1 {
            let names: Vec<_> = found.into_iter().collect();
            report.push(Code::V9, &iri, format!("identifier used for disjoint classes {}", names.join(", ")));
        }
    }
    report.finish()
}

fn note_interval(note: &mut impl FnMut(Iri, &'static str), nodes: &IntervalNodes, interval: &MusicTimeInterval) {
    note(nodes.interval.clone(), "MusicTimeInterval");
    note(nodes.index.clone(), "MusicTimeIndex");
    note(nodes.duration.clone(), "MusicTimeDuration");
    for node in &nodes.components {
        note(node.clone(), "MusicTimeIndexComponent");
    }
    for t in interval.index.components.iter().map(|c| c.value_type).chain([interval.duration.value_type]) {
        note(t.iri(), "MusicTimeValueType");
    }
}

fn check_interval(
    report: &mut Report,
    owner: &Iri,
    modality: Modality,
    nodes: &IntervalNodes,
    interval: &MusicTimeInterval,
) {
    let duration = &interval.duration;
    if duration.value.is_sign_negative() && !duration.value.is_zero() {
        report.push(Code::V3, &nodes.duration, format!("duration {} is negative", duration.value));
    }
    if interval.index.components.is_empty() {
        report.push(Code::V2, &nodes.index, "time index has no components");
        return;
    }
    for (c, node) in interval.index.components.iter().zip(&nodes.components) {
        if let Some(problem) = component_domain(c.value, c.value_type) {
            report.push(Code::V3, node, problem);
        }
    }
    let types: Vec<_> = interval.index.components.iter().map(|c| c.value_type).collect();
    if let Some((code, message)) = shape_check(modality, &types, true) {
        report.push(code, owner, message);
    }
}

/// Runs the same rules over a graph. Component order is not visible in a
/// graph, so V6 only checks the component types there.
pub fn validate_graph(graph: &RdfGraph) -> Vec<Violation> {
    let view = GraphView::new(graph);
    let mut report = Report::default();

    let entity_classes = vocab::entity_classes();
    let mut subjects: BTreeSet<&Iri> = graph.iter().map(|t| &t.subject).collect();
    subjects.extend(graph.iter().filter_map(|t| t.object.as_iri()).filter(|o| !view.types(o).is_empty()));
    for s in &subjects {
        let found: Vec<&Iri> = view.types(s).into_iter().filter(|t| entity_classes.contains(t)).collect();
        if found.len() > 1 {
            let names: Vec<&str> = found.iter().map(|t| local_name(t)).collect();
            report.push(Code::V9, s, format!("node typed with disjoint classes {}", names.join(", ")));
        }
    }

    let modality_of = |node: &Iri, audio: &Iri, score: &Iri| match (view.has_type(node, audio), view.has_type(node, score)) {
        (true, false) => Some(Modality::Audio),
        (false, true) => Some(Modality::Score),
        _ => None,
    };

    let mut annotations: Vec<&Iri> = view.instances(&ma::audio_annotation());
    annotations.extend(view.instances(&ma::score_annotation()));
    annotations.sort();
    annotations.dedup();
    for a in annotations {
        let modality = modality_of(a, &ma::audio_annotation(), &ma::score_annotation());
        let annotators: BTreeSet<&Iri> = view.object_iris(a, &ma::has_annotator()).into_iter().collect();
        if annotators.len() != 1 {
            report.push(Code::V7, a, format!("annotation has {} annotators", annotators.len()));
        }
        if let Some(modality) = modality {
            graph_interval(&view, &mut report, a, modality);
        }
        let observations = view.object_iris(a, &ma::includes_music_observation());
        if observations.is_empty() {
            report.push(Code::W2, a, "annotation has no observations");
        }
        for o in observations {
            if let Some(modality) = modality {
                if !view.has_type(o, &modality.observation_class()) {
                    report.push(Code::V4, o, format!("observation inside {modality} annotation <{a}> is not a {modality} observation"));
                }
            }
            let own: BTreeSet<&Iri> = view.object_iris(o, &ma::has_annotator()).into_iter().collect();
            if own != annotators {
                report.push(Code::V7, o, format!("observation annotator differs from that of annotation <{a}>"));
            }
        }
    }

    let mut observations: Vec<&Iri> = view.instances(&ma::audio_observation());
    observations.extend(view.instances(&ma::score_observation()));
    observations.sort();
    observations.dedup();
    for o in observations {
        if let Some(modality) = modality_of(o, &ma::audio_observation(), &ma::score_observation()) {
            graph_interval(&view, &mut report, o, modality);
        }
        let confidences = view.objects(o, &ma::has_confidence());
        if confidences.len() > 1 {
            report.push(Code::V10, o, format!("observation has {} confidences", confidences.len()));
        }
        for c in confidences {
            match c.as_literal().and_then(decimal_of) {
                Some(value) => check_confidence(&mut report, o, value),
                None => report.push(Code::V10, o, "confidence is not a decimal"),
            }
        }
    }

    for p in view.instances(&ma::annotator()) {
        let types = view.object_iris(p, &ma::has_annotator_type());
        match types.as_slice() {
            [t] => {
                let named = AnnotatorType::named(t).is_some();
                let labelled = view.literals(t, &rdfs::label()).iter().any(|l| !l.lexical.trim().is_empty());
                if !named && !labelled {
                    report.push(Code::V8, p, "custom annotator type has no name");
                }
            }
            _ => report.push(Code::V8, p, format!("annotator has {} annotator types", types.len())),
        }
    }

    report.finish()
}

fn graph_interval(view: &GraphView<'_>, report: &mut Report, owner: &Iri, modality: Modality) {
    let intervals = view.object_iris(owner, &ma::has_music_time_interval());
    let [interval] = intervals.as_slice() else {
        report.push(Code::V1, owner, format!("has {} time intervals", intervals.len()));
        return;
    };
    let indexes = view.object_iris(interval, &ma::has_music_time_index());
    let durations = view.object_iris(interval, &ma::has_music_time_duration());
    if indexes.len() != 1 || durations.len() != 1 {
        report.push(
            Code::V1,
            interval,
            format!("interval has {} indexes and {} durations", indexes.len(), durations.len()),
        );
    }
    for d in durations {
        let _ = time_value(view, report, d, false);
    }
    let [index] = indexes.as_slice() else { return };
    let components = view.object_iris(index, &ma::has_music_time_index_component());
    if components.is_empty() {
        report.push(Code::V2, index, "time index has no components");
        return;
    }
    let mut components = components;
    components.sort();
    let types: Vec<Option<TimeValueType>> = components.iter().map(|c| time_value(view, report, c, true)).collect();
    if let Some(types) = types.into_iter().collect::<Option<Vec<_>>>() {
        if let Some((code, message)) = shape_check(modality, &types, false) {
            report.push(code, owner, message);
        }
    }
}

/// Checks a component or duration node; returns its value type when
/// well-formed.
fn time_value(view: &GraphView<'_>, report: &mut Report, node: &Iri, is_start: bool) -> Option<TimeValueType> {
    let values = view.objects(node, &ma::has_time_value());
    let types = view.objects(node, &ma::has_music_time_value_type());
    if values.len() != 1 || types.len() != 1 {
        report.push(Code::V3, node, format!("has {} time values and {} value types", values.len(), types.len()));
        return None;
    }
    let Some(value_type) = types[0].as_iri().and_then(TimeValueType::from_iri) else {
        report.push(Code::V3, node, "value type is not one of the known time formats");
        return None;
    };
    let Some(value) = values[0].as_literal().and_then(decimal_of) else {
        report.push(Code::V3, node, "time value is not a decimal literal");
        return None;
    };
    let problem = if is_start {
        component_domain(value, value_type)
    } else {
        (value.is_sign_negative() && !value.is_zero()).then(|| format!("duration {value} is negative"))
    };
    if let Some(problem) = problem {
        report.push(Code::V3, node, problem);
        return None;
    }
    Some(value_type)
}

fn decimal_of(literal: &Literal) -> Option<Decimal> {
    let text = literal.lexical.trim();
    if text.contains(['e', 'E']) {
        Decimal::from_scientific(text).ok()
    } else {
        Decimal::from_str(text).ok()
    }
}

fn local_name(iri: &Iri) -> &str {
    let s = iri.as_str();
    s.rfind(['#', '/']).map(|i| &s[i + 1..]).unwrap_or(s)
}

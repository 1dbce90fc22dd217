//! The ten competency questions as fixed queries.
//!
//! [`answer_cq`] reads an emitted graph; [`oracle_cq`] walks the typed model
//! directly. Both return the same rows for any model the emitter accepts.
//!
//! | CQ | subject | columns |
//! |----|---------|---------|
//! | 1  | optional object, annotation or observation | object, entity, entity_type, value_kind |
//! | 2  | optional annotation | annotation, component, time_value, time_type, duration_value, duration_type |
//! | 3  | annotation | component, time_value, time_type |
//! | 4  | optional annotation | annotation, observation |
//! | 5  | observation | component, time_value, time_type |
//! | 6  | observation | component, time_value, time_type, duration_value, duration_type |
//! | 7  | observation | value, value_kind, label |
//! | 8  | optional annotation or observation | entity, annotator, name, annotator_type |
//! | 9  | observation | confidence |
//! | 10 | optional annotation or object | annotation, object |

use std::fmt;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serialize;

use crate::iri::Iri;
use crate::model::{IntervalNodes, Model, MusicTimeInterval};
use crate::rdf::{GraphView, RdfGraph};
use crate::vocab::{ma, muse, rdfs};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CqError {
    #[error("unknown competency question {0}; expected 1 to 10")]
    UnknownCq(u8),
    #[error("CQ{0} needs a subject")]
    SubjectRequired(u8),
    #[error("CQ{cq}: no {expected} <{subject}>")]
    SubjectNotFound { cq: u8, subject: Iri, expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell {
    Iri(Iri),
    Literal(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Iri(iri) => f.write_str(iri.as_str()),
            Cell::Literal(text) => f.write_str(text),
            Cell::Empty => Ok(()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Iri(iri) => serializer.serialize_str(iri.as_str()),
            Cell::Literal(text) => serializer.serialize_str(text),
            Cell::Empty => serializer.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CqResult {
    pub cq_id: u8,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl CqResult {
    fn new(cq_id: u8, mut rows: Vec<Vec<Cell>>) -> Self {
        rows.sort();
        rows.dedup();
        Self { cq_id, columns: columns(cq_id), rows }
    }

    /// Header line, then one line per row. Tabs and newlines inside cells
    /// are escaped.
    pub fn to_tsv(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| tsv_escape(&c.to_string())).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("results serialize")
    }
}

impl Serialize for CqResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [&'static str], &'a [Cell]);
        impl Serialize for Row<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0.iter().zip(self.1) {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
        struct Rows<'a>(&'a CqResult);
        impl Serialize for Rows<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.rows.len()))?;
                for row in &self.0.rows {
                    seq.serialize_element(&Row(self.0.columns, row))?;
                }
                seq.end()
            }
        }
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("cq", &self.cq_id)?;
        map.serialize_entry("columns", self.columns)?;
        map.serialize_entry("rows", &Rows(self))?;
        map.end()
    }
}

fn tsv_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n").replace('\r', "\\r")
}

pub fn columns(cq: u8) -> &'static [&'static str] {
    match cq {
        1 => &["object", "entity", "entity_type", "value_kind"],
        2 => &["annotation", "component", "time_value", "time_type", "duration_value", "duration_type"],
        3 | 5 => &["component", "time_value", "time_type"],
        4 => &["annotation", "observation"],
        6 => &["component", "time_value", "time_type", "duration_value", "duration_type"],
        7 => &["value", "value_kind", "label"],
        8 => &["entity", "annotator", "name", "annotator_type"],
        9 => &["confidence"],
        10 => &["annotation", "object"],
        _ => &[],
    }
}

/// What a CQ accepts as subject.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Object,
    Annotation,
    Observation,
}

fn subject_rule(cq: u8) -> Result<(bool, &'static [Kind]), CqError> {
    use Kind::*;
    Ok(match cq {
        1 => (false, &[Object, Annotation, Observation]),
        2 | 4 => (false, &[Annotation]),
        3 => (true, &[Annotation]),
        5 | 6 | 7 | 9 => (true, &[Observation]),
        8 => (false, &[Annotation, Observation]),
        10 => (false, &[Annotation, Object]),
        _ => return Err(CqError::UnknownCq(cq)),
    })
}

fn expected(kinds: &[Kind]) -> &'static str {
    match kinds {
        [Kind::Annotation] => "annotation",
        [Kind::Observation] => "observation",
        [Kind::Annotation, Kind::Observation] => "annotation or observation",
        [Kind::Annotation, Kind::Object] => "annotation or musical object",
        _ => "musical object, annotation or observation",
    }
}

/// Checks the subject against the CQ; `is_kind` says whether the source
/// knows the subject as an entity of that kind.
fn check_subject(cq: u8, subject: Option<&Iri>, is_kind: impl Fn(&Iri, Kind) -> bool) -> Result<Option<&Iri>, CqError> {
    let (required, kinds) = subject_rule(cq)?;
    match subject {
        None if required => Err(CqError::SubjectRequired(cq)),
        None => Ok(None),
        Some(s) if kinds.iter().any(|&k| is_kind(s, k)) => Ok(Some(s)),
        Some(s) => Err(CqError::SubjectNotFound { cq, subject: s.clone(), expected: expected(kinds) }),
    }
}

/// Keeps rows whose key cells mention the subject.
fn filter(rows: Vec<Vec<Cell>>, subject: Option<&Iri>, keys: &[usize]) -> Vec<Vec<Cell>> {
    match subject {
        None => rows,
        Some(s) => rows.into_iter().filter(|row| keys.iter().any(|&k| row[k] == Cell::Iri(s.clone()))).collect(),
    }
}

fn lit(text: impl Into<String>) -> Cell {
    Cell::Literal(text.into())
}

fn iri(iri: &Iri) -> Cell {
    Cell::Iri(iri.clone())
}

// Graph side.

pub fn answer_cq(cq: u8, graph: &RdfGraph, subject: Option<&Iri>) -> Result<CqResult, CqError> {
    let view = GraphView::new(graph);
    let is_annotation = |s: &Iri| view.has_type(s, &ma::audio_annotation()) || view.has_type(s, &ma::score_annotation());
    let is_observation =
        |s: &Iri| view.has_type(s, &ma::audio_observation()) || view.has_type(s, &ma::score_observation());
    let is_object = |s: &Iri| {
        view.has_type(s, &ma::track()) || view.has_type(s, &ma::score()) || !view.objects(s, &ma::has_music_annotation()).is_empty()
    };
    let subject = check_subject(cq, subject, |s, k| match k {
        Kind::Object => is_object(s),
        Kind::Annotation => is_annotation(s),
        Kind::Observation => is_observation(s),
    })?;

    let annotations = || {
        let mut all = view.instances(&ma::audio_annotation());
        all.extend(view.instances(&ma::score_annotation()));
        all
    };
    let value_kind = |node: &Iri| view.object_iris(node, &muse::value_kind());

    let rows: Vec<Vec<Cell>> = match cq {
        1 => {
            let mut rows = Vec::new();
            for a in annotations() {
                let objects = view.subjects(&ma::has_music_annotation(), a);
                let mut entities: Vec<(&Iri, Vec<&Iri>)> = vec![(a, value_kind(a))];
                for o in view.object_iris(a, &ma::includes_music_observation()) {
                    let kinds = view
                        .object_iris(o, &ma::has_music_observation_value())
                        .into_iter()
                        .flat_map(value_kind)
                        .collect();
                    entities.push((o, kinds));
                }
                for object in objects {
                    for (entity, kinds) in &entities {
                        for class in view.types(entity) {
                            for kind in kinds {
                                rows.push(vec![iri(object), iri(entity), iri(class), iri(kind)]);
                            }
                        }
                    }
                }
            }
            filter(rows, subject, &[0, 1])
        }
        2 => {
            let rows = annotations()
                .into_iter()
                .flat_map(|a| graph_time_rows(&view, a, true).into_iter().map(move |r| [vec![iri(a)], r].concat()))
                .collect();
            filter(rows, subject, &[0])
        }
        3 | 5 => graph_time_rows(&view, subject.expect("checked"), false),
        6 => graph_time_rows(&view, subject.expect("checked"), true),
        4 => {
            let rows = annotations()
                .into_iter()
                .flat_map(|a| {
                    view.object_iris(a, &ma::includes_music_observation()).into_iter().map(move |o| vec![iri(a), iri(o)])
                })
                .collect();
            filter(rows, subject, &[0])
        }
        7 => {
            let o = subject.expect("checked");
            let mut rows = Vec::new();
            for v in view.object_iris(o, &ma::has_music_observation_value()) {
                for kind in value_kind(v) {
                    for label in view.literals(v, &rdfs::label()) {
                        rows.push(vec![iri(v), iri(kind), lit(&label.lexical)]);
                    }
                }
            }
            rows
        }
        8 => {
            let mut entities = annotations();
            entities.extend(view.instances(&ma::audio_observation()));
            entities.extend(view.instances(&ma::score_observation()));
            let mut rows = Vec::new();
            for e in entities {
                for p in view.object_iris(e, &ma::has_annotator()) {
                    let names = view.literals(p, &rdfs::label());
                    let names: Vec<Cell> =
                        if names.is_empty() { vec![Cell::Empty] } else { names.iter().map(|l| lit(&l.lexical)).collect() };
                    for name in names {
                        for t in view.object_iris(p, &ma::has_annotator_type()) {
                            rows.push(vec![iri(e), iri(p), name.clone(), iri(t)]);
                        }
                    }
                }
            }
            filter(rows, subject, &[0])
        }
        9 => view
            .literals(subject.expect("checked"), &ma::has_confidence())
            .into_iter()
            .map(|l| vec![lit(&l.lexical)])
            .collect(),
        10 => {
            let rows = annotations()
                .into_iter()
                .flat_map(|a| view.subjects(&ma::has_music_annotation(), a).iter().map(move |o| vec![iri(a), iri(o)]))
                .collect();
            filter(rows, subject, &[0, 1])
        }
        _ => unreachable!("subject_rule rejects other ids"),
    };
    Ok(CqResult::new(cq, rows))
}

/// Component rows for an owner's interval, with duration columns if asked.
fn graph_time_rows(view: &GraphView<'_>, owner: &Iri, with_duration: bool) -> Vec<Vec<Cell>> {
    let value_and_type = |node: &Iri| -> Vec<(Cell, Cell)> {
        let mut out = Vec::new();
        for v in view.literals(node, &ma::has_time_value()) {
            for t in view.object_iris(node, &ma::has_music_time_value_type()) {
                out.push((lit(&v.lexical), iri(t)));
            }
        }
        out
    };
    let mut rows = Vec::new();
    for interval in view.object_iris(owner, &ma::has_music_time_interval()) {
        let durations: Vec<(Cell, Cell)> = view
            .object_iris(interval, &ma::has_music_time_duration())
            .into_iter()
            .flat_map(value_and_type)
            .collect();
        for index in view.object_iris(interval, &ma::has_music_time_index()) {
            for c in view.object_iris(index, &ma::has_music_time_index_component()) {
                for (value, value_type) in value_and_type(c) {
                    let start = vec![iri(c), value, value_type];
                    if with_duration {
                        for (dv, dt) in &durations {
                            rows.push([start.clone(), vec![dv.clone(), dt.clone()]].concat());
                        }
                    } else {
                        rows.push(start);
                    }
                }
            }
        }
    }
    rows
}

// Model side.

pub fn oracle_cq(cq: u8, model: &Model, subject: Option<&Iri>) -> Result<CqResult, CqError> {
    let subject = check_subject(cq, subject, |s, k| match k {
        Kind::Object => model.object(s).is_some() || model.annotations.iter().any(|a| &a.subject == s),
        Kind::Annotation => model.annotation(s).is_some(),
        Kind::Observation => model.observation(s).is_some(),
    })?;

    let rows: Vec<Vec<Cell>> = match cq {
        1 => {
            let mut rows = Vec::new();
            for a in &model.annotations {
                rows.push(vec![iri(&a.subject), iri(&a.id), iri(&a.modality.annotation_class()), iri(&a.value_kind.iri())]);
                for o in &a.observations {
                    rows.push(vec![
                        iri(&a.subject),
                        iri(&o.id),
                        iri(&o.modality.observation_class()),
                        iri(&o.value.kind.iri()),
                    ]);
                }
            }
            filter(rows, subject, &[0, 1])
        }
        2 => {
            let rows = model
                .annotations
                .iter()
                .flat_map(|a| {
                    model_time_rows(&a.interval_nodes(), &a.interval, true)
                        .into_iter()
                        .map(move |r| [vec![iri(&a.id)], r].concat())
                })
                .collect();
            filter(rows, subject, &[0])
        }
        3 => {
            let a = model.annotation(subject.expect("checked")).expect("checked");
            model_time_rows(&a.interval_nodes(), &a.interval, false)
        }
        5 | 6 => {
            let (_, o) = model.observation(subject.expect("checked")).expect("checked");
            model_time_rows(&o.interval_nodes(), &o.interval, cq == 6)
        }
        4 => {
            let rows = model
                .annotations
                .iter()
                .flat_map(|a| a.observations.iter().map(move |o| vec![iri(&a.id), iri(&o.id)]))
                .collect();
            filter(rows, subject, &[0])
        }
        7 => {
            let (_, o) = model.observation(subject.expect("checked")).expect("checked");
            vec![vec![iri(&o.value.id), iri(&o.value.kind.iri()), lit(&o.value.label)]]
        }
        8 => {
            let mut rows = Vec::new();
            for a in &model.annotations {
                let p = &a.annotator;
                let name = p.name.as_deref().map(lit).unwrap_or(Cell::Empty);
                let row = |e: &Iri| vec![iri(e), iri(&p.id), name.clone(), iri(&p.annotator_type.iri(&p.id))];
                rows.push(row(&a.id));
                for o in &a.observations {
                    let via_chain = model.annotator_of_observation(&o.id).expect("observation is in the model");
                    debug_assert_eq!(via_chain, p);
                    rows.push(row(&o.id));
                }
            }
            filter(rows, subject, &[0])
        }
        9 => {
            let (_, o) = model.observation(subject.expect("checked")).expect("checked");
            o.confidence.iter().map(|c| vec![lit(c.to_string())]).collect()
        }
        10 => {
            let rows = model.annotations.iter().map(|a| vec![iri(&a.id), iri(&a.subject)]).collect();
            filter(rows, subject, &[0, 1])
        }
        _ => unreachable!("subject_rule rejects other ids"),
    };
    Ok(CqResult::new(cq, rows))
}

fn model_time_rows(nodes: &IntervalNodes, interval: &MusicTimeInterval, with_duration: bool) -> Vec<Vec<Cell>> {
    let (dv, _) = interval.duration.lexical();
    interval
        .index
        .components
        .iter()
        .zip(&nodes.components)
        .map(|(c, node)| {
            let (value, _) = c.lexical();
            let mut row = vec![iri(node), lit(value), iri(&c.value_type.iri())];
            if with_duration {
                row.extend([lit(dv.clone()), iri(&interval.duration.value_type.iri())]);
            }
            row
        })
        .collect()
}

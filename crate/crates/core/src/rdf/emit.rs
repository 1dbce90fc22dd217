use super::{Literal, RdfGraph};
use crate::iri::Iri;
use crate::model::{
    Annotator, AnnotatorType, IntervalNodes, Model, MusicTimeInterval, ObservationValueKind, TimeValueType,
};
use crate::validate::{validate_model, Severity, Violation};
use crate::vocab::{dcterms, ma, muse, rdf, rdfs, xsd};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("model has {} validation error(s); first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    UnvalidatedModel(Vec<Violation>),
}

/// Emits the model after checking it has no validation errors.
pub fn emit_graph(model: &Model) -> Result<RdfGraph, EmitError> {
    let errors: Vec<Violation> =
        validate_model(model).into_iter().filter(|v| v.severity == Severity::Error).collect();
    if !errors.is_empty() {
        return Err(EmitError::UnvalidatedModel(errors));
    }
    Ok(emit_graph_unchecked(model))
}

/// Emits whatever the model holds, valid or not.
///
/// Each entity gets one `rdf:type` and one triple per field. Observations
/// also get an explicit `hasAnnotator` pointing at their annotation's
/// annotator, and annotators get `isAnnotatorOf` back to the annotation.
pub fn emit_graph_unchecked(model: &Model) -> RdfGraph {
    let mut g = RdfGraph::new();

    for object in &model.objects {
        g.add(&object.id, rdf::type_(), object.kind.class());
        g.add(&object.id, dcterms::title(), Literal::string(&object.title));
        if let Some(artist) = &object.artist {
            g.add(&object.id, dcterms::creator(), Literal::string(artist));
        }
    }

    let mut value_types = Vec::new();
    for a in &model.annotations {
        g.add(&a.subject, ma::has_music_annotation(), a.id.clone());
        g.add(&a.id, rdf::type_(), a.modality.annotation_class());
        value_kind(&mut g, &a.id, &a.value_kind);
        g.add(&a.id, ma::has_annotator(), a.annotator.id.clone());
        annotator(&mut g, &a.annotator);
        g.add(&a.annotator.id, ma::is_annotator_of(), a.id.clone());
        interval(&mut g, &a.id, &a.interval_nodes(), &a.interval, &mut value_types);

        for o in &a.observations {
            g.add(&a.id, ma::includes_music_observation(), o.id.clone());
            g.add(&o.id, rdf::type_(), o.modality.observation_class());
            g.add(&o.id, ma::has_annotator(), a.annotator.id.clone());
            interval(&mut g, &o.id, &o.interval_nodes(), &o.interval, &mut value_types);
            if let Some(c) = &o.confidence {
                g.add(&o.id, ma::has_confidence(), Literal::new(c.to_string(), xsd::decimal()));
            }
            g.add(&o.id, ma::has_music_observation_value(), o.value.id.clone());
            g.add(&o.value.id, rdf::type_(), ma::observation_value());
            g.add(&o.value.id, rdfs::label(), Literal::string(&o.value.label));
            value_kind(&mut g, &o.value.id, &o.value.kind);
        }
    }

    for t in value_types {
        g.add(&t.iri(), rdf::type_(), ma::time_value_type());
    }
    g
}

fn value_kind(g: &mut RdfGraph, node: &Iri, kind: &ObservationValueKind) {
    g.add(node, muse::value_kind(), kind.iri());
    if let ObservationValueKind::Generic(ns) = kind {
        g.add(node, muse::jams_namespace(), Literal::string(ns));
    }
}

fn annotator(g: &mut RdfGraph, annotator: &Annotator) {
    g.add(&annotator.id, rdf::type_(), ma::annotator());
    if let Some(name) = &annotator.name {
        g.add(&annotator.id, rdfs::label(), Literal::string(name));
    }
    let type_node = annotator.annotator_type.iri(&annotator.id);
    g.add(&annotator.id, ma::has_annotator_type(), type_node.clone());
    g.add(&type_node, rdf::type_(), ma::annotator_type());
    if let AnnotatorType::Other(name) = &annotator.annotator_type {
        g.add(&type_node, rdfs::label(), Literal::string(name));
    }
}

fn interval(
    g: &mut RdfGraph,
    owner: &Iri,
    nodes: &IntervalNodes,
    interval: &MusicTimeInterval,
    value_types: &mut Vec<TimeValueType>,
) {
    g.add(owner, ma::has_music_time_interval(), nodes.interval.clone());
    g.add(&nodes.interval, rdf::type_(), ma::time_interval());
    g.add(&nodes.interval, ma::has_music_time_index(), nodes.index.clone());
    g.add(&nodes.interval, ma::has_music_time_duration(), nodes.duration.clone());

    g.add(&nodes.index, rdf::type_(), ma::time_index());
    for (component, node) in interval.index.components.iter().zip(&nodes.components) {
        g.add(&nodes.index, ma::has_music_time_index_component(), node.clone());
        g.add(node, rdf::type_(), ma::time_index_component());
        let (lexical, datatype) = component.lexical();
        g.add(node, ma::has_time_value(), Literal::new(lexical, datatype));
        g.add(node, ma::has_music_time_value_type(), component.value_type.iri());
        if !value_types.contains(&component.value_type) {
            value_types.push(component.value_type);
        }
    }

    let duration = &interval.duration;
    g.add(&nodes.duration, rdf::type_(), ma::time_duration());
    let (lexical, datatype) = duration.lexical();
    g.add(&nodes.duration, ma::has_time_value(), Literal::new(lexical, datatype));
    g.add(&nodes.duration, ma::has_music_time_value_type(), duration.value_type.iri());
    if !value_types.contains(&duration.value_type) {
        value_types.push(duration.value_type);
    }
}

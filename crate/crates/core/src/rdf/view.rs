use std::collections::HashMap;

use super::{Literal, RdfGraph, Term};
use crate::iri::Iri;
use crate::vocab;

/// Forward and backward indexes over a graph.
pub struct GraphView<'g> {
    graph: &'g RdfGraph,
    forward: HashMap<&'g Iri, HashMap<&'g Iri, Vec<&'g Term>>>,
    backward: HashMap<&'g Iri, HashMap<&'g Iri, Vec<&'g Iri>>>,
}

impl<'g> GraphView<'g> {
    pub fn new(graph: &'g RdfGraph) -> Self {
        let mut forward: HashMap<_, HashMap<_, Vec<_>>> = HashMap::new();
        let mut backward: HashMap<_, HashMap<_, Vec<_>>> = HashMap::new();
        for t in graph.iter() {
            forward.entry(&t.subject).or_default().entry(&t.predicate).or_default().push(&t.object);
            if let Term::Iri(o) = &t.object {
                backward.entry(o).or_default().entry(&t.predicate).or_default().push(&t.subject);
            }
        }
        Self { graph, forward, backward }
    }

    pub fn graph(&self) -> &'g RdfGraph {
        self.graph
    }

    pub fn objects(&self, subject: &Iri, predicate: &Iri) -> &[&'g Term] {
        self.forward.get(subject).and_then(|m| m.get(predicate)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn object_iris(&self, subject: &Iri, predicate: &Iri) -> Vec<&'g Iri> {
        self.objects(subject, predicate).iter().filter_map(|t| t.as_iri()).collect()
    }

    pub fn literals(&self, subject: &Iri, predicate: &Iri) -> Vec<&'g Literal> {
        self.objects(subject, predicate).iter().filter_map(|t| t.as_literal()).collect()
    }

    /// The only IRI object, if there is exactly one object and it is an IRI.
    pub fn single_iri(&self, subject: &Iri, predicate: &Iri) -> Option<&'g Iri> {
        match self.objects(subject, predicate) {
            [Term::Iri(iri)] => Some(iri),
            _ => None,
        }
    }

    pub fn single_literal(&self, subject: &Iri, predicate: &Iri) -> Option<&'g Literal> {
        match self.objects(subject, predicate) {
            [Term::Literal(l)] => Some(l),
            _ => None,
        }
    }

    pub fn subjects(&self, predicate: &Iri, object: &Iri) -> &[&'g Iri] {
        self.backward.get(object).and_then(|m| m.get(predicate)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn types(&self, subject: &Iri) -> Vec<&'g Iri> {
        self.object_iris(subject, &vocab::rdf::type_())
    }

    pub fn has_type(&self, subject: &Iri, class: &Iri) -> bool {
        self.types(subject).contains(&class)
    }

    /// Instances of `class`, in IRI order.
    pub fn instances(&self, class: &Iri) -> Vec<&'g Iri> {
        let mut out = self.subjects(&vocab::rdf::type_(), class).to_vec();
        out.sort();
        out
    }
}

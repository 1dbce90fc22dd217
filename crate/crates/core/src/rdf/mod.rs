//! Set-of-triples graphs, emission from the model, and text formats.

mod emit;
mod ntriples;
mod turtle;
mod view;

pub use emit::{emit_graph, emit_graph_unchecked, EmitError};
pub use ntriples::serialize_ntriples;
pub use turtle::{parse_turtle, serialize_turtle, TurtleError};
pub use view::GraphView;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::iri::Iri;
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Iri,
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: Iri) -> Self {
        Self { lexical: lexical.into(), datatype }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Self::new(lexical, vocab::xsd::string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(literal: Literal) -> Self {
        Term::Literal(literal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Self { subject, predicate, object: object.into() }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(ntriples::line(self).trim_end())
    }
}

/// Triples kept sorted by (subject, predicate, object), plus the prefixes
/// used when writing Turtle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdfGraph {
    triples: BTreeSet<Triple>,
    prefixes: BTreeMap<String, Iri>,
}

impl Default for RdfGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl RdfGraph {
    /// Empty graph with the default prefixes.
    pub fn new() -> Self {
        let prefixes =
            vocab::DEFAULT_PREFIXES.iter().map(|(p, ns)| ((*p).to_owned(), Iri::from_static(ns))).collect();
        Self { triples: BTreeSet::new(), prefixes }
    }

    /// Empty graph without any prefix.
    pub fn bare() -> Self {
        Self { triples: BTreeSet::new(), prefixes: BTreeMap::new() }
    }

    /// Returns false if the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn add(&mut self, subject: &Iri, predicate: Iri, object: impl Into<Term>) {
        self.triples.insert(Triple::new(subject.clone(), predicate, object));
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    pub fn set_prefix(&mut self, prefix: impl Into<String>, namespace: Iri) {
        self.prefixes.insert(prefix.into(), namespace);
    }

    /// Adds every triple of `other`. Prefixes already bound here win.
    pub fn merge(&mut self, other: RdfGraph) {
        self.triples.extend(other.triples);
        for (p, ns) in other.prefixes {
            self.prefixes.entry(p).or_insert(ns);
        }
    }

    /// Same set of triples, prefixes ignored.
    pub fn same_triples(&self, other: &RdfGraph) -> bool {
        self.triples == other.triples
    }
}

impl Extend<Triple> for RdfGraph {
    fn extend<T: IntoIterator<Item = Triple>>(&mut self, iter: T) {
        self.triples.extend(iter);
    }
}

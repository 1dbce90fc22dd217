//! Converts JAMS music annotations into RDF graphs shaped by the Music
//! Annotation pattern, validates them and answers its competency questions.

pub mod iri;
pub mod jams;
pub mod cli;
pub mod cq;
pub mod model;
pub mod rdf;
pub mod validate;
pub mod vocab;

pub use cq::{answer_cq, oracle_cq, CqResult};
pub use iri::{mint_iri, Iri, IriError, IriMinter};
pub use jams::{parse_jams, JamsDocument, JamsError};
pub use model::Model;
pub use rdf::{emit_graph, parse_turtle, serialize_ntriples, serialize_turtle, RdfGraph};
pub use validate::{explain, validate_graph, validate_model, Violation};

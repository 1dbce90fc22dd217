use super::{Literal, RdfGraph, Term, Triple};
use crate::vocab;

pub fn serialize_ntriples(graph: &RdfGraph) -> String {
    graph.iter().map(line).collect()
}

pub(super) fn line(triple: &Triple) -> String {
    format!("<{}> <{}> {} .\n", triple.subject, triple.predicate, term(&triple.object))
}

fn term(term: &Term) -> String {
    match term {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Literal(l) => literal(l),
    }
}

/// `"lexical"` for xsd:string, `"lexical"^^<datatype>` otherwise.
pub(super) fn literal(l: &Literal) -> String {
    let quoted = quote(&l.lexical);
    if l.datatype == vocab::xsd::string() {
        quoted
    } else {
        format!("{quoted}^^<{}>", l.datatype)
    }
}

pub(super) fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

//! Deterministic Turtle writer and a reader for the subset it writes.
//!
//! The reader handles prefixes (`@prefix` and `PREFIX`), absolute IRIs,
//! prefixed names, `a`, `;` and `,` lists, quoted literals with datatypes
//! and bare numbers/booleans. Blank nodes, collections, language tags,
//! `@base` and relative IRIs are refused with
//! [`TurtleError::UnsupportedConstruct`].

use std::collections::BTreeMap;

use super::ntriples::{literal as nt_literal, quote};
use super::{Literal, RdfGraph, Term, Triple};
use crate::iri::Iri;
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TurtleError {
    #[error("turtle syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported turtle construct at {line}:{column}: {construct}")]
    UnsupportedConstruct { line: usize, column: usize, construct: &'static str },
}

pub fn serialize_turtle(graph: &RdfGraph) -> String {
    let mut out = String::new();
    for (prefix, ns) in graph.prefixes() {
        out.push_str(&format!("@prefix {prefix}: <{ns}> .\n"));
    }
    let abbreviations: Vec<(&str, &str)> =
        graph.prefixes().iter().map(|(p, ns)| (p.as_str(), ns.as_str())).collect();
    let name = |iri: &Iri| abbreviate(iri, &abbreviations);

    let mut current: Option<&Iri> = None;
    for triple in graph.iter() {
        if current == Some(&triple.subject) {
            out.push_str(" ;\n    ");
        } else {
            if current.is_some() {
                out.push_str(" .\n");
            }
            out.push('\n');
            out.push_str(&name(&triple.subject));
            out.push(' ');
            current = Some(&triple.subject);
        }
        if triple.predicate == vocab::rdf::type_() {
            out.push('a');
        } else {
            out.push_str(&name(&triple.predicate));
        }
        out.push(' ');
        match &triple.object {
            Term::Iri(iri) => out.push_str(&name(iri)),
            Term::Literal(l) if l.datatype == vocab::xsd::string() => out.push_str(&quote(&l.lexical)),
            Term::Literal(l) => match abbreviate_strict(&l.datatype, &abbreviations) {
                Some(dt) => out.push_str(&format!("{}^^{dt}", quote(&l.lexical))),
                None => out.push_str(&nt_literal(l)),
            },
        }
    }
    if current.is_some() {
        out.push_str(" .\n");
    }
    out
}

fn abbreviate(iri: &Iri, prefixes: &[(&str, &str)]) -> String {
    abbreviate_strict(iri, prefixes).unwrap_or_else(|| format!("<{iri}>"))
}

/// Prefixed name when the local part is a plain name, longest namespace first.
fn abbreviate_strict(iri: &Iri, prefixes: &[(&str, &str)]) -> Option<String> {
    prefixes
        .iter()
        .filter(|(_, ns)| iri.as_str().starts_with(ns))
        .filter(|(_, ns)| is_plain_local(&iri.as_str()[ns.len()..]))
        .max_by_key(|(p, ns)| (ns.len(), std::cmp::Reverse(*p)))
        .map(|(p, ns)| format!("{p}:{}", &iri.as_str()[ns.len()..]))
}

fn is_plain_local(local: &str) -> bool {
    let mut chars = local.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn parse_turtle(text: &str) -> Result<RdfGraph, TurtleError> {
    Parser::new(text).parse()
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    prefixes: BTreeMap<String, Iri>,
    graph: RdfGraph,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            prefixes: BTreeMap::new(),
            graph: RdfGraph::bare(),
            _text: text,
        }
    }

    fn parse(mut self) -> Result<RdfGraph, TurtleError> {
        loop {
            self.skip_ws();
            if self.eof() {
                break;
            }
            if self.starts_with("@prefix") {
                self.advance_n(7);
                self.prefix_body()?;
                self.skip_ws();
                self.expect('.')?;
            } else if self.starts_with("@base") || self.keyword("BASE") {
                return Err(self.unsupported("base IRI"));
            } else if self.keyword("PREFIX") {
                self.advance_n(6);
                self.prefix_body()?;
            } else {
                self.triples()?;
                self.skip_ws();
                self.expect('.')?;
            }
        }
        for (p, ns) in self.prefixes {
            self.graph.set_prefix(p, ns);
        }
        Ok(self.graph)
    }

    fn prefix_body(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.') {
                return Err(self.syntax(format!("unexpected `{c}` in prefix name")));
            }
            prefix.push(c);
            self.advance();
        }
        self.expect(':')?;
        self.skip_ws();
        let ns = self.iri_ref()?;
        self.prefixes.insert(prefix, ns);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), TurtleError> {
        let subject = self.subject()?;
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            loop {
                self.skip_ws();
                let object = self.object()?;
                self.graph.insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.advance();
                } else {
                    break;
                }
            }
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.advance();
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | None) {
                return Ok(());
            }
        }
    }

    fn subject(&mut self) -> Result<Iri, TurtleError> {
        match self.peek() {
            Some('[') => Err(self.unsupported("blank node")),
            Some('_') if self.peek_at(1) == Some(':') => Err(self.unsupported("blank node")),
            Some('(') => Err(self.unsupported("collection")),
            Some('"') | Some('\'') => Err(self.syntax("a literal cannot be a subject".into())),
            _ => self.iri(),
        }
    }

    fn verb(&mut self) -> Result<Iri, TurtleError> {
        if self.peek() == Some('a')
            && self.peek_at(1).is_none_or(|c| c.is_whitespace() || matches!(c, '<' | '"' | '\'' | '[' | '(' | '#'))
        {
            self.advance();
            return Ok(vocab::rdf::type_());
        }
        self.iri()
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        match self.peek() {
            Some('[') => Err(self.unsupported("blank node")),
            Some('_') if self.peek_at(1) == Some(':') => Err(self.unsupported("blank node")),
            Some('(') => Err(self.unsupported("collection")),
            Some('"') | Some('\'') => self.literal().map(Term::Literal),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => self.number().map(Term::Literal),
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.number().map(Term::Literal),
            Some(_) if self.keyword("true") || self.keyword("false") => {
                let value = if self.keyword("true") { "true" } else { "false" };
                self.advance_n(value.len());
                Ok(Term::Literal(Literal::new(value, vocab::xsd::boolean())))
            }
            Some(_) => self.iri().map(Term::Iri),
            None => Err(self.syntax("unexpected end of input, expected an object".into())),
        }
    }

    fn iri(&mut self) -> Result<Iri, TurtleError> {
        if self.peek() == Some('<') {
            if self.peek_at(1) == Some('<') {
                return Err(self.unsupported("quoted triple"));
            }
            self.iri_ref()
        } else {
            self.prefixed_name()
        }
    }

    fn iri_ref(&mut self) -> Result<Iri, TurtleError> {
        let (line, column) = (self.line, self.column);
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.advance() {
                None => return Err(self.syntax("unterminated IRI".into())),
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() => return Err(self.syntax("whitespace inside IRI".into())),
                Some(c) => value.push(c),
            }
        }
        if !value.contains(':') {
            return Err(TurtleError::UnsupportedConstruct { line, column, construct: "relative IRI" });
        }
        Iri::new(value).map_err(|e| TurtleError::Syntax { line, column, message: e.to_string() })
    }

    fn prefixed_name(&mut self) -> Result<Iri, TurtleError> {
        let (line, column) = (self.line, self.column);
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.') {
                return Err(self.syntax(format!("unexpected `{c}`")));
            }
            prefix.push(c);
            self.advance();
        }
        if self.peek() != Some(':') {
            return Err(self.syntax(format!("expected an IRI, found `{prefix}`")));
        }
        self.advance();
        let mut local = String::new();
        while let Some(c) = self.peek() {
            let continues = self.peek_at(1).is_some_and(|n| is_local_char(n) || n == '\\' || n == '.');
            if is_local_char(c) || c == ':' || (c == '.' && continues) {
                local.push(c);
                self.advance();
            } else if c == '\\' {
                self.advance();
                match self.advance() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return Err(self.syntax("bad escape in local name".into())),
                }
            } else {
                break;
            }
        }
        let ns = self.prefixes.get(&prefix).ok_or_else(|| TurtleError::Syntax {
            line,
            column,
            message: format!("undefined prefix `{prefix}:`"),
        })?;
        Iri::new(format!("{ns}{local}")).map_err(|e| TurtleError::Syntax { line, column, message: e.to_string() })
    }

    fn literal(&mut self) -> Result<Literal, TurtleError> {
        let quote = self.advance().expect("caller checked a quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.advance_n(2);
        }
        let mut value = String::new();
        loop {
            match self.advance() {
                None => return Err(self.syntax("unterminated string".into())),
                Some(c) if c == quote => {
                    if !long {
                        break;
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.advance_n(2);
                        break;
                    }
                    value.push(c);
                }
                Some('\\') => value.push(self.string_escape()?),
                Some('\n') | Some('\r') if !long => return Err(self.syntax("newline in short string".into())),
                Some(c) => value.push(c),
            }
        }
        match self.peek() {
            Some('@') => Err(self.unsupported("language tag")),
            Some('^') if self.peek_at(1) == Some('^') => {
                self.advance_n(2);
                let datatype = self.iri()?;
                Ok(Literal::new(value, datatype))
            }
            _ => Ok(Literal::string(value)),
        }
    }

    fn number(&mut self) -> Result<Literal, TurtleError> {
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.advance();
        }
        let digits = |p: &mut Self, text: &mut String| {
            while let Some(c) = p.peek().filter(char::is_ascii_digit) {
                text.push(c);
                p.advance();
            }
        };
        digits(self, &mut text);
        let mut datatype = vocab::xsd::integer();
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.advance();
            digits(self, &mut text);
            datatype = vocab::xsd::decimal();
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            text.push(e);
            self.advance();
            if let Some(c @ ('+' | '-')) = self.peek() {
                text.push(c);
                self.advance();
            }
            digits(self, &mut text);
            datatype = vocab::xsd::double();
        }
        if !text.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.syntax(format!("malformed number `{text}`")));
        }
        Ok(Literal::new(text, datatype))
    }

    fn string_escape(&mut self) -> Result<char, TurtleError> {
        match self.peek() {
            Some('u') | Some('U') => self.unicode_escape(),
            _ => match self.advance() {
                Some('t') => Ok('\t'),
                Some('b') => Ok('\u{8}'),
                Some('n') => Ok('\n'),
                Some('r') => Ok('\r'),
                Some('f') => Ok('\u{c}'),
                Some(c @ ('"' | '\'' | '\\')) => Ok(c),
                _ => Err(self.syntax("unknown escape sequence".into())),
            },
        }
    }

    /// After a backslash: `uXXXX` or `UXXXXXXXX`.
    fn unicode_escape(&mut self) -> Result<char, TurtleError> {
        let width = match self.advance() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.syntax("expected \\u or \\U escape".into())),
        };
        let mut hex = String::new();
        for _ in 0..width {
            match self.advance() {
                Some(c) if c.is_ascii_hexdigit() => hex.push(c),
                _ => return Err(self.syntax("bad hex digits in escape".into())),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.syntax(format!("invalid code point U+{hex}")))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.advance();
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.advance();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<(), TurtleError> {
        match self.peek() {
            Some(c) if c == want => {
                self.advance();
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.syntax(format!("expected `{want}`, found end of input"))),
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    /// Case-insensitive keyword followed by a non-name character.
    fn keyword(&self, word: &str) -> bool {
        word.chars().enumerate().all(|(i, c)| self.peek_at(i).is_some_and(|p| p.eq_ignore_ascii_case(&c)))
            && self.peek_at(word.len()).is_none_or(|c| !(is_local_char(c) || c == ':'))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn eof(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn advance(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn advance_n(&mut self, n: usize) {
        for _ in 0..n {
            self.advance();
        }
    }

    fn syntax(&self, message: String) -> TurtleError {
        TurtleError::Syntax { line: self.line, column: self.column, message }
    }

    fn unsupported(&self, construct: &'static str) -> TurtleError {
        TurtleError::UnsupportedConstruct { line: self.line, column: self.column, construct }
    }
}

fn is_local_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '%'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn minimal_document() {
        let g = parse_turtle("@prefix ex: <http://example.org/> . ex:a ex:p ex:b .").unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, iri("http://example.org/a"));
        assert_eq!(t.object, Term::Iri(iri("http://example.org/b")));
    }

    #[test]
    fn refuses_blank_nodes_and_friends() {
        let prefix = "@prefix ex: <http://example.org/> .\n";
        for (body, construct) in [
            ("ex:a ex:p [] .", "blank node"),
            ("[] ex:p ex:b .", "blank node"),
            ("_:b ex:p ex:b .", "blank node"),
            ("ex:a ex:p (ex:b) .", "collection"),
            ("ex:a ex:p \"x\"@en .", "language tag"),
            ("ex:a ex:p <b> .", "relative IRI"),
        ] {
            match parse_turtle(&format!("{prefix}{body}")) {
                Err(TurtleError::UnsupportedConstruct { construct: c, .. }) => assert_eq!(c, construct, "{body}"),
                other => panic!("{body}: {other:?}"),
            }
        }
        assert!(matches!(parse_turtle("@base <http://x/> ."), Err(TurtleError::UnsupportedConstruct { .. })));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_turtle("@prefix ex: <http://example.org/> .\nex:a ex:p ex:b").unwrap_err();
        assert!(matches!(err, TurtleError::Syntax { line: 2, .. }), "{err:?}");
        let err = parse_turtle("nope:a nope:p nope:b .").unwrap_err();
        assert!(matches!(err, TurtleError::Syntax { line: 1, column: 1, .. }), "{err:?}");
    }

    #[test]
    fn lists_literals_and_comments() {
        let text = r#"
PREFIX ex: <http://example.org/>
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
# comment
ex:a a ex:C ;
    ex:p "x\ty", 'single', """long "quoted"
text""" ;
    ex:n 1.50, 3, -2e3, true ;
    ex:d "4.122"^^xsd:decimal ;
    ex:q <http://example.org/o1> ; .
"#;
        let g = parse_turtle(text).unwrap();
        assert_eq!(g.len(), 10);
        let a = iri("http://example.org/a");
        assert!(g.contains(&Triple::new(a.clone(), vocab::rdf::type_(), iri("http://example.org/C"))));
        assert!(g.contains(&Triple::new(a.clone(), iri("http://example.org/p"), Literal::string("x\ty"))));
        assert!(g.contains(&Triple::new(a.clone(), iri("http://example.org/p"), Literal::string("long \"quoted\"\ntext"))));
        assert!(g.contains(&Triple::new(a.clone(), iri("http://example.org/n"), Literal::new("1.50", vocab::xsd::decimal()))));
        assert!(g.contains(&Triple::new(a.clone(), iri("http://example.org/n"), Literal::new("-2e3", vocab::xsd::double()))));
        assert!(g.contains(&Triple::new(a.clone(), iri("http://example.org/d"), Literal::new("4.122", vocab::xsd::decimal()))));
        assert!(g.contains(&Triple::new(a, iri("http://example.org/q"), iri("http://example.org/o1"))));
    }

    #[test]
    fn writes_prefixes_and_groups_subjects() {
        let mut g = RdfGraph::new();
        let s = iri("http://example.org/S");
        g.add(&s, vocab::rdf::type_(), vocab::ma::score());
        g.add(&s, vocab::dcterms::title(), Literal::string("T"));
        g.add(&iri("http://example.org/S/x"), vocab::ma::has_time_value(), Literal::new("1.0", vocab::xsd::decimal()));
        let text = serialize_turtle(&g);
        let body = text.split_once("\n\n").unwrap().1;
        assert_eq!(
            body,
            "ex:S dcterms:title \"T\" ;\n    a ma:Score .\n\n<http://example.org/S/x> ma:hasTimeValue \"1.0\"^^xsd:decimal .\n"
        );
        assert!(text.starts_with("@prefix dcterms: <http://purl.org/dc/terms/> .\n"));
        let back = parse_turtle(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn empty_graph_is_prefixes_only() {
        let text = serialize_turtle(&RdfGraph::new());
        assert!(text.lines().all(|l| l.starts_with("@prefix ")));
        assert_eq!(text.lines().count(), vocab::DEFAULT_PREFIXES.len());
        assert_eq!(parse_turtle(&text).unwrap(), RdfGraph::new());
    }

    #[test]
    fn local_names_with_dots_stop_before_terminator() {
        let g = parse_turtle("@prefix ex: <http://example.org/> . ex:a.b ex:p ex:c.").unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject.as_str(), "http://example.org/a.b");
        assert_eq!(t.object, Term::Iri(iri("http://example.org/c")));
    }
}

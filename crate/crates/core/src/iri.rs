//! Absolute IRIs and the deterministic minting scheme used for every node.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IriError {
    #[error("invalid IRI `{0}`: {1}")]
    Invalid(String, &'static str),
    #[error("invalid base IRI `{0}`: {1}")]
    InvalidBase(String, &'static str),
    #[error("at least one discriminator is required to mint an IRI")]
    NoDiscriminators,
}

/// A syntactically checked absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, IriError> {
        let value = value.into();
        check_absolute(&value).map_err(|why| IriError::Invalid(value.clone(), why))?;
        Ok(Self(value))
    }

    /// Builds an IRI from a compile-time constant known to be valid.
    pub(crate) fn from_static(value: &'static str) -> Self {
        debug_assert!(check_absolute(value).is_ok(), "{value}");
        Self(value.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Appends a suffix. Used to derive the IRIs of nodes owned by another
    /// node (intervals, indices, components, durations).
    pub fn derive(&self, suffix: &str) -> Iri {
        Iri(format!("{}{}", self.0, suffix))
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

fn check_absolute(value: &str) -> Result<(), &'static str> {
    let Some((scheme, rest)) = value.split_once(':') else {
        return Err("missing scheme");
    };
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return Err("scheme must start with a letter"),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return Err("illegal character in scheme");
    }
    if rest.is_empty() {
        return Err("empty hierarchical part");
    }
    if value
        .chars()
        .any(|c| c.is_control() || c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Err("illegal character");
    }
    Ok(())
}

/// Lowercases and joins the alphanumeric runs with `-`, so separators at
/// either end disappear. Empty results become `_`.
pub fn slug(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_dash = false;
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if pending_dash && !out.is_empty() {
                out.push('-');
            }
            pending_dash = false;
            out.push(c);
        } else {
            pending_dash = true;
        }
    }
    if out.is_empty() {
        out.push('_');
    }
    out
}

fn normalized_base(base: &str) -> Result<String, IriError> {
    check_absolute(base).map_err(|why| IriError::InvalidBase(base.to_owned(), why))?;
    let mut base = base.to_owned();
    if !base.ends_with('/') && !base.ends_with('#') {
        base.push('/');
    }
    Ok(base)
}

/// `base + slug(role) + "/" + slug(d1) + "/" + slug(d2) ...`
///
/// A base that ends in neither `/` nor `#` gets a trailing `/`.
pub fn mint_iri<S: AsRef<str>>(base: &str, role: &str, discriminators: &[S]) -> Result<Iri, IriError> {
    let base = normalized_base(base)?;
    mint_with(&base, role, discriminators)
}

fn mint_with<S: AsRef<str>>(base: &str, role: &str, discriminators: &[S]) -> Result<Iri, IriError> {
    if discriminators.is_empty() {
        return Err(IriError::NoDiscriminators);
    }
    let tail: Vec<String> = discriminators.iter().map(|d| slug(d.as_ref())).collect();
    Iri::new(format!("{base}{}/{}", slug(role), tail.join("/")))
}

/// Stateful minter that keeps IRIs distinct when different inputs slug to
/// the same text. The second distinct input gets `_2` appended, the third
/// `_3`, and so on. Slugs never contain `_` so suffixed IRIs cannot clash
/// with plain ones.
#[derive(Debug, Clone)]
pub struct IriMinter {
    base: String,
    minted: HashMap<String, Vec<(String, Vec<String>)>>,
}

impl IriMinter {
    pub fn new(base: &str) -> Result<Self, IriError> {
        Ok(Self { base: normalized_base(base)?, minted: HashMap::new() })
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn mint<S: AsRef<str>>(&mut self, role: &str, discriminators: &[S]) -> Result<Iri, IriError> {
        let candidate = mint_with(&self.base, role, discriminators)?;
        let key = (role.to_owned(), discriminators.iter().map(|d| d.as_ref().to_owned()).collect::<Vec<_>>());
        let owners = self.minted.entry(candidate.as_str().to_owned()).or_default();
        let ordinal = match owners.iter().position(|k| *k == key) {
            Some(pos) => pos,
            None => {
                owners.push(key);
                owners.len() - 1
            }
        };
        if ordinal == 0 {
            Ok(candidate)
        } else {
            Ok(candidate.derive(&format!("_{}", ordinal + 1)))
        }
    }
}

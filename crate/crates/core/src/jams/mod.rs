//! JAMS documents: parsing and lowering into the pattern model.
//!
//! Numbers are kept as exact decimals carrying their source scale, so
//! `1.0` stays `1.0` and `0.459 + 3.663` is exactly `4.122`.
//! Keys the parser does not know are kept in `extras` maps; sandboxes are
//! kept verbatim with their key order.

mod lower;

pub use lower::{
    detect_modality_hint, lower_document, lower_to_model, resolve_annotator, value_kind_for_namespace,
    LoweringError, LoweringOptions, ModalityHint,
};

use std::str::FromStr;

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JamsError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    MalformedJson { line: usize, column: usize, message: String },
    #[error("missing field `{path}`")]
    MissingField { path: String },
    #[error("type mismatch at `{path}`: expected {expected}, found {found}")]
    TypeMismatch { path: String, expected: &'static str, found: &'static str },
    #[error("value out of range at `{path}`: {message}")]
    OutOfRange { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JamsDocument {
    pub file_metadata: JamsFileMetadata,
    pub annotations: Vec<JamsAnnotationBlock>,
    pub sandbox: Map<String, Value>,
    pub extras: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JamsFileMetadata {
    pub jams_version: String,
    pub title: String,
    pub artist: String,
    pub release: String,
    pub duration: Option<Decimal>,
    pub identifiers: Map<String, Value>,
    pub extras: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JamsAnnotationBlock {
    pub namespace: String,
    pub data: Vec<JamsObservationRow>,
    pub annotation_metadata: JamsAnnotationMetadata,
    pub sandbox: Map<String, Value>,
    pub extras: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JamsObservationRow {
    pub time: Decimal,
    pub duration: Decimal,
    /// Strings verbatim, anything else as compact JSON.
    pub value: String,
    pub confidence: Option<Decimal>,
    pub sandbox: Map<String, Value>,
    pub extras: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct JamsAnnotationMetadata {
    pub curator_name: Option<String>,
    pub curator_email: Option<String>,
    pub annotator: Map<String, Value>,
    pub annotation_tools: Option<String>,
    /// Kept as written; JAMS files use both `1.0` and `"1.0"`.
    pub version: Option<Value>,
    pub corpus: Option<String>,
    pub annotation_rules: Option<String>,
    pub validation: Option<String>,
    pub data_source: Option<String>,
    pub extras: Map<String, Value>,
}

impl JamsAnnotationMetadata {
    pub fn version_text(&self) -> Option<String> {
        self.version.clone().map(canonical_value)
    }
}

impl JamsObservationRow {
    /// Float views, for callers that do not need exactness.
    pub fn time_f64(&self) -> f64 {
        self.time.to_f64().unwrap_or(f64::NAN)
    }

    pub fn duration_f64(&self) -> f64 {
        self.duration.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn parse_jams(text: &str) -> Result<JamsDocument, JamsError> {
    let root: Value = serde_json::from_str(text).map_err(|e| JamsError::MalformedJson {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut root = into_object(root, &Path::root())?;
    let path = Path::root();

    let file_metadata = parse_file_metadata(take_required(&mut root, &path, "file_metadata")?, &path.key("file_metadata"))?;

    let annotations_path = path.key("annotations");
    let annotations = match take_required(&mut root, &path, "annotations")? {
        Value::Array(items) => items
            .into_iter()
            .enumerate()
            .map(|(i, item)| parse_annotation(item, &annotations_path.index(i)))
            .collect::<Result<Vec<_>, _>>()?,
        other => return Err(mismatch(&annotations_path, "array", &other)),
    };

    let sandbox = take_object_or_empty(&mut root, &path, "sandbox")?;
    Ok(JamsDocument { file_metadata, annotations, sandbox, extras: root })
}

fn parse_file_metadata(value: Value, path: &Path) -> Result<JamsFileMetadata, JamsError> {
    let mut obj = into_object(value, path)?;
    let jams_version = take_text(&mut obj, path, "jams_version")?
        .ok_or_else(|| JamsError::MissingField { path: path.key("jams_version").to_string() })?;
    let title = take_text(&mut obj, path, "title")?.unwrap_or_default();
    let artist = take_text(&mut obj, path, "artist")?.unwrap_or_default();
    let release = take_text(&mut obj, path, "release")?.unwrap_or_default();
    let duration = match obj.shift_remove("duration") {
        None | Some(Value::Null) => None,
        Some(v) => Some(non_negative(&path.key("duration"), &v)?),
    };
    let identifiers = take_object_or_empty(&mut obj, path, "identifiers")?;
    Ok(JamsFileMetadata { jams_version, title, artist, release, duration, identifiers, extras: obj })
}

fn parse_annotation(value: Value, path: &Path) -> Result<JamsAnnotationBlock, JamsError> {
    let mut obj = into_object(value, path)?;
    let ns_path = path.key("namespace");
    let namespace = match take_required(&mut obj, path, "namespace")? {
        Value::String(s) if !s.is_empty() => s,
        Value::String(_) => {
            return Err(JamsError::OutOfRange { path: ns_path.to_string(), message: "namespace is empty".into() })
        }
        other => return Err(mismatch(&ns_path, "string", &other)),
    };

    let data_path = path.key("data");
    let data = match take_required(&mut obj, path, "data")? {
        Value::Array(rows) => rows
            .into_iter()
            .enumerate()
            .map(|(j, row)| parse_row(row, &data_path.index(j)))
            .collect::<Result<Vec<_>, _>>()?,
        Value::Object(columns) => parse_columns(columns, &data_path)?,
        other => return Err(mismatch(&data_path, "array", &other)),
    };

    let annotation_metadata = match obj.shift_remove("annotation_metadata") {
        None | Some(Value::Null) => JamsAnnotationMetadata::default(),
        Some(v) => parse_annotation_metadata(v, &path.key("annotation_metadata"))?,
    };
    let sandbox = take_object_or_empty(&mut obj, path, "sandbox")?;
    Ok(JamsAnnotationBlock { namespace, data, annotation_metadata, sandbox, extras: obj })
}

fn parse_row(value: Value, path: &Path) -> Result<JamsObservationRow, JamsError> {
    let mut obj = into_object(value, path)?;
    let time = non_negative(&path.key("time"), &take_required(&mut obj, path, "time")?)?;
    let duration = non_negative(&path.key("duration"), &take_required(&mut obj, path, "duration")?)?;
    let value = canonical_value(take_required(&mut obj, path, "value")?);
    let confidence = match obj.shift_remove("confidence") {
        None | Some(Value::Null) => None,
        Some(v) => Some(decimal(&path.key("confidence"), &v)?),
    };
    let sandbox = take_object_or_empty(&mut obj, path, "sandbox")?;
    Ok(JamsObservationRow { time, duration, value, confidence, sandbox, extras: obj })
}

/// Dense layout: `{"time": [...], "duration": [...], "value": [...], "confidence": [...]}`.
fn parse_columns(mut columns: Map<String, Value>, path: &Path) -> Result<Vec<JamsObservationRow>, JamsError> {
    let mut column = |name: &str, required: bool| -> Result<Option<Vec<Value>>, JamsError> {
        match columns.shift_remove(name) {
            None if required => Err(JamsError::MissingField { path: path.key(name).to_string() }),
            None => Ok(None),
            Some(Value::Array(items)) => Ok(Some(items)),
            Some(other) => Err(mismatch(&path.key(name), "array", &other)),
        }
    };
    let times = column("time", true)?.unwrap_or_default();
    let durations = column("duration", true)?.unwrap_or_default();
    let values = column("value", true)?.unwrap_or_default();
    let confidences = column("confidence", false)?;
    let n = times.len();
    if durations.len() != n || values.len() != n || confidences.as_ref().is_some_and(|c| c.len() != n) {
        return Err(JamsError::OutOfRange { path: path.to_string(), message: "columns differ in length".into() });
    }
    let mut confidences = confidences.map(Vec::into_iter);
    times
        .into_iter()
        .zip(durations)
        .zip(values)
        .enumerate()
        .map(|(j, ((time, duration), value))| {
            let confidence = match confidences.as_mut().and_then(Iterator::next) {
                None | Some(Value::Null) => None,
                Some(v) => Some(decimal(&path.key("confidence").index(j), &v)?),
            };
            Ok(JamsObservationRow {
                time: non_negative(&path.key("time").index(j), &time)?,
                duration: non_negative(&path.key("duration").index(j), &duration)?,
                value: canonical_value(value),
                confidence,
                sandbox: Map::new(),
                extras: Map::new(),
            })
        })
        .collect()
}

fn parse_annotation_metadata(value: Value, path: &Path) -> Result<JamsAnnotationMetadata, JamsError> {
    let mut obj = into_object(value, path)?;
    let (curator_name, curator_email) = match obj.shift_remove("curator") {
        None | Some(Value::Null) => (None, None),
        Some(v) => {
            let curator_path = path.key("curator");
            let mut curator = into_object(v, &curator_path)?;
            let name = take_text(&mut curator, &curator_path, "name")?;
            let email = take_text(&mut curator, &curator_path, "email")?;
            (name, email)
        }
    };
    let annotator = take_object_or_empty(&mut obj, path, "annotator")?;
    Ok(JamsAnnotationMetadata {
        curator_name,
        curator_email,
        annotator,
        annotation_tools: take_text(&mut obj, path, "annotation_tools")?,
        version: obj.shift_remove("version").filter(|v| !v.is_null()),
        corpus: take_text(&mut obj, path, "corpus")?,
        annotation_rules: take_text(&mut obj, path, "annotation_rules")?,
        validation: take_text(&mut obj, path, "validation")?,
        data_source: take_text(&mut obj, path, "data_source")?,
        extras: obj,
    })
}

fn canonical_value(value: Value) -> String {
    match value {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Exact decimal from a JSON number, keeping the lexical scale.
pub(crate) fn decimal(path: &Path, value: &Value) -> Result<Decimal, JamsError> {
    let Value::Number(n) = value else {
        return Err(mismatch(path, "number", value));
    };
    let text = n.to_string();
    let parsed = if text.contains(['e', 'E']) { Decimal::from_scientific(&text) } else { Decimal::from_str(&text) };
    parsed.map_err(|e| JamsError::OutOfRange { path: path.to_string(), message: format!("{text}: {e}") })
}

fn non_negative(path: &Path, value: &Value) -> Result<Decimal, JamsError> {
    let d = decimal(path, value)?;
    if d.is_sign_negative() && !d.is_zero() {
        return Err(JamsError::OutOfRange { path: path.to_string(), message: format!("{d} is negative") });
    }
    Ok(d)
}

fn take_required(obj: &mut Map<String, Value>, path: &Path, key: &str) -> Result<Value, JamsError> {
    obj.shift_remove(key).ok_or_else(|| JamsError::MissingField { path: path.key(key).to_string() })
}

/// Optional text field. Numbers are accepted in their lexical form.
fn take_text(obj: &mut Map<String, Value>, path: &Path, key: &str) -> Result<Option<String>, JamsError> {
    match obj.shift_remove(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(Value::Number(n)) => Ok(Some(n.to_string())),
        Some(other) => Err(mismatch(&path.key(key), "string", &other)),
    }
}

fn take_object_or_empty(obj: &mut Map<String, Value>, path: &Path, key: &str) -> Result<Map<String, Value>, JamsError> {
    match obj.shift_remove(key) {
        None | Some(Value::Null) => Ok(Map::new()),
        Some(v) => into_object(v, &path.key(key)),
    }
}

fn into_object(value: Value, path: &Path) -> Result<Map<String, Value>, JamsError> {
    match value {
        Value::Object(map) => Ok(map),
        other => Err(mismatch(path, "object", &other)),
    }
}

fn mismatch(path: &Path, expected: &'static str, found: &Value) -> JamsError {
    JamsError::TypeMismatch { path: path.to_string(), expected, found: json_kind(found) }
}

fn json_kind(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// JSON path used in error messages, e.g. `annotations[0].data[2].time`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Path(String);

impl Path {
    pub(crate) fn root() -> Self {
        Self(String::new())
    }

    pub(crate) fn key(&self, key: &str) -> Self {
        if self.0.is_empty() {
            Self(key.to_owned())
        } else {
            Self(format!("{}.{key}", self.0))
        }
    }

    pub(crate) fn index(&self, i: usize) -> Self {
        Self(format!("{}[{i}]", self.0))
    }
}

impl std::fmt::Display for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            f.write_str("$")
        } else {
            f.write_str(&self.0)
        }
    }
}

fn number(d: &Decimal) -> Value {
    Value::Number(Number::from_str(&d.to_string()).expect("decimal renders as a JSON number"))
}

impl JamsDocument {
    /// Renders the fields this crate understands (plus sandboxes and extras)
    /// back to JSON. Used to check that parsing loses nothing.
    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("sandbox".into(), Value::Object(self.sandbox.clone()));
        root.insert("annotations".into(), Value::Array(self.annotations.iter().map(annotation_json).collect()));
        let fm = &self.file_metadata;
        let mut meta = Map::new();
        meta.insert("jams_version".into(), fm.jams_version.clone().into());
        meta.insert("title".into(), fm.title.clone().into());
        meta.insert("identifiers".into(), Value::Object(fm.identifiers.clone()));
        meta.insert("release".into(), fm.release.clone().into());
        if let Some(d) = &fm.duration {
            meta.insert("duration".into(), number(d));
        }
        meta.insert("artist".into(), fm.artist.clone().into());
        meta.extend(fm.extras.clone());
        root.insert("file_metadata".into(), Value::Object(meta));
        root.extend(self.extras.clone());
        Value::Object(root)
    }

    pub fn observation_count(&self) -> usize {
        self.annotations.iter().map(|a| a.data.len()).sum()
    }
}

fn annotation_json(block: &JamsAnnotationBlock) -> Value {
    let rows = block
        .data
        .iter()
        .map(|row| {
            let mut r = Map::new();
            r.insert("duration".into(), number(&row.duration));
            if let Some(c) = &row.confidence {
                r.insert("confidence".into(), number(c));
            }
            r.insert("value".into(), row.value.clone().into());
            r.insert("time".into(), number(&row.time));
            if !row.sandbox.is_empty() {
                r.insert("sandbox".into(), Value::Object(row.sandbox.clone()));
            }
            r.extend(row.extras.clone());
            Value::Object(r)
        })
        .collect();
    let m = &block.annotation_metadata;
    let mut meta = Map::new();
    let opt = |v: &Option<String>| v.clone().map(Value::String);
    let mut put = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            meta.insert(key.to_owned(), v);
        }
    };
    put("annotation_tools", opt(&m.annotation_tools));
    if m.curator_name.is_some() || m.curator_email.is_some() {
        let mut curator = Map::new();
        if let Some(n) = &m.curator_name {
            curator.insert("name".into(), n.clone().into());
        }
        if let Some(e) = &m.curator_email {
            curator.insert("email".into(), e.clone().into());
        }
        put("curator", Some(Value::Object(curator)));
    }
    put("annotator", Some(Value::Object(m.annotator.clone())));
    put("version", m.version.clone());
    put("corpus", opt(&m.corpus));
    put("annotation_rules", opt(&m.annotation_rules));
    put("validation", opt(&m.validation));
    put("data_source", opt(&m.data_source));
    meta.extend(m.extras.clone());

    let mut obj = Map::new();
    obj.insert("data".into(), Value::Array(rows));
    obj.insert("annotation_metadata".into(), Value::Object(meta));
    obj.insert("namespace".into(), block.namespace.clone().into());
    obj.insert("sandbox".into(), Value::Object(block.sandbox.clone()));
    obj.extend(block.extras.clone());
    Value::Object(obj)
}

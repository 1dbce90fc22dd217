use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde_json::{Map, Value};

use super::{decimal, JamsAnnotationBlock, JamsAnnotationMetadata, JamsDocument, JamsError, Path};
use crate::iri::{Iri, IriError, IriMinter};
use crate::model::{
    make_audio_index, make_score_index, Annotator, AnnotatorType, Model, ModelError, Modality, MusicAnnotation,
    MusicObservation, MusicTimeDuration, MusicTimeInterval, MusicalObjectKind, MusicalObjectRef, ObservationValue,
    ObservationValueKind, Provenance, TimeValueType,
};

/// Name given to annotators when the metadata names nobody.
pub const UNKNOWN_ANNOTATOR: &str = "unknown-annotator";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoweringError {
    #[error(transparent)]
    Iri(#[from] IriError),
    #[error("annotations[{index}]: namespace `{namespace}` has no value kind (strict mode)")]
    UnsupportedNamespace { index: usize, namespace: String },
    #[error("`{path}` is required to lower a score annotation")]
    ScoreLoweringMissingMetricalTime { path: String },
    #[error("`{path}`: {source}")]
    InvalidMetricalTime { path: String, source: ModelError },
    #[error(transparent)]
    Jams(#[from] JamsError),
    #[error("`{path}`: observation value is empty")]
    EmptyValue { path: String },
}

#[derive(Debug, Clone)]
pub struct LoweringOptions {
    pub modality: Modality,
    pub base_iri: String,
    pub strict_namespaces: bool,
    /// Used in every minted IRI. Defaults to the file title.
    pub document_key: Option<String>,
}

impl LoweringOptions {
    pub fn new(modality: Modality, base_iri: impl Into<String>) -> Self {
        Self { modality, base_iri: base_iri.into(), strict_namespaces: false, document_key: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModalityHint {
    Audio,
    Score,
    Unknown,
}

/// `chord` → Chord, `segment`/`segment_open` → Segment, anything else is
/// generic.
pub fn value_kind_for_namespace(namespace: &str) -> ObservationValueKind {
    match namespace {
        "chord" => ObservationValueKind::Chord,
        "segment" | "segment_open" => ObservationValueKind::Segment,
        other => ObservationValueKind::Generic(other.to_owned()),
    }
}

/// Annotator name and type from annotation metadata.
///
/// The name comes from `annotator.name`, then the curator (name, else
/// email), then [`UNKNOWN_ANNOTATOR`]. The type is `Machine` when
/// `annotation_tools` is non-empty and `Human` otherwise.
pub fn resolve_annotator(meta: &JamsAnnotationMetadata) -> (String, AnnotatorType) {
    let non_empty = |s: &Option<String>| s.as_deref().map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned);
    let from_annotator = if meta.annotator.is_empty() {
        None
    } else {
        meta.annotator.get("name").and_then(Value::as_str).map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned)
    };
    let name = from_annotator
        .or_else(|| non_empty(&meta.curator_name))
        .or_else(|| non_empty(&meta.curator_email))
        .unwrap_or_else(|| UNKNOWN_ANNOTATOR.to_owned());
    let kind = if non_empty(&meta.annotation_tools).is_some() { AnnotatorType::Machine } else { AnnotatorType::Human };
    (name, kind)
}

fn has_metrical_time(sandbox: &Map<String, Value>) -> bool {
    sandbox.contains_key("measure") && sandbox.contains_key("beat")
}

/// Guess the modality from the data. Never consulted unless asked for.
pub fn detect_modality_hint(doc: &JamsDocument) -> ModalityHint {
    let rows = doc.annotations.iter().flat_map(|a| a.data.iter());
    let (total, metrical) = rows.fold((0usize, 0usize), |(t, m), r| (t + 1, m + usize::from(has_metrical_time(&r.sandbox))));
    if total > 0 && metrical == total {
        ModalityHint::Score
    } else if metrical == 0 && doc.file_metadata.duration.is_some() {
        ModalityHint::Audio
    } else {
        ModalityHint::Unknown
    }
}

/// Lowers a parsed document into a musical object and one annotation per
/// annotation block.
pub fn lower_to_model(
    doc: &JamsDocument,
    opts: &LoweringOptions,
) -> Result<(MusicalObjectRef, Vec<MusicAnnotation>), LoweringError> {
    let mut minter = IriMinter::new(&opts.base_iri)?;
    let key = opts
        .document_key
        .clone()
        .filter(|k| !k.trim().is_empty())
        .or_else(|| Some(doc.file_metadata.title.clone()).filter(|t| !t.trim().is_empty()))
        .unwrap_or_else(|| "untitled".to_owned());

    let kind = match opts.modality {
        Modality::Audio => MusicalObjectKind::Track,
        Modality::Score => MusicalObjectKind::Score,
    };
    let object = MusicalObjectRef {
        id: minter.mint(if kind == MusicalObjectKind::Track { "track" } else { "score" }, &[&key])?,
        kind,
        title: doc.file_metadata.title.clone(),
        artist: Some(doc.file_metadata.artist.clone()).filter(|a| !a.is_empty()),
        duration: doc.file_metadata.duration,
    };

    let annotations = doc
        .annotations
        .iter()
        .enumerate()
        .map(|(i, block)| lower_block(doc, block, i, &key, &object.id, opts, &mut minter))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((object, annotations))
}

/// [`lower_to_model`] packaged as a [`Model`].
pub fn lower_document(doc: &JamsDocument, opts: &LoweringOptions) -> Result<Model, LoweringError> {
    let (object, annotations) = lower_to_model(doc, opts)?;
    Ok(Model { objects: vec![object], annotations })
}

fn lower_block(
    doc: &JamsDocument,
    block: &JamsAnnotationBlock,
    i: usize,
    key: &str,
    subject: &Iri,
    opts: &LoweringOptions,
    minter: &mut IriMinter,
) -> Result<MusicAnnotation, LoweringError> {
    let value_kind = value_kind_for_namespace(&block.namespace);
    if opts.strict_namespaces && matches!(value_kind, ObservationValueKind::Generic(_)) {
        return Err(LoweringError::UnsupportedNamespace { index: i, namespace: block.namespace.clone() });
    }
    let ordinal = i.to_string();
    let block_path = Path::root().key("annotations").index(i);

    let mut observations = Vec::with_capacity(block.data.len());
    for (j, row) in block.data.iter().enumerate() {
        let row_path = block_path.key("data").index(j);
        let obs_ordinal = j.to_string();
        let interval = match opts.modality {
            Modality::Audio => MusicTimeInterval::new(
                make_audio_index(row.time).map_err(|source| invalid(&row_path.key("time"), source))?,
                MusicTimeDuration::new(row.duration, TimeValueType::Seconds)
                    .map_err(|source| invalid(&row_path.key("duration"), source))?,
            ),
            Modality::Score => metrical_interval(&row.sandbox, &row_path.key("sandbox"))?,
        };
        if row.value.is_empty() {
            return Err(LoweringError::EmptyValue { path: row_path.key("value").to_string() });
        }
        let value = ObservationValue::new(
            minter.mint("value", &[key, &ordinal, &obs_ordinal])?,
            value_kind.clone(),
            row.value.clone(),
        )
        .map_err(|source| invalid(&row_path.key("value"), source))?;
        observations.push(MusicObservation::new(
            minter.mint("observation", &[key, &ordinal, &obs_ordinal])?,
            opts.modality,
            interval,
            value,
            row.confidence,
        ));
    }

    let beats_per_measure = beats_per_measure(&block.sandbox, &block_path.key("sandbox"))?
        .or(beats_per_measure(&doc.sandbox, &Path::root().key("sandbox"))?);
    let interval = spanning_interval(opts.modality, &observations, beats_per_measure);

    let (name, annotator_type) = resolve_annotator(&block.annotation_metadata);
    let annotator = Annotator { id: minter.mint("annotator", &[key, &ordinal])?, name: Some(name), annotator_type };

    let meta = &block.annotation_metadata;
    let provenance = Provenance {
        corpus: meta.corpus.clone().filter(|c| !c.is_empty()),
        curator: meta.curator_name.clone().filter(|c| !c.is_empty()),
    };

    let mut annotation = MusicAnnotation::new(
        minter.mint("annotation", &[key, &ordinal])?,
        opts.modality,
        subject.clone(),
        annotator,
        interval,
        value_kind,
    );
    annotation.provenance = (provenance != Provenance::default()).then_some(provenance);
    for obs in observations {
        annotation = annotation.attach_observation(obs).map_err(|source| invalid(&block_path, source))?;
    }
    Ok(annotation)
}

fn invalid(path: &Path, source: ModelError) -> LoweringError {
    LoweringError::InvalidMetricalTime { path: path.to_string(), source }
}

/// Row sandbox keys `measure` (integer >= 1), `beat` (decimal >= 1) and
/// `duration_beats` (decimal >= 0).
fn metrical_interval(sandbox: &Map<String, Value>, path: &Path) -> Result<MusicTimeInterval, LoweringError> {
    let field = |key: &str| {
        sandbox
            .get(key)
            .ok_or_else(|| LoweringError::ScoreLoweringMissingMetricalTime { path: path.key(key).to_string() })
            .and_then(|v| Ok(decimal(&path.key(key), v)?))
    };
    let measure = field("measure")?;
    let beat = field("beat")?;
    let beats = field("duration_beats")?;
    let measure_int = if measure.fract().is_zero() { measure.to_i64() } else { None };
    let index = match measure_int {
        Some(m) => make_score_index(m, beat),
        None => Err(ModelError::InvalidMeasure(measure)),
    }
    .map_err(|source| invalid(path, source))?;
    let duration = MusicTimeDuration::new(beats, TimeValueType::Beat).map_err(|source| invalid(&path.key("duration_beats"), source))?;
    Ok(MusicTimeInterval::new(index, duration))
}

fn beats_per_measure(sandbox: &Map<String, Value>, path: &Path) -> Result<Option<Decimal>, LoweringError> {
    match sandbox.get("beats_per_measure") {
        None | Some(Value::Null) => Ok(None),
        Some(v) => {
            let bpm = decimal(&path.key("beats_per_measure"), v)?;
            if bpm <= Decimal::ZERO {
                return Err(JamsError::OutOfRange {
                    path: path.key("beats_per_measure").to_string(),
                    message: "must be positive".into(),
                }
                .into());
            }
            Ok(Some(bpm))
        }
    }
}

/// Interval covering all observations: earliest start, and latest end
/// minus that start.
///
/// Score annotations need `beats_per_measure` to measure a span across
/// bars; without it the duration is the sum of the observation durations.
pub(crate) fn spanning_interval(
    modality: Modality,
    observations: &[MusicObservation],
    beats_per_measure: Option<Decimal>,
) -> MusicTimeInterval {
    match modality {
        Modality::Audio => {
            let starts = observations.iter().filter_map(|o| o.interval.index.component(TimeValueType::Seconds));
            let Some(start) = starts.map(|c| c.value).reduce(|a, b| if b < a { b } else { a }) else {
                return MusicTimeInterval::new(
                    make_audio_index(Decimal::ZERO).expect("zero is a valid time"),
                    MusicTimeDuration { value: Decimal::ZERO, value_type: TimeValueType::Seconds },
                );
            };
            let end = observations
                .iter()
                .filter_map(|o| o.interval.index.component(TimeValueType::Seconds).map(|c| c.value + o.interval.duration.value))
                .reduce(|a, b| if b > a { b } else { a })
                .unwrap_or(start);
            MusicTimeInterval::new(
                make_audio_index(start).expect("observation starts are non-negative"),
                MusicTimeDuration { value: end - start, value_type: TimeValueType::Seconds },
            )
        }
        Modality::Score => {
            let positions: Vec<(Decimal, Decimal, Decimal)> = observations
                .iter()
                .filter_map(|o| o.interval.index.metrical().map(|(m, b)| (m, b, o.interval.duration.value)))
                .collect();
            let Some(&(m0, b0, _)) = positions.iter().min_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1))) else {
                return MusicTimeInterval::new(
                    make_score_index(1, Decimal::ONE).expect("origin is valid"),
                    MusicTimeDuration { value: Decimal::ZERO, value_type: TimeValueType::Beat },
                );
            };
            let duration = match beats_per_measure {
                Some(bpm) => {
                    let absolute = |m: Decimal, b: Decimal| (m - Decimal::ONE) * bpm + (b - Decimal::ONE);
                    let start = absolute(m0, b0);
                    positions.iter().map(|&(m, b, d)| absolute(m, b) + d - start).max().unwrap_or_default()
                }
                None => positions.iter().map(|p| p.2).sum(),
            };
            let index = crate::model::MusicTimeIndex {
                components: vec![
                    crate::model::MusicTimeIndexComponent::new(m0, TimeValueType::Measure),
                    crate::model::MusicTimeIndexComponent::new(b0, TimeValueType::Beat),
                ],
            };
            MusicTimeInterval::new(index, MusicTimeDuration { value: duration, value_type: TimeValueType::Beat })
        }
    }
}

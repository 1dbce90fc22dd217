//! Typed in-memory form of the music annotation pattern.
//!
//! Structs expose their fields so that callers (and the validator's tests)
//! can build shapes the constructors would refuse. The constructors and
//! [`MusicAnnotation::attach_observation`] enforce the pattern's rules;
//! [`crate::validate::validate_model`] reports anything built around them.

use std::fmt;

use rust_decimal::Decimal;
use serde::Serialize;

use crate::iri::Iri;
use crate::vocab::{self, ma, muse};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("time value {0} is negative")]
    NegativeTime(Decimal),
    #[error("measure {0} must be an integer >= 1")]
    InvalidMeasure(Decimal),
    #[error("beat {0} must be >= 1")]
    InvalidBeat(Decimal),
    #[error("a time index needs at least one component")]
    EmptyIndex,
    #[error("time index has two components of type {0}")]
    DuplicateValueType(TimeValueType),
    #[error("cannot add a {observation} observation to a {annotation} annotation")]
    ModalityMismatch { annotation: Modality, observation: Modality },
    #[error("observation {0} is not included in any annotation")]
    OrphanObservation(Iri),
    #[error("cannot add a {duration} duration to an index measured in {index}")]
    IncommensurableUnits { index: String, duration: TimeValueType },
    #[error("observation value label must not be empty")]
    EmptyLabel,
    #[error("custom annotator type needs a name")]
    EmptyAnnotatorTypeName,
}

/// Whether an annotation was made from an audio signal or from a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Modality {
    Audio,
    Score,
}

impl Modality {
    pub fn annotation_class(self) -> Iri {
        match self {
            Modality::Audio => ma::audio_annotation(),
            Modality::Score => ma::score_annotation(),
        }
    }

    pub fn observation_class(self) -> Iri {
        match self {
            Modality::Audio => ma::audio_observation(),
            Modality::Score => ma::score_observation(),
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::Audio => "audio",
            Modality::Score => "score",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MusicalObjectKind {
    Track,
    Score,
}

impl MusicalObjectKind {
    pub fn class(self) -> Iri {
        match self {
            MusicalObjectKind::Track => ma::track(),
            MusicalObjectKind::Score => ma::score(),
        }
    }
}

/// The track or score an annotation talks about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicalObjectRef {
    pub id: Iri,
    pub kind: MusicalObjectKind,
    pub title: String,
    pub artist: Option<String>,
    /// Length in seconds when known. Only used for the past-the-end warning.
    pub duration: Option<Decimal>,
}

/// Closed set of time formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TimeValueType {
    Seconds,
    Milliseconds,
    Minutes,
    Measure,
    Beat,
}

impl TimeValueType {
    pub const ALL: [TimeValueType; 5] = [
        TimeValueType::Seconds,
        TimeValueType::Milliseconds,
        TimeValueType::Minutes,
        TimeValueType::Measure,
        TimeValueType::Beat,
    ];

    pub fn iri(self) -> Iri {
        match self {
            TimeValueType::Seconds => ma::seconds(),
            TimeValueType::Milliseconds => ma::milliseconds(),
            TimeValueType::Minutes => ma::minutes(),
            TimeValueType::Measure => ma::measure(),
            TimeValueType::Beat => ma::beat(),
        }
    }

    pub fn from_iri(iri: &Iri) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.iri() == *iri)
    }

    /// Seconds, milliseconds or minutes.
    pub fn is_clock(self) -> bool {
        matches!(self, TimeValueType::Seconds | TimeValueType::Milliseconds | TimeValueType::Minutes)
    }

    /// Value expressed in seconds, for clock types.
    pub fn to_seconds(self, value: Decimal) -> Option<Decimal> {
        match self {
            TimeValueType::Seconds => Some(value),
            TimeValueType::Milliseconds => Some(value / Decimal::from(1000)),
            TimeValueType::Minutes => Some(value * Decimal::from(60)),
            TimeValueType::Measure | TimeValueType::Beat => None,
        }
    }
}

impl fmt::Display for TimeValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Lexical form and datatype of a time literal: measures are integers,
/// everything else keeps the decimal's own scale.
pub fn time_literal(value: Decimal, value_type: TimeValueType) -> (String, Iri) {
    if value_type == TimeValueType::Measure && value.fract().is_zero() {
        (value.trunc().normalize().to_string(), vocab::xsd::integer())
    } else {
        (value.to_string(), vocab::xsd::decimal())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicTimeIndexComponent {
    pub value: Decimal,
    pub value_type: TimeValueType,
}

impl MusicTimeIndexComponent {
    pub fn new(value: Decimal, value_type: TimeValueType) -> Self {
        Self { value, value_type }
    }

    pub fn lexical(&self) -> (String, Iri) {
        time_literal(self.value, self.value_type)
    }
}

/// Start position of an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicTimeIndex {
    pub components: Vec<MusicTimeIndexComponent>,
}

impl MusicTimeIndex {
    /// At least one component, no value type repeated.
    pub fn new(components: Vec<MusicTimeIndexComponent>) -> Result<Self, ModelError> {
        if components.is_empty() {
            return Err(ModelError::EmptyIndex);
        }
        for (i, c) in components.iter().enumerate() {
            if components[..i].iter().any(|p| p.value_type == c.value_type) {
                return Err(ModelError::DuplicateValueType(c.value_type));
            }
        }
        Ok(Self { components })
    }

    pub fn component(&self, value_type: TimeValueType) -> Option<&MusicTimeIndexComponent> {
        self.components.iter().find(|c| c.value_type == value_type)
    }

    /// `(measure, beat)` when this is a two-component metrical index.
    pub fn metrical(&self) -> Option<(Decimal, Decimal)> {
        match self.components.as_slice() {
            [m, b] if m.value_type == TimeValueType::Measure && b.value_type == TimeValueType::Beat => {
                Some((m.value, b.value))
            }
            _ => None,
        }
    }
}

/// Single `Seconds` component.
pub fn make_audio_index(seconds: Decimal) -> Result<MusicTimeIndex, ModelError> {
    if seconds.is_sign_negative() && !seconds.is_zero() {
        return Err(ModelError::NegativeTime(seconds));
    }
    Ok(MusicTimeIndex { components: vec![MusicTimeIndexComponent::new(seconds, TimeValueType::Seconds)] })
}

/// `[(measure, Measure), (beat, Beat)]`, measure first.
pub fn make_score_index(measure: i64, beat: Decimal) -> Result<MusicTimeIndex, ModelError> {
    if measure < 1 {
        return Err(ModelError::InvalidMeasure(Decimal::from(measure)));
    }
    if beat < Decimal::ONE {
        return Err(ModelError::InvalidBeat(beat));
    }
    Ok(MusicTimeIndex {
        components: vec![
            MusicTimeIndexComponent::new(Decimal::from(measure), TimeValueType::Measure),
            MusicTimeIndexComponent::new(beat, TimeValueType::Beat),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicTimeDuration {
    pub value: Decimal,
    pub value_type: TimeValueType,
}

impl MusicTimeDuration {
    pub fn new(value: Decimal, value_type: TimeValueType) -> Result<Self, ModelError> {
        if value.is_sign_negative() && !value.is_zero() {
            return Err(ModelError::NegativeTime(value));
        }
        Ok(Self { value, value_type })
    }

    pub fn lexical(&self) -> (String, Iri) {
        time_literal(self.value, self.value_type)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicTimeInterval {
    pub index: MusicTimeIndex,
    pub duration: MusicTimeDuration,
}

/// End of an interval. For metrical intervals the end is a beat offset
/// inside the starting measure, not a normalised position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalEnd {
    pub value: Decimal,
    pub value_type: TimeValueType,
    pub measure: Option<Decimal>,
}

impl MusicTimeInterval {
    pub fn new(index: MusicTimeIndex, duration: MusicTimeDuration) -> Self {
        Self { index, duration }
    }

    pub fn end(&self) -> Result<IntervalEnd, ModelError> {
        interval_end(self)
    }
}

pub fn interval_end(interval: &MusicTimeInterval) -> Result<IntervalEnd, ModelError> {
    let unit = interval.duration.value_type;
    match interval.index.component(unit) {
        Some(start) => Ok(IntervalEnd {
            value: start.value + interval.duration.value,
            value_type: unit,
            measure: if unit == TimeValueType::Beat {
                interval.index.component(TimeValueType::Measure).map(|m| m.value)
            } else {
                None
            },
        }),
        None => Err(ModelError::IncommensurableUnits {
            index: interval
                .index
                .components
                .iter()
                .map(|c| c.value_type.to_string())
                .collect::<Vec<_>>()
                .join("+"),
            duration: unit,
        }),
    }
}

/// IRIs of the nodes that make up an interval, derived from its owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalNodes {
    pub interval: Iri,
    pub index: Iri,
    pub components: Vec<Iri>,
    pub duration: Iri,
}

impl IntervalNodes {
    pub fn for_owner(owner: &Iri, component_count: usize) -> Self {
        Self {
            interval: owner.derive("-interval"),
            index: owner.derive("-index"),
            components: (0..component_count).map(|k| owner.derive(&format!("-index-{k}"))).collect(),
            duration: owner.derive("-duration"),
        }
    }
}

/// What kind of thing an observation's value is.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObservationValueKind {
    Chord,
    Segment,
    /// Any other JAMS namespace, kept verbatim.
    Generic(String),
}

impl ObservationValueKind {
    pub fn iri(&self) -> Iri {
        match self {
            ObservationValueKind::Chord => muse::chord(),
            ObservationValueKind::Segment => muse::segment(),
            ObservationValueKind::Generic(_) => muse::generic(),
        }
    }

    pub fn from_parts(iri: &Iri, namespace: Option<&str>) -> Option<Self> {
        if *iri == muse::chord() {
            Some(Self::Chord)
        } else if *iri == muse::segment() {
            Some(Self::Segment)
        } else if *iri == muse::generic() {
            namespace.map(|ns| Self::Generic(ns.to_owned()))
        } else {
            None
        }
    }
}

impl fmt::Display for ObservationValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservationValueKind::Chord => f.write_str("chord"),
            ObservationValueKind::Segment => f.write_str("segment"),
            ObservationValueKind::Generic(ns) => write!(f, "generic:{ns}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationValue {
    pub id: Iri,
    pub kind: ObservationValueKind,
    pub label: String,
}

impl ObservationValue {
    pub fn new(id: Iri, kind: ObservationValueKind, label: impl Into<String>) -> Result<Self, ModelError> {
        let label = label.into();
        if label.is_empty() {
            return Err(ModelError::EmptyLabel);
        }
        Ok(Self { id, kind, label })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnnotatorType {
    Human,
    Machine,
    Crowdsourcing,
    Other(String),
}

impl AnnotatorType {
    pub fn other(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::EmptyAnnotatorTypeName);
        }
        Ok(Self::Other(name))
    }

    /// Node for this type. Custom types hang off their annotator's IRI.
    pub fn iri(&self, annotator: &Iri) -> Iri {
        match self {
            AnnotatorType::Human => ma::human(),
            AnnotatorType::Machine => ma::machine(),
            AnnotatorType::Crowdsourcing => ma::crowdsourcing(),
            AnnotatorType::Other(_) => annotator.derive("-type"),
        }
    }

    pub fn named(iri: &Iri) -> Option<Self> {
        if *iri == ma::human() {
            Some(Self::Human)
        } else if *iri == ma::machine() {
            Some(Self::Machine)
        } else if *iri == ma::crowdsourcing() {
            Some(Self::Crowdsourcing)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotator {
    pub id: Iri,
    pub name: Option<String>,
    pub annotator_type: AnnotatorType,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub corpus: Option<String>,
    pub curator: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicObservation {
    pub id: Iri,
    pub modality: Modality,
    pub interval: MusicTimeInterval,
    pub value: ObservationValue,
    pub confidence: Option<Decimal>,
}

impl MusicObservation {
    pub fn new(
        id: Iri,
        modality: Modality,
        interval: MusicTimeInterval,
        value: ObservationValue,
        confidence: Option<Decimal>,
    ) -> Self {
        Self { id, modality, interval, value, confidence }
    }

    pub fn interval_nodes(&self) -> IntervalNodes {
        IntervalNodes::for_owner(&self.id, self.interval.index.components.len())
    }
}

/// A collection of observations sharing an annotator, a modality and the
/// object they describe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MusicAnnotation {
    pub id: Iri,
    pub modality: Modality,
    pub subject: Iri,
    pub annotator: Annotator,
    pub interval: MusicTimeInterval,
    pub observations: Vec<MusicObservation>,
    pub value_kind: ObservationValueKind,
    pub provenance: Option<Provenance>,
}

impl MusicAnnotation {
    pub fn new(
        id: Iri,
        modality: Modality,
        subject: Iri,
        annotator: Annotator,
        interval: MusicTimeInterval,
        value_kind: ObservationValueKind,
    ) -> Self {
        Self { id, modality, subject, annotator, interval, observations: Vec::new(), value_kind, provenance: None }
    }

    /// Appends `observation` if its modality matches.
    pub fn attach_observation(mut self, observation: MusicObservation) -> Result<Self, ModelError> {
        if observation.modality != self.modality {
            return Err(ModelError::ModalityMismatch { annotation: self.modality, observation: observation.modality });
        }
        self.observations.push(observation);
        Ok(self)
    }

    pub fn interval_nodes(&self) -> IntervalNodes {
        IntervalNodes::for_owner(&self.id, self.interval.index.components.len())
    }
}

/// Musical objects plus the annotations about them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub objects: Vec<MusicalObjectRef>,
    pub annotations: Vec<MusicAnnotation>,
}

impl Model {
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty() && self.annotations.is_empty()
    }

    pub fn object(&self, id: &Iri) -> Option<&MusicalObjectRef> {
        self.objects.iter().find(|o| o.id == *id)
    }

    pub fn annotation(&self, id: &Iri) -> Option<&MusicAnnotation> {
        self.annotations.iter().find(|a| a.id == *id)
    }

    /// The observation and the annotation that includes it.
    pub fn observation(&self, id: &Iri) -> Option<(&MusicAnnotation, &MusicObservation)> {
        self.annotations
            .iter()
            .find_map(|a| a.observations.iter().find(|o| o.id == *id).map(|o| (a, o)))
    }

    pub fn observations(&self) -> impl Iterator<Item = (&MusicAnnotation, &MusicObservation)> {
        self.annotations.iter().flat_map(|a| a.observations.iter().map(move |o| (a, o)))
    }

    /// Follows annotation -> observation containment back to the annotator.
    pub fn annotator_of_observation(&self, observation: &Iri) -> Result<&Annotator, ModelError> {
        self.observation(observation)
            .map(|(a, _)| &a.annotator)
            .ok_or_else(|| ModelError::OrphanObservation(observation.clone()))
    }
}

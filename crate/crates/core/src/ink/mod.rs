//! Canonical data model for online handwriting.
//!
//! A [`StrokeSet`] is one handwriting sample (a paragraph): an ordered list
//! of strokes, each stroke being the points between a pen-down and the next
//! pen-up event. A [`Corpus`] groups strokesets with split assignments.
//!
//! Pen-up points are carried in the data model but excluded from all
//! modeling paths; [`concat_pen_down`] produces the on-surface sequence the
//! rest of the pipeline consumes.

mod iam_xml;
mod interchange;
mod synth;

pub use iam_xml::parse_iam_xml;
pub use interchange::{parse_interchange, write_interchange};
pub use synth::{synth_corpus, synth_corpus_with, SynthConfig};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors for parsing, validation, and synthesis of ink data.
#[derive(Debug, Error)]
pub enum InkError {
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: non-monotonic timestamp in stroke {stroke}")]
    NonMonotonicTimestamp { line: usize, stroke: usize },
    #[error("line {line}: duplicate strokeset id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("{position}: missing attribute {name:?}")]
    MissingAttribute { position: String, name: String },
    #[error("{position}: unparseable number {value:?}")]
    UnparseableNumber { position: String, value: String },
    #[error("empty document: no stroke elements found")]
    EmptyDocument,
    #[error("xml error near byte {offset}: {message}")]
    Xml { offset: usize, message: String },
    #[error("invalid strokeset {id:?}: {message}")]
    InvalidStrokeSet { id: String, message: String },
    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),
    #[error("strokeset {0:?} has no pen-down points")]
    NoPenDown(String),
    #[error("synthetic corpus needs at least 2 writers, got {0}")]
    TooFewWriters(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One timestamped pen position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    /// Horizontal position in device units.
    pub x: f64,
    /// Vertical position in device units.
    pub y: f64,
    /// Milliseconds since the start of the strokeset.
    pub t: f64,
    /// True while the pen touches the surface.
    pub pen_down: bool,
}

impl SamplePoint {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite() && self.t >= 0.0
    }
}

/// Points between one pen-down and the next pen-up event (or one lifted
/// segment). All points of a stroke share the same `pen_down` value.
#[derive(Debug, Clone, PartialEq)]
pub struct Stroke {
    pub points: Vec<SamplePoint>,
}

impl Stroke {
    pub fn pen_down(&self) -> bool {
        self.points.first().map(|p| p.pen_down).unwrap_or(false)
    }

    /// Checks length, finiteness, uniform pen state, and timestamp order.
    pub fn validate(&self) -> Result<(), String> {
        if self.points.is_empty() {
            return Err("stroke has no points".into());
        }
        let pen = self.points[0].pen_down;
        let mut prev_t = f64::NEG_INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                return Err(format!("point {i} has a non-finite coordinate"));
            }
            if p.pen_down != pen {
                return Err(format!("point {i} changes pen state mid-stroke"));
            }
            if p.t < prev_t {
                return Err(format!("non-monotonic timestamp at point {i}"));
            }
            prev_t = p.t;
        }
        Ok(())
    }
}

/// Writer gender label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    #[default]
    Unknown,
}

/// Writer handedness label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Left,
    Right,
    #[default]
    Unknown,
}

/// Optional writer metadata carried with each strokeset.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub gender: Gender,
    #[serde(default)]
    pub handedness: Handedness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

/// One labeled handwriting sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeSet {
    pub id: String,
    pub writer_id: String,
    pub strokes: Vec<Stroke>,
    pub metadata: Metadata,
}

impl StrokeSet {
    /// Full invariant check: at least one stroke, each stroke valid, stroke
    /// order temporal, and at least one pen-down point overall.
    pub fn validate(&self) -> Result<(), InkError> {
        let err = |message: String| InkError::InvalidStrokeSet {
            id: self.id.clone(),
            message,
        };
        if self.strokes.is_empty() {
            return Err(err("no strokes".into()));
        }
        let mut prev_last_t = f64::NEG_INFINITY;
        for (k, stroke) in self.strokes.iter().enumerate() {
            stroke
                .validate()
                .map_err(|m| err(format!("stroke {k}: {m}")))?;
            let first_t = stroke.points.first().unwrap().t;
            if first_t < prev_last_t {
                return Err(err(format!(
                    "stroke {k} starts before stroke {} ends",
                    k - 1
                )));
            }
            prev_last_t = stroke.points.last().unwrap().t;
        }
        if !self.strokes.iter().any(|s| s.pen_down()) {
            return Err(InkError::NoPenDown(self.id.clone()));
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.strokes.iter().map(|s| s.points.len()).sum()
    }
}

/// Dataset split tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Pretrain,
    Train,
    Validation,
    Test,
}

/// A set of strokesets plus split assignments.
///
/// Keyed by strokeset id; each id carries at most one split, so splits are
/// disjoint by construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub strokesets: Vec<StrokeSet>,
    pub splits: BTreeMap<String, Split>,
}

impl Corpus {
    pub fn validate(&self) -> Result<(), InkError> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.strokesets {
            s.validate()?;
            if !seen.insert(s.id.as_str()) {
                return Err(InkError::InvalidCorpus(format!(
                    "duplicate strokeset id {:?}",
                    s.id
                )));
            }
        }
        for id in self.splits.keys() {
            if !seen.contains(id.as_str()) {
                return Err(InkError::InvalidCorpus(format!(
                    "split assigned to unknown strokeset id {id:?}"
                )));
            }
        }
        Ok(())
    }

    /// Strokesets carrying the given split tag, in corpus order.
    pub fn by_split(&self, split: Split) -> Vec<&StrokeSet> {
        self.strokesets
            .iter()
            .filter(|s| self.splits.get(&s.id) == Some(&split))
            .collect()
    }

    pub fn get(&self, id: &str) -> Option<&StrokeSet> {
        self.strokesets.iter().find(|s| s.id == id)
    }

    /// Distinct writer ids in first-appearance order.
    pub fn writer_ids(&self) -> Vec<String> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for s in &self.strokesets {
            if seen.insert(s.writer_id.clone()) {
                out.push(s.writer_id.clone());
            }
        }
        out
    }
}

/// All pen-down points of a strokeset in temporal order; pen-up points are
/// dropped. Errors when no pen-down point exists.
pub fn concat_pen_down(strokeset: &StrokeSet) -> Result<Vec<SamplePoint>, InkError> {
    let mut out = Vec::with_capacity(strokeset.point_count());
    for stroke in &strokeset.strokes {
        if stroke.pen_down() {
            out.extend_from_slice(&stroke.points);
        }
    }
    if out.is_empty() {
        return Err(InkError::NoPenDown(strokeset.id.clone()));
    }
    Ok(out)
}

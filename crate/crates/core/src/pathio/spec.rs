//! Path-spec documents.
//!
//! ```toml
//! version = 1
//!
//! [[segments]]
//! length = "pi"
//! generator = { J_HHx = 0.5, J_VVx = 0.5 }
//!
//! [[segments]]
//! length = 1.25
//! dense = [[[0.0, 0.0], [0.5, 0.0], [0.0, 0.0], [0.0, 0.0]], ...]
//! ```
//!
//! or a preset with optional overrides:
//!
//! ```toml
//! version = 1
//! preset = { name = "example-iv-b", s2 = "2*pi" }
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Deserialize;
use toml::Spanned;

use super::{dense_generator, Preset, PresetParameters, SpecError, SpecErrorKind};
use crate::fockspace::{GeneratorCombo, GeneratorLabel};
use crate::holonomy::{Generator, Path};

pub const SPEC_VERSION: i64 = 1;

/// A real number, or a string such as `"pi"`, `"3*pi/2"` or `"0.25"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum LengthValue {
    Number(f64),
    Expr(String),
}

impl LengthValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            LengthValue::Number(x) => Some(*x),
            LengthValue::Expr(e) => parse_length(e),
        }
    }
}

/// Evaluate `[a][*]pi[/b]` or a plain number.
pub fn parse_length(expr: &str) -> Option<f64> {
    let e: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let (numerator, denominator) = match e.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (e.as_str(), None),
    };
    let numerator = match numerator
        .strip_suffix("pi")
        .or_else(|| numerator.strip_suffix('π'))
    {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            match coef {
                "" => PI,
                "-" => -PI,
                _ => coef.parse::<f64>().ok()? * PI,
            }
        }
        None => numerator.parse::<f64>().ok()?,
    };
    let value = match denominator {
        Some(d) => numerator / d.parse::<f64>().ok()?,
        None => numerator,
    };
    value.is_finite().then_some(value)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    version: Spanned<i64>,
    segments: Option<Spanned<Vec<Spanned<RawSegment>>>>,
    preset: Option<Spanned<RawPreset>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    generator: Option<BTreeMap<Spanned<String>, Spanned<f64>>>,
    dense: Option<Spanned<[[[f64; 2]; 4]; 4]>>,
    length: Spanned<LengthValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPreset {
    name: Spanned<String>,
    s1: Option<Spanned<LengthValue>>,
    s2: Option<Spanned<LengthValue>>,
    theta: Option<Spanned<LengthValue>>,
    phi: Option<Spanned<LengthValue>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSpec {
    pub generator: Generator,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetSpec {
    pub preset: Preset,
    pub parameters: PresetParameters,
}

/// A validated document: either explicit segments or a preset.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpecDocument {
    Segments(Vec<SegmentSpec>),
    Preset(PresetSpec),
}

impl PathSpecDocument {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let raw: RawDocument = toml::from_str(text).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            SpecError::at(SpecErrorKind::Syntax, text, offset, e.message().trim_end())
        })?;
        if *raw.version.get_ref() != SPEC_VERSION {
            return Err(SpecError::at(
                SpecErrorKind::InvalidDocument,
                text,
                raw.version.span().start,
                format!(
                    "unsupported version {}, expected {SPEC_VERSION}",
                    raw.version.get_ref()
                ),
            ));
        }
        match (raw.segments, raw.preset) {
            (Some(segments), None) => {
                if segments.get_ref().is_empty() {
                    return Err(SpecError::at(
                        SpecErrorKind::InvalidDocument,
                        text,
                        segments.span().start,
                        "no segments",
                    ));
                }
                let segments = segments
                    .into_inner()
                    .into_iter()
                    .map(|seg| convert_segment(text, seg))
                    .collect::<Result<_, _>>()?;
                Ok(PathSpecDocument::Segments(segments))
            }
            (None, Some(preset)) => convert_preset(text, preset).map(PathSpecDocument::Preset),
            (Some(_), Some(preset)) => Err(SpecError::at(
                SpecErrorKind::InvalidDocument,
                text,
                preset.span().start,
                "a document has either segments or a preset, not both",
            )),
            (None, None) => Err(SpecError::at(
                SpecErrorKind::InvalidDocument,
                text,
                0,
                "missing `segments` or `preset`",
            )),
        }
    }

    pub fn build(&self) -> crate::Result<Path> {
        match self {
            PathSpecDocument::Segments(segments) => {
                Path::new(segments.iter().map(|s| (s.generator.clone(), s.length)))
            }
            PathSpecDocument::Preset(p) => p.parameters.build(),
        }
    }
}

fn convert_segment(text: &str, seg: Spanned<RawSegment>) -> Result<SegmentSpec, SpecError> {
    let start = seg.span().start;
    let seg = seg.into_inner();
    let length_span = seg.length.span();
    let length = match seg.length.get_ref().value() {
        Some(l) if l > 0.0 => l,
        _ => {
            return Err(SpecError::at(
                SpecErrorKind::InvalidLength,
                text,
                length_span.start,
                format!(
                    "segment length must be a positive finite number, got {:?}",
                    seg.length.get_ref()
                ),
            ))
        }
    };
    let generator = match (seg.generator, seg.dense) {
        (Some(table), None) => {
            let mut combo = GeneratorCombo::zero();
            for (token, coef) in table {
                let label: GeneratorLabel = token.get_ref().parse().map_err(|_| {
                    SpecError::at(
                        SpecErrorKind::UnknownGenerator,
                        text,
                        token.span().start,
                        format!("unknown generator token `{}`", token.get_ref()),
                    )
                })?;
                if !coef.get_ref().is_finite() {
                    return Err(SpecError::at(
                        SpecErrorKind::InvalidDocument,
                        text,
                        coef.span().start,
                        "coefficient must be finite",
                    ));
                }
                combo = combo.with(label, *coef.get_ref());
            }
            Generator::Combo(combo)
        }
        (None, Some(dense)) => Generator::Dense(dense_generator(dense.get_ref()).map_err(|m| {
            SpecError::at(SpecErrorKind::UnknownGenerator, text, dense.span().start, m)
        })?),
        _ => {
            return Err(SpecError::at(
                SpecErrorKind::InvalidDocument,
                text,
                start,
                "a segment needs exactly one of `generator` or `dense`",
            ))
        }
    };
    Ok(SegmentSpec { generator, length })
}

fn convert_preset(text: &str, raw: Spanned<RawPreset>) -> Result<PresetSpec, SpecError> {
    let raw = raw.into_inner();
    let preset = Preset::from_name(raw.name.get_ref()).ok_or_else(|| {
        SpecError::at(
            SpecErrorKind::InvalidDocument,
            text,
            raw.name.span().start,
            format!("unknown preset `{}`", raw.name.get_ref()),
        )
    })?;
    let mut parameters = preset.parameters();
    let overrides = [
        (&raw.s1, &mut parameters.s1),
        (&raw.s2, &mut parameters.s2),
        (&raw.theta, &mut parameters.theta),
        (&raw.phi, &mut parameters.phi),
    ];
    for (value, slot) in overrides {
        if let Some(v) = value {
            *slot = v.get_ref().value().filter(|x| *x >= 0.0).ok_or_else(|| {
                SpecError::at(
                    SpecErrorKind::InvalidLength,
                    text,
                    v.span().start,
                    format!(
                        "preset parameter must be a non-negative finite number, got {:?}",
                        v.get_ref()
                    ),
                )
            })?;
        }
    }
    Ok(PresetSpec { preset, parameters })
}

/// Parse and build a path in one step.
pub fn parse_path_spec(text: &str) -> crate::Result<Path> {
    PathSpecDocument::parse(text)?.build()
}

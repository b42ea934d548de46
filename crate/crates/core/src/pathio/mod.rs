//! External surface: path-spec documents, presets, matrix files, run reports
//! and gauge-potential CSV tables.

mod report;
mod spec;

use std::fmt;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::linalg::{c, frobenius, Mat4};

pub use report::{
    build_run_report, emit_report, matrix_lines, parse_report, sample_gauge_potential_csv, Format,
    GaugeSample, IntegratorStats, RunReport, TotalReport, REPORT_VERSION,
};
pub use spec::{
    parse_length, parse_path_spec, LengthValue, PathSpecDocument, PresetSpec, SegmentSpec,
    SPEC_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecErrorKind {
    Syntax,
    UnknownGenerator,
    InvalidLength,
    InvalidDocument,
}

impl SpecErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            SpecErrorKind::Syntax => "syntax error",
            SpecErrorKind::UnknownGenerator => "unknown generator",
            SpecErrorKind::InvalidLength => "invalid length",
            SpecErrorKind::InvalidDocument => "invalid document",
        }
    }
}

/// Parse failure with a 1-based position in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub kind: SpecErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SpecError {
    pub(crate) fn at(
        kind: SpecErrorKind,
        text: &str,
        offset: usize,
        message: impl Into<String>,
    ) -> Self {
        let (line, column) = line_column(text, offset);
        Self {
            kind,
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at line {}, column {}: {}",
            self.kind.name(),
            self.line,
            self.column,
            self.message
        )
    }
}

impl std::error::Error for SpecError {}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Hex SHA-256 of the input bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Serde adapter for 4x4 complex matrices: row-major rows of `[re, im]` pairs.
pub mod matrix4 {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::{c, Mat4};

    pub fn to_rows(m: &Mat4) -> [[[f64; 2]; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im]))
    }

    pub fn from_rows(rows: &[[[f64; 2]; 4]; 4]) -> Mat4 {
        Mat4::from_fn(|i, j| c(rows[i][j][0], rows[i][j][1]))
    }

    pub fn serialize<S: Serializer>(m: &Mat4, serializer: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Mat4, D::Error> {
        let rows = <[[[f64; 2]; 4]; 4]>::deserialize(deserializer)?;
        if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(D::Error::custom("matrix entries must be finite"));
        }
        Ok(from_rows(&rows))
    }
}

/// A named path with parameter overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// The worked example with `theta = phi = pi/4`.
    ExampleIvB,
    /// The same loop with `theta = phi = 0`.
    ExampleIvBHv,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::ExampleIvB, Preset::ExampleIvBHv];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ExampleIvB => "example-iv-b",
            Preset::ExampleIvBHv => "example-iv-b-hv",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn parameters(self) -> PresetParameters {
        let (theta, phi) = match self {
            Preset::ExampleIvB => (std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4),
            Preset::ExampleIvBHv => (0.0, 0.0),
        };
        PresetParameters {
            s1: std::f64::consts::PI,
            s2: 2.0 * std::f64::consts::PI,
            theta,
            phi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetParameters {
    pub s1: f64,
    pub s2: f64,
    pub theta: f64,
    pub phi: f64,
}

impl PresetParameters {
    pub fn build(&self) -> crate::Result<crate::holonomy::Path> {
        crate::holonomy::build_triangle_path(
            self.theta,
            self.phi,
            self.s1,
            &crate::holonomy::example_local_generator(),
            self.s2,
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    #[serde(with = "matrix4")]
    matrix: Mat4,
}

/// Read `{"matrix": [[[re, im], ...], ...]}`.
pub fn parse_matrix_file(text: &str) -> Result<Mat4, SpecError> {
    serde_json::from_str::<MatrixFile>(text)
        .map(|f| f.matrix)
        .map_err(|e| {
            let (line, column) = (e.line().max(1), e.column().max(1));
            SpecError {
                kind: SpecErrorKind::Syntax,
                line,
                column,
                message: e.to_string(),
            }
        })
}

/// Dense Hermitian generator from rows of `[re, im]` pairs.
pub(crate) fn dense_generator(rows: &[[[f64; 2]; 4]; 4]) -> Result<Mat4, String> {
    let m = matrix4::from_rows(rows);
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err("dense generator entries must be finite".into());
    }
    let defect = frobenius(&(m - m.adjoint()));
    if defect > crate::lie::HERMITIAN_TOL {
        return Err(format!(
            "dense generator is not Hermitian (defect {defect:.3e})"
        ));
    }
    Ok((m + m.adjoint()) * c(0.5, 0.0))
}

//! Run reports and gauge-potential tables.

use serde::{Deserialize, Serialize};

use super::matrix4;
use crate::decompose::{cartan_kpk, qubit_space_leakage, CartanFactors, Closing};
use crate::error::{Error, Result};
use crate::holonomy::{gauge_potential, total_transformation, wilson_loop, Path, WilsonOptions};
use crate::lie::Unitary4;
use crate::linalg::Mat4;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// Versioned JSON document.
    #[default]
    Json,
    /// Aligned plain text.
    Human,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TotalReport {
    #[serde(with = "matrix4")]
    pub fundamental: Mat4,
    #[serde(with = "matrix4")]
    pub restricted: Mat4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorStats {
    pub steps: usize,
    pub residual: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSample {
    pub s: f64,
    #[serde(with = "matrix4")]
    pub potential: Mat4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub version: u32,
    pub input_digest: String,
    pub classification: Closing,
    #[serde(with = "matrix4")]
    pub holonomy: Mat4,
    pub total: TotalReport,
    pub cartan: CartanFactors,
    pub integrator: IntegratorStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<GaugeSample>>,
}

/// Midpoints of `n` equal slices of the path's pseudotime range.
fn sample_points(path: &Path, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    let (start, end) = (path.start(), path.end());
    let h = (end - start) / n as f64;
    Ok((0..n).map(|k| start + (k as f64 + 0.5) * h).collect())
}

fn samples(path: &Path, n: usize) -> Result<Vec<GaugeSample>> {
    sample_points(path, n)?
        .into_iter()
        .map(|s| {
            gauge_potential(path, s).map(|a| GaugeSample {
                s,
                potential: a.matrix,
            })
        })
        .collect()
}

/// Evaluate a closed path and collect everything a report carries.
pub fn build_run_report(
    path: &Path,
    input_digest: String,
    opts: &WilsonOptions,
    n_samples: Option<usize>,
) -> Result<RunReport> {
    let total = total_transformation(path);
    if !total.classification.closes() {
        return Err(Error::NotClosed {
            weight: qubit_space_leakage(&total.fundamental),
        });
    }
    let holonomy = wilson_loop(path, opts)?;
    let cartan = cartan_kpk(&Unitary4::new(total.fundamental)?);
    Ok(RunReport {
        version: REPORT_VERSION,
        input_digest,
        classification: total.classification,
        holonomy: holonomy.matrix,
        total: TotalReport {
            fundamental: total.fundamental,
            restricted: total.restricted,
        },
        cartan,
        integrator: IntegratorStats {
            steps: holonomy.steps,
            residual: holonomy.residual,
            tol: opts.integrator.tol,
        },
        samples: n_samples.map(|n| samples(path, n)).transpose()?,
    })
}

pub fn emit_report(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out =
                serde_json::to_string_pretty(report).expect("reports contain only finite numbers");
            out.push('\n');
            out
        }
        Format::Human => human(report),
    }
}

pub fn parse_report(text: &str) -> Result<RunReport> {
    let report: RunReport = serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
    if report.version != REPORT_VERSION {
        return Err(Error::Report(format!(
            "unsupported report version {}",
            report.version
        )));
    }
    Ok(report)
}

fn complex_cell(re: f64, im: f64) -> String {
    if im.is_sign_negative() {
        format!("{re:?}-{:?}i", -im)
    } else {
        format!("{re:?}+{im:?}i")
    }
}

/// Matrix as right-aligned columns, one row per line.
pub fn matrix_lines(m: &Mat4, indent: &str) -> Vec<String> {
    let cells: Vec<Vec<String>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| complex_cell(m[(i, j)].re, m[(i, j)].im))
                .collect()
        })
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    cells
        .iter()
        .map(|row| {
            let row: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            format!("{indent}{}", row.join("  "))
        })
        .collect()
}

fn human(r: &RunReport) -> String {
    let mut lines = vec![
        format!("{:<16}{}", "report version", r.version),
        format!("{:<16}{}", "input digest", r.input_digest),
        format!("{:<16}{}", "classification", r.classification),
        format!("{:<16}{}", "steps", r.integrator.steps),
        format!("{:<16}{:?}", "residual", r.integrator.residual),
        format!("{:<16}{:?}", "tolerance", r.integrator.tol),
        String::new(),
        "holonomy".to_string(),
    ];
    lines.extend(matrix_lines(&r.holonomy, "  "));
    lines.push("total (four modes)".into());
    lines.extend(matrix_lines(&r.total.fundamental, "  "));
    lines.push("total (qubit space)".into());
    lines.extend(matrix_lines(&r.total.restricted, "  "));
    lines.push(String::new());
    lines.push("cartan".into());
    lines.push(format!("  {:<12}{:?}", "x_h", r.cartan.x_h));
    lines.push(format!("  {:<12}{:?}", "x_v", r.cartan.x_v));
    lines.push(format!("  {:<12}{}", "degenerate", r.cartan.degenerate));
    let names = [
        "alpha_a", "beta_a", "gamma_a", "delta_a", "alpha_b", "beta_b", "gamma_b", "delta_b",
    ];
    for (name, v) in names.iter().zip(r.cartan.kbar.to_array()) {
        lines.push(format!("  {name:<12}{v:?}"));
    }
    lines.push("  kprime".into());
    lines.extend(matrix_lines(&r.cartan.kprime, "    "));
    if let Some(samples) = &r.samples {
        lines.push(String::new());
        lines.push("gauge potential samples".into());
        for sample in samples {
            lines.push(format!("  s = {:?}", sample.s));
            lines.extend(matrix_lines(&sample.potential, "    "));
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

/// `n` rows of `A/ds` at slice midpoints: `s` then real and imaginary parts of
/// each entry in row-major order.
pub fn sample_gauge_potential_csv(path: &Path, n: usize) -> Result<String> {
    let rows = samples(path, n)?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["s".to_string()];
    for i in 0..4 {
        for j in 0..4 {
            header.push(format!("re_{i}{j}"));
            header.push(format!("im_{i}{j}"));
        }
    }
    let to_csv = |e: csv::Error| Error::Report(e.to_string());
    writer.write_record(&header).map_err(to_csv)?;
    for row in rows {
        let mut record = vec![format!("{:?}", row.s)];
        for z in row.potential.transpose().iter() {
            record.push(format!("{:?}", z.re));
            record.push(format!("{:?}", z.im));
        }
        writer.write_record(&record).map_err(to_csv)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("formatted numbers are ASCII"))
}

use std::f64::consts::TAU;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nagp::decompose::{
    cartan_kpk, classify_closing, compile_hermitian, compile_one_param, CartanFactors, Closing,
    CompiledSubgroup, CLOSURE_TOL,
};
use nagp::holonomy::{example_path, ExampleVariant, Generator, WilsonOptions};
use nagp::lie::Unitary4;
use nagp::pathio::{
    self, build_run_report, emit_report, parse_matrix_file, sample_gauge_potential_csv, Format,
    PathSpecDocument,
};
use nagp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nagp",
    version,
    about = "Non-Abelian geometric phases of two-photon states in linear optics"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: OutputFormat,

    /// Run sequentially instead of on the thread pool.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Human,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    /// theta = phi = pi/4
    Diagonal,
    /// theta = phi = 0
    Hv,
}

#[derive(Subcommand)]
enum Command {
    /// Wilson loop of a closed path described by a spec file.
    Holonomy {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include this many gauge-potential samples.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// K P0 K' decomposition of a U(4) matrix file.
    Decompose { matrix: PathBuf },
    /// Phase-layer-plus-mesh compilation of every segment generator.
    Compile { spec: PathBuf },
    /// The worked triangle loop.
    Example {
        #[arg(long, default_value_t = TAU)]
        s2: f64,
        #[arg(long, value_enum, default_value = "diagonal")]
        variant: Variant,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Gauge potential at N slice midpoints as CSV.
    Sample {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Serialize)]
struct DecomposeReport {
    input_digest: String,
    classification: Closing,
    cartan: CartanFactors,
}

#[derive(Serialize)]
struct CompileReport {
    input_digest: String,
    segments: Vec<CompiledSubgroup>,
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidPath(format!("{}: {e}", path.display())))
}

fn write_out(text: &str, target: Option<&PathBuf>) -> Result<()> {
    match target {
        Some(p) => {
            fs::write(p, text).map_err(|e| Error::InvalidPath(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("reports contain only finite numbers");
    out.push('\n');
    out
}

fn run(cli: Cli) -> Result<()> {
    let format = match cli.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Human => Format::Human,
    };
    let mut opts = WilsonOptions::default();
    if cli.sequential {
        opts.integrator.strategy = nagp::exec::Strategy::Sequential;
    }
    match cli.command {
        Command::Holonomy {
            spec,
            tol,
            report,
            samples,
        } => {
            let text = read(&spec)?;
            let path = PathSpecDocument::parse(&text)?.build()?;
            opts.integrator.tol = tol;
            let r = build_run_report(&path, pathio::digest(text.as_bytes()), &opts, samples)?;
            write_out(&emit_report(&r, format), report.as_ref())
        }
        Command::Example {
            s2,
            variant,
            tol,
            report,
        } => {
            let variant = match variant {
                Variant::Diagonal => ExampleVariant::Diagonal,
                Variant::Hv => ExampleVariant::HorizontalOnly,
            };
            let path = example_path(s2, variant)?;
            opts.integrator.tol = tol;
            let input = format!("example variant={variant:?} s2={s2:?}");
            let r = build_run_report(&path, pathio::digest(input.as_bytes()), &opts, None)?;
            write_out(&emit_report(&r, format), report.as_ref())
        }
        Command::Decompose { matrix } => {
            let text = read(&matrix)?;
            let g = Unitary4::new(parse_matrix_file(&text)?)?;
            let r = DecomposeReport {
                input_digest: pathio::digest(text.as_bytes()),
                classification: classify_closing(g.matrix(), CLOSURE_TOL),
                cartan: cartan_kpk(&g),
            };
            match format {
                Format::Json => write_out(&json(&r), None),
                Format::Human => {
                    let mut lines = vec![
                        format!("{:<16}{}", "input digest", r.input_digest),
                        format!("{:<16}{}", "classification", r.classification),
                        format!("{:<16}{:?}", "x_h", r.cartan.x_h),
                        format!("{:<16}{:?}", "x_v", r.cartan.x_v),
                        format!("{:<16}{}", "degenerate", r.cartan.degenerate),
                        format!("{:<16}{:?}", "kbar", r.cartan.kbar.to_array()),
                        "kprime".to_string(),
                    ];
                    lines.extend(pathio::matrix_lines(&r.cartan.kprime, "  "));
                    write_out(&(lines.join("\n") + "\n"), None)
                }
            }
        }
        Command::Compile { spec } => {
            let text = read(&spec)?;
            let path = PathSpecDocument::parse(&text)?.build()?;
            let segments = path
                .segments()
                .iter()
                .map(|seg| match seg.generator() {
                    Generator::Combo(combo) => Ok(compile_one_param(combo)),
                    Generator::Dense(h) => compile_hermitian(h),
                })
                .collect::<Result<Vec<_>>>()?;
            let r = CompileReport {
                input_digest: pathio::digest(text.as_bytes()),
                segments,
            };
            match format {
                Format::Json => write_out(&json(&r), None),
                Format::Human => {
                    let mut lines = vec![format!("{:<16}{}", "input digest", r.input_digest)];
                    for (k, seg) in r.segments.iter().enumerate() {
                        lines.push(format!("segment {k}"));
                        lines.push(format!("  {:<10}{:?}", "c", seg.c));
                        lines.push("  v".into());
                        lines.extend(pathio::matrix_lines(&seg.v, "    "));
                        for element in &seg.factorization {
                            lines.push(format!("  {element:?}"));
                        }
                    }
                    write_out(&(lines.join("\n") + "\n"), None)
                }
            }
        }
        Command::Sample { spec, n } => {
            let text = read(&spec)?;
            let path = PathSpecDocument::parse(&text)?.build()?;
            write_out(&sample_gauge_potential_csv(&path, n)?, None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

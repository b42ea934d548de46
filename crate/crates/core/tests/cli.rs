use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use nagp::decompose::Closing;
use nagp::holonomy::nagp_example_closed_form;
use nagp::linalg::frobenius;
use nagp::pathio::parse_report;

fn nagp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nagp"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn example_report() {
    let out = nagp(&["example", "--s2", "6.283185307179586"]);
    assert!(out.status.success());
    let r = parse_report(&stdout(&out)).unwrap();
    assert_eq!(r.classification, Closing::SwapTimesLocal);
    assert!(frobenius(&(r.holonomy - nagp_example_closed_form(std::f64::consts::TAU))) < 1e-8);
}

#[test]
fn example_is_deterministic_across_strategies() {
    let a = nagp(&["example", "--s2", "1.25"]);
    let b = nagp(&["example", "--s2", "1.25"]);
    let seq = nagp(&["--sequential", "example", "--s2", "1.25"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, seq.stdout);
}

#[test]
fn hv_variant_and_human_format() {
    let out = nagp(&[
        "--format",
        "human",
        "example",
        "--variant",
        "hv",
        "--s2",
        "3.141592653589793",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("classification  StrictlyLocal"));
    assert!(text.lines().any(|l| l == "holonomy"));
}

#[test]
fn holonomy_from_spec_file() {
    let spec = scratch(
        "preset.toml",
        "version = 1\npreset = { name = \"example-iv-b\", s2 = \"pi/2\" }\n",
    );
    let report = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("preset-report.json");
    let out = nagp(&[
        "holonomy",
        spec.to_str().unwrap(),
        "--tol",
        "1e-11",
        "--report",
        report.to_str().unwrap(),
        "--samples",
        "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = parse_report(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(
        frobenius(&(r.holonomy - nagp_example_closed_form(std::f64::consts::FRAC_PI_2))) < 1e-8
    );
    assert_eq!(r.samples.unwrap().len(), 4);
    assert_eq!(r.integrator.tol, 1e-11);
    assert_eq!(
        r.input_digest,
        nagp::pathio::digest(fs::read(&spec).unwrap().as_slice())
    );
}

#[test]
fn input_errors_exit_2() {
    let bad = scratch(
        "bad-token.toml",
        "version = 1\n[[segments]]\nlength = 1.0\ngenerator = { J_zz = 1.0 }\n",
    );
    let out = nagp(&["holonomy", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("J_zz") && err.contains("line 4"), "{err}");

    assert_eq!(
        nagp(&["holonomy", "/nonexistent/spec.toml"]).status.code(),
        Some(2)
    );
    assert_eq!(nagp(&["example", "--s2", "-1"]).status.code(), Some(2));
    let not_unitary = scratch("not-unitary.json", "{\"matrix\": [[[2,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]}");
    assert_eq!(
        nagp(&["decompose", not_unitary.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn open_path_exits_3() {
    let open = scratch(
        "open.toml",
        "version = 1\n[[segments]]\nlength = \"pi\"\ngenerator = { J_HHx = 0.5, J_VVx = 0.5 }\n",
    );
    let out = nagp(&["holonomy", open.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not close"));
}

#[test]
fn sample_csv() {
    let spec = scratch(
        "sample.toml",
        "version = 1\npreset = { name = \"example-iv-b\" }\n",
    );
    let out = nagp(&["sample", spec.to_str().unwrap(), "--n", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.split_terminator('\n').collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("s,re_00,im_00"));
    assert!(lines[1]
        .split(',')
        .skip(1)
        .all(|x| x.parse::<f64>().unwrap().abs() < 1e-10));
    assert_eq!(
        nagp(&["sample", spec.to_str().unwrap(), "--n", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn decompose_and_compile() {
    let swap = scratch(
        "swap.json",
        "{\"matrix\": [[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]],[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]]]}",
    );
    let out = nagp(&["decompose", swap.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"], "SwapTimesLocal");

    let spec = scratch(
        "compile.toml",
        "version = 1\npreset = { name = \"example-iv-b\", s2 = 1.0 }\n",
    );
    let out = nagp(&["compile", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let segments = v["segments"].as_array().unwrap();
    assert_eq!(segments.len(), 3);
    assert!(segments
        .iter()
        .all(|s| s["factorization"].as_array().unwrap().last().unwrap()["kind"] == "phases"));
    assert!(
        nagp(&["--format", "human", "compile", spec.to_str().unwrap()])
            .status
            .success()
    );
}

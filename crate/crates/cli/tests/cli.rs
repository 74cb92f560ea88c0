use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clifft_cli::{load_records, SuiteReport};
use clifft_core::{cft_forward, load_field, CftPlan, EvalMode, GridGeometry, PhaseFunctions};

fn clifft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clifft"))
        .args(args)
        .env("CLIFFT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = clifft(args);
    assert!(
        out.status.success(),
        "clifft {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_reports_the_ring() {
    let text = ok(&["roots", "classify", "0", "2"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["ring"], "H");
    assert_eq!(value["matrix_size"], 1.0);
    let text = ok(&["roots", "classify", "3", "0"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(
        (value["ring"].as_str(), value["s8"].as_u64()),
        (Some("C"), Some(3))
    );
}

#[test]
fn sampled_roots_verify_and_bad_ones_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let roots = path(dir.path(), "roots.json");
    ok(&[
        "roots",
        "sample",
        "2",
        "1",
        "--seed",
        "9",
        "--count",
        "4",
        "--out",
        s(&roots),
    ]);
    let records = load_records(&roots).unwrap();
    assert_eq!(records.len(), 4);
    ok(&["roots", "verify", s(&roots)]);

    let not_a_root = path(dir.path(), "e1.json");
    std::fs::write(&not_a_root, r#"{"p":2,"q":0,"coeffs":[0,1,0,0]}"#).unwrap();
    assert_eq!(
        clifft(&["roots", "verify", s(&not_a_root)]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(
        clifft(&["roots", "classify", "x", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(clifft(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "missing.cfld");
    let out = clifft(&[
        "convolve",
        "--a",
        s(&missing),
        "--b",
        s(&missing),
        "--out",
        s(&missing),
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Cl(1,0) has no root to sample from
    let out = clifft(&["roots", "sample", "1", "0", "--out", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transform_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let field = path(dir.path(), "h.cfld");
    let f = path(dir.path(), "f.json");
    let g = path(dir.path(), "g.json");
    let spectrum = path(dir.path(), "H.cfld");
    let back = path(dir.path(), "back.cfld");
    ok(&[
        "generate",
        "0",
        "2",
        "--dims",
        "6,5",
        "--seed",
        "3",
        "--out",
        s(&field),
    ]);
    ok(&["roots", "sample", "0", "2", "--seed", "1", "--out", s(&f)]);
    ok(&["roots", "sample", "0", "2", "--seed", "2", "--out", s(&g)]);

    let common = ["--f", s(&f), "--g", s(&g), "--left-axes", "1"];
    let mut args = vec!["cft", "forward", "--in", s(&field), "--out", s(&spectrum)];
    args.extend(common);
    ok(&args);
    let mut args = vec!["cft", "inverse", "--in", s(&spectrum), "--out", s(&back)];
    args.extend(common);
    ok(&args);

    let h = load_field(&field).unwrap();
    assert!(load_field(&back).unwrap().relative_error(&h).unwrap() <= 1e-12);

    // the file result matches the library, evaluated by the defining sum
    let roots = |p: &Path| load_records(p).unwrap()[0].verify(1e-10).unwrap();
    let plan = CftPlan::new(
        roots(&f),
        roots(&g),
        PhaseFunctions::new(2, &[1]).unwrap(),
        GridGeometry::cyclic(vec![6, 5]).unwrap(),
        EvalMode::Direct,
    )
    .unwrap();
    let expected = cft_forward(&h, &plan).unwrap();
    assert!(
        load_field(&spectrum)
            .unwrap()
            .relative_error(&expected)
            .unwrap()
            <= 1e-12
    );
}

#[test]
fn split_halves_sum_to_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let field = path(dir.path(), "h.cfld");
    let f = path(dir.path(), "f.json");
    let (plus, minus) = (path(dir.path(), "p.cfld"), path(dir.path(), "m.cfld"));
    ok(&["generate", "1", "2", "--dims", "3,2,2", "--out", s(&field)]);
    ok(&["roots", "sample", "1", "2", "--seed", "5", "--out", s(&f)]);
    ok(&[
        "split",
        "--in",
        s(&field),
        "--f",
        s(&f),
        "--g",
        s(&f),
        "--plus",
        s(&plus),
        "--minus",
        s(&minus),
    ]);
    let sum = load_field(&plus)
        .unwrap()
        .add(&load_field(&minus).unwrap())
        .unwrap();
    assert!(sum.relative_error(&load_field(&field).unwrap()).unwrap() <= 1e-14);
}

#[test]
fn convolution_and_theorem_report() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.cfld"), path(dir.path(), "b.cfld"));
    let (f, g) = (path(dir.path(), "f.json"), path(dir.path(), "g.json"));
    let (conv, report) = (path(dir.path(), "c.cfld"), path(dir.path(), "r.json"));
    ok(&[
        "generate",
        "3",
        "0",
        "--dims",
        "4,3,2",
        "--seed",
        "1",
        "--out",
        s(&a),
    ]);
    ok(&[
        "generate",
        "3",
        "0",
        "--dims",
        "4,3,2",
        "--seed",
        "2",
        "--out",
        s(&b),
    ]);
    ok(&["roots", "sample", "3", "0", "--seed", "7", "--out", s(&f)]);
    ok(&["roots", "sample", "3", "0", "--seed", "8", "--out", s(&g)]);
    ok(&["convolve", "--a", s(&a), "--b", s(&b), "--out", s(&conv)]);
    assert_eq!(load_field(&conv).unwrap().grid().dims(), &[4, 3, 2]);

    ok(&[
        "convolve",
        "verify-theorem",
        "--a",
        s(&a),
        "--b",
        s(&b),
        "--f",
        s(&f),
        "--g",
        s(&g),
        "--left-axes",
        "1,3",
        "--report",
        s(&report),
    ]);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(value["relative_error"].as_f64().unwrap() <= 1e-9);
    assert_eq!(value["term_norms"].as_array().unwrap().len(), 8);
}

#[test]
fn plot_manifold_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "m.csv");
    ok(&[
        "plot-manifold",
        "1",
        "1",
        "--resolution",
        "9",
        "--out",
        s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b1,b2,beta"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        // Cl(1,1): beta^2 = b2^2 - b1^2 - 1
        assert!((v[2] * v[2] - (v[1] * v[1] - v[0] * v[0] - 1.0)).abs() < 1e-12);
    }

    let empty = path(dir.path(), "e.csv");
    ok(&[
        "plot-manifold",
        "0",
        "2",
        "--min",
        "1.5",
        "--max",
        "3",
        "--out",
        s(&empty),
    ]);
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), "b1,b2,beta\n");
}

#[test]
fn check_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (first, second) = (path(dir.path(), "1.json"), path(dir.path(), "2.json"));
    for out in [&first, &second] {
        ok(&[
            "check",
            "--smoke",
            "--no-timing",
            "--seed",
            "11",
            "--report",
            s(out),
        ]);
    }
    let read = |p: &Path| -> SuiteReport {
        serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
    };
    let (a, b) = (read(&first), read(&second));
    assert!(a.passed());
    assert_eq!(a.to_json_without_runtime(), b.to_json_without_runtime());
    let names: Vec<&str> = a.checks.iter().map(|c| c.name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn check_selects_suites_and_fails_on_impossible_tolerance() {
    let text = ok(&["check", "--smoke", "--suite", "roots"]);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.starts_with("roots/") || l.contains("passed")));
    let out = clifft(&["check", "--smoke", "--suite", "split", "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(clifft(&["check", "--suite", "nope"]).status.code(), Some(2));
}

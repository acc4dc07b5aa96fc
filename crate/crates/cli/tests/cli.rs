use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const POINT_MASS: &str = r#"{"tail":{"kind":"linear"},"R":0.0,"step":{"breakpoints":[0.0],"values":[]},"upsilon":{"positions":[0.0],"masses":[2.0]}}"#;
const FREE: &str = r#"{"tail":{"kind":"linear"},"R":0.0,"step":{"breakpoints":[0.0],"values":[]}}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gis-spectra"));
    c.env("GIS_SPECTRA_THREADS", "1");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn summary(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {line}"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn point_mass_trace() {
    let dir = TempDir::new().unwrap();
    let model = write(dir.path(), "pm.json", POINT_MASS);
    let report = dir.path().join("trace.json");
    let out = run(&[
        "trace",
        "--model",
        s(&model),
        "--tol",
        "1e-8",
        "--out",
        s(&report),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["command"], "trace");
    assert_eq!(r["inputs"][s(&model)].as_str().unwrap().len(), 64);
    let res = &r["result"];
    assert!((res["boundstate_term"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert!((res["log_integral_term"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-8);
    assert_eq!(res["rhs"].as_f64().unwrap(), 2.0);
}

#[test]
fn weyl_on_free_string_at_minus_one() {
    let dir = TempDir::new().unwrap();
    let model = write(dir.path(), "free.json", FREE);
    let csv = dir.path().join("m.csv");
    let out = run(&[
        "weyl",
        "--model",
        s(&model),
        "--z",
        "-1,0",
        "--z",
        "0,1",
        "--out",
        s(&csv),
    ]);
    assert!(out.status.success());
    let m = &summary(&out)["result"]["m"];
    assert!((m[0][0].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!(m[0][1].as_f64().unwrap().abs() < 1e-14);
    // m(z) = sqrt(-1/z) on the free string: m(i) = e^{iπ/4}.
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((m[1][0].as_f64().unwrap() - r).abs() < 1e-14);
    assert!((m[1][1].as_f64().unwrap() - r).abs() < 1e-14);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("re_z,im_z,re_m,im_m\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn corrupted_model_exits_with_validation_code() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"tail":{"kind":"linear"},"R":1.0,"step":{"breakpoints":[0.0,2.0,1.0],"values":[1.0]}}"#,
    );
    let out = run(&["verify", "--model", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let truncated = write(dir.path(), "cut.json", &POINT_MASS[..40]);
    assert_eq!(
        run(&["trace", "--model", s(&truncated)]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("nope.json");
    assert_eq!(
        run(&["trace", "--model", s(&missing)]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_model_passes_for_point_mass() {
    let dir = TempDir::new().unwrap();
    let model = write(dir.path(), "pm.json", POINT_MASS);
    let report = dir.path().join("v.json");
    let out = run(&["verify", "--model", s(&model), "--out", s(&report)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r["result"][0]["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn unknown_suite_is_rejected() {
    assert_eq!(
        run(&["verify", "--suite", "nonsense"]).status.code(),
        Some(2)
    );
}

#[test]
fn approx_output_feeds_other_commands() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("x,W\n");
    for j in 0..=400 {
        let x = 8.0 * j as f64 / 400.0;
        csv.push_str(&format!("{x},{}\n", x + 0.5 * (-x * x).exp()));
    }
    let samples = write(dir.path(), "s.csv", &csv);
    let model = dir.path().join("model.json");
    let report = dir.path().join("report.json");
    let out = run(&[
        "approx",
        "--samples",
        s(&samples),
        "--n",
        "40",
        "--out",
        s(&model),
        "--report",
        s(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["options"]["n"], 40);
    assert!(r["result"]["R_n"].as_f64().unwrap() > 0.0);
    for cmd in ["trace", "lt-check", "ac-bound", "bound-states"] {
        let o = run(&[cmd, "--model", s(&model)]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{cmd}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn model_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("x,W\n");
    for j in 0..=200 {
        let x = 6.0 * j as f64 / 200.0;
        csv.push_str(&format!("{x},{}\n", x - (-x).exp()));
    }
    let samples = write(dir.path(), "s.csv", &csv);
    let model = dir.path().join("model.json");
    assert!(run(&[
        "approx",
        "--samples",
        s(&samples),
        "--n",
        "20",
        "--out",
        s(&model)
    ])
    .status
    .success());
    let text = fs::read_to_string(&model).unwrap();
    let copy = write(dir.path(), "copy.json", &text);
    let a = summary(&run(&["weyl", "--model", s(&model), "--z", "0.3,1.7"]));
    let b = summary(&run(&["weyl", "--model", s(&copy), "--z", "0.3,1.7"]));
    assert_eq!(a["result"]["m"], b["result"]["m"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["tail"]["kind"], "linear");
}

#[test]
fn camassa_holm_bundle_matches_direct_transform() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("x,u,uprime\n");
    for j in 0..=2000 {
        let x = 20.0 * j as f64 / 2000.0;
        let e = (-x).exp();
        csv.push_str(&format!(
            "{x},{},{}\n",
            1.0 + 0.5 * e * x.sin(),
            0.5 * e * (x.cos() - x.sin())
        ));
    }
    let data = write(dir.path(), "ch.csv", &csv);
    let direct = dir.path().join("direct.json");
    let prefix = dir.path().join("bundle");
    let out = run(&[
        "ch-transform",
        "--data",
        s(&data),
        "--n",
        "60",
        "--out",
        s(&direct),
        "--bundle",
        s(&prefix),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(summary(&out)["result"]["condition"]["satisfied"], true);
    let again = dir.path().join("again.json");
    let out = run(&[
        "approx",
        "--samples",
        s(&prefix.with_extension("csv")),
        "--meta",
        s(&prefix.with_extension("json")),
        "--n",
        "60",
        "--out",
        s(&again),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = |p: &Path| {
        summary(&run(&["weyl", "--model", s(p), "--z", "-1,0"]))["result"]["m"][0][0]
            .as_f64()
            .unwrap()
    };
    assert!((m(&direct) - m(&again)).abs() < 1e-12);
    assert_eq!(
        run(&["trace", "--model", s(&direct)]).status.code(),
        Some(0)
    );
}

#[test]
fn camassa_holm_without_background_diverges() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("x,u,uprime\n");
    for j in 0..=500 {
        let x = 10.0 * j as f64 / 500.0;
        csv.push_str(&format!("{x},{},{}\n", (-x).exp(), -(-x).exp()));
    }
    let data = write(dir.path(), "ch.csv", &csv);
    let out = run(&[
        "ch-transform",
        "--data",
        s(&data),
        "--out",
        s(&dir.path().join("m.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn delta_prime_pipeline() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "dp.json",
        r#"{"positions":[0.5,1.5],"strengths":[-1.0,0.7]}"#,
    );
    let model = dir.path().join("m.json");
    let report = dir.path().join("r.json");
    let out = run(&[
        "delta-prime",
        "--input",
        s(&input),
        "--n",
        "100",
        "--out",
        s(&model),
        "--report",
        s(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let lt = &r["result"]["lt_check"];
    assert_eq!(lt["holds"], true);
    assert!((lt["v0"].as_f64().unwrap() + 0.3).abs() < 1e-15);
    assert!(!r["result"]["eigenvalues"].as_array().unwrap().is_empty());
    assert_eq!(
        run(&["verify", "--model", s(&model)]).status.code(),
        Some(0)
    );
}

#[test]
fn explicit_suite_runs_from_the_command_line() {
    let out = run(&["verify", "--suite", "explicit", "--samples", "5"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(summary(&out)["result"]["suites"][0][1], true);
}

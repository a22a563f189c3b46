mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::data;
use serde_json::Value;

fn convgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convgeom"))
        .args(args)
        .env("CONVGEOM_THREADS", "2")
        .output()
        .expect("the binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = convgeom(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Compare with `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites the file.
fn golden(name: &str, args: &[&str]) {
    let out = convgeom(args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(want == out.stdout, "{name} differs from its golden file");
}

#[test]
fn volume_of_the_disk_at_the_origin_is_pi() {
    let v = json(&["volume", "--body", &data("disk.json"), "--tau", "1", "--x", "0,0"]);
    let e = &v["estimate"];
    let err = (e["value"].as_f64().unwrap() - std::f64::consts::PI).abs();
    assert!(err <= e["abs_error"].as_f64().unwrap());
    assert_eq!(e["method"], "exact_poly_2d");
}

#[test]
fn square_shell_spread_is_one() {
    let v = json(&["shells", "--body", &data("square.json"), "--tau", "1", "--alphas", "1"]);
    let r = &v["reports"][0];
    assert!((r["spread"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((r["f_max"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn ellipse_curvature_at_the_major_vertex() {
    let v = json(&["curvature", "--body", &data("ellipse21.json"), "--x", "2,0", "--tau", "1"]);
    let k = v["report"]["kappa"].as_f64().unwrap();
    assert!((k - 2.0).abs() < 0.02, "{k}");
}

#[test]
fn malformed_spec_reports_the_position() {
    let out = convgeom(&["volume", "--body", &data("broken.json"), "--x", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2 column"), "{}", stderr(&out));
}

#[test]
fn preconditions_exit_with_2() {
    let disk = data("disk.json");
    let square = data("square.json");
    for args in [
        vec!["volume", "--body", disk.as_str(), "--x", "0,0", "--tau", "-1"],
        vec!["volume", "--body", disk.as_str(), "--x", "0,0,0"],
        vec!["volume", "--body", disk.as_str(), "--x", "0,nan"],
        vec!["convbody", "--body", disk.as_str(), "--delta", "4"],
        vec!["grad", "--body", square.as_str(), "--x", "0.5,0"],
        vec!["shells", "--body", disk.as_str(), "--format", "markdown"],
        vec!["volume", "--body", "/nonexistent.json", "--x", "0,0"],
        vec!["volume", "--body", disk.as_str()],
    ] {
        let out = convgeom(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn budget_failures_exit_with_3() {
    let out = convgeom(&["volume", "--body", &data("disk.json"), "--x", "0.3,0", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let out = convgeom(&["hess", "--body", &data("disk.json"), "--tau", "0.5", "--x", "0.500000000001,0"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(convgeom(&["--help"]).status.code(), Some(0));
    assert_eq!(convgeom(&["--version"]).status.code(), Some(0));
    assert_eq!(convgeom(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn out_flag_and_geometry_emission() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let svg = dir.path().join("k.svg");
    let o = convgeom(&[
        "convbody",
        "--body",
        &data("square.json"),
        "--delta",
        "2",
        "--grid",
        "64",
        "--emit-svg",
        svg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["radii"].as_array().unwrap().len(), 64);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polygon"));

    let obj = dir.path().join("k.obj");
    let o = convgeom(&["convbody", "--body", &data("cube3.json"), "--delta", "4", "--grid", "1", "--emit-obj", obj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 42);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 80);
}

#[test]
fn csv_tables() {
    let o = convgeom(&["shells", "--body", &data("square.json"), "--alphas", "0.5,1", "--n", "16", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("alpha,tau,samples"));
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let o = convgeom(&["report", "--body", &data("disk.json"), "--n", "16", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("# "));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);
}

#[test]
fn golden_reports() {
    golden("volume_disk.json", &["volume", "--body", &data("disk.json"), "--tau", "1", "--x", "1,0"]);
    golden(
        "volume_ball_mc.json",
        &["volume", "--body", &data("ball3.json"), "--x", "1,0,0", "--method", "mc", "--samples", "200000", "--seed", "11"],
    );
    golden("grad_disk.json", &["grad", "--body", &data("disk.json"), "--x", "1,0"]);
    golden("lemma21_square.json", &["lemma21", "--k1", &data("square.json"), "--k2", &data("square.json"), "--u", "1,0"]);
    golden("shells_square.csv", &["shells", "--body", &data("square.json"), "--alphas", "0.5,1,1.5", "--n", "32", "--format", "csv"]);
    golden("homothety_ellipse_disk.json", &["homothety", "--k", &data("ellipse21.json"), "--l", &data("disk.json")]);
    golden(
        "report.md",
        &["report", "--body", &data("disk.json"), "--body", &data("square.json"), "--body", &data("pball4.json"), "--n", "32"],
    );
}

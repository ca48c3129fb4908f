use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lame-navier")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn circle_geometry_writes_polyline_and_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["geometry", "--circle", "1", "--segments", "512", "--depth", "7", "--out", "g"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let poly = std::fs::read_to_string(dir.path().join("g/polyline.csv")).unwrap();
    assert_eq!(poly.lines().count(), 513);
    let report = json(&out);
    let squares = std::fs::read_to_string(dir.path().join("g/decomposition.csv")).unwrap();
    assert_eq!(squares.lines().count() as u64, report["accepted_squares"].as_u64().unwrap() + 1);
    let slope = report["box_dimension"]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.3, "{slope}");
    assert_eq!(
        std::fs::read_to_string(dir.path().join("g/geometry.json")).unwrap().trim(),
        String::from_utf8_lossy(&out.stdout).trim()
    );
}

#[test]
fn koch_d_sum_increments_shrink_above_the_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["geometry", "--koch", "5", "--depth", "10", "--d", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["d_sum"].as_array().unwrap().clone();
    // dyadic squares over a triadic curve make the coarse levels uneven;
    // from depth 8 on every level adds less than the one before
    for row in &rows[8..] {
        let ratio = row["ratio"].as_f64().unwrap();
        assert!(ratio < 1.0, "{row}");
    }
}

#[test]
fn too_deep_koch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["geometry", "--koch", "9"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the limit"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "nonsense"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["geometry", "--grid", "3by4"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["--mu", "-1", "verify", "identities"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["geometry", "--koch", "2", "--circle", "1"], dir.path()).status.code(), Some(2));
    let out = run(&["solve", "--jet", "missing.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));
}

#[test]
fn identities_suite_passes_with_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--lambda", "-0.2", "verify", "identities"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["pass"], true);
    assert_eq!(report["lambda"], -0.2);
    for c in report["checks"].as_array().unwrap() {
        assert!(!c["anchor"].as_str().unwrap().is_empty());
        assert_eq!(c["pass"], true, "{c}");
    }
    assert!(check(&report, "unit_identity")["measured"].as_f64().unwrap() < 1e-12);
}

#[test]
fn jumps_suite_reports_three_jets() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "jumps"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    for jet in ["one", "z", "z2"] {
        assert_eq!(check(&report, &format!("jump_f0_{jet}"))["pass"], true);
        assert_eq!(check(&report, &format!("jump_f1_{jet}"))["pass"], true);
    }
}

#[test]
fn growth_suite_fails_on_the_slow_derivative_decay() {
    // ∂z F of the z² jet's solution is 2α(|α*|+|β*|)/R = 0.02 at R = 100
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "growth"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let dz = check(&report, "dz_at_r100_z2");
    assert_eq!(dz["pass"], false);
    assert!((dz["measured"].as_f64().unwrap() - 0.02).abs() < 1e-9);
    assert_eq!(check(&report, "log_growth_z2")["pass"], true);
    assert_eq!(check(&report, "dz_at_r100_one")["pass"], true);

    let out = run(&["verify", "growth", "--tol", "dz_at_r100_z2=0.03"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(check(&json(&out), "dz_at_r100_z2")["tolerance"], 0.03);
}

#[test]
fn solve_constant_jet_on_circle() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--field", "const:1", "--segments", "512", "--grid", "9x9"];
    let a = run(&[&args[..], &["--out", "a"]].concat(), dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let report = json(&a);
    assert_eq!(report["method"], "cauchy_transform");
    assert!(report["jump"]["max_f0_residual"].as_f64().unwrap() <= 1e-2);
    assert_eq!(report["jump"]["probes"].as_array().unwrap().len(), 16);
    assert_eq!(report["growth"]["bounded"], true);

    // same config and seed, byte-identical files
    let b = run(&[&args[..], &["--out", "b"]].concat(), dir.path());
    assert_eq!(b.status.code(), Some(0));
    for f in ["field.csv", "residuals.json"] {
        let fa = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let fb = std::fs::read(dir.path().join("b").join(f)).unwrap();
        if f == "field.csv" {
            assert_eq!(fa, fb, "{f}");
        } else {
            // the reports differ only in the output path they name
            let strip = |v: Vec<u8>| String::from_utf8(v).unwrap().replace("\"b/", "\"a/");
            assert_eq!(strip(fa), strip(fb));
        }
    }
    // a different seed probes different segments
    let c = run(&[&args[..], &["--seed", "7"]].concat(), dir.path());
    assert_ne!(json(&c)["jump"]["probes"], report["jump"]["probes"]);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), r#"{"lambda": -5.0, "mu": 1.0, "segments": 256}"#).unwrap();
    // λ = -5 with μ = 1 is not an admissible material
    assert_eq!(run(&["--config", "run.json", "verify", "identities"], dir.path()).status.code(), Some(2));
    let out = run(&["--config", "run.json", "--lambda", "2", "verify", "identities"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["lambda"], 2.0);
    std::fs::write(dir.path().join("bad.json"), r#"{"lambda": 1.0, "colour": "red"}"#).unwrap();
    assert_eq!(run(&["--config", "bad.json", "verify", "identities"], dir.path()).status.code(), Some(2));
}

#[test]
fn jet_make_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["jet", "make", "--field", "z2", "--segments", "256", "--out", "j"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dir.path().join("j/jet.csv")).unwrap().lines().count(), 257);
    let out = run(&["jet", "check", "--jet", "j/jet.csv", "--segments", "256"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["valid"], true);
    // the jet file belongs to a 256-gon
    assert_eq!(run(&["jet", "check", "--jet", "j/jet.csv"], dir.path()).status.code(), Some(2));
    // conj(z) with its derivatives is affine in z̄, hence a valid jet
    let out = run(&["jet", "check", "--field", "monomial:0,1", "--segments", "256"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn operator_grids_tag_regions() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["teodorescu", "--segments", "256", "--depth", "7", "--grid", "7x7", "--out", "t"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let field = json(&out)["field"].clone();
    let csv = std::fs::read_to_string(dir.path().join("t/teodorescu.csv")).unwrap();
    assert_eq!(csv.lines().count() as u64, field["points"].as_u64().unwrap() + 1);
    assert!(csv.contains(",inside,") && csv.contains(",outside,"));

    let out = run(&["cauchy-transform", "--field", "const:1", "--segments", "256", "--grid", "7x7"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let field = &json(&out)["field"];
    assert!((field["max_abs_inside"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(field["max_abs_outside"].as_f64().unwrap() < 1e-6);
}

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn shadowkink(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowkink"))
        .args(args)
        .current_dir(dir)
        .env_remove("SHADOWKINK_JOBS")
        .output()
        .unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn listed_files(m: &Value) -> BTreeSet<String> {
    m["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

fn files_on_disk(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

fn base(dir: &Path) {
    fs::write(dir.join("base.cfg"), "# test problem\nepsilon = 0.05\na = 1.0\nchi = 0.5\n").unwrap();
}

#[test]
fn minimize_writes_profile_report_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let out = shadowkink(tmp.path(), &["minimize", "--config", "base.cfg", "--out", "runs/k1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = tmp.path().join("runs/k1");
    let m = manifest(&run);
    assert_eq!(m["command"], "minimize");
    assert_eq!(m["config_path"], "base.cfg");
    assert_eq!(m["converged"], true);
    assert_eq!(m["parameters"]["epsilon"], 0.05);
    assert_eq!(listed_files(&m), files_on_disk(&run));
    let profile = fs::read_to_string(run.join("profile.csv")).unwrap();
    assert!(profile.starts_with("x,v\n"));
    assert!(!profile.contains('\r'));
    let report: Value = serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert!(report["residual_inf"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["sign_changes"], 1);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    for out in ["r1", "r2"] {
        let o = shadowkink(
            tmp.path(),
            &["minimize", "--config", "base.cfg", "--seed", "11", "--out", out],
        );
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["profile.csv", "report.json"] {
        let a = fs::read(tmp.path().join("r1").join(f)).unwrap();
        let b = fs::read(tmp.path().join("r2").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn sweep_rows_do_not_depend_on_the_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let sweep = |out: &str, jobs: &str| {
        let o = shadowkink(
            tmp.path(),
            &[
                "sweep", "--param", "a", "--from", "0", "--to", "3", "--steps", "7", "--config", "base.cfg", "--jobs",
                jobs, "--out", out,
            ],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(tmp.path().join(out).join("sweep.csv")).unwrap()
    };
    let serial = sweep("s1", "1");
    let parallel = sweep("s4", "4");
    assert_eq!(serial, parallel);
    let lines: Vec<&str> = serial.lines().collect();
    assert_eq!(lines[0], "a,xbar,E,Erenorm,K_bound");
    assert_eq!(lines.len(), 8);
    let first: Vec<f64> = lines.iter().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(first.windows(2).all(|w| w[1] > w[0]));
    let m = manifest(&tmp.path().join("s4"));
    assert_eq!(m["parameters"]["sweep"]["jobs"], 4);
    assert_eq!(listed_files(&m), files_on_disk(&tmp.path().join("s4")));
}

#[test]
fn jobs_fall_back_to_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let o = Command::new(env!("CARGO_BIN_EXE_shadowkink"))
        .args(["sweep", "--param", "epsilon", "--from", "0.1", "--to", "0.05", "--steps", "2", "--geometric"])
        .args(["--config", "base.cfg", "--out", "s"])
        .current_dir(tmp.path())
        .env("SHADOWKINK_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&tmp.path().join("s"));
    assert_eq!(m["parameters"]["sweep"]["jobs"], 3);
    let csv = fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap();
    assert!(csv.starts_with("epsilon,xbar,E,Erenorm,K_bound\n"));
}

#[test]
fn continuation_sweep_runs() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let o = shadowkink(
        tmp.path(),
        &["sweep", "--param", "a", "--from", "0", "--to", "1", "--steps", "3", "--continuation", "--config", "base.cfg", "--out", "c"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(&tmp.path().join("c"))["parameters"]["sweep"]["continuation"], true);
}

#[test]
fn painleve_writes_solution_and_floor() {
    let tmp = tempfile::tempdir().unwrap();
    let o = shadowkink(
        tmp.path(),
        &["painleve", "--alpha", "-0.5", "--branch", "positive", "--out", "runs/p1"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run = tmp.path().join("runs/p1");
    let csv = fs::read_to_string(run.join("pii.csv")).unwrap();
    assert!(csv.starts_with("s,y,theta\n"));
    assert_eq!(csv.lines().count(), 4802);
    let report: Value = serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert!(report["second_variation_floor"].as_f64().unwrap() > 0.0);
    let m = manifest(&run);
    assert_eq!(m["config_path"], Value::Null);
    assert_eq!(listed_files(&m), files_on_disk(&run));
}

#[test]
fn thresholds_and_compare_emit_json_records() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let o = shadowkink(tmp.path(), &["thresholds", "--config", "base.cfg", "--out", "t"]);
    assert_eq!(o.status.code(), Some(0));
    let t: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("t/thresholds.json")).unwrap()).unwrap();
    for key in ["a_lower", "a_upper", "argmin_x", "argmax_x"] {
        assert!(t[key].is_f64(), "{key}");
    }
    let o = shadowkink(
        tmp.path(),
        &["compare", "--config", "base.cfg", "--a", "0", "--target", "pii", "--out", "c"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run = tmp.path().join("c");
    let c: Value = serde_json::from_str(&fs::read_to_string(run.join("comparison.json")).unwrap()).unwrap();
    assert_eq!(c["target"], "pii");
    assert_eq!(c["branch"], "hm");
    assert!(c["sup_error"].as_f64().unwrap().is_finite());
    assert_eq!(listed_files(&manifest(&run)), files_on_disk(&run));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let o = shadowkink(
        tmp.path(),
        &[
            "thresholds", "--config", "base.cfg", "--set", "epsilon=0.04", "--set", "chi=0.4", "--epsilon", "0.03",
            "--out", "t",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&tmp.path().join("t"));
    assert_eq!(m["parameters"]["epsilon"], 0.03);
    assert_eq!(m["parameters"]["chi"], 0.4);
    assert_eq!(m["parameters"]["a"], 1.0);
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.cfg"), "epsilon = 0.05\nsolver.tolerance = 1\n").unwrap();
    let o = shadowkink(tmp.path(), &["minimize", "--config", "bad.cfg", "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solver.tolerance"));

    fs::write(tmp.path().join("f.csv"), "x,value\n0,0\n1,zz\n").unwrap();
    fs::write(tmp.path().join("custom.cfg"), "f = file:f.csv\n").unwrap();
    let o = shadowkink(tmp.path(), &["minimize", "--config", "custom.cfg", "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`f`") && err.contains("row 3"), "{err}");

    let o = shadowkink(tmp.path(), &["minimize", "--a", "-1", "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`a`"));

    let o = shadowkink(tmp.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn no_convergence_exits_two_with_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let o = shadowkink(
        tmp.path(),
        &[
            "minimize", "--config", "base.cfg", "--set", "solver.max_flow=1", "--set", "solver.max_newton=1", "--out",
            "nc",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let run = tmp.path().join("nc");
    let m = manifest(&run);
    assert_eq!(m["converged"], false);
    assert_eq!(listed_files(&m), files_on_disk(&run));
    assert!(run.join("profile.csv").exists());
    let report: Value = serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], false);
}

#[test]
fn coarse_grid_is_only_a_warning() {
    let tmp = tempfile::tempdir().unwrap();
    base(tmp.path());
    let o = shadowkink(tmp.path(), &["minimize", "--config", "base.cfg", "--grid-n", "121", "--out", "g"]);
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&tmp.path().join("g"));
    assert!(m["warnings"][0].as_str().unwrap().contains("grid.n"));
}

#[test]
fn tabulated_profiles_reproduce_the_builtin_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let table = |g: &dyn Fn(f64) -> f64| {
        let mut s = String::from("x,value\n");
        for i in 0..=4000 {
            let x = -5.0 + 10.0 * i as f64 / 4000.0;
            s.push_str(&format!("{x:.17e},{:.17e}\n", g(x)));
        }
        s
    };
    fs::write(tmp.path().join("mu.csv"), table(&|x| (-x * x).exp() - 0.5)).unwrap();
    fs::write(tmp.path().join("f.csv"), table(&|x| x * (-x * x).exp())).unwrap();
    fs::write(tmp.path().join("custom.cfg"), "epsilon = 0.05\na = 1\nmu = file:mu.csv\nf = file:f.csv\n").unwrap();
    base(tmp.path());
    for (cfg, out) in [("custom.cfg", "c"), ("base.cfg", "b")] {
        let o = shadowkink(tmp.path(), &["minimize", "--config", cfg, "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let energy = |out: &str| {
        let r: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join(out).join("report.json")).unwrap()).unwrap();
        r["e_total"].as_f64().unwrap()
    };
    assert!((energy("c") - energy("b")).abs() < 1e-6);
    // |f(4)| is about 5e-7, above the boundary tolerance
    let m = manifest(&tmp.path().join("c"));
    assert!(m["warnings"][0].as_str().unwrap().contains("truncation boundary"));
}

#[test]
fn help_explains_precedence_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = shadowkink(tmp.path(), &["minimize", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("later wins"));
    assert!(text.contains("Exit codes"));
}

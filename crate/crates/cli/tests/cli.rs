use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn adjzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adjzeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Drop the wall-clock fields, which are the only ones allowed to vary.
fn without_timings(mut v: Value) -> Value {
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("seconds");
    }
    v
}

#[test]
fn structure_battery_passes_with_sorted_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = adjzeta(&["structure", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], true);
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["commutators", "adjoint_action", "algebra"]);
    for c in v["checks"].as_array().unwrap() {
        assert!(!c["anchor"].as_str().unwrap().is_empty());
    }
    // parsed maps are sorted, so re-emitting must reproduce the file byte for byte
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Value> = ["1", "2"]
        .iter()
        .map(|tag| {
            let path = dir.path().join(format!("{tag}.json"));
            let out = adjzeta(&["orbits", "--seed", "99", "--report", path.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0));
            without_timings(read_report(&path))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0]["config"]["seed"], 99);
}

#[test]
fn threads_do_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("{threads}.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_adjzeta"))
            .args(["iwasawa", "--report", path.to_str().unwrap()])
            .env("ADJZETA_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        runs.push(without_timings(read_report(&path)));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(adjzeta(&["frobnicate"]).status.code(), Some(2));
    let out = adjzeta(&["unramified", "--satake", "2,3,1/4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("multiply to 1"));
    assert_eq!(adjzeta(&["unramified", "--p", "4"]).status.code(), Some(2));
    assert_eq!(adjzeta(&["iwasawa", "--tolerance", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(adjzeta(&["arch", "--u", "0.1,0.2"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_adjzeta"))
        .arg("structure")
        .env("ADJZETA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_exits_1_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = adjzeta(&["iwasawa", "--tolerance", "iwasawa=1e-300", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = read_report(&path);
    assert_eq!(v["pass"], false);
    assert_eq!(v["config"]["tolerances"]["iwasawa.tolerance"], 1e-300);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let path = dir.path().join("r.json");
    std::fs::write(
        &cfg,
        format!("# orbit run\nseed = 7\ndegree = 6\nreport = {}\ntolerance.iwasawa = 1e-9\n", path.display()),
    )
    .unwrap();
    let out = adjzeta(&["orbits", "--config", cfg.to_str().unwrap(), "--degree", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = read_report(&path);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["config"]["degree"], 9);
    assert_eq!(v["config"]["tolerances"]["iwasawa.tolerance"], 1e-9);

    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(adjzeta(&["orbits", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn quasibeta_modes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let base = ["quasibeta", "--a1", "0.3,0.1", "--b1", "-0.2,0.4", "--b2", "1", "--c1", "0.5,-0.3", "--report", p];

    // inside the convergent region both modes agree
    let mut vals = Vec::new();
    for mode in ["direct", "continue"] {
        let mut args = base.to_vec();
        args.extend(["--mode", mode, "--s", "1.2,0.3"]);
        assert_eq!(adjzeta(&args).status.code(), Some(0), "{mode}");
        let r = &read_report(&path)["checks"][0]["witness"]["result"];
        vals.push((r["re"].as_f64().unwrap(), r["im"].as_f64().unwrap()));
    }
    let gap = ((vals[0].0 - vals[1].0).powi(2) + (vals[0].1 - vals[1].1).powi(2)).sqrt();
    assert!(gap < 1e-8 * vals[1].0.hypot(vals[1].1), "{vals:?}");

    // left of the abscissa only the continuation exists
    let mut args = base.to_vec();
    args.extend(["--mode", "direct", "--s", "-1.5,0.2"]);
    assert_eq!(adjzeta(&args).status.code(), Some(1));
    assert!(read_report(&path)["checks"][0]["witness"]["result"]["error"].is_string());
    let mut args = base.to_vec();
    args.extend(["--mode", "continue", "--s", "-1.5,0.2"]);
    assert_eq!(adjzeta(&args).status.code(), Some(0));

    // radial pole at s = −a1 − 1, order a2 + 1
    let mut args = base.to_vec();
    args.extend(["--mode", "poles", "--window", "-1.5,-1.1,-0.2,0"]);
    assert_eq!(adjzeta(&args).status.code(), Some(0));
    let poles = read_report(&path)["checks"][0]["witness"]["result"]["poles"].clone();
    let hit = poles.as_array().unwrap().iter().any(|q| {
        let z = &q["location"];
        (z[0].as_f64().unwrap() + 1.3).abs() < 1e-12 && (z[1].as_f64().unwrap() + 0.1).abs() < 1e-12
    });
    assert!(hit, "{poles}");
}

#[test]
fn all_with_defaults_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("all.json");
    let out = adjzeta(&["all", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_report(&path);
    assert_eq!(v["checks"].as_array().unwrap().len(), 10);
    assert_eq!(v["command"], "all");
}

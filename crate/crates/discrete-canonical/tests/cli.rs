use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_discrete-canonical"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("discrete-canonical-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn manifest(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn psi_table_format_and_determinism() {
    let dir = scratch("psi");
    let out = dir.join("psi.csv");
    let out_s = out.to_str().unwrap();
    let status = run(&["psi-table", "--qmax", "2", "--step", "0.125", "--out", out_s]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let first = fs::read_to_string(&out).unwrap();
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("q,psi"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (q, v) = l.split_once(',').unwrap();
            let digits = v.trim_start_matches('-').replace('.', "");
            let mantissa = digits.split(['e', 'E']).next().unwrap().trim_start_matches('0');
            assert!(mantissa.len() <= 17, "too many digits: {v}");
            (q.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 33);
    assert_eq!(rows[16].0, 0.0);
    assert!((rows[16].1 - 1.0).abs() < 1e-12);

    run(&["psi-table", "--qmax", "2", "--step", "0.125", "--out", out_s]);
    assert_eq!(fs::read_to_string(&out).unwrap(), first);

    let sidecar = manifest(&dir.join("psi.json"));
    assert_eq!(sidecar["quadrature_nodes"], 3768);
    let m = manifest(&dir.join("psi.csv.manifest.json"));
    assert_eq!(m["subcommand"], "psi-table");
    let outputs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(outputs.iter().any(|o| o.ends_with("psi.csv")) && outputs.iter().any(|o| o.ends_with("psi.json")));
    let keys: Vec<&String> = m.as_object().unwrap().keys().collect();
    for key in ["subcommand", "parameters", "tool_version", "tolerances", "outputs"] {
        assert!(keys.iter().any(|k| *k == key), "missing {key}");
    }
}

#[test]
fn evolve_returns_after_four_quarters() {
    let dir = scratch("evolve");
    let out = dir.join("evo.csv");
    let status = run(&["evolve", "--a", "2", "--b", "1", "--steps", "4", "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("step,Q,P,re,im\n"));
    let best = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[0] == "4")
        .max_by(|a, b| {
            let n = |f: &Vec<&str>| f[3].parse::<f64>().unwrap().hypot(f[4].parse::<f64>().unwrap());
            n(a).total_cmp(&n(b))
        })
        .unwrap();
    assert_eq!((best[1], best[2]), ("2", "1"));
    let m = manifest(&dir.join("evo.csv.manifest.json"));
    assert_eq!(m["parameters"]["final_dominant"]["Q"], 2);
    assert_eq!(m["parameters"]["final_dominant"]["P"], 1);
}

#[test]
fn validation_and_usage_errors_exit_two() {
    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));

    for args in [
        &["psi-table", "--step", "-1"][..],
        &["psi-table", "--qmax", "1", "--step", "0.3"],
        &["phi-grid", "--n", "1"],
        &["oscillator-spectrum", "--side", "4"],
        &["evolve", "--a", "50", "--b", "0"],
        &["acceptance", "--only", "13"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(stderr.trim_end().lines().count(), 1, "{args:?}: {stderr}");
        assert!(out.stdout.is_empty());
    }

    let threads = bin().env("DISCRETE_CANONICAL_THREADS", "zero").args(["phi-grid", "--n", "2"]).output().unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn thread_cap_does_not_change_output() {
    let capped = bin()
        .env("DISCRETE_CANONICAL_THREADS", "1")
        .args(["psi-table", "--qmax", "1", "--step", "0.25"])
        .output()
        .unwrap();
    let free = run(&["psi-table", "--qmax", "1", "--step", "0.25"]);
    assert!(capped.status.success() && free.status.success());
    assert_eq!(capped.stdout, free.stdout);
    // Without --out the manifest goes to stderr, once.
    let stderr = String::from_utf8_lossy(&free.stderr);
    assert_eq!(stderr.matches("\"subcommand\"").count(), 1);
}

#[test]
fn json_subcommands() {
    let dir = scratch("json");
    let spectrum_path = dir.join("spectrum.json");
    let out = run(&["oscillator-spectrum", "--side", "7", "--levels", "3", "--out", spectrum_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = manifest(&spectrum_path);
    assert_eq!(v["regularization"], "project_edge");
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 3);
    assert_eq!(v["window"]["q_max"], 3);

    let comm = dir.join("comm.json");
    let out = run(&["commutator-check", "--sides", "9,11", "--out", comm.to_str().unwrap()]);
    assert!(out.status.success());
    let v = manifest(&comm);
    let rows = v["residuals"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["side"], 11);
}

#[test]
fn table_subcommands() {
    let m = run(&["matrix-elements", "--operator", "a-q", "--half", "1"]);
    assert!(m.status.success());
    let text = String::from_utf8(m.stdout).unwrap();
    assert!(text.starts_with("Q1,P1,Q2,P2,re,im\n"));
    assert_eq!(text.lines().count(), 1 + 81);
    assert!(text.contains("\n0,0,0,1,0,1\n"));

    let legacy = String::from_utf8(run(&["legacy-curves", "--xmax", "1", "--step", "0.5"]).stdout).unwrap();
    assert!(legacy.starts_with("scheme,space,x,re,im\n"));
    for scheme in ["naive,q,", "naive,p,", "symmetric,q,", "symmetric,p,"] {
        assert_eq!(legacy.matches(scheme).count(), 5);
    }

    let grid = String::from_utf8(run(&["phi-grid", "--n", "4"]).stdout).unwrap();
    assert!(grid.starts_with("eta,xi,r,phi\n"));
    assert_eq!(grid.lines().count(), 17);
}

#[test]
fn acceptance_subset_prints_verdict_lines() {
    let out = run(&["acceptance", "--suite", "primary", "--only", "1,12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("C1  PASS"));
    assert!(lines[1].starts_with("C12 PASS"));
}

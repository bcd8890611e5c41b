use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const PLANT: &str = r#"{"n":2,"A":[[0.5,1],[0,0.3]],"B":[0,1],"C":[1,0],"D":0,"domain":"dt"}"#;
const ROTATION: &str = r#"{"Sg":[[0,1],[-1,0]],"Lg":[1,0],"w0":[1,0],"domain":"dt"}"#;

fn sigfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigfl"))
        .args(args)
        .env_remove("SIGFL_RANK_TOL")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn pe_order_prints_integer() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.csv", "u\n1\n0\n-1\n0\n1\n");
    let out = sigfl(&["pe-order", "--in", s(&u)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2\n");
}

#[test]
fn malformed_csv_exits_2() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.csv", "u\n1\nnope\n");
    let out = sigfl(&["pe-order", "--in", s(&u)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a number"));
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        sigfl(&["pe-order", "--in", s(&missing)]).status.code(),
        Some(2)
    );
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    let plant = write(&dir, "p.json", r#"{"n":2,"A":[[1]]}"#);
    let traj = write(&dir, "t.csv", "u,y\n1,1\n2,2\n");
    let out = sigfl(&[
        "informativity",
        "--plant",
        s(&plant),
        "--traj",
        s(&traj),
        "--L",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(sigfl(&["corollary2"]).status.code(), Some(2));
    assert_eq!(sigfl(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn assumption_violation_exits_3() {
    let dir = TempDir::new().unwrap();
    let plant = write(&dir, "p.json", PLANT);
    let gen = write(
        &dir,
        "g.json",
        r#"{"Sg":[[0.5]],"Lg":[1],"w0":[1],"domain":"dt"}"#,
    );
    let out = sigfl(&["sylvester", "--plant", s(&plant), "--generator", s(&gen)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn precondition_exits_2() {
    let out = sigfl(&[
        "theorem1-mc",
        "--n",
        "3",
        "--ng",
        "2",
        "--L",
        "4",
        "--trials",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_then_informativity() {
    let dir = TempDir::new().unwrap();
    let plant = write(&dir, "p.json", PLANT);
    let gen = write(&dir, "g.json", ROTATION);
    let traj = dir.path().join("traj.csv");
    let out = sigfl(&[
        "simulate",
        "--plant",
        s(&plant),
        "--generator",
        s(&gen),
        "--T",
        "8",
        "--x0",
        "1,-1",
        "--out",
        s(&traj),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&traj).unwrap();
    assert!(text.starts_with("u,y\n1,1\n"));
    assert_eq!(text.lines().count(), 9);

    let out = sigfl(&[
        "informativity",
        "--plant",
        s(&plant),
        "--traj",
        s(&traj),
        "--L",
        "2",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["informative"], true);
    assert_eq!(v["rank_required"], 4);

    let out = sigfl(&[
        "informativity",
        "--assumed-n",
        "2",
        "--traj",
        s(&traj),
        "--L",
        "2",
    ]);
    assert_eq!(json(&out)["rank_achieved"], 4);
}

#[test]
fn realize_round_trip() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.csv", "u\n1\n0\n-1\n0\n1\n0\n");
    let out = sigfl(&["realize", "--in", s(&u)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["Sg"].as_array().unwrap().len(), 2);
    assert_eq!(v["w0"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn sylvester_export() {
    let dir = TempDir::new().unwrap();
    let plant = write(&dir, "p.json", PLANT);
    let gen = write(&dir, "g.json", ROTATION);
    let out = sigfl(&[
        "sylvester",
        "--plant",
        s(&plant),
        "--generator",
        s(&gen),
        "--x0",
        "1,-1",
        "--L",
        "2",
        "--T",
        "8",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["analysis"]["sylvester_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["analysis"]["Pi"].as_array().unwrap().len(), 2);
    assert_eq!(v["theorem"]["case_label"], "B");
    assert_eq!(v["analysis"]["e2"]["member"], false);
}

#[test]
fn corollary2_summary() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("trials.csv");
    let out = sigfl(&[
        "corollary2",
        "--n",
        "3",
        "--trials",
        "100",
        "--seed",
        "7",
        "--csv",
        s(&csv),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let summary = &v["arms"][0]["summary"];
    assert_eq!(summary["trials"], 100);
    assert!(summary["successes"].as_u64().unwrap() >= 99);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 101);
}

#[test]
fn no_timing_is_deterministic() {
    let args = [
        "lemma2-mc",
        "--T",
        "4,5",
        "--trials",
        "20",
        "--seed",
        "9",
        "--no-timing",
    ];
    let a = sigfl(&args);
    let b = sigfl(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("wall_time_s").is_none());
}

#[test]
fn tolerance_sources() {
    let out = Command::new(env!("CARGO_BIN_EXE_sigfl"))
        .args(["lemma2-mc", "--T", "3", "--trials", "1"])
        .env("SIGFL_RANK_TOL", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        sigfl(&["--tol", "-1", "lemma2-mc", "--T", "3"])
            .status
            .code(),
        Some(2)
    );
    let out = sigfl(&["--tol", "1e-6", "lemma2-mc", "--T", "3", "--trials", "1"]);
    assert_eq!(json(&out)["config"]["tolerance"], 1e-6);
}

#[test]
fn ct_jets_csv() {
    let dir = TempDir::new().unwrap();
    let jets = dir.path().join("jets.csv");
    let out = sigfl(&[
        "ct-informativity",
        "--n",
        "2",
        "--ng",
        "3",
        "--L",
        "3",
        "--trials",
        "5",
        "--jets",
        s(&jets),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&jets).unwrap();
    assert!(text.starts_with("t,u0,u1,u2,y0,y1,y2\n"));
    assert_eq!(text.lines().count(), 8);
    assert_eq!(json(&out)["arms"][0]["name"], "case-b");
}
